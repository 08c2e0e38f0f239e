#pragma once
#include <chrono>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace blicket {

struct ChatMessage {
    std::string role;  // system | user | assistant
    std::string content;
};

struct TokenUsage {
    long prompt_tokens = 0;
    long completion_tokens = 0;
};

struct ChatReply {
    std::string text;
    std::optional<TokenUsage> usage;
};

// Reply length: provider-reported completion tokens when present, else
// character count (from_usage records which was used).
struct ReplyLength {
    long value = 0;
    bool from_usage = false;
};

ReplyLength reply_length(const ChatReply& reply);

struct BackendConfig {
    std::string endpoint_url;
    std::string model_name;
    double temperature = 0.0;
    long max_output_tokens = 1024;
    std::string api_key_env_var;  // name of the variable, never the credential
    std::chrono::milliseconds request_timeout{30000};
    int max_retries = 3;
};

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    // Thread-safe. Throws BackendError (ReplayMismatchError for replay
    // integrity failures), ConfigError for missing credentials.
    virtual ChatReply complete(const std::vector<ChatMessage>& messages) = 0;
};

// The exact JSON body POSTed to {endpoint_url}/chat/completions; also the
// input of the request hash used by the record/replay layer.
std::string canonical_request_body(const BackendConfig& config,
                                   const std::vector<ChatMessage>& messages);

std::unique_ptr<ChatBackend> make_http_backend(const BackendConfig& config);

// One scripted reply. Entries with a matcher are persistent routing rules
// (substring test against the last message's content, checked in order);
// entries without one form a queue consumed front to back when no rule
// matches. An exhausted script raises BackendError.
struct ScriptEntry {
    std::optional<std::string> matcher;
    std::string reply;
};

std::unique_ptr<ChatBackend> make_scripted_backend(std::vector<ScriptEntry> script);

// Wraps another backend and appends one JSONL record per completed call:
// {request_hash, messages, reply, usage, timestamp}.
std::unique_ptr<ChatBackend> make_recording_backend(std::unique_ptr<ChatBackend> inner,
                                                    const BackendConfig& config,
                                                    const std::string& record_path);

// Serves recorded replies in order, matching each request by hash; a
// mismatch or an exhausted log raises ReplayMismatchError. No network.
std::unique_ptr<ChatBackend> make_replay_backend(const BackendConfig& config,
                                                 const std::string& record_path);

// Factory over a JSON document: {"kind": "http"|"scripted"|"replay", ...}.
// http fields mirror BackendConfig (endpoint_url, model_name, temperature,
// max_output_tokens, api_key_env_var, request_timeout_ms, max_retries) plus
// optional "record_path"; scripted takes "replies" (queue) and "rules"
// ([{contains, reply}]); replay takes "record_path" plus the wire fields the
// recording was made with.
std::unique_ptr<ChatBackend> make_backend_from_json(const std::string& json_text);

}
