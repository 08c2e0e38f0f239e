#include "blicket/backend.hpp"

#include <cstdlib>
#include <ctime>
#include <deque>
#include <fstream>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "blicket/digest.hpp"
#include "blicket/errors.hpp"

namespace blicket {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

ReplyLength reply_length(const ChatReply& reply) {
    if (reply.usage) return ReplyLength{reply.usage->completion_tokens, true};
    return ReplyLength{static_cast<long>(reply.text.size()), false};
}

std::string canonical_request_body(const BackendConfig& config,
                                   const std::vector<ChatMessage>& messages) {
    json body;
    body["model"] = config.model_name;
    json msgs = json::array();
    for (const ChatMessage& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
    body["messages"] = msgs;
    body["temperature"] = config.temperature;
    body["max_tokens"] = config.max_output_tokens;
    return body.dump();
}

namespace {

std::string iso_timestamp() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::optional<TokenUsage> parse_usage(const json& j) {
    if (!j.contains("usage") || !j["usage"].is_object()) return std::nullopt;
    const json& u = j["usage"];
    TokenUsage usage;
    usage.prompt_tokens = u.value("prompt_tokens", 0L);
    usage.completion_tokens = u.value("completion_tokens", 0L);
    return usage;
}

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string prefix;  // path prefix, possibly empty
};

Endpoint split_endpoint(const std::string& url) {
    std::size_t scheme = url.find("://");
    if (scheme == std::string::npos) throw ConfigError("endpoint_url must include a scheme");
    std::size_t path = url.find('/', scheme + 3);
    Endpoint ep;
    if (path == std::string::npos) {
        ep.origin = url;
    } else {
        ep.origin = url.substr(0, path);
        ep.prefix = url.substr(path);
        while (!ep.prefix.empty() && ep.prefix.back() == '/') ep.prefix.pop_back();
    }
    return ep;
}

class HttpBackend : public ChatBackend {
public:
    explicit HttpBackend(BackendConfig config) : config_(std::move(config)) {
        if (config_.request_timeout.count() <= 0) throw ConfigError("request_timeout must be positive");
        if (config_.max_retries < 0) throw ConfigError("max_retries must be nonnegative");
    }

    ChatReply complete(const std::vector<ChatMessage>& messages) override {
        if (messages.empty()) throw BackendError("empty message list");
        const char* key = nullptr;
        if (!config_.api_key_env_var.empty()) {
            key = std::getenv(config_.api_key_env_var.c_str());
            if (!key || !*key)
                throw ConfigError("environment variable " + config_.api_key_env_var +
                                  " is not set");
        }
        Endpoint ep = split_endpoint(config_.endpoint_url);
        std::string body = canonical_request_body(config_, messages);
        std::string path = ep.prefix + "/chat/completions";

        std::string last_failure = "no attempt made";
        for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
            if (attempt > 0) {
                auto wait = std::chrono::milliseconds(250) * (1 << std::min(attempt - 1, 4));
                std::this_thread::sleep_for(std::min(wait, std::chrono::milliseconds(4000)));
            }
            httplib::Client client(ep.origin);
            client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(
                config_.request_timeout));
            client.set_read_timeout(config_.request_timeout);
            client.set_write_timeout(config_.request_timeout);
            httplib::Headers headers;
            if (key) headers.emplace("Authorization", std::string("Bearer ") + key);
            auto res = client.Post(path, headers, body, "application/json");
            if (!res) {
                last_failure = "network failure: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status == 429 || res->status >= 500) {
                last_failure = "http status " + std::to_string(res->status);
                continue;
            }
            if (res->status < 200 || res->status >= 300)
                throw BackendError("http status " + std::to_string(res->status) + ": " + res->body);
            return parse_reply(res->body);
        }
        throw BackendError("retries exhausted: " + last_failure);
    }

private:
    static ChatReply parse_reply(const std::string& payload) {
        json j = json::parse(payload, nullptr, false);
        if (j.is_discarded()) throw BackendError("response is not valid JSON");
        if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty())
            throw BackendError("response has no choices");
        const json& msg = j["choices"][0];
        if (!msg.contains("message") || !msg["message"].contains("content") ||
            !msg["message"]["content"].is_string())
            throw BackendError("response has no message content");
        ChatReply reply;
        reply.text = msg["message"]["content"].get<std::string>();
        reply.usage = parse_usage(j);
        return reply;
    }

    BackendConfig config_;
};

class ScriptedBackend : public ChatBackend {
public:
    explicit ScriptedBackend(std::vector<ScriptEntry> script) {
        for (ScriptEntry& e : script) {
            if (e.matcher)
                rules_.push_back(std::move(e));
            else
                queue_.push_back(std::move(e.reply));
        }
    }

    ChatReply complete(const std::vector<ChatMessage>& messages) override {
        if (messages.empty()) throw BackendError("empty message list");
        std::lock_guard<std::mutex> lock(mu_);
        const std::string& probe = messages.back().content;
        for (const ScriptEntry& rule : rules_)
            if (probe.find(*rule.matcher) != std::string::npos)
                return ChatReply{rule.reply, std::nullopt};
        if (queue_.empty()) throw BackendError("scripted backend exhausted");
        ChatReply reply{std::move(queue_.front()), std::nullopt};
        queue_.pop_front();
        return reply;
    }

private:
    std::mutex mu_;
    std::vector<ScriptEntry> rules_;
    std::deque<std::string> queue_;
};

class RecordingBackend : public ChatBackend {
public:
    RecordingBackend(std::unique_ptr<ChatBackend> inner, BackendConfig config, std::string path)
        : inner_(std::move(inner)), config_(std::move(config)), path_(std::move(path)) {
        std::ofstream out(path_, std::ios::trunc);
        if (!out) throw ConfigError("cannot open record file " + path_);
    }

    ChatReply complete(const std::vector<ChatMessage>& messages) override {
        ChatReply reply = inner_->complete(messages);
        ordered_json rec;
        rec["request_hash"] = sha256_hex(canonical_request_body(config_, messages));
        ordered_json msgs = ordered_json::array();
        for (const ChatMessage& m : messages)
            msgs.push_back({{"role", m.role}, {"content", m.content}});
        rec["messages"] = msgs;
        rec["reply"] = reply.text;
        if (reply.usage)
            rec["usage"] = {{"prompt_tokens", reply.usage->prompt_tokens},
                            {"completion_tokens", reply.usage->completion_tokens}};
        else
            rec["usage"] = nullptr;
        rec["timestamp"] = iso_timestamp();
        std::lock_guard<std::mutex> lock(mu_);
        std::ofstream out(path_, std::ios::app);
        out << rec.dump() << "\n";
        return reply;
    }

private:
    std::unique_ptr<ChatBackend> inner_;
    BackendConfig config_;
    std::string path_;
    std::mutex mu_;
};

class ReplayBackend : public ChatBackend {
public:
    ReplayBackend(BackendConfig config, const std::string& path) : config_(std::move(config)) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open record file " + path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            json j = json::parse(line, nullptr, false);
            if (j.is_discarded()) throw CorruptRecordError("record file has a malformed line");
            Entry e;
            e.request_hash = j.at("request_hash").get<std::string>();
            e.reply = j.at("reply").get<std::string>();
            e.usage = parse_usage(j);
            entries_.push_back(std::move(e));
        }
    }

    ChatReply complete(const std::vector<ChatMessage>& messages) override {
        std::string hash = sha256_hex(canonical_request_body(config_, messages));
        std::lock_guard<std::mutex> lock(mu_);
        if (pos_ >= entries_.size())
            throw ReplayMismatchError("replay log exhausted at request " + std::to_string(pos_));
        const Entry& e = entries_[pos_];
        if (e.request_hash != hash)
            throw ReplayMismatchError("request " + std::to_string(pos_) +
                                      " does not match the recorded hash");
        ++pos_;
        return ChatReply{e.reply, e.usage};
    }

private:
    struct Entry {
        std::string request_hash;
        std::string reply;
        std::optional<TokenUsage> usage;
    };
    BackendConfig config_;
    std::vector<Entry> entries_;
    std::size_t pos_ = 0;
    std::mutex mu_;
};

BackendConfig config_from_json(const json& j, const std::string& default_model) {
    BackendConfig config;
    config.endpoint_url = j.value("endpoint_url", std::string());
    config.model_name = j.value("model_name", default_model);
    config.temperature = j.value("temperature", 0.0);
    config.max_output_tokens = j.value("max_output_tokens", 0L);
    config.api_key_env_var = j.value("api_key_env_var", std::string());
    config.request_timeout = std::chrono::milliseconds(j.value("request_timeout_ms", 30000L));
    config.max_retries = static_cast<int>(j.value("max_retries", 3L));
    return config;
}

}  // namespace

std::unique_ptr<ChatBackend> make_http_backend(const BackendConfig& config) {
    return std::make_unique<HttpBackend>(config);
}

std::unique_ptr<ChatBackend> make_scripted_backend(std::vector<ScriptEntry> script) {
    return std::make_unique<ScriptedBackend>(std::move(script));
}

std::unique_ptr<ChatBackend> make_recording_backend(std::unique_ptr<ChatBackend> inner,
                                                    const BackendConfig& config,
                                                    const std::string& record_path) {
    return std::make_unique<RecordingBackend>(std::move(inner), config, record_path);
}

std::unique_ptr<ChatBackend> make_replay_backend(const BackendConfig& config,
                                                 const std::string& record_path) {
    return std::make_unique<ReplayBackend>(config, record_path);
}

std::unique_ptr<ChatBackend> make_backend_from_json(const std::string& json_text) {
    json j = json::parse(json_text, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw ConfigError("backend config is not a JSON object");
    std::string kind = j.value("kind", std::string());
    if (kind == "http") {
        BackendConfig config = config_from_json(j, "");
        if (config.endpoint_url.empty()) throw ConfigError("http backend needs endpoint_url");
        if (config.model_name.empty()) throw ConfigError("http backend needs model_name");
        if (config.max_output_tokens == 0) config.max_output_tokens = 1024;
        auto backend = make_http_backend(config);
        if (j.contains("record_path"))
            backend = make_recording_backend(std::move(backend), config,
                                             j["record_path"].get<std::string>());
        return backend;
    }
    if (kind == "scripted") {
        std::vector<ScriptEntry> script;
        if (j.contains("rules"))
            for (const json& r : j["rules"])
                script.push_back({r.at("contains").get<std::string>(),
                                  r.at("reply").get<std::string>()});
        if (j.contains("replies"))
            for (const json& r : j["replies"]) script.push_back({std::nullopt, r.get<std::string>()});
        auto backend = make_scripted_backend(std::move(script));
        if (j.contains("record_path"))
            backend = make_recording_backend(std::move(backend), config_from_json(j, "scripted"),
                                             j["record_path"].get<std::string>());
        return backend;
    }
    if (kind == "replay") {
        if (!j.contains("record_path")) throw ConfigError("replay backend needs record_path");
        return make_replay_backend(config_from_json(j, "scripted"),
                                   j["record_path"].get<std::string>());
    }
    throw ConfigError("unknown backend kind '" + kind + "'");
}

}
