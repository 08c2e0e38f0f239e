#pragma once
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "blicket/agents.hpp"
#include "blicket/backend.hpp"
#include "blicket/env.hpp"
#include "blicket/hypothesis.hpp"
#include "blicket/prompts.hpp"

namespace blicket {

enum class AgentKind { Oracle, Random, CountBased, Chat, Sampling };

std::string agent_kind_name(AgentKind kind);
std::optional<AgentKind> agent_kind_from_name(const std::string& name);

struct TrialConfig {
    int num_objects = 3;
    int num_blickets = 2;
    Rule rule = Rule::Disjunctive;
    int horizon = 32;
    SystemMessageVariant system_message_variant = SystemMessageVariant::HumanDefault;
    PromptingStyle prompting_style = PromptingStyle::Default;
    AgentKind agent_kind = AgentKind::Oracle;
    std::uint64_t seed = 0;
    TakePhrasing render_style = TakePhrasing::OffThe;
    LabelScheme labels = LabelScheme::Digits;
    OpeningVariant opening = OpeningVariant::Standard;
    bool qa_enabled = true;
    bool count_deterministic = false;
    std::size_t sampling_target = 16;
    int sampling_call_budget = 3;
    int parse_retries = 2;
    std::string backend_json;  // backend config document, empty when none
};

struct QaResult {
    std::optional<bool> answer;  // nullopt = unparseable, counted wrong
    bool correct = false;
};

struct TrialRecord {
    TrialConfig config;
    std::uint32_t ground_truth_mask = 0;
    Rule ground_truth_rule = Rule::Disjunctive;
    std::uint32_t initial_placement = 0;
    bool initial_light = false;
    std::vector<Event> events;
    std::vector<Observation> observation_pairs;        // [0] = initial observation
    std::vector<std::size_t> per_step_support_size;    // [0] = after initial observation
    std::vector<QaResult> qa;
    bool all_correct = false;
    AgentCallLog agent_log;
    std::string transcript;
    std::vector<Hypothesis> sampling_active;            // sampling agent only
    std::vector<Hypothesis> sampling_eliminated;        // sampling agent only
    bool complete = true;
    std::string error;
    std::chrono::milliseconds duration{0};  // in-memory only, never persisted
};

// All-or-nothing scoring plus the per-object vector.
std::pair<bool, std::vector<bool>> score_qa(const std::vector<bool>& answers,
                                            const std::vector<bool>& ground_mask);

// Runs one trial with an agent built from the config (backend required for
// chat/sampling kinds). Backend failures mark the record incomplete instead
// of unwinding, so partial work is still persisted by the caller.
TrialRecord run_trial(const TrialConfig& config, const HypothesisSpace& space,
                      ChatBackend* backend);

// Same lifecycle with a caller-supplied agent (tests, replays).
TrialRecord run_trial_with_agent(const TrialConfig& config, const HypothesisSpace& space,
                                 Agent& agent);

// Re-executes a record's action sequence against a fresh environment built
// from its ground truth; the agent log is carried over verbatim (it is
// backend output, not recomputable offline).
TrialRecord replay_trial(const TrialRecord& source, const HypothesisSpace& space);

// Exploration-only trajectories (Q&A disabled) for inference-time studies.
std::vector<TrialRecord> generate_standardized_data(AgentKind source, TrialConfig base,
                                                    const std::vector<std::uint64_t>& seeds,
                                                    ChatBackend* backend);

// One trial per seed against a shared backend, in seed order.
std::vector<TrialRecord> run_batch(const TrialConfig& base,
                                   const std::vector<std::uint64_t>& seeds,
                                   ChatBackend* backend);

std::string record_to_json_line(const TrialRecord& record);
TrialRecord record_from_json_line(const std::string& line);

// TrialConfig as a standalone JSON document (the config-file format).
std::string trial_config_to_json_string(const TrialConfig& config);
TrialConfig trial_config_from_json_string(const std::string& text);

void write_records(const std::string& path, const std::vector<TrialRecord>& records);
std::vector<TrialRecord> read_records(const std::string& path);

}
