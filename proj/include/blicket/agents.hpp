#pragma once
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "blicket/backend.hpp"
#include "blicket/env.hpp"
#include "blicket/hypothesis.hpp"
#include "blicket/rng.hpp"

namespace blicket {

struct AgentDecision {
    Action action;
    std::optional<std::string> rationale_text;  // verbatim backend output
    bool parse_fallback = false;                // LOOK substituted after failed parses
};

// One exploratory move maximizing expected information gain; EXIT once the
// support is resolved under truth-table equivalence. Ties break to the
// lowest object index. When every single toggle has zero gain but the
// support is unresolved (a plateau), the move starts the shortest toggle
// sequence toward a placement where survivors disagree, which strictly
// shrinks that distance each step and so cannot loop.
AgentDecision oracle_step(const Belief& belief, std::uint32_t placement);

// Uniform object + direction (PUT/TAKE). Never exits.
AgentDecision random_step(Rng& rng, std::uint32_t placement, int num_objects);

struct PerturbationCounts {
    std::vector<std::uint64_t> counts;
};

// Picks an object with probability proportional to 1/(1+count), or the
// lowest-count object when deterministic_min_count is set; toggles its
// placement and increments its count. Never exits.
AgentDecision count_based_step(PerturbationCounts& counts, std::uint32_t placement, Rng& rng,
                               bool deterministic_min_count);

struct StepContext {
    const EnvState& state;
    const Belief& belief;
    const std::vector<Observation>& history;  // includes the initial observation
    const std::string& transcript;
};

// Per-backend-call log the harness persists with the trial.
struct AgentCallLog {
    std::vector<std::string> raw_outputs;
    std::vector<long> reply_lengths;
    std::vector<bool> reply_length_from_usage;
    int parse_fallbacks = 0;
};

class Agent {
public:
    virtual ~Agent() = default;
    virtual AgentDecision decide(const StepContext& ctx) = 0;
    // Q&A for one object; nullopt = no parseable answer (counted wrong).
    virtual std::optional<bool> answer(const StepContext& ctx, int object) = 0;
};

std::unique_ptr<Agent> make_oracle_agent();
std::unique_ptr<Agent> make_random_agent(Rng& rng);
std::unique_ptr<Agent> make_count_agent(Rng& rng, int num_objects, bool deterministic_min_count);

struct ChatAgentConfig {
    std::string system_message;     // fully instantiated
    std::string style_instruction;  // per-turn prompting-style block
    int parse_retries = 2;
};

std::unique_ptr<Agent> make_chat_agent(const ChatAgentConfig& config, ChatBackend& backend,
                                       AgentCallLog& log);

// Replays a fixed action sequence (EXIT once exhausted) and fixed answers.
std::unique_ptr<Agent> make_replay_agent(std::vector<Action> actions,
                                         std::vector<std::optional<bool>> answers);

struct SamplingAgentState {
    std::vector<Hypothesis> active;      // consistent with all observations
    std::vector<Hypothesis> eliminated;  // sampled and ruled out
    std::size_t target_sample_count = 16;
};

struct SamplingAgentConfig {
    std::size_t target_sample_count = 16;
    int generation_call_budget = 3;  // backend calls per refill
    int parse_retries = 2;
};

// Hypothesis-sampling agent: maintains an explicit sampled hypothesis set,
// refills it from the backend when empty (without replacement against
// active + eliminated, inconsistent samples moved straight to eliminated),
// eliminates against history each step, exits when the active set can no
// longer be split (or a refill comes back empty, leaving the empty active
// set visible in the record).
class SamplingAgent : public Agent {
public:
    SamplingAgent(const SamplingAgentConfig& config, ChatBackend& backend, AgentCallLog& log);
    AgentDecision decide(const StepContext& ctx) override;
    std::optional<bool> answer(const StepContext& ctx, int object) override;

    const SamplingAgentState& state() const { return state_; }
    // Active-set size after each accepted sample, one list per refill round.
    const std::vector<std::vector<std::size_t>>& sampling_rounds() const {
        return sampling_rounds_;
    }
    // Entropy of the uniform distribution over the active set.
    static double active_entropy_bits(const SamplingAgentState& state);

private:
    void refill(const StepContext& ctx);
    void eliminate_inconsistent(const std::vector<Observation>& history);
    std::string backend_call(const std::string& prompt);

    SamplingAgentConfig config_;
    ChatBackend& backend_;
    AgentCallLog& log_;
    SamplingAgentState state_;
    std::vector<std::vector<std::size_t>> sampling_rounds_;
};

std::unique_ptr<SamplingAgent> make_sampling_agent(const SamplingAgentConfig& config,
                                                   ChatBackend& backend, AgentCallLog& log);

// True when every pair in the set shares a truth table (same mask and
// either same rule or a one-bit mask).
bool all_truth_table_equal(const std::vector<Hypothesis>& hypotheses);

// True when h predicts every recorded observation.
bool consistent_with_history(const Hypothesis& h, const std::vector<Observation>& history);

// "- placement [0,1,0] -> light on" per line; "(none)" when empty.
std::string render_observation_history(const std::vector<Observation>& history, int num_objects);

// Canonical HYP lines joined by newlines; "(none)" when empty.
std::string render_hypothesis_list(const std::vector<Hypothesis>& hypotheses, int num_objects);

}
