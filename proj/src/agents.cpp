#include "blicket/agents.hpp"

#include <bit>
#include <cmath>
#include <numeric>

#include "blicket/dsl.hpp"
#include "blicket/errors.hpp"
#include "blicket/prompts.hpp"

namespace blicket {

namespace {

Action toggle_action(std::uint32_t placement, int object) {
    bool on_machine = (placement >> object) & 1u;
    if (on_machine) return Action{ActionKind::Take, object, false};
    return Action{ActionKind::Put, object, false};
}

// Shortest toggle set reaching a placement where the support disagrees,
// enumerated in lexicographic combination order; returns its lowest index.
int nearest_disagreement_move(const Belief& belief, std::uint32_t placement) {
    int n = belief.space->num_objects;
    for (int d = 1; d <= n; ++d) {
        std::vector<int> comb(static_cast<std::size_t>(d));
        std::iota(comb.begin(), comb.end(), 0);
        for (;;) {
            std::uint32_t target = placement;
            for (int i : comb) target ^= 1u << i;
            if (support_disagrees_at(belief, target)) return comb[0];
            int k = d - 1;
            while (k >= 0 && comb[static_cast<std::size_t>(k)] == n - d + k) --k;
            if (k < 0) break;
            ++comb[static_cast<std::size_t>(k)];
            for (int j = k + 1; j < d; ++j)
                comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
    return 0;
}

}  // namespace

AgentDecision oracle_step(const Belief& belief, std::uint32_t placement) {
    if (truth_table_resolved(belief))
        return AgentDecision{Action{ActionKind::Exit, -1, false}, std::nullopt, false};
    int n = belief.space->num_objects;
    std::vector<std::uint32_t> candidates = candidate_next_states(placement, n);
    double best_gain = -1.0;
    int best_index = 0;
    for (int i = 0; i < n; ++i) {
        double g = expected_info_gain(belief, candidates[static_cast<std::size_t>(i)]);
        if (g > best_gain) {
            best_gain = g;
            best_index = i;
        }
    }
    if (best_gain <= 1e-12) best_index = nearest_disagreement_move(belief, placement);
    return AgentDecision{toggle_action(placement, best_index), std::nullopt, false};
}

AgentDecision random_step(Rng& rng, std::uint32_t placement, int num_objects) {
    int object = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(num_objects)));
    std::uint64_t dir = rng.bounded(2);
    (void)placement;
    if (dir == 0) return AgentDecision{Action{ActionKind::Put, object, false}, std::nullopt, false};
    return AgentDecision{Action{ActionKind::Take, object, false}, std::nullopt, false};
}

AgentDecision count_based_step(PerturbationCounts& counts, std::uint32_t placement, Rng& rng,
                               bool deterministic_min_count) {
    int n = static_cast<int>(counts.counts.size());
    int chosen = 0;
    if (deterministic_min_count) {
        for (int i = 1; i < n; ++i)
            if (counts.counts[static_cast<std::size_t>(i)] <
                counts.counts[static_cast<std::size_t>(chosen)])
                chosen = i;
    } else {
        double total = 0.0;
        for (int i = 0; i < n; ++i)
            total += 1.0 / (1.0 + static_cast<double>(counts.counts[static_cast<std::size_t>(i)]));
        double r = rng.real() * total;
        double cum = 0.0;
        chosen = n - 1;
        for (int i = 0; i < n; ++i) {
            cum += 1.0 / (1.0 + static_cast<double>(counts.counts[static_cast<std::size_t>(i)]));
            if (r < cum) {
                chosen = i;
                break;
            }
        }
    }
    counts.counts[static_cast<std::size_t>(chosen)] += 1;
    return AgentDecision{toggle_action(placement, chosen), std::nullopt, false};
}

namespace {

class OracleAgent : public Agent {
public:
    AgentDecision decide(const StepContext& ctx) override {
        return oracle_step(ctx.belief, ctx.state.placement);
    }
    std::optional<bool> answer(const StepContext& ctx, int object) override {
        return certain_blicket(ctx.belief, object);
    }
};

class RandomAgent : public Agent {
public:
    explicit RandomAgent(Rng& rng) : rng_(rng) {}
    AgentDecision decide(const StepContext& ctx) override {
        return random_step(rng_, ctx.state.placement, ctx.state.config.num_objects);
    }
    std::optional<bool> answer(const StepContext&, int) override {
        return rng_.bounded(2) == 1;
    }

private:
    Rng& rng_;
};

class CountAgent : public Agent {
public:
    CountAgent(Rng& rng, int num_objects, bool deterministic)
        : rng_(rng), deterministic_(deterministic) {
        counts_.counts.assign(static_cast<std::size_t>(num_objects), 0);
    }
    AgentDecision decide(const StepContext& ctx) override {
        return count_based_step(counts_, ctx.state.placement, rng_, deterministic_);
    }
    std::optional<bool> answer(const StepContext&, int) override {
        return rng_.bounded(2) == 1;
    }

private:
    Rng& rng_;
    PerturbationCounts counts_;
    bool deterministic_;
};

class ChatAgent : public Agent {
public:
    ChatAgent(const ChatAgentConfig& config, ChatBackend& backend, AgentCallLog& log)
        : config_(config), backend_(backend), log_(log) {}

    AgentDecision decide(const StepContext& ctx) override {
        std::vector<ChatMessage> messages{
            {"system", config_.system_message},
            {"user", ctx.transcript + "\n" + config_.style_instruction}};
        std::string last_reply;
        for (int attempt = 0; attempt <= config_.parse_retries; ++attempt) {
            last_reply = call(messages);
            ParseResult parsed = parse_command(last_reply, ctx.state.config.num_objects);
            if (parsed.status != ParseStatus::NoMatch)
                return AgentDecision{parsed.action, last_reply, false};
        }
        log_.parse_fallbacks += 1;
        return AgentDecision{Action{ActionKind::Look, -1, false}, last_reply, true};
    }

    std::optional<bool> answer(const StepContext& ctx, int object) override {
        std::string label = object_label(ctx.state.config.labels, object);
        std::string context =
            ctx.transcript +
            "\nBased on the information you have gathered, answer the following question: "
            "Is object " + label + " a blicket?\n\n"
            "Directly output the answer in the format '> True/False'. "
            "Ensure only one answer is included.\n";
        std::vector<ChatMessage> messages{{"system", config_.system_message},
                                          {"user", context}};
        for (int attempt = 0; attempt < 2; ++attempt) {
            std::optional<bool> parsed = parse_true_false(call(messages));
            if (parsed) return parsed;
        }
        log_.parse_fallbacks += 1;
        return std::nullopt;
    }

private:
    std::string call(const std::vector<ChatMessage>& messages) {
        ChatReply reply = backend_.complete(messages);
        ReplyLength len = reply_length(reply);
        log_.raw_outputs.push_back(reply.text);
        log_.reply_lengths.push_back(len.value);
        log_.reply_length_from_usage.push_back(len.from_usage);
        return reply.text;
    }

    ChatAgentConfig config_;
    ChatBackend& backend_;
    AgentCallLog& log_;
};

class ReplayAgent : public Agent {
public:
    ReplayAgent(std::vector<Action> actions, std::vector<std::optional<bool>> answers)
        : actions_(std::move(actions)), answers_(std::move(answers)) {}

    AgentDecision decide(const StepContext&) override {
        if (next_ >= actions_.size())
            return AgentDecision{Action{ActionKind::Exit, -1, false}, std::nullopt, false};
        return AgentDecision{actions_[next_++], std::nullopt, false};
    }

    std::optional<bool> answer(const StepContext&, int object) override {
        std::size_t i = static_cast<std::size_t>(object);
        if (i >= answers_.size()) return std::nullopt;
        return answers_[i];
    }

private:
    std::vector<Action> actions_;
    std::vector<std::optional<bool>> answers_;
    std::size_t next_ = 0;
};

}  // namespace

std::unique_ptr<Agent> make_oracle_agent() { return std::make_unique<OracleAgent>(); }

std::unique_ptr<Agent> make_random_agent(Rng& rng) { return std::make_unique<RandomAgent>(rng); }

std::unique_ptr<Agent> make_count_agent(Rng& rng, int num_objects, bool deterministic_min_count) {
    return std::make_unique<CountAgent>(rng, num_objects, deterministic_min_count);
}

std::unique_ptr<Agent> make_chat_agent(const ChatAgentConfig& config, ChatBackend& backend,
                                       AgentCallLog& log) {
    return std::make_unique<ChatAgent>(config, backend, log);
}

std::unique_ptr<Agent> make_replay_agent(std::vector<Action> actions,
                                         std::vector<std::optional<bool>> answers) {
    return std::make_unique<ReplayAgent>(std::move(actions), std::move(answers));
}

SamplingAgent::SamplingAgent(const SamplingAgentConfig& config, ChatBackend& backend,
                             AgentCallLog& log)
    : config_(config), backend_(backend), log_(log) {
    state_.target_sample_count = config.target_sample_count;
}

double SamplingAgent::active_entropy_bits(const SamplingAgentState& state) {
    if (state.active.empty()) return 0.0;
    return std::log2(static_cast<double>(state.active.size()));
}

std::string SamplingAgent::backend_call(const std::string& prompt) {
    ChatReply reply = backend_.complete({ChatMessage{"user", prompt}});
    ReplyLength len = reply_length(reply);
    log_.raw_outputs.push_back(reply.text);
    log_.reply_lengths.push_back(len.value);
    log_.reply_length_from_usage.push_back(len.from_usage);
    return reply.text;
}

void SamplingAgent::refill(const StepContext& ctx) {
    int n = ctx.state.config.num_objects;
    std::vector<std::size_t> round;
    for (int call = 0;
         call < config_.generation_call_budget &&
         state_.active.size() < config_.target_sample_count;
         ++call) {
        std::size_t needed = config_.target_sample_count - state_.active.size();
        std::map<std::string, std::string> bindings{
            {"HISTORICAL OBSERVATIONS", render_observation_history(ctx.history, n)},
            {"NUM_OBJECTS", std::to_string(n)},
            {"NUM_HYPOTHESES", std::to_string(needed)},
            {"ELIMINATED HYPOTHESES", render_hypothesis_list(state_.eliminated, n)},
            {"ACTIVE HYPOTHESES", render_hypothesis_list(state_.active, n)}};
        std::string prompt = instantiate_prompt(sampling_generation_template(), bindings);
        std::string reply = backend_call(prompt);
        for (const Hypothesis& h : extract_hypotheses(reply, n)) {
            bool seen = false;
            for (const Hypothesis& a : state_.active)
                if (a == h) seen = true;
            for (const Hypothesis& e : state_.eliminated)
                if (e == h) seen = true;
            if (seen) continue;
            if (consistent_with_history(h, ctx.history)) {
                state_.active.push_back(h);
                round.push_back(state_.active.size());
            } else {
                state_.eliminated.push_back(h);
            }
        }
    }
    sampling_rounds_.push_back(std::move(round));
}

void SamplingAgent::eliminate_inconsistent(const std::vector<Observation>& history) {
    std::vector<Hypothesis> kept;
    kept.reserve(state_.active.size());
    for (const Hypothesis& h : state_.active) {
        if (consistent_with_history(h, history))
            kept.push_back(h);
        else
            state_.eliminated.push_back(h);
    }
    state_.active = std::move(kept);
}

AgentDecision SamplingAgent::decide(const StepContext& ctx) {
    for (;;) {
        if (state_.active.empty()) {
            refill(ctx);
            if (state_.active.empty())
                return AgentDecision{Action{ActionKind::Exit, -1, false}, std::nullopt, false};
        }
        eliminate_inconsistent(ctx.history);
        if (!state_.active.empty()) break;
    }
    if (all_truth_table_equal(state_.active))
        return AgentDecision{Action{ActionKind::Exit, -1, false}, std::nullopt, false};

    int n = ctx.state.config.num_objects;
    std::map<std::string, std::string> bindings{
        {"ACTIVE HYPOTHESES", render_hypothesis_list(state_.active, n)},
        {"OBSERVATIONS SO FAR", render_observation_history(ctx.history, n)}};
    std::string prompt = instantiate_prompt(sampling_action_template(), bindings);
    std::string last_reply;
    for (int attempt = 0; attempt <= config_.parse_retries; ++attempt) {
        last_reply = backend_call(prompt);
        ParseResult parsed = parse_command(last_reply, n);
        if (parsed.status != ParseStatus::NoMatch)
            return AgentDecision{parsed.action, last_reply, false};
    }
    log_.parse_fallbacks += 1;
    return AgentDecision{Action{ActionKind::Look, -1, false}, last_reply, true};
}

std::optional<bool> SamplingAgent::answer(const StepContext& ctx, int object) {
    int n = ctx.state.config.num_objects;
    std::string label = object_label(ctx.state.config.labels, object);
    std::map<std::string, std::string> bindings{
        {"HISTORICAL OBSERVATIONS", render_observation_history(ctx.history, n)},
        {"ELIMINATED HYPOTHESES", render_hypothesis_list(state_.eliminated, n)},
        {"ACTIVE HYPOTHESES", render_hypothesis_list(state_.active, n)},
        {"QUESTION", "Is object " + label + " a blicket?"}};
    std::string prompt = instantiate_prompt(sampling_qa_template(), bindings);
    for (int attempt = 0; attempt < 2; ++attempt) {
        std::optional<bool> parsed = parse_true_false(backend_call(prompt));
        if (parsed) return parsed;
    }
    log_.parse_fallbacks += 1;
    return std::nullopt;
}

std::unique_ptr<SamplingAgent> make_sampling_agent(const SamplingAgentConfig& config,
                                                   ChatBackend& backend, AgentCallLog& log) {
    return std::make_unique<SamplingAgent>(config, backend, log);
}

bool all_truth_table_equal(const std::vector<Hypothesis>& hypotheses) {
    if (hypotheses.size() <= 1) return true;
    std::uint32_t mask = hypotheses[0].mask;
    bool rules_differ = false;
    for (const Hypothesis& h : hypotheses) {
        if (h.mask != mask) return false;
        if (h.rule != hypotheses[0].rule) rules_differ = true;
    }
    if (!rules_differ) return true;
    return std::popcount(mask) == 1;
}

bool consistent_with_history(const Hypothesis& h, const std::vector<Observation>& history) {
    for (const Observation& obs : history)
        if (predict(h, obs.placement) != obs.light_on) return false;
    return true;
}

std::string render_observation_history(const std::vector<Observation>& history, int num_objects) {
    if (history.empty()) return "(none)";
    std::string out;
    for (std::size_t i = 0; i < history.size(); ++i) {
        if (i) out += "\n";
        out += "- placement [";
        for (int b = 0; b < num_objects; ++b) {
            if (b) out += ",";
            out += ((history[i].placement >> b) & 1u) ? "1" : "0";
        }
        out += "] -> light ";
        out += history[i].light_on ? "on" : "off";
    }
    return out;
}

std::string render_hypothesis_list(const std::vector<Hypothesis>& hypotheses, int num_objects) {
    if (hypotheses.empty()) return "(none)";
    std::string out;
    for (std::size_t i = 0; i < hypotheses.size(); ++i) {
        if (i) out += "\n";
        out += render_hypothesis(hypotheses[i], num_objects);
    }
    return out;
}

}
