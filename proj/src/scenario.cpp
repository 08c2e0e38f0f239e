#include "blicket/scenario.hpp"

#include "blicket/errors.hpp"

namespace blicket {

std::string scenario_variant_name(ScenarioVariant variant) {
    switch (variant) {
        case ScenarioVariant::DisjunctiveEvidence: return "disjunctive";
        case ScenarioVariant::ConjunctiveEvidence: return "conjunctive";
        case ScenarioVariant::AmbiguousEvidence: return "ambiguous";
    }
    return "";
}

std::optional<ScenarioVariant> scenario_variant_from_name(const std::string& name) {
    if (name == "disjunctive") return ScenarioVariant::DisjunctiveEvidence;
    if (name == "conjunctive") return ScenarioVariant::ConjunctiveEvidence;
    if (name == "ambiguous") return ScenarioVariant::AmbiguousEvidence;
    return std::nullopt;
}

namespace {

Action put(int object) { return Action{ActionKind::Put, object, false}; }
Action take(int object) { return Action{ActionKind::Take, object, false}; }

std::string scripted_transcript(const EnvConfig& config, std::uint32_t mask,
                                const std::vector<Action>& actions) {
    EnvState state = init_env_fixed(config, mask, 0);
    std::string transcript = transcript_prefix(state);
    for (const Action& action : actions) {
        Event event = apply_action(state, action);
        transcript += render_event(event);
    }
    return transcript;
}

}  // namespace

Scenario build_scenario(ScenarioVariant variant) {
    Scenario scenario;
    scenario.variant = variant;
    scenario.question = "Based on the information above, is object A a blicket?";
    scenario.instruction =
        "Directly output the answer in the format '> True/False'. Ensure only one answer is "
        "included.";
    scenario.key_object_label = "A";
    scenario.key_object_is_blicket = true;

    EnvConfig training;
    training.num_objects = 3;
    training.horizon = 32;
    training.labels = LabelScheme::Digits;
    training.opening = OpeningVariant::Training;
    training.take_phrasing = TakePhrasing::OffThe;

    const std::uint32_t mask = 0b101;
    switch (variant) {
        case ScenarioVariant::DisjunctiveEvidence: {
            training.rule = Rule::Disjunctive;
            training.blank_before_commands = false;
            std::vector<Action> actions = {put(0), take(0), put(1), take(1), put(2), take(2),
                                           put(0), put(1),  take(1), put(2), take(0), put(1)};
            scenario.training_transcript = scripted_transcript(training, mask, actions);
            break;
        }
        case ScenarioVariant::ConjunctiveEvidence: {
            training.rule = Rule::Conjunctive;
            training.blank_before_commands = true;
            std::vector<Action> actions = {put(0), take(0), put(1), take(1), put(2), take(2),
                                           put(0), put(1),  take(1), put(2), take(0), put(1)};
            scenario.training_transcript = scripted_transcript(training, mask, actions);
            break;
        }
        case ScenarioVariant::AmbiguousEvidence: {
            training.rule = Rule::Conjunctive;
            training.blank_before_commands = true;
            std::vector<Action> actions = {put(0), take(0), put(0), take(0), put(1), take(1),
                                           put(1), take(1), put(1), take(1), put(0), put(2)};
            scenario.training_transcript = scripted_transcript(training, mask, actions);
            break;
        }
    }

    EnvConfig test;
    test.num_objects = 3;
    test.rule = Rule::Conjunctive;
    test.horizon = 32;
    test.labels = LabelScheme::Letters;
    test.opening = OpeningVariant::Test;
    test.take_phrasing = TakePhrasing::OffThe;
    test.blank_before_commands = true;
    std::vector<Action> test_actions = {put(0), take(0), put(0), take(0), put(0), take(0),
                                        put(1), take(1), put(0), put(2),  put(1), take(1)};
    scenario.test_transcript = scripted_transcript(test, mask, test_actions);
    return scenario;
}

std::string scenario_message(const Scenario& scenario) {
    return scenario.training_transcript + "\n" + scenario.test_transcript + "\n" +
           scenario.question + "\n\n" + scenario.instruction + "\n";
}

ScenarioTally run_scenario_battery(const Scenario& scenario, ChatBackend& backend, int reps,
                                   ScenarioTally* partial) {
    if (reps < 1) throw ConfigError("scenario reps must be at least 1");
    ScenarioTally tally;
    tally.variant = scenario.variant;
    tally.reps = 0;
    std::string message = scenario_message(scenario);
    for (int rep = 0; rep < reps; ++rep) {
        std::optional<bool> answer;
        std::string final_reply;
        try {
            for (int attempt = 0; attempt < 2 && !answer; ++attempt) {
                ChatReply reply = backend.complete({{"user", message}});
                final_reply = reply.text;
                answer = parse_true_false(reply.text);
            }
        } catch (const BackendError&) {
            if (partial) {
                if (tally.reps > 0)
                    tally.proportion_true =
                        static_cast<double>(tally.true_count) / tally.reps;
                *partial = tally;
            }
            throw;
        }
        tally.raw_replies.push_back(final_reply);
        tally.reps = rep + 1;
        if (answer && *answer)
            ++tally.true_count;
        else if (!answer)
            ++tally.unparsed_count;
    }
    tally.proportion_true = static_cast<double>(tally.true_count) / reps;
    return tally;
}

}
