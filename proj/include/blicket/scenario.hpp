#pragma once

#include <optional>
#include <string>
#include <vector>

#include "blicket/backend.hpp"
#include "blicket/env.hpp"

namespace blicket {

enum class ScenarioVariant {
    DisjunctiveEvidence,
    ConjunctiveEvidence,
    AmbiguousEvidence,
};

std::string scenario_variant_name(ScenarioVariant variant);
std::optional<ScenarioVariant> scenario_variant_from_name(const std::string& name);

// A two-phase scripted episode: a training transcript whose evidence pattern is
// fixed, then a relabeled test room that ends in a single yes/no probe about
// object A. The probe is appended verbatim when the scenario is put to a model.
struct Scenario {
    ScenarioVariant variant = ScenarioVariant::DisjunctiveEvidence;
    std::string training_transcript;
    std::string test_transcript;
    std::string question;
    std::string instruction;
    std::string key_object_label;
    bool key_object_is_blicket = false;
};

Scenario build_scenario(ScenarioVariant variant);

// The full message shown to a model: training, test, question, instruction.
std::string scenario_message(const Scenario& scenario);

struct ScenarioTally {
    ScenarioVariant variant = ScenarioVariant::DisjunctiveEvidence;
    int reps = 0;
    int true_count = 0;
    int unparsed_count = 0;
    std::vector<std::string> raw_replies;
    double proportion_true = 0.0;
};

// Asks the backend the scenario question `reps` times, one independent
// single-message conversation per rep. An unparseable reply is retried once,
// then counted as a False answer. A backend failure propagates; if `partial`
// is given, it holds the tally of the reps finished before the failure.
ScenarioTally run_scenario_battery(const Scenario& scenario, ChatBackend& backend, int reps,
                                   ScenarioTally* partial = nullptr);

}
