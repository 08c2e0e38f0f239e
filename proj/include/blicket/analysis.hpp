#pragma once

#include <optional>
#include <string>
#include <vector>

#include "blicket/hypothesis.hpp"
#include "blicket/stats.hpp"
#include "blicket/trial.hpp"

namespace blicket {

// Fraction of the hypothesis space eliminated, scaled so 1.0 means a unique
// survivor. `remaining` counts hypotheses still consistent.
double elimination_progress(std::size_t total_hypotheses, std::size_t remaining);

// Progress relative to the random baseline: (rho - rho_random)/(1 - rho_random).
double normalized_progress(double rho_model, double rho_random);

struct TrialMetrics {
    bool all_correct = false;
    std::size_t steps_taken = 0;
    std::size_t unique_states_visited = 0;
    double info_gain_bits = 0.0;
    std::size_t final_support_size = 0;
    std::optional<double> response_length;
    std::vector<double> progress_curve;
};

// Recomputes the support trajectory from the record's observations and
// cross-checks it against the logged per-step sizes.
TrialMetrics trial_metrics(const TrialRecord& record, const HypothesisSpace& space);

struct MetricStats {
    double mean = 0.0;
    double sd = 0.0;
    double sem = 0.0;
};

struct GroupRow {
    std::vector<std::string> key_values;
    std::size_t n = 0;
    MetricStats accuracy;
    MetricStats steps;
    MetricStats unique_states;
    MetricStats info_gain;
    MetricStats final_support;
    MetricStats rho;
    std::optional<double> response_length_mean;
    std::optional<MetricStats> rho_norm;
};

struct AggregateTable {
    std::vector<std::string> group_fields;
    std::vector<GroupRow> rows;
};

// Valid group fields: agent, objects, blickets, rule, system_msg, prompt_style.
// Incomplete records are skipped. rho_norm is filled when the record set also
// contains random-agent trials with matching objects and rule.
AggregateTable aggregate(const std::vector<TrialRecord>& records,
                         const std::vector<std::string>& group_by);

std::string aggregate_to_csv(const AggregateTable& table);

// One CSV row per trial with the per-trial metrics.
std::string trials_to_csv(const std::vector<TrialRecord>& records);

std::string csv_escape(const std::string& field);
std::string format_number(double value);

}
