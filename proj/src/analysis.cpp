#include "blicket/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "blicket/errors.hpp"

namespace blicket {

double elimination_progress(std::size_t total_hypotheses, std::size_t remaining) {
    if (remaining == 0)
        throw InconsistentHistoryError("no hypothesis is consistent with the history");
    if (total_hypotheses < 2) throw ConfigError("progress needs at least 2 hypotheses");
    if (remaining > total_hypotheses)
        throw ConfigError("remaining hypotheses exceed the space size");
    return static_cast<double>(total_hypotheses - remaining) /
           static_cast<double>(total_hypotheses - 1);
}

double normalized_progress(double rho_model, double rho_random) {
    if (rho_random >= 1.0)
        throw ConfigError("normalization undefined when the random baseline fully resolves");
    return (rho_model - rho_random) / (1.0 - rho_random);
}

TrialMetrics trial_metrics(const TrialRecord& record, const HypothesisSpace& space) {
    if (space.num_objects != record.config.num_objects)
        throw ConfigError("hypothesis space does not match num_objects");
    if (!record.complete) throw CorruptRecordError("metrics need a complete record");

    std::vector<std::size_t> recomputed;
    Belief belief = full_belief(space);
    belief = filter_consistent(belief, Observation{record.initial_placement, record.initial_light});
    recomputed.push_back(belief.support_size);
    for (const Event& event : record.events) {
        if (event.observation)
            belief = filter_consistent(belief,
                                       Observation{event.placement_after, event.light_after});
        recomputed.push_back(belief.support_size);
    }
    if (recomputed != record.per_step_support_size)
        throw CorruptRecordError("logged support sizes disagree with recomputation");

    TrialMetrics metrics;
    metrics.all_correct = record.all_correct;
    metrics.steps_taken = record.events.size();
    std::set<std::uint32_t> states;
    states.insert(record.initial_placement);
    for (const Event& event : record.events) states.insert(event.placement_after);
    metrics.unique_states_visited = states.size();
    metrics.final_support_size = recomputed.back();
    metrics.info_gain_bits = std::log2(static_cast<double>(recomputed.front())) -
                             std::log2(static_cast<double>(recomputed.back()));
    if (!record.agent_log.reply_lengths.empty())
        metrics.response_length = mean(std::vector<double>(record.agent_log.reply_lengths.begin(),
                                                           record.agent_log.reply_lengths.end()));
    std::size_t total = space.hypotheses.size();
    metrics.progress_curve.reserve(recomputed.size());
    for (std::size_t remaining : recomputed)
        metrics.progress_curve.push_back(elimination_progress(total, remaining));
    return metrics;
}

std::string csv_escape(const std::string& field) {
    bool needs_quotes = field.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs_quotes) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

namespace {

std::string field_value(const TrialRecord& record, const std::string& field) {
    if (field == "agent") return agent_kind_name(record.config.agent_kind);
    if (field == "objects") return std::to_string(record.config.num_objects);
    if (field == "blickets") return std::to_string(record.config.num_blickets);
    if (field == "rule") return rule_name(record.config.rule);
    if (field == "system_msg") return system_variant_name(record.config.system_message_variant);
    if (field == "prompt_style") return prompting_style_name(record.config.prompting_style);
    throw ConfigError("unknown group field '" + field + "'");
}

MetricStats stats_of(const std::vector<double>& values) {
    MetricStats s;
    s.mean = mean(values);
    s.sd = sample_sd(values);
    s.sem = values.size() > 1 ? s.sd / std::sqrt(static_cast<double>(values.size())) : 0.0;
    return s;
}

struct GroupAccum {
    std::vector<double> accuracy, steps, unique_states, info_gain, final_support, rho;
    std::vector<double> response_lengths;
    std::vector<int> objects;
    std::vector<Rule> rules;
};

}  // namespace

AggregateTable aggregate(const std::vector<TrialRecord>& records,
                         const std::vector<std::string>& group_by) {
    if (records.empty()) throw ConfigError("no records to aggregate");
    AggregateTable table;
    table.group_fields = group_by;

    std::map<std::pair<int, Rule>, std::vector<double>> random_rho;
    std::map<std::vector<std::string>, GroupAccum> groups;
    std::size_t skipped = 0;
    for (const TrialRecord& record : records) {
        if (!record.complete) {
            ++skipped;
            continue;
        }
        HypothesisSpace space = enumerate_space(record.config.num_objects);
        TrialMetrics m = trial_metrics(record, space);
        double final_rho = m.progress_curve.back();
        if (record.config.agent_kind == AgentKind::Random)
            random_rho[{record.config.num_objects, record.config.rule}].push_back(final_rho);
        std::vector<std::string> key;
        key.reserve(group_by.size());
        for (const std::string& field : group_by) key.push_back(field_value(record, field));
        GroupAccum& acc = groups[key];
        acc.accuracy.push_back(m.all_correct ? 1.0 : 0.0);
        acc.steps.push_back(static_cast<double>(m.steps_taken));
        acc.unique_states.push_back(static_cast<double>(m.unique_states_visited));
        acc.info_gain.push_back(m.info_gain_bits);
        acc.final_support.push_back(static_cast<double>(m.final_support_size));
        acc.rho.push_back(final_rho);
        if (m.response_length) acc.response_lengths.push_back(*m.response_length);
        acc.objects.push_back(record.config.num_objects);
        acc.rules.push_back(record.config.rule);
    }
    if (skipped > 0)
        std::cerr << "warning: skipped " << skipped << " incomplete record(s)\n";
    if (groups.empty()) throw ConfigError("no complete records to aggregate");

    for (const auto& [key, acc] : groups) {
        GroupRow row;
        row.key_values = key;
        row.n = acc.rho.size();
        row.accuracy = stats_of(acc.accuracy);
        row.steps = stats_of(acc.steps);
        row.unique_states = stats_of(acc.unique_states);
        row.info_gain = stats_of(acc.info_gain);
        row.final_support = stats_of(acc.final_support);
        row.rho = stats_of(acc.rho);
        if (!acc.response_lengths.empty()) row.response_length_mean = mean(acc.response_lengths);

        bool uniform_cell =
            std::all_of(acc.objects.begin(), acc.objects.end(),
                        [&](int v) { return v == acc.objects.front(); }) &&
            std::all_of(acc.rules.begin(), acc.rules.end(),
                        [&](Rule r) { return r == acc.rules.front(); });
        if (uniform_cell) {
            auto it = random_rho.find({acc.objects.front(), acc.rules.front()});
            if (it != random_rho.end() && !it->second.empty()) {
                double baseline = mean(it->second);
                if (baseline < 1.0) {
                    std::vector<double> normalized;
                    normalized.reserve(acc.rho.size());
                    for (double r : acc.rho)
                        normalized.push_back(normalized_progress(r, baseline));
                    row.rho_norm = stats_of(normalized);
                }
            }
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

namespace {

void append_stats(std::ostringstream& out, const MetricStats& s) {
    out << "," << format_number(s.mean) << "," << format_number(s.sd) << ","
        << format_number(s.sem);
}

}  // namespace

std::string aggregate_to_csv(const AggregateTable& table) {
    std::ostringstream out;
    for (const std::string& field : table.group_fields) out << csv_escape(field) << ",";
    out << "n"
        << ",accuracy_mean,accuracy_sd,accuracy_sem"
        << ",steps_mean,steps_sd,steps_sem"
        << ",unique_states_mean,unique_states_sd,unique_states_sem"
        << ",info_gain_mean,info_gain_sd,info_gain_sem"
        << ",final_support_mean,final_support_sd,final_support_sem"
        << ",rho_mean,rho_sd,rho_sem"
        << ",rho_norm_mean,rho_norm_sd"
        << ",response_length_mean\n";
    for (const GroupRow& row : table.rows) {
        for (const std::string& value : row.key_values) out << csv_escape(value) << ",";
        out << row.n;
        append_stats(out, row.accuracy);
        append_stats(out, row.steps);
        append_stats(out, row.unique_states);
        append_stats(out, row.info_gain);
        append_stats(out, row.final_support);
        append_stats(out, row.rho);
        if (row.rho_norm)
            out << "," << format_number(row.rho_norm->mean) << ","
                << format_number(row.rho_norm->sd);
        else
            out << ",,";
        if (row.response_length_mean)
            out << "," << format_number(*row.response_length_mean);
        else
            out << ",";
        out << "\n";
    }
    return out.str();
}

std::string trials_to_csv(const std::vector<TrialRecord>& records) {
    std::ostringstream out;
    out << "agent,objects,blickets,rule,seed,system_msg,prompt_style,all_correct,steps_taken,"
           "unique_states_visited,info_gain_bits,final_support_size,rho_final,response_length,"
           "complete\n";
    for (const TrialRecord& record : records) {
        out << csv_escape(agent_kind_name(record.config.agent_kind)) << ","
            << record.config.num_objects << "," << record.config.num_blickets << ","
            << rule_name(record.config.rule) << "," << record.config.seed << ","
            << system_variant_name(record.config.system_message_variant) << ","
            << prompting_style_name(record.config.prompting_style) << ",";
        if (record.complete) {
            HypothesisSpace space = enumerate_space(record.config.num_objects);
            TrialMetrics m = trial_metrics(record, space);
            out << (m.all_correct ? "1" : "0") << "," << m.steps_taken << ","
                << m.unique_states_visited << "," << format_number(m.info_gain_bits) << ","
                << m.final_support_size << "," << format_number(m.progress_curve.back()) << ",";
            if (m.response_length)
                out << format_number(*m.response_length);
            out << ",1\n";
        } else {
            out << ",,,,,,,0\n";
        }
    }
    return out.str();
}

}
