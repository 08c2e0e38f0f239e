#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "blicket/analysis.hpp"
#include "blicket/backend.hpp"
#include "blicket/errors.hpp"
#include "blicket/scenario.hpp"
#include "blicket/trial.hpp"

namespace {

using blicket::ConfigError;
using ordered_json = nlohmann::ordered_json;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// "1,3,10-12" -> {1, 3, 10, 11, 12}
std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        if (part.empty()) continue;
        auto dash = part.find('-', 1);
        try {
            if (dash == std::string::npos) {
                seeds.push_back(std::stoull(part));
            } else {
                std::uint64_t lo = std::stoull(part.substr(0, dash));
                std::uint64_t hi = std::stoull(part.substr(dash + 1));
                if (hi < lo) throw ConfigError("seed range " + part + " is descending");
                for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
            }
        } catch (const std::invalid_argument&) {
            throw ConfigError("bad seed token '" + part + "'");
        } catch (const std::out_of_range&) {
            throw ConfigError("seed token '" + part + "' out of range");
        }
    }
    if (seeds.empty()) throw ConfigError("no seeds given");
    return seeds;
}

int cmd_run(const std::string& config_path, const std::string& backend_path, int objects,
            int blickets, const std::string& rule, const std::string& agent,
            const std::string& system_msg, const std::string& prompt_style,
            const std::string& seeds_text, int horizon, bool no_qa, const std::string& out) {
    blicket::TrialConfig config;
    if (!config_path.empty())
        config = blicket::trial_config_from_json_string(slurp(config_path));
    if (objects > 0) config.num_objects = objects;
    if (blickets >= 0) config.num_blickets = blickets;
    if (!rule.empty()) {
        auto r = blicket::rule_from_name(rule);
        if (!r) throw ConfigError("unknown rule '" + rule + "'");
        config.rule = *r;
    }
    if (!agent.empty()) {
        auto kind = blicket::agent_kind_from_name(agent);
        if (!kind) throw ConfigError("unknown agent '" + agent + "'");
        config.agent_kind = *kind;
    }
    if (!system_msg.empty()) {
        auto variant = blicket::system_variant_from_name(system_msg);
        if (!variant) throw ConfigError("unknown system message '" + system_msg + "'");
        config.system_message_variant = *variant;
    }
    if (!prompt_style.empty()) {
        auto style = blicket::prompting_style_from_name(prompt_style);
        if (!style) throw ConfigError("unknown prompting style '" + prompt_style + "'");
        config.prompting_style = *style;
    }
    if (horizon > 0) config.horizon = horizon;
    if (no_qa) config.qa_enabled = false;

    std::unique_ptr<blicket::ChatBackend> backend;
    if (!backend_path.empty()) {
        std::string doc = slurp(backend_path);
        backend = blicket::make_backend_from_json(doc);
        config.backend_json = doc;
    }

    std::vector<std::uint64_t> seeds = parse_seed_list(seeds_text);
    std::vector<blicket::TrialRecord> records =
        blicket::run_batch(config, seeds, backend.get());
    blicket::write_records(out, records);

    int incomplete = 0;
    for (const auto& rec : records) {
        std::cout << "seed " << rec.config.seed << ": steps " << rec.events.size()
                  << ", final support " << rec.per_step_support_size.back();
        if (rec.config.qa_enabled && rec.complete)
            std::cout << ", qa " << (rec.all_correct ? "all-correct" : "imperfect");
        if (!rec.complete) {
            std::cout << ", INCOMPLETE (" << rec.error << ")";
            ++incomplete;
        }
        std::cout << "\n";
    }
    std::cout << records.size() << " trial(s) written to " << out << "\n";
    if (incomplete > 0) {
        std::cerr << incomplete << " trial(s) incomplete\n";
        return 1;
    }
    return 0;
}

int cmd_replay(const std::string& record_path, bool verify_bytes) {
    std::ifstream in(record_path, std::ios::binary);
    if (!in) throw ConfigError("cannot open records file " + record_path);
    std::string line;
    std::size_t index = 0;
    int mismatches = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        blicket::TrialRecord source = blicket::record_from_json_line(line);
        blicket::HypothesisSpace space = blicket::enumerate_space(source.config.num_objects);
        blicket::TrialRecord replayed = blicket::replay_trial(source, space);
        if (verify_bytes) {
            std::string round_trip = blicket::record_to_json_line(replayed);
            if (round_trip == line) {
                std::cout << "record " << index << ": ok\n";
            } else {
                std::cout << "record " << index << ": MISMATCH\n";
                ++mismatches;
            }
        } else {
            std::cout << "record " << index << ": steps " << replayed.events.size()
                      << ", final support " << replayed.per_step_support_size.back() << "\n";
        }
        ++index;
    }
    if (verify_bytes)
        std::cout << index << " record(s) verified, " << mismatches << " mismatch(es)\n";
    return mismatches == 0 ? 0 : 1;
}

int cmd_analyze(const std::string& records_path, const std::string& out_csv,
                const std::string& aggregate_out, const std::string& group_by) {
    std::vector<blicket::TrialRecord> records = blicket::read_records(records_path);
    std::cout << records.size() << " record(s) loaded\n";
    {
        std::ofstream out(out_csv, std::ios::trunc | std::ios::binary);
        if (!out) throw ConfigError("cannot open output file " + out_csv);
        out << blicket::trials_to_csv(records);
    }
    std::cout << "per-trial metrics written to " << out_csv << "\n";
    if (!aggregate_out.empty()) {
        std::vector<std::string> fields;
        std::stringstream ss(group_by);
        std::string field;
        while (std::getline(ss, field, ','))
            if (!field.empty()) fields.push_back(field);
        blicket::AggregateTable table = blicket::aggregate(records, fields);
        std::ofstream out(aggregate_out, std::ios::trunc | std::ios::binary);
        if (!out) throw ConfigError("cannot open output file " + aggregate_out);
        out << blicket::aggregate_to_csv(table);
        std::cout << table.rows.size() << " group(s) written to " << aggregate_out << "\n";
    }
    return 0;
}

ordered_json tally_json(const blicket::ScenarioTally& tally) {
    ordered_json j;
    j["variant"] = blicket::scenario_variant_name(tally.variant);
    j["reps"] = tally.reps;
    j["true_count"] = tally.true_count;
    j["unparsed_count"] = tally.unparsed_count;
    j["proportion_true"] = tally.proportion_true;
    j["raw_replies"] = tally.raw_replies;
    return j;
}

int cmd_scenarios(const std::string& variant_name, int reps, const std::string& backend_path,
                  const std::string& out) {
    std::vector<blicket::ScenarioVariant> variants;
    if (variant_name == "all") {
        variants = {blicket::ScenarioVariant::DisjunctiveEvidence,
                    blicket::ScenarioVariant::ConjunctiveEvidence,
                    blicket::ScenarioVariant::AmbiguousEvidence};
    } else {
        auto v = blicket::scenario_variant_from_name(variant_name);
        if (!v) throw ConfigError("unknown scenario variant '" + variant_name + "'");
        variants = {*v};
    }

    if (backend_path.empty()) {
        for (auto v : variants) {
            blicket::Scenario scenario = blicket::build_scenario(v);
            std::cout << "=== " << blicket::scenario_variant_name(v) << " ===\n";
            std::cout << blicket::scenario_message(scenario);
        }
        return 0;
    }

    auto backend = blicket::make_backend_from_json(slurp(backend_path));
    ordered_json results = ordered_json::array();
    for (auto v : variants) {
        blicket::Scenario scenario = blicket::build_scenario(v);
        blicket::ScenarioTally partial;
        try {
            blicket::ScenarioTally tally =
                blicket::run_scenario_battery(scenario, *backend, reps, &partial);
            results.push_back(tally_json(tally));
            std::cout << blicket::scenario_variant_name(v) << ": " << tally.true_count << "/"
                      << tally.reps << " True (" << tally.proportion_true << ")\n";
        } catch (const blicket::BackendError& e) {
            results.push_back(tally_json(partial));
            if (!out.empty()) {
                std::ofstream f(out, std::ios::trunc | std::ios::binary);
                f << results.dump(2) << "\n";
            }
            std::cerr << "backend error after " << partial.reps << " rep(s) of "
                      << blicket::scenario_variant_name(v) << ": " << e.what() << "\n";
            return 1;
        }
    }
    if (!out.empty()) {
        std::ofstream f(out, std::ios::trunc | std::ios::binary);
        if (!f) throw ConfigError("cannot open output file " + out);
        f << results.dump(2) << "\n";
        std::cout << "tallies written to " << out << "\n";
    }
    return 0;
}

int cmd_play(int objects, int blickets, const std::string& rule, std::uint64_t seed,
             int horizon) {
    blicket::EnvConfig config;
    config.num_objects = objects;
    config.horizon = horizon;
    if (!rule.empty()) {
        auto r = blicket::rule_from_name(rule);
        if (!r) throw ConfigError("unknown rule '" + rule + "'");
        config.rule = *r;
    }
    blicket::StreamSeeds streams = blicket::derive_streams(seed);
    blicket::EnvState state = blicket::init_env(config, blickets, streams.env);
    std::cout << blicket::transcript_prefix(state);
    std::cout.flush();

    std::string line;
    while (!state.terminated && std::getline(std::cin, line)) {
        auto [status, action] = blicket::parse_command(line, config.num_objects);
        if (status == blicket::ParseStatus::NoMatch) {
            std::cout << "Commands: put object <label> on machine|floor, take object <label> "
                         "off machine, look, exit\n";
            continue;
        }
        blicket::Event event = blicket::apply_action(state, action);
        std::cout << blicket::render_event(event);
        std::cout.flush();
    }
    if (!state.terminated) return 0;

    std::cout << "\n";
    int correct = 0;
    for (int i = 0; i < config.num_objects; ++i) {
        std::string label = blicket::object_label(config.labels, i);
        std::cout << "Is object " << label << " a blicket? (true/false)\n";
        std::optional<bool> answer;
        while (!answer && std::getline(std::cin, line)) {
            answer = blicket::parse_true_false(line);
            if (!answer) std::cout << "Please answer true or false.\n";
        }
        if (!answer) return 0;
        bool truth = (state.blicket_mask >> i) & 1u;
        if (*answer == truth) ++correct;
    }
    std::cout << "\nYou identified " << correct << "/" << config.num_objects
              << " objects correctly. Blickets were:";
    for (int i = 0; i < config.num_objects; ++i)
        if ((state.blicket_mask >> i) & 1u)
            std::cout << " " << blicket::object_label(config.labels, i);
    std::cout << " (" << blicket::rule_name(config.rule) << " rule)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Blicket Test: causal-discovery text environment and evaluation harness"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run seeded trials and write a records file");
    std::string run_config, run_backend, run_rule, run_agent, run_system, run_style;
    std::string run_seeds = "0";
    std::string run_out = "records.jsonl";
    int run_objects = 0, run_blickets = -1, run_horizon = 0;
    bool run_no_qa = false;
    run->add_option("--config", run_config, "Trial config JSON file");
    run->add_option("--objects", run_objects, "Number of objects");
    run->add_option("--blickets", run_blickets, "Number of blickets");
    run->add_option("--rule", run_rule, "disjunctive or conjunctive");
    run->add_option("--agent", run_agent, "oracle, random, count_based, chat, or sampling");
    run->add_option("--system-msg", run_system,
                    "human_default, human_conjunctive, or math_definition");
    run->add_option("--prompt-style", run_style, "default, react, reflexion, or cot");
    run->add_option("--seeds", run_seeds, "Seed list, e.g. 0,5,10-19");
    run->add_option("--horizon", run_horizon, "Step budget per trial");
    run->add_option("--backend-config", run_backend, "Backend config JSON file");
    run->add_flag("--no-qa", run_no_qa, "Skip the Q&A phase");
    run->add_option("--out", run_out, "Records file to write");

    auto* replay = app.add_subcommand("replay", "Re-execute recorded trials");
    std::string replay_record;
    bool replay_verify = false;
    replay->add_option("--record", replay_record, "Records file")->required();
    replay->add_flag("--verify-bytes", replay_verify,
                     "Check that replayed records serialize byte-identically");

    auto* analyze = app.add_subcommand("analyze", "Compute metrics CSVs from a records file");
    std::string an_records, an_out = "trials.csv", an_agg, an_group = "agent,objects,rule";
    analyze->add_option("--records", an_records, "Records file")->required();
    analyze->add_option("--out-csv", an_out, "Per-trial CSV path");
    analyze->add_option("--aggregate-out", an_agg, "Aggregate CSV path");
    analyze->add_option("--group-by", an_group, "Aggregate grouping fields");

    auto* scenarios = app.add_subcommand(
        "scenarios", "Print or run the scripted evidence scenarios");
    std::string sc_variant = "all", sc_backend, sc_out;
    int sc_reps = 10;
    scenarios->add_option("--variant", sc_variant,
                          "disjunctive, conjunctive, ambiguous, or all");
    scenarios->add_option("--reps", sc_reps, "Repetitions per variant");
    scenarios->add_option("--backend-config", sc_backend,
                          "Backend config JSON file (omit to just print)");
    scenarios->add_option("--out", sc_out, "Tally JSON path");

    auto* play = app.add_subcommand("play", "Explore an episode interactively");
    int pl_objects = 3, pl_blickets = 2, pl_horizon = 32;
    std::string pl_rule = "disjunctive";
    std::uint64_t pl_seed = 0;
    play->add_option("--objects", pl_objects, "Number of objects");
    play->add_option("--blickets", pl_blickets, "Number of blickets");
    play->add_option("--rule", pl_rule, "disjunctive or conjunctive");
    play->add_option("--seed", pl_seed, "Trial seed");
    play->add_option("--horizon", pl_horizon, "Step budget");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(run_config, run_backend, run_objects, run_blickets, run_rule,
                           run_agent, run_system, run_style, run_seeds, run_horizon, run_no_qa,
                           run_out);
        if (replay->parsed()) return cmd_replay(replay_record, replay_verify);
        if (analyze->parsed()) return cmd_analyze(an_records, an_out, an_agg, an_group);
        if (scenarios->parsed()) return cmd_scenarios(sc_variant, sc_reps, sc_backend, sc_out);
        if (play->parsed()) return cmd_play(pl_objects, pl_blickets, pl_rule, pl_seed, pl_horizon);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
