#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "blicket/errors.hpp"
#include "blicket/trial.hpp"

using namespace blicket;

namespace {

TrialConfig oracle_config(int n, Rule rule, std::uint64_t seed) {
    TrialConfig config;
    config.num_objects = n;
    config.num_blickets = 2;
    config.rule = rule;
    config.agent_kind = AgentKind::Oracle;
    config.seed = seed;
    return config;
}

}  // namespace

TEST_CASE("agent kind names round trip") {
    for (auto kind : {AgentKind::Oracle, AgentKind::Random, AgentKind::CountBased,
                      AgentKind::Chat, AgentKind::Sampling})
        CHECK(agent_kind_from_name(agent_kind_name(kind)) == kind);
    CHECK_FALSE(agent_kind_from_name("nonsense").has_value());
}

TEST_CASE("score_qa") {
    auto [all_correct, per_object] = score_qa({false, true, true}, {false, true, true});
    CHECK(all_correct);
    CHECK(per_object == std::vector<bool>{true, true, true});

    auto [all2, per2] = score_qa({true, true, true}, {false, true, true});
    CHECK_FALSE(all2);
    CHECK(per2 == std::vector<bool>{false, true, true});

    auto [all3, per3] = score_qa({}, {});
    CHECK(all3);
    CHECK(per3.empty());

    CHECK_THROWS_AS(score_qa({true}, {true, false}), ConfigError);
}

TEST_CASE("run_trial record structure") {
    TrialRecord rec = run_trial(oracle_config(3, Rule::Disjunctive, 5), enumerate_space(3),
                                nullptr);
    CHECK(rec.complete);
    CHECK(rec.error.empty());
    CHECK(rec.observation_pairs.size() >= 1);
    CHECK(rec.observation_pairs[0].placement == rec.initial_placement);
    CHECK(rec.observation_pairs[0].light_on == rec.initial_light);
    CHECK(rec.per_step_support_size.size() == rec.events.size() + 1);
    for (std::size_t i = 1; i < rec.per_step_support_size.size(); ++i)
        CHECK(rec.per_step_support_size[i] <= rec.per_step_support_size[i - 1]);
    CHECK(rec.qa.size() == 3);
    CHECK(rec.transcript.find("You are in a room.") == 0);
    // every event's rendered line appears in the transcript
    for (const Event& e : rec.events)
        CHECK(rec.transcript.find(e.rendered_text) != std::string::npos);
}

TEST_CASE("same seed twice gives identical records") {
    TrialConfig config = oracle_config(4, Rule::Conjunctive, 11);
    HypothesisSpace space = enumerate_space(4);
    TrialRecord a = run_trial(config, space, nullptr);
    TrialRecord b = run_trial(config, space, nullptr);
    CHECK(record_to_json_line(a) == record_to_json_line(b));
}

TEST_CASE("different seeds explore differently") {
    HypothesisSpace space = enumerate_space(4);
    TrialRecord a = run_trial(oracle_config(4, Rule::Conjunctive, 1), space, nullptr);
    TrialRecord b = run_trial(oracle_config(4, Rule::Conjunctive, 2), space, nullptr);
    CHECK(record_to_json_line(a) != record_to_json_line(b));
}

TEST_CASE("record JSON line round trips") {
    TrialConfig config = oracle_config(3, Rule::Conjunctive, 8);
    config.backend_json = R"({"kind":"scripted","replies":[]})";
    HypothesisSpace space = enumerate_space(3);
    TrialRecord rec = run_trial(config, space, nullptr);
    std::string line = record_to_json_line(rec);
    TrialRecord back = record_from_json_line(line);
    CHECK(record_to_json_line(back) == line);
    CHECK(back.config.num_objects == 3);
    CHECK(back.ground_truth_mask == rec.ground_truth_mask);
    CHECK(back.per_step_support_size == rec.per_step_support_size);
    CHECK(back.transcript == rec.transcript);
    CHECK(back.qa.size() == rec.qa.size());
}

TEST_CASE("malformed record lines raise corrupt-record errors") {
    CHECK_THROWS_AS(record_from_json_line("not json at all"), CorruptRecordError);
    CHECK_THROWS_AS(record_from_json_line("{}"), CorruptRecordError);
    CHECK_THROWS_AS(record_from_json_line(R"({"config":{"rule":"sometimes"}})"),
                    CorruptRecordError);
}

TEST_CASE("replay reproduces a record byte for byte") {
    HypothesisSpace space = enumerate_space(4);
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        TrialRecord source = run_trial(oracle_config(4, Rule::Disjunctive, seed), space,
                                       nullptr);
        TrialRecord replayed = replay_trial(source, space);
        CHECK(record_to_json_line(replayed) == record_to_json_line(source));
    }
}

TEST_CASE("replay also covers chat trials with their logs") {
    auto backend = make_scripted_backend({{"Is object", "> False"},
                                          {std::nullopt, "> put object 0 on the machine"},
                                          {std::nullopt, "> exit"}});
    TrialConfig config = oracle_config(2, Rule::Disjunctive, 4);
    config.agent_kind = AgentKind::Chat;
    config.num_blickets = 1;
    HypothesisSpace space = enumerate_space(2);
    TrialRecord source = run_trial(config, space, backend.get());
    REQUIRE(source.complete);
    CHECK_FALSE(source.agent_log.raw_outputs.empty());
    TrialRecord replayed = replay_trial(source, space);
    CHECK(record_to_json_line(replayed) == record_to_json_line(source));
}

TEST_CASE("backend exhaustion marks the record incomplete") {
    auto backend = make_scripted_backend({{std::nullopt, "> put object 0 on the machine"}});
    TrialConfig config = oracle_config(2, Rule::Disjunctive, 4);
    config.agent_kind = AgentKind::Chat;
    config.num_blickets = 1;
    TrialRecord rec = run_trial(config, enumerate_space(2), backend.get());
    CHECK_FALSE(rec.complete);
    CHECK(rec.error.find("exhausted") != std::string::npos);
    CHECK(rec.events.size() == 1);  // the one parsed action made it in
    // the partial record still serializes and round trips
    TrialRecord back = record_from_json_line(record_to_json_line(rec));
    CHECK_FALSE(back.complete);
}

TEST_CASE("chat agent without a backend is a config error") {
    TrialConfig config = oracle_config(2, Rule::Disjunctive, 4);
    config.agent_kind = AgentKind::Chat;
    CHECK_THROWS_AS(run_trial(config, enumerate_space(2), nullptr), ConfigError);
}

TEST_CASE("qa can be disabled") {
    TrialConfig config = oracle_config(3, Rule::Disjunctive, 6);
    config.qa_enabled = false;
    TrialRecord rec = run_trial(config, enumerate_space(3), nullptr);
    CHECK(rec.qa.empty());
    CHECK_FALSE(rec.all_correct);
    CHECK(rec.complete);
}

TEST_CASE("space size mismatch is rejected") {
    CHECK_THROWS_AS(run_trial(oracle_config(3, Rule::Disjunctive, 1), enumerate_space(4),
                              nullptr),
                    ConfigError);
}

TEST_CASE("write and read records files") {
    std::string path = "/tmp/blicket_test_records.jsonl";
    HypothesisSpace space = enumerate_space(3);
    std::vector<TrialRecord> records;
    for (std::uint64_t seed = 0; seed < 4; ++seed)
        records.push_back(run_trial(oracle_config(3, Rule::Conjunctive, seed), space, nullptr));
    write_records(path, records);
    std::vector<TrialRecord> loaded = read_records(path);
    REQUIRE(loaded.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i)
        CHECK(record_to_json_line(loaded[i]) == record_to_json_line(records[i]));
    std::remove(path.c_str());
    CHECK_THROWS_AS(read_records("/tmp/definitely_missing_blicket.jsonl"), ConfigError);
}

TEST_CASE("run_batch runs the seeds in order") {
    TrialConfig base = oracle_config(3, Rule::Disjunctive, 0);
    std::vector<TrialRecord> records = run_batch(base, {3, 1, 2}, nullptr);
    REQUIRE(records.size() == 3);
    CHECK(records[0].config.seed == 3);
    CHECK(records[1].config.seed == 1);
    CHECK(records[2].config.seed == 2);
}

TEST_CASE("standardized data generation disables qa") {
    TrialConfig base = oracle_config(4, Rule::Conjunctive, 0);
    auto records = generate_standardized_data(AgentKind::Random, base, {1, 2, 3}, nullptr);
    REQUIRE(records.size() == 3);
    for (const TrialRecord& rec : records) {
        CHECK(rec.config.agent_kind == AgentKind::Random);
        CHECK(rec.qa.empty());
        CHECK(rec.events.size() == 32);
    }
    auto oracle = generate_standardized_data(AgentKind::Oracle, base, {1, 2, 3}, nullptr);
    for (const TrialRecord& rec : oracle) CHECK(rec.events.size() < 32);
}

TEST_CASE("trial config document round trips") {
    TrialConfig config;
    config.num_objects = 8;
    config.rule = Rule::Conjunctive;
    config.agent_kind = AgentKind::Sampling;
    config.system_message_variant = SystemMessageVariant::MathDefinition;
    config.prompting_style = PromptingStyle::Cot;
    config.render_style = TakePhrasing::OffOfThe;
    config.labels = LabelScheme::Letters;
    config.opening = OpeningVariant::Training;
    config.sampling_target = 12;
    config.backend_json = R"({"kind":"scripted","replies":["a"]})";
    std::string doc = trial_config_to_json_string(config);
    TrialConfig back = trial_config_from_json_string(doc);
    CHECK(trial_config_to_json_string(back) == doc);
    CHECK(back.num_objects == 8);
    CHECK(back.rule == Rule::Conjunctive);
    CHECK(back.agent_kind == AgentKind::Sampling);
    CHECK(back.sampling_target == 12);
}

TEST_CASE("partial config documents keep defaults") {
    TrialConfig config = trial_config_from_json_string(R"({"num_objects": 5})");
    CHECK(config.num_objects == 5);
    CHECK(config.num_blickets == 2);
    CHECK(config.horizon == 32);
    CHECK(config.agent_kind == AgentKind::Oracle);
    CHECK_THROWS_AS(trial_config_from_json_string("[1,2]"), ConfigError);
    CHECK_THROWS_AS(trial_config_from_json_string("nope"), ConfigError);
    CHECK_THROWS_AS(trial_config_from_json_string(R"({"rule":"sometimes"})"), ConfigError);
}

TEST_CASE("transcript matches a model's view of the episode") {
    auto backend = make_scripted_backend({{"Is object", "> True"},
                                          {std::nullopt, "> put object 1 on the machine"},
                                          {std::nullopt, "> look"},
                                          {std::nullopt, "> exit"}});
    TrialConfig config = oracle_config(3, Rule::Disjunctive, 9);
    config.agent_kind = AgentKind::Chat;
    TrialRecord rec = run_trial(config, enumerate_space(3), backend.get());
    REQUIRE(rec.complete);
    std::string expected = transcript_prefix(
        init_env_fixed([&] {
            EnvConfig env;
            env.num_objects = 3;
            env.rule = Rule::Disjunctive;
            return env;
        }(), rec.ground_truth_mask, rec.initial_placement));
    for (const Event& e : rec.events) expected += render_event(e);
    CHECK(rec.transcript == expected);
}
