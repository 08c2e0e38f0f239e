#include <doctest.h>

#include "blicket/digest.hpp"
#include "blicket/errors.hpp"
#include "blicket/scenario.hpp"

using namespace blicket;

TEST_CASE("variant names round trip") {
    for (auto v : {ScenarioVariant::DisjunctiveEvidence, ScenarioVariant::ConjunctiveEvidence,
                   ScenarioVariant::AmbiguousEvidence})
        CHECK(scenario_variant_from_name(scenario_variant_name(v)) == v);
    CHECK(scenario_variant_name(ScenarioVariant::AmbiguousEvidence) == "ambiguous");
    CHECK_FALSE(scenario_variant_from_name("mystery").has_value());
}

TEST_CASE("training transcripts are pinned") {
    CHECK(sha256_hex(build_scenario(ScenarioVariant::DisjunctiveEvidence).training_transcript) ==
          "3668553e0083933c548e2456d9259dd9045771f844f51cc895b00a41ea0169cb");
    CHECK(sha256_hex(build_scenario(ScenarioVariant::ConjunctiveEvidence).training_transcript) ==
          "e2761c0fca081de0b6ee683fbbd8a48c913339ef7642047e37043f5328a89274");
    CHECK(sha256_hex(build_scenario(ScenarioVariant::AmbiguousEvidence).training_transcript) ==
          "e08a883ead4b0e1addf55bdc98ea96b3a0564b423988fc1d69f1daa505aa9258");
}

TEST_CASE("the test phase is shared across variants") {
    Scenario d = build_scenario(ScenarioVariant::DisjunctiveEvidence);
    Scenario c = build_scenario(ScenarioVariant::ConjunctiveEvidence);
    Scenario a = build_scenario(ScenarioVariant::AmbiguousEvidence);
    CHECK(d.test_transcript == c.test_transcript);
    CHECK(d.test_transcript == a.test_transcript);
    CHECK(sha256_hex(d.test_transcript) ==
          "c22a81b7c099422839c8a78888638d7a3afa94d8193b861ac9b48aef03b4521f");
    std::string block = d.test_transcript + "\n" + d.question + "\n\n" + d.instruction + "\n";
    CHECK(sha256_hex(block) ==
          "ae78f10b56a14e936badcef9da435c5a0d68819a6edec3e166b7419726cc83d7");
}

TEST_CASE("scenario text shape") {
    Scenario s = build_scenario(ScenarioVariant::DisjunctiveEvidence);
    CHECK(s.question == "Based on the information above, is object A a blicket?");
    CHECK(s.instruction ==
          "Directly output the answer in the format '> True/False'. Ensure only one answer "
          "is included.");
    CHECK(s.key_object_label == "A");
    CHECK(s.key_object_is_blicket);
    // the training room uses digit labels, the test room letters
    CHECK(s.training_transcript.find("object 0") != std::string::npos);
    CHECK(s.training_transcript.find("object A") == std::string::npos);
    CHECK(s.test_transcript.find("object A") != std::string::npos);
    CHECK(s.test_transcript.find("You are in a new room.") != std::string::npos);
    std::string msg = scenario_message(s);
    CHECK(msg == s.training_transcript + "\n" + s.test_transcript + "\n" + s.question +
                     "\n\n" + s.instruction + "\n");
}

TEST_CASE("battery tallies parsed answers") {
    Scenario s = build_scenario(ScenarioVariant::ConjunctiveEvidence);

    SUBCASE("all true") {
        auto backend = make_scripted_backend({{std::nullopt, "> True"},
                                              {std::nullopt, "> True"},
                                              {std::nullopt, "> True"}});
        ScenarioTally t = run_scenario_battery(s, *backend, 3);
        CHECK(t.reps == 3);
        CHECK(t.true_count == 3);
        CHECK(t.unparsed_count == 0);
        CHECK(t.proportion_true == 1.0);
        CHECK(t.raw_replies.size() == 3);
    }

    SUBCASE("all false") {
        auto backend = make_scripted_backend({{"is object A", "> False"}});
        ScenarioTally t = run_scenario_battery(s, *backend, 4);
        CHECK(t.true_count == 0);
        CHECK(t.proportion_true == 0.0);
    }

    SUBCASE("alternating") {
        std::vector<ScriptEntry> script;
        for (int i = 0; i < 10; ++i)
            script.push_back({std::nullopt, i % 2 == 0 ? "> True" : "> False"});
        auto backend = make_scripted_backend(std::move(script));
        ScenarioTally t = run_scenario_battery(s, *backend, 10);
        CHECK(t.true_count == 5);
        CHECK(t.proportion_true == doctest::Approx(0.5));
    }

    SUBCASE("unparseable retries once then counts false") {
        auto backend = make_scripted_backend({{std::nullopt, "hmm, not sure"},
                                              {std::nullopt, "still mumbling"},
                                              {std::nullopt, "> True"}});
        ScenarioTally t = run_scenario_battery(s, *backend, 2);
        CHECK(t.reps == 2);
        CHECK(t.true_count == 1);
        CHECK(t.unparsed_count == 1);
        CHECK(t.raw_replies.size() == 2);  // one reply per rep, the last attempt
        CHECK(t.raw_replies[0] == "still mumbling");
    }

    SUBCASE("parseable first try consumes one reply per rep") {
        auto backend = make_scripted_backend(
            {{std::nullopt, "> False"}, {std::nullopt, "> True"}});
        ScenarioTally t = run_scenario_battery(s, *backend, 2);
        CHECK(t.true_count == 1);
        CHECK(t.unparsed_count == 0);
    }
}

TEST_CASE("backend failure mid-battery surfaces the partial tally") {
    Scenario s = build_scenario(ScenarioVariant::DisjunctiveEvidence);
    auto backend = make_scripted_backend({{std::nullopt, "> True"}, {std::nullopt, "> True"}});
    ScenarioTally partial;
    CHECK_THROWS_AS(run_scenario_battery(s, *backend, 5, &partial), BackendError);
    CHECK(partial.reps == 2);
    CHECK(partial.true_count == 2);
}

TEST_CASE("rep count must be positive") {
    Scenario s = build_scenario(ScenarioVariant::DisjunctiveEvidence);
    auto backend = make_scripted_backend({});
    CHECK_THROWS_AS(run_scenario_battery(s, *backend, 0), ConfigError);
}
