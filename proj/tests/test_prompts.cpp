#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "blicket/errors.hpp"
#include "blicket/prompts.hpp"

using namespace blicket;

TEST_CASE("enum names round trip") {
    for (auto v : {SystemMessageVariant::HumanDefault, SystemMessageVariant::HumanConjunctive,
                   SystemMessageVariant::MathDefinition})
        CHECK(system_variant_from_name(system_variant_name(v)) == v);
    for (auto s : {PromptingStyle::Default, PromptingStyle::React, PromptingStyle::Reflexion,
                   PromptingStyle::Cot})
        CHECK(prompting_style_from_name(prompting_style_name(s)) == s);
    CHECK_FALSE(system_variant_from_name("nonsense").has_value());
    CHECK_FALSE(prompting_style_from_name("nonsense").has_value());
}

TEST_CASE("system templates load and pass their integrity checks") {
    PromptTemplate t = load_system_template(SystemMessageVariant::HumanDefault);
    CHECK(t.name == "system_human_default");
    CHECK(t.body.find("You are an intelligent, curious agent.") != std::string::npos);
    CHECK(t.body.find("#HORIZON#") != std::string::npos);

    PromptTemplate conj = load_system_template(SystemMessageVariant::HumanConjunctive);
    CHECK(conj.body.find("#HORIZON#") != std::string::npos);

    PromptTemplate math = load_system_template(SystemMessageVariant::MathDefinition);
    CHECK(math.body.find("#HORIZON#") != std::string::npos);
}

TEST_CASE("style templates load") {
    CHECK_FALSE(load_style_template(PromptingStyle::Default).body.empty());
    CHECK(load_style_template(PromptingStyle::React).body.find("think") != std::string::npos);
    CHECK_FALSE(load_style_template(PromptingStyle::Reflexion).body.empty());
    CHECK_FALSE(load_style_template(PromptingStyle::Cot).body.empty());
}

TEST_CASE("a tampered data file fails its integrity check") {
    std::string dir = "/tmp/blicket_tampered_prompts";
    std::system(("rm -rf " + dir + " && mkdir -p " + dir + " && cp " + data_dir() +
                 "/prompts/*.txt " + dir + "/")
                    .c_str());
    {
        std::ofstream f(dir + "/system_human_default.txt", std::ios::app);
        f << "extra drift\n";
    }
    std::string old = data_dir();
    ::setenv("BLICKET_DATA_DIR", dir.c_str(), 1);
    // data files live under <dir>/prompts in the real layout
    std::system(("mkdir -p " + dir + "/prompts && mv " + dir + "/*.txt " + dir + "/prompts/")
                    .c_str());
    CHECK_THROWS_AS(load_system_template(SystemMessageVariant::HumanDefault), ConfigError);
    try {
        load_system_template(SystemMessageVariant::HumanDefault);
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("integrity") != std::string::npos);
    }
    ::unsetenv("BLICKET_DATA_DIR");
    CHECK(data_dir() == old);
    CHECK_NOTHROW(load_system_template(SystemMessageVariant::HumanDefault));
}

TEST_CASE("instantiate replaces hash tokens") {
    PromptTemplate t{"demo", "You have #HORIZON# steps. Use all #HORIZON# wisely."};
    std::string out = instantiate_prompt(t, {{"HORIZON", "32"}});
    CHECK(out == "You have 32 steps. Use all 32 wisely.");
}

TEST_CASE("instantiate replaces bracket slots") {
    PromptTemplate t{"demo",
                     "Observed:\n[OBSERVATIONS SO FAR]\nQuestion: [QUESTION]\n"};
    std::string out = instantiate_prompt(
        t, {{"OBSERVATIONS SO FAR", "- nothing yet"}, {"QUESTION", "Is object 0 a blicket?"}});
    CHECK(out == "Observed:\n- nothing yet\nQuestion: Is object 0 a blicket?\n");
}

TEST_CASE("instantiate reports missing bindings by name") {
    PromptTemplate t{"demo", "#NUM_OBJECTS# and #NUM_HYPOTHESES# and [QUESTION]"};
    try {
        instantiate_prompt(t, {{"NUM_OBJECTS", "4"}});
        FAIL("expected TemplateError");
    } catch (const TemplateError& e) {
        std::string what = e.what();
        CHECK(what.find("NUM_HYPOTHESES") != std::string::npos);
        CHECK(what.find("QUESTION") != std::string::npos);
        CHECK(what.find("NUM_OBJECTS") == std::string::npos);
    }
}

TEST_CASE("instantiate ignores unused bindings") {
    PromptTemplate t{"demo", "plain text"};
    CHECK(instantiate_prompt(t, {{"HORIZON", "9"}}) == "plain text");
}

TEST_CASE("sampling templates have the expected slots") {
    PromptTemplate gen = sampling_generation_template();
    CHECK(gen.body.find("#NUM_OBJECTS#") != std::string::npos);
    CHECK(gen.body.find("#NUM_HYPOTHESES#") != std::string::npos);
    CHECK(gen.body.find("[HISTORICAL OBSERVATIONS]") != std::string::npos);
    CHECK(gen.body.find("[ELIMINATED HYPOTHESES]") != std::string::npos);
    CHECK(gen.body.find("[ACTIVE HYPOTHESES]") != std::string::npos);

    PromptTemplate action = sampling_action_template();
    CHECK(action.body.find("[ACTIVE HYPOTHESES]") != std::string::npos);
    CHECK(action.body.find("[OBSERVATIONS SO FAR]") != std::string::npos);

    PromptTemplate qa = sampling_qa_template();
    CHECK(qa.body.find("[QUESTION]") != std::string::npos);
    CHECK(qa.body.find("[HISTORICAL OBSERVATIONS]") != std::string::npos);

    std::string out = instantiate_prompt(
        gen, {{"NUM_OBJECTS", "4"},
              {"NUM_HYPOTHESES", "16"},
              {"HISTORICAL OBSERVATIONS", "- placement [0,0,0,0] -> light off"},
              {"ELIMINATED HYPOTHESES", "(none)"},
              {"ACTIVE HYPOTHESES", "(none)"}});
    CHECK(out.find('#') == std::string::npos);
    CHECK(out.find("4") != std::string::npos);
    CHECK(out.find("16") != std::string::npos);
}

TEST_CASE("system message instantiates with the horizon") {
    PromptTemplate t = load_system_template(SystemMessageVariant::HumanDefault);
    std::string out = instantiate_prompt(t, {{"HORIZON", "32"}});
    CHECK(out.find("32") != std::string::npos);
    CHECK(out.find("#HORIZON#") == std::string::npos);
}
