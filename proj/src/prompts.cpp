#include "blicket/prompts.hpp"

#include <cstdlib>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "blicket/digest.hpp"
#include "blicket/errors.hpp"

namespace blicket {

namespace {

struct DataFile {
    const char* file;
    const char* sha256;
};

const DataFile kSystemFiles[] = {
    {"system_human_default.txt",
     "81a7d4f1740d14d2806b505eea6ce8107a7ae00d287dd02bc889373559e5ae80"},
    {"system_human_conjunctive.txt",
     "38aef99591464ef53cd74e22f76fc5f942fad8680b0cf34ccbcfab6392ea35b2"},
    {"system_math_definition.txt",
     "fccb309d5bd1d55d22029e170d070eca98d03f90d0d84b8d829dd7fc91b19ca3"},
};

const DataFile kStyleFiles[] = {
    {"style_default.txt", "6fbcce80ab36bd8d290e3bf750fb57b5c97b817b83897febbe034066eae6a030"},
    {"style_react.txt", "7640ff277ea12964e8cd84460670cadef13b6534770b88cbf5d5de766c2bac30"},
    {"style_reflexion.txt", "fe6bdc5621941a59d50665573b0d56e5981984f5af8a2a2638557c7b512ee282"},
    {"style_cot.txt", "0d86c32cff167b72803f4dd332099a2a7ca281ba2389abd3f0e8d13448cf4059"},
};

const char* kBracketSlots[] = {
    "HISTORICAL OBSERVATIONS", "ELIMINATED HYPOTHESES", "ACTIVE HYPOTHESES",
    "OBSERVATIONS SO FAR", "QUESTION",
};

PromptTemplate load_checked(const std::string& name, const DataFile& df) {
    std::string path = data_dir() + "/prompts/" + df.file;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("missing prompt data file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string body = buf.str();
    if (sha256_hex(body) != df.sha256)
        throw ConfigError("prompt data file " + path + " fails its integrity check");
    return PromptTemplate{name, body};
}

}  // namespace

std::string system_variant_name(SystemMessageVariant v) {
    switch (v) {
        case SystemMessageVariant::HumanDefault: return "human_default";
        case SystemMessageVariant::HumanConjunctive: return "human_conjunctive";
        case SystemMessageVariant::MathDefinition: return "math_definition";
    }
    return "";
}

std::optional<SystemMessageVariant> system_variant_from_name(const std::string& name) {
    if (name == "human_default") return SystemMessageVariant::HumanDefault;
    if (name == "human_conjunctive") return SystemMessageVariant::HumanConjunctive;
    if (name == "math_definition") return SystemMessageVariant::MathDefinition;
    return std::nullopt;
}

std::string prompting_style_name(PromptingStyle s) {
    switch (s) {
        case PromptingStyle::Default: return "default";
        case PromptingStyle::React: return "react";
        case PromptingStyle::Reflexion: return "reflexion";
        case PromptingStyle::Cot: return "cot";
    }
    return "";
}

std::optional<PromptingStyle> prompting_style_from_name(const std::string& name) {
    if (name == "default") return PromptingStyle::Default;
    if (name == "react") return PromptingStyle::React;
    if (name == "reflexion") return PromptingStyle::Reflexion;
    if (name == "cot") return PromptingStyle::Cot;
    return std::nullopt;
}

std::string data_dir() {
    const char* env = std::getenv("BLICKET_DATA_DIR");
    if (env && *env) return env;
    return BLICKET_DATA_DIR;
}

PromptTemplate load_system_template(SystemMessageVariant v) {
    return load_checked("system_" + system_variant_name(v),
                        kSystemFiles[static_cast<int>(v)]);
}

PromptTemplate load_style_template(PromptingStyle s) {
    return load_checked("style_" + prompting_style_name(s), kStyleFiles[static_cast<int>(s)]);
}

PromptTemplate sampling_generation_template() {
    return PromptTemplate{
        "sampling_generation",
        "You have seen the following observations so far:\n"
        "[HISTORICAL OBSERVATIONS]\n"
        "\n"
        "Come up with some hypothesis about how the world works. Write each one as a line in "
        "the format 'HYP mask=[b0,b1,...] rule=ANY|ALL'. The hypothesis should:\n"
        "- Use a boolean mask of length #NUM_OBJECTS#, where 0 means object is not a blicket, "
        "and 1 means object is a blicket\n"
        "- Use rule=ANY when any blicket on the machine turns the light on, and rule=ALL when "
        "the light turns on only once all blickets are on the machine\n"
        "- Only consider hypothesis where one or all objects that are blickets needs to be put "
        "on the machine.\n"
        "- Do not consider the \"sum\" operation. Only consider boolean operations.\n"
        "\n"
        "Produce #NUM_HYPOTHESES# hypothesis, do not generate the same hypothesis. Be diverse "
        "in both the blicket masks and the potential functions.\n"
        "\n"
        "Do not generate the hypothesis you have already eliminated: \n"
        "[ELIMINATED HYPOTHESES]\n"
        "\n"
        "Do not generate hypothesis you have already generated: \n"
        "[ACTIVE HYPOTHESES]\n"
        "\n"
        "Directly output the answer, ensure only one answer is included. Return a set of "
        "hypotheses, one per line.\n"};
}

PromptTemplate sampling_action_template() {
    return PromptTemplate{
        "sampling_action",
        "You are currently entertaining the following list of hypothesis: \n"
        "[ACTIVE HYPOTHESES]\n"
        "\n"
        "You have seen the following observations so far:\n"
        "[OBSERVATIONS SO FAR] \n"
        "\n"
        "Given the observations so far, and the list of hypotheses (hypothesis space), take an "
        "action which will disprove the existing hypothesis.\n"
        "\n"
        "Directly output the answer, ensure only one answer is included. Output the action in "
        "the format '> action'. Ensure only one action is included.\n"};
}

PromptTemplate sampling_qa_template() {
    return PromptTemplate{
        "sampling_qa",
        "You have seen the following observations so far:\n"
        "[HISTORICAL OBSERVATIONS]\n"
        "\n"
        "You have disproven the following hypothesis: \n"
        "[ELIMINATED HYPOTHESES]\n"
        "\n"
        "You have not yet disproven the following hypothesis: \n"
        "[ACTIVE HYPOTHESES]\n"
        "\n"
        "Based on the information above, answer the following question: [QUESTION]\n"
        "\n"
        "Output the answer in the format '> True/False'. Ensure only one answer is included.\n"};
}

std::string instantiate_prompt(const PromptTemplate& tmpl,
                               const std::map<std::string, std::string>& bindings) {
    // Collect placeholders actually present in the body.
    std::set<std::string> required;
    static const std::regex hash_token("#([A-Z][A-Z0-9_]*)#");
    for (auto it = std::sregex_iterator(tmpl.body.begin(), tmpl.body.end(), hash_token);
         it != std::sregex_iterator(); ++it)
        required.insert((*it)[1].str());
    for (const char* slot : kBracketSlots)
        if (tmpl.body.find("[" + std::string(slot) + "]") != std::string::npos)
            required.insert(slot);

    std::string missing;
    for (const std::string& name : required) {
        if (!bindings.count(name)) {
            if (!missing.empty()) missing += ", ";
            missing += name;
        }
    }
    if (!missing.empty())
        throw TemplateError("template '" + tmpl.name + "' missing bindings: " + missing);

    std::string out = tmpl.body;
    for (const std::string& name : required) {
        bool bracket = false;
        for (const char* slot : kBracketSlots)
            if (name == slot) bracket = true;
        std::string token = bracket ? "[" + name + "]" : "#" + name + "#";
        const std::string& value = bindings.at(name);
        std::size_t pos = 0;
        while ((pos = out.find(token, pos)) != std::string::npos) {
            out.replace(pos, token.size(), value);
            pos += value.size();
        }
    }
    return out;
}

}
