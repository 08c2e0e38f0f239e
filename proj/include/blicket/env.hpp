#pragma once
#include <cstdint>
#include <optional>
#include <string>

#include "blicket/rng.hpp"

namespace blicket {

enum class Rule { Disjunctive, Conjunctive };

std::string rule_name(Rule rule);
std::optional<Rule> rule_from_name(const std::string& name);

// Light state for a placement under a candidate blicket set. Bit i set in
// `placement` means object i is on the machine.
bool machine_output(Rule rule, std::uint32_t blicket_mask, std::uint32_t placement);

enum class ActionKind { Put, Take, Look, Exit };

struct Action {
    ActionKind kind = ActionKind::Look;
    int object = -1;        // Put/Take only
    bool to_floor = false;  // Put destination is the floor
};

bool operator==(const Action& a, const Action& b);

enum class ParseStatus { Ok, NoMatch, BadObject };

struct ParseResult {
    ParseStatus status = ParseStatus::NoMatch;
    Action action;
};

// Extracts a command from free-form reply text. The last line whose first
// non-space character is '>' is matched; when no such line exists the whole
// text is matched. Tolerates case, duplicate whitespace, optional articles
// ("the machine"), "off of", and a trailing period.
ParseResult parse_command(const std::string& text, int num_objects);

// Parses a True/False answer: last "> True" / "> False" occurrence wins;
// a bare "True"/"False" reply is accepted as a fallback.
std::optional<bool> parse_true_false(const std::string& text);

enum class LabelScheme { Digits, Letters };
std::string object_label(LabelScheme scheme, int index);

enum class OpeningVariant { Standard, Training, Test };

// Response phrasing for TAKE: "off the machine" vs "off of the machine".
// Command echoes always read "take object L off machine".
enum class TakePhrasing { OffThe, OffOfThe };

struct EnvConfig {
    int num_objects = 0;
    Rule rule = Rule::Disjunctive;
    int horizon = 32;
    LabelScheme labels = LabelScheme::Digits;
    OpeningVariant opening = OpeningVariant::Standard;
    TakePhrasing take_phrasing = TakePhrasing::OffThe;
    bool blank_before_commands = true;  // blank line between opening and first command
};

struct EnvState {
    EnvConfig config;
    std::uint32_t blicket_mask = 0;
    std::uint32_t placement = 0;
    bool light_on = false;
    int steps_taken = 0;
    bool terminated = false;
};

// Draws the blicket set by a partial Fisher-Yates pass over object indices,
// then the initial placement (independent Bernoulli(0.1) per object, index
// order), both from a fresh generator seeded with env_seed.
EnvState init_env(const EnvConfig& config, int num_blickets, std::uint64_t env_seed);

// Fixed-instance variant used by scripted scenarios and replays.
EnvState init_env_fixed(const EnvConfig& config, std::uint32_t blicket_mask,
                        std::uint32_t placement);

struct Event {
    Action action;
    std::string command_text;   // canonical echo, e.g. "put object 2 on machine"
    std::string rendered_text;  // environment response line(s)
    bool light_after = false;
    bool observation = false;   // true when the event carries a light reading
    bool invalid_object = false;
    std::uint32_t placement_after = 0;
};

// Applies one action to the state: moves the object, recomputes the light,
// advances the step counter, renders the response. Out-of-range objects
// consume a step and produce an error line with no observation. EXIT and
// reaching the horizon terminate the state.
Event apply_action(EnvState& state, const Action& action);

std::string render_command(const Action& action, LabelScheme scheme);
std::string render_light(bool on);
std::string render_locations(const EnvState& state);
std::string render_initial_observation(const EnvState& state);

// "> command\nresponse\n" as appended to a transcript.
std::string render_event(const Event& event);

// Opening plus its separator from the first command block.
std::string transcript_prefix(const EnvState& state);

}
