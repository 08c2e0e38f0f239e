#include "blicket/env.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <regex>
#include <vector>

#include "blicket/errors.hpp"

namespace blicket {

std::string rule_name(Rule rule) {
    return rule == Rule::Disjunctive ? "disjunctive" : "conjunctive";
}

std::optional<Rule> rule_from_name(const std::string& name) {
    if (name == "disjunctive") return Rule::Disjunctive;
    if (name == "conjunctive") return Rule::Conjunctive;
    return std::nullopt;
}

bool machine_output(Rule rule, std::uint32_t blicket_mask, std::uint32_t placement) {
    if (rule == Rule::Disjunctive) return (blicket_mask & placement) != 0;
    return (blicket_mask & placement) == blicket_mask;
}

bool operator==(const Action& a, const Action& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == ActionKind::Put) return a.object == b.object && a.to_floor == b.to_floor;
    if (a.kind == ActionKind::Take) return a.object == b.object;
    return true;
}

namespace {

std::string lowered(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string normalize_candidate(std::string s) {
    // lowercase, collapse whitespace, strip trailing sentence punctuation
    std::string out;
    bool in_space = true;
    for (char raw : s) {
        unsigned char c = static_cast<unsigned char>(raw);
        if (std::isspace(c)) {
            if (!in_space && !out.empty()) out.push_back(' ');
            in_space = true;
        } else {
            out.push_back(static_cast<char>(std::tolower(c)));
            in_space = false;
        }
    }
    while (!out.empty() && (out.back() == ' ' || out.back() == '.' || out.back() == '!')) out.pop_back();
    return out;
}

// Last line whose first non-space char is '>', stripped of the marker;
// falls back to the whole text.
std::string command_candidate(const std::string& text) {
    std::string best;
    bool found = false;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(pos, end - pos);
        std::size_t i = line.find_first_not_of(" \t");
        if (i != std::string::npos && line[i] == '>') {
            best = line.substr(i + 1);
            found = true;
        }
        if (end == text.size()) break;
        pos = end + 1;
    }
    return found ? best : text;
}

const std::regex kPut(R"(^put object (\d{1,3}|[a-z]) on (?:the )?(machine|floor)$)");
const std::regex kTake(R"(^take object (\d{1,3}|[a-z]) off (?:of )?(?:the )?machine$)");

int parse_object_token(const std::string& tok) {
    if (tok.size() == 1 && tok[0] >= 'a' && tok[0] <= 'z') return tok[0] - 'a';
    return std::stoi(tok);
}

}  // namespace

ParseResult parse_command(const std::string& text, int num_objects) {
    std::string cand = normalize_candidate(command_candidate(text));
    ParseResult result;
    if (cand == "look") {
        result.status = ParseStatus::Ok;
        result.action = Action{ActionKind::Look, -1, false};
        return result;
    }
    if (cand == "exit") {
        result.status = ParseStatus::Ok;
        result.action = Action{ActionKind::Exit, -1, false};
        return result;
    }
    std::smatch m;
    if (std::regex_match(cand, m, kPut)) {
        int obj = parse_object_token(m[1].str());
        bool floor = m[2].str() == "floor";
        if (obj < 0 || obj >= num_objects) {
            result.status = ParseStatus::BadObject;
            result.action = Action{ActionKind::Put, obj, floor};
            return result;
        }
        result.status = ParseStatus::Ok;
        result.action = Action{ActionKind::Put, obj, floor};
        return result;
    }
    if (std::regex_match(cand, m, kTake)) {
        int obj = parse_object_token(m[1].str());
        if (obj < 0 || obj >= num_objects) {
            result.status = ParseStatus::BadObject;
            result.action = Action{ActionKind::Take, obj, false};
            return result;
        }
        result.status = ParseStatus::Ok;
        result.action = Action{ActionKind::Take, obj, false};
        return result;
    }
    return result;
}

std::optional<bool> parse_true_false(const std::string& text) {
    static const std::regex marked(R"(>\s*(true|false))", std::regex::icase);
    auto begin = std::sregex_iterator(text.begin(), text.end(), marked);
    auto end = std::sregex_iterator();
    std::optional<bool> answer;
    for (auto it = begin; it != end; ++it) {
        answer = lowered((*it)[1].str()) == "true";
    }
    if (answer) return answer;
    std::string cand = normalize_candidate(text);
    if (cand == "true") return true;
    if (cand == "false") return false;
    return std::nullopt;
}

std::string object_label(LabelScheme scheme, int index) {
    if (scheme == LabelScheme::Letters) return std::string(1, static_cast<char>('A' + index));
    return std::to_string(index);
}

EnvState init_env(const EnvConfig& config, int num_blickets, std::uint64_t env_seed) {
    if (config.num_objects < 1 || config.num_objects > 24)
        throw ConfigError("num_objects must be in [1, 24]");
    if (num_blickets < 0 || num_blickets > config.num_objects)
        throw ConfigError("num_blickets must be in [0, num_objects]");
    Rng rng(env_seed);
    int n = config.num_objects;
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < num_blickets; ++i) {
        int j = i + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n - i)));
        std::swap(idx[i], idx[j]);
    }
    std::uint32_t mask = 0;
    for (int i = 0; i < num_blickets; ++i) mask |= 1u << idx[i];
    std::uint32_t placement = 0;
    for (int i = 0; i < n; ++i)
        if (rng.bernoulli(0.1)) placement |= 1u << i;
    return init_env_fixed(config, mask, placement);
}

EnvState init_env_fixed(const EnvConfig& config, std::uint32_t blicket_mask,
                        std::uint32_t placement) {
    if (config.num_objects < 1 || config.num_objects > 24)
        throw ConfigError("num_objects must be in [1, 24]");
    if (config.horizon < 1) throw ConfigError("horizon must be at least 1");
    EnvState state;
    state.config = config;
    state.blicket_mask = blicket_mask;
    state.placement = placement;
    state.light_on = machine_output(config.rule, blicket_mask, placement);
    return state;
}

std::string render_command(const Action& action, LabelScheme scheme) {
    switch (action.kind) {
        case ActionKind::Put:
            return "put object " + object_label(scheme, action.object) +
                   (action.to_floor ? " on floor" : " on machine");
        case ActionKind::Take:
            return "take object " + object_label(scheme, action.object) + " off machine";
        case ActionKind::Look:
            return "look";
        case ActionKind::Exit:
            return "exit";
    }
    return "";
}

std::string render_light(bool on) {
    return on ? "The light on the machine is now on."
              : "The light on the machine is currently off.";
}

std::string render_locations(const EnvState& state) {
    std::string out;
    for (int i = 0; i < state.config.num_objects; ++i) {
        if (i) out += ", ";
        out += "object " + object_label(state.config.labels, i) + " is on the " +
               ((state.placement >> i) & 1u ? "machine" : "floor");
    }
    return out;
}

std::string render_initial_observation(const EnvState& state) {
    std::string locs = render_locations(state);
    std::string n = std::to_string(state.config.num_objects);
    std::string tail = "The machine hums softly in front of you, seemingly waiting. " +
                       render_light(state.light_on) +
                       " You wonder if there is a relationship between the objects and the machine.";
    switch (state.config.opening) {
        case OpeningVariant::Standard:
            return "You are in a room. You see a machine at the center of this room. \n\n"
                   "There are also " + n + " objects scattered around the room. You observe them: " +
                   locs + ". \n\n" + tail;
        case OpeningVariant::Training:
            return "You are in a room. You see a machine at the center of this room.\n\n"
                   "There are also " + n + " objects scattered around the room. You observe them: " +
                   locs + ". " + tail;
        case OpeningVariant::Test:
            return "You are in a new room. You see the same machine as the one you previously saw "
                   "at the center of this room.\n\n"
                   "You now have " + n + " different objects scattered around the room. "
                   "You observe them: " + locs + ". " + tail;
    }
    return "";
}

Event apply_action(EnvState& state, const Action& action) {
    if (state.terminated) throw Error("episode is closed");
    Event event;
    event.action = action;
    event.command_text = render_command(action, state.config.labels);
    state.steps_taken += 1;

    bool object_action = action.kind == ActionKind::Put || action.kind == ActionKind::Take;
    if (object_action && (action.object < 0 || action.object >= state.config.num_objects)) {
        event.invalid_object = true;
        event.rendered_text = "You don't see that object.";
        event.light_after = state.light_on;
        event.placement_after = state.placement;
        if (state.steps_taken >= state.config.horizon) state.terminated = true;
        return event;
    }

    std::string label;
    if (object_action) label = object_label(state.config.labels, action.object);

    switch (action.kind) {
        case ActionKind::Put:
            if (action.to_floor)
                state.placement &= ~(1u << action.object);
            else
                state.placement |= 1u << action.object;
            state.light_on = machine_output(state.config.rule, state.blicket_mask, state.placement);
            event.rendered_text = "You put object " + label +
                                  (action.to_floor ? " on the floor. " : " on the machine. ") +
                                  render_light(state.light_on);
            event.observation = true;
            break;
        case ActionKind::Take: {
            state.placement &= ~(1u << action.object);
            state.light_on = machine_output(state.config.rule, state.blicket_mask, state.placement);
            std::string off = state.config.take_phrasing == TakePhrasing::OffOfThe ? " off of the machine. "
                                                                                   : " off the machine. ";
            event.rendered_text = "You took object " + label + off + render_light(state.light_on);
            event.observation = true;
            break;
        }
        case ActionKind::Look:
            event.rendered_text = "You observe them: " + render_locations(state) + ". " +
                                  render_light(state.light_on);
            event.observation = true;
            break;
        case ActionKind::Exit:
            event.rendered_text = "Exiting the episode.";
            state.terminated = true;
            break;
    }

    event.light_after = state.light_on;
    event.placement_after = state.placement;
    if (state.steps_taken >= state.config.horizon) state.terminated = true;
    return event;
}

std::string render_event(const Event& event) {
    return "> " + event.command_text + "\n" + event.rendered_text + "\n";
}

std::string transcript_prefix(const EnvState& state) {
    return render_initial_observation(state) +
           (state.config.blank_before_commands ? "\n\n" : "\n");
}

}
