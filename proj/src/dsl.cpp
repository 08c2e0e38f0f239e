#include "blicket/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include "blicket/errors.hpp"

namespace blicket {

namespace {

std::string lowered(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trimmed(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// Parses a comma-separated 0/1/true/false list; returns false on any other
// token. Bits are appended in list order (index = object index).
bool parse_bit_list(const std::string& body, std::vector<int>& bits) {
    bits.clear();
    std::vector<std::string> segments;
    std::string cur;
    for (char c : body) {
        if (c == ',') {
            segments.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    segments.push_back(cur);
    if (segments.size() == 1 && trimmed(segments[0]).empty()) return true;
    for (const std::string& seg : segments) {
        std::string t = lowered(trimmed(seg));
        if (t == "0" || t == "false")
            bits.push_back(0);
        else if (t == "1" || t == "true")
            bits.push_back(1);
        else
            return false;
    }
    return true;
}

std::uint32_t mask_from_bits(const std::vector<int>& bits) {
    std::uint32_t mask = 0;
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) mask |= 1u << i;
    return mask;
}

const std::regex kCanonical(
    R"(hyp\s*mask\s*=\s*\[([^\[\]]*)\]\s*rule\s*=\s*([a-z]+))", std::regex::icase);

const std::regex kBracket(R"(\[([^\[\]]*)\])");

const std::regex kCombinator(R"(\b(all|every|any|some)\b)", std::regex::icase);

}  // namespace

std::string render_hypothesis(const Hypothesis& h, int num_objects) {
    std::string out = "HYP mask=[";
    for (int i = 0; i < num_objects; ++i) {
        if (i) out += ",";
        out += ((h.mask >> i) & 1u) ? "1" : "0";
    }
    out += "] rule=";
    out += h.rule == Rule::Disjunctive ? "ANY" : "ALL";
    return out;
}

Hypothesis parse_hypothesis(const std::string& text, int num_objects) {
    static const std::regex strict(
        R"(^\s*hyp\s+mask\s*=\s*\[([^\[\]]*)\]\s*rule\s*=\s*([a-z]+)\s*$)",
        std::regex::icase);
    std::smatch m;
    if (!std::regex_match(text, m, strict))
        throw DslError("syntax error: expected HYP mask=[...] rule=ANY|ALL");
    std::vector<int> bits;
    if (!parse_bit_list(m[1].str(), bits))
        throw DslError("syntax error: malformed mask literal");
    if (static_cast<int>(bits.size()) != num_objects)
        throw DslError("arity error: mask length " + std::to_string(bits.size()) +
                       ", expected " + std::to_string(num_objects));
    std::string rule_word = lowered(m[2].str());
    Rule rule;
    if (rule_word == "any")
        rule = Rule::Disjunctive;
    else if (rule_word == "all")
        rule = Rule::Conjunctive;
    else
        throw DslError("syntax error: unknown rule word '" + rule_word + "'");
    return Hypothesis{mask_from_bits(bits), rule};
}

std::vector<Hypothesis> extract_hypotheses(const std::string& text, int num_objects) {
    struct Found {
        std::size_t pos;
        Hypothesis h;
    };
    std::vector<Found> found;
    std::vector<std::pair<std::size_t, std::size_t>> canonical_spans;

    for (auto it = std::sregex_iterator(text.begin(), text.end(), kCanonical);
         it != std::sregex_iterator(); ++it) {
        const std::smatch& m = *it;
        std::vector<int> bits;
        if (!parse_bit_list(m[1].str(), bits)) continue;
        if (static_cast<int>(bits.size()) != num_objects) continue;
        std::string rule_word = lowered(m[2].str());
        Rule rule;
        if (rule_word == "any")
            rule = Rule::Disjunctive;
        else if (rule_word == "all")
            rule = Rule::Conjunctive;
        else
            continue;
        std::size_t pos = static_cast<std::size_t>(m.position(0));
        found.push_back({pos, Hypothesis{mask_from_bits(bits), rule}});
        canonical_spans.emplace_back(pos, pos + static_cast<std::size_t>(m.length(0)));
    }

    // Code-style fragments: a 0/1 (or true/false) vector of the right arity
    // with the nearest combinator word deciding the rule. The window keeps
    // unrelated prose from supplying a combinator.
    constexpr std::size_t kWindow = 200;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), kBracket);
         it != std::sregex_iterator(); ++it) {
        const std::smatch& m = *it;
        std::size_t pos = static_cast<std::size_t>(m.position(0));
        std::size_t end = pos + static_cast<std::size_t>(m.length(0));
        bool inside_canonical = false;
        for (auto [a, b] : canonical_spans)
            if (pos >= a && end <= b) inside_canonical = true;
        if (inside_canonical) continue;
        std::vector<int> bits;
        if (!parse_bit_list(m[1].str(), bits)) continue;
        if (static_cast<int>(bits.size()) != num_objects) continue;

        std::size_t win_a = pos > kWindow ? pos - kWindow : 0;
        std::size_t win_b = std::min(text.size(), end + kWindow);
        std::string window = text.substr(win_a, win_b - win_a);
        long best_dist = -1;
        Rule rule = Rule::Disjunctive;
        for (auto cit = std::sregex_iterator(window.begin(), window.end(), kCombinator);
             cit != std::sregex_iterator(); ++cit) {
            std::size_t wpos = win_a + static_cast<std::size_t>(cit->position(0));
            long dist;
            if (wpos + static_cast<std::size_t>(cit->length(0)) <= pos)
                dist = static_cast<long>(pos - wpos - static_cast<std::size_t>(cit->length(0)));
            else if (wpos >= end)
                dist = static_cast<long>(wpos - end);
            else
                dist = 0;
            if (best_dist < 0 || dist < best_dist) {
                best_dist = dist;
                std::string w = lowered(cit->str());
                rule = (w == "all" || w == "every") ? Rule::Conjunctive : Rule::Disjunctive;
            }
        }
        if (best_dist < 0) continue;
        found.push_back({pos, Hypothesis{mask_from_bits(bits), rule}});
    }

    std::stable_sort(found.begin(), found.end(),
                     [](const Found& a, const Found& b) { return a.pos < b.pos; });
    std::vector<Hypothesis> out;
    for (const Found& f : found) {
        bool dup = false;
        for (const Hypothesis& h : out)
            if (h == f.h) dup = true;
        if (!dup) out.push_back(f.h);
    }
    return out;
}

}
