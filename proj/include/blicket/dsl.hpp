#pragma once
#include <string>
#include <vector>

#include "blicket/hypothesis.hpp"

namespace blicket {

// Canonical surface syntax: `HYP mask=[0,1,1] rule=ALL`. ANY maps to the
// disjunctive rule, ALL to the conjunctive rule.
std::string render_hypothesis(const Hypothesis& h, int num_objects);

// Strict parse of the canonical syntax; whitespace-tolerant and
// case-insensitive. Throws ConfigError on arity or syntax violations.
Hypothesis parse_hypothesis(const std::string& text, int num_objects);

// Permissive extractor for free-form reply text. Recovers canonical HYP
// lines and code-style fragments (a bracketed 0/1 or true/false vector of
// length num_objects near an all-of/any-of combinator word). De-duplicates
// by (mask, rule), keeps order of first appearance, never throws.
std::vector<Hypothesis> extract_hypotheses(const std::string& text, int num_objects);

}
