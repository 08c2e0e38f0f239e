#pragma once
#include <cstdint>
#include <vector>

#include "blicket/env.hpp"

namespace blicket {

struct Hypothesis {
    std::uint32_t mask = 0;
    Rule rule = Rule::Disjunctive;
};

bool operator==(const Hypothesis& a, const Hypothesis& b);
bool operator!=(const Hypothesis& a, const Hypothesis& b);

// Light prediction for a placement under hypothesis h.
bool predict(const Hypothesis& h, std::uint32_t placement);

// Mask value under lexicographic membership-vector order, object 0 most
// significant: the bit-reversal of mask over num_objects positions.
std::uint32_t lex_value(std::uint32_t mask, int num_objects);

// Canonical rank: lexicographic mask order, disjunctive before conjunctive.
std::size_t hypothesis_rank(const Hypothesis& h, int num_objects);

struct HypothesisSpace {
    int num_objects = 0;
    std::vector<Hypothesis> hypotheses;  // canonical order, 2^(num_objects+1) entries
};

HypothesisSpace enumerate_space(int num_objects);

struct Observation {
    std::uint32_t placement = 0;
    bool light_on = false;
};

// Hard membership flags over the canonical space. Functional duplicates
// (distinct mask/rule pairs with equal truth tables) are kept as distinct
// hypotheses.
struct Belief {
    const HypothesisSpace* space = nullptr;
    std::vector<std::uint8_t> consistent;
    std::size_t support_size = 0;
};

Belief full_belief(const HypothesisSpace& space);

// Survivors of one observation. Throws InconsistentHistoryError if the
// observation eliminates the entire support.
Belief filter_consistent(const Belief& belief, const Observation& obs);

// log2 of the support size: entropy of the uniform posterior.
double entropy_bits(const Belief& belief);

// Entropy drop from one observation.
double info_gain(const Belief& belief, const Observation& obs);

// The N placements reachable by toggling one object, in object index order.
std::vector<std::uint32_t> candidate_next_states(std::uint32_t placement, int num_objects);

// Expected information gain of moving to `candidate`: the support splits by
// predicted light into counts k0/k1 and the gain is
// log2 K - (k0/K) log2 k0 - (k1/K) log2 k1 (zero-count terms dropped).
double expected_info_gain(const Belief& belief, std::uint32_t candidate);

// True when every pair of surviving hypotheses has an identical truth table
// over all placements. Closed form: a singleton support, or exactly two
// survivors sharing a one-bit mask with opposite rules.
bool truth_table_resolved(const Belief& belief);

std::vector<Hypothesis> support_members(const Belief& belief);

// AND of blicket masks over the support.
std::uint32_t blicket_mask_intersection(const Belief& belief);

// True iff every surviving hypothesis marks `object` as a blicket.
bool certain_blicket(const Belief& belief, int object);

// True when surviving hypotheses disagree about the light at `placement`.
bool support_disagrees_at(const Belief& belief, std::uint32_t placement);

}
