#include "blicket/hypothesis.hpp"

#include <bit>
#include <cmath>

#include "blicket/errors.hpp"

namespace blicket {

bool operator==(const Hypothesis& a, const Hypothesis& b) {
    return a.mask == b.mask && a.rule == b.rule;
}

bool operator!=(const Hypothesis& a, const Hypothesis& b) { return !(a == b); }

bool predict(const Hypothesis& h, std::uint32_t placement) {
    return machine_output(h.rule, h.mask, placement);
}

std::uint32_t lex_value(std::uint32_t mask, int num_objects) {
    std::uint32_t v = 0;
    for (int i = 0; i < num_objects; ++i)
        if ((mask >> i) & 1u) v |= 1u << (num_objects - 1 - i);
    return v;
}

std::size_t hypothesis_rank(const Hypothesis& h, int num_objects) {
    return 2u * static_cast<std::size_t>(lex_value(h.mask, num_objects)) +
           (h.rule == Rule::Conjunctive ? 1u : 0u);
}

HypothesisSpace enumerate_space(int num_objects) {
    if (num_objects < 1 || num_objects > 24)
        throw ConfigError("num_objects must be in [1, 24]");
    HypothesisSpace space;
    space.num_objects = num_objects;
    std::size_t count = std::size_t{1} << (num_objects + 1);
    space.hypotheses.resize(count);
    for (std::uint32_t lex = 0; lex < (1u << num_objects); ++lex) {
        std::uint32_t mask = lex_value(lex, num_objects);  // bit reversal is its own inverse
        space.hypotheses[2 * lex] = Hypothesis{mask, Rule::Disjunctive};
        space.hypotheses[2 * lex + 1] = Hypothesis{mask, Rule::Conjunctive};
    }
    return space;
}

Belief full_belief(const HypothesisSpace& space) {
    Belief b;
    b.space = &space;
    b.consistent.assign(space.hypotheses.size(), 1);
    b.support_size = space.hypotheses.size();
    return b;
}

Belief filter_consistent(const Belief& belief, const Observation& obs) {
    Belief out = belief;
    std::size_t kept = 0;
    for (std::size_t i = 0; i < out.consistent.size(); ++i) {
        if (!out.consistent[i]) continue;
        if (predict(out.space->hypotheses[i], obs.placement) == obs.light_on)
            ++kept;
        else
            out.consistent[i] = 0;
    }
    if (kept == 0) throw InconsistentHistoryError("observation eliminates every hypothesis");
    out.support_size = kept;
    return out;
}

double entropy_bits(const Belief& belief) {
    return std::log2(static_cast<double>(belief.support_size));
}

double info_gain(const Belief& belief, const Observation& obs) {
    std::size_t kept = 0;
    for (std::size_t i = 0; i < belief.consistent.size(); ++i)
        if (belief.consistent[i] &&
            predict(belief.space->hypotheses[i], obs.placement) == obs.light_on)
            ++kept;
    if (kept == 0) throw InconsistentHistoryError("observation eliminates every hypothesis");
    return std::log2(static_cast<double>(belief.support_size)) -
           std::log2(static_cast<double>(kept));
}

std::vector<std::uint32_t> candidate_next_states(std::uint32_t placement, int num_objects) {
    std::vector<std::uint32_t> out(static_cast<std::size_t>(num_objects));
    for (int i = 0; i < num_objects; ++i) out[static_cast<std::size_t>(i)] = placement ^ (1u << i);
    return out;
}

double expected_info_gain(const Belief& belief, std::uint32_t candidate) {
    std::size_t k1 = 0;
    for (std::size_t i = 0; i < belief.consistent.size(); ++i)
        if (belief.consistent[i] && predict(belief.space->hypotheses[i], candidate)) ++k1;
    std::size_t k0 = belief.support_size - k1;
    double K = static_cast<double>(belief.support_size);
    double g = std::log2(K);
    if (k0 > 0) g -= (static_cast<double>(k0) / K) * std::log2(static_cast<double>(k0));
    if (k1 > 0) g -= (static_cast<double>(k1) / K) * std::log2(static_cast<double>(k1));
    return g;
}

bool truth_table_resolved(const Belief& belief) {
    if (belief.support_size == 1) return true;
    if (belief.support_size != 2) return false;
    Hypothesis found[2];
    std::size_t n = 0;
    for (std::size_t i = 0; i < belief.consistent.size() && n < 2; ++i)
        if (belief.consistent[i]) found[n++] = belief.space->hypotheses[i];
    // Two distinct hypotheses share a truth table only when they share a
    // one-bit mask and differ in rule.
    return found[0].mask == found[1].mask && found[0].rule != found[1].rule &&
           std::popcount(found[0].mask) == 1;
}

std::vector<Hypothesis> support_members(const Belief& belief) {
    std::vector<Hypothesis> out;
    out.reserve(belief.support_size);
    for (std::size_t i = 0; i < belief.consistent.size(); ++i)
        if (belief.consistent[i]) out.push_back(belief.space->hypotheses[i]);
    return out;
}

std::uint32_t blicket_mask_intersection(const Belief& belief) {
    std::uint32_t inter = ~0u;
    for (std::size_t i = 0; i < belief.consistent.size(); ++i)
        if (belief.consistent[i]) inter &= belief.space->hypotheses[i].mask;
    return inter & ((belief.space->num_objects >= 32)
                        ? ~0u
                        : ((1u << belief.space->num_objects) - 1u));
}

bool certain_blicket(const Belief& belief, int object) {
    return (blicket_mask_intersection(belief) >> object) & 1u;
}

bool support_disagrees_at(const Belief& belief, std::uint32_t placement) {
    int first = -1;
    for (std::size_t i = 0; i < belief.consistent.size(); ++i) {
        if (!belief.consistent[i]) continue;
        bool p = predict(belief.space->hypotheses[i], placement);
        if (first < 0)
            first = p ? 1 : 0;
        else if ((p ? 1 : 0) != first)
            return true;
    }
    return false;
}

}
