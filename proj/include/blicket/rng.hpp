#pragma once
#include <cstdint>
#include <random>

namespace blicket {

// Mixes one 64-bit state step and returns the mixed value (splitmix64).
std::uint64_t splitmix64_next(std::uint64_t& state);

// Deterministic RNG used everywhere randomness is needed.
//
// std::mt19937_64 has a fully specified output sequence, but the standard
// distributions on top of it are implementation-defined. Records must be
// byte-identical across standard libraries, so bounded draws and uniform
// reals are hand-rolled here and nothing else may be layered on top.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t raw() { return gen_(); }

    // Unbiased uniform draw in [0, bound); bound >= 1. Rejection sampling.
    std::uint64_t bounded(std::uint64_t bound);

    // Uniform double in [0, 1), 53-bit resolution.
    double real();

    bool bernoulli(double p) { return real() < p; }

private:
    std::mt19937_64 gen_;
};

// Independent stream seeds derived from a single trial seed, so that the
// environment draws and the agent draws never interleave.
struct StreamSeeds {
    std::uint64_t env;
    std::uint64_t agent;
};

StreamSeeds derive_streams(std::uint64_t trial_seed);

}
