#include "blicket/rng.hpp"

namespace blicket {

std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t Rng::bounded(std::uint64_t bound) {
    // Rejects the low non-multiple-of-bound range so the modulo is unbiased.
    std::uint64_t min = (0 - bound) % bound;
    for (;;) {
        std::uint64_t x = gen_();
        if (x >= min) return x % bound;
    }
}

double Rng::real() {
    return static_cast<double>(gen_() >> 11) * (1.0 / 9007199254740992.0);
}

StreamSeeds derive_streams(std::uint64_t trial_seed) {
    std::uint64_t sm = trial_seed;
    StreamSeeds out{};
    out.env = splitmix64_next(sm);
    out.agent = splitmix64_next(sm);
    return out;
}

}
