#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace tdgan {

// Deterministic random streams. Every stream is keyed by a 64-bit seed that
// is derived from a root seed plus a list of tags (strings and indices), so
// independent parts of a run never share or shift each other's randomness.
// Word generation uses std::mt19937_64 (sequence pinned by the standard);
// the transforms to doubles are hand-rolled here because the standard
// library's distributions are implementation-defined.

uint64_t splitmix64(uint64_t x);
uint64_t fnv1a64(std::string_view s);

// Fold a sequence of 64-bit parts into a derived stream seed.
uint64_t derive_seed(uint64_t root, std::initializer_list<uint64_t> parts);

inline uint64_t tag(std::string_view s) { return fnv1a64(s); }

class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    // Uniform on [0, 1).
    double uniform();
    // Uniform on (lo, hi).
    double uniform(double lo, double hi);
    // Standard normal via Box-Muller (one spare cached).
    double normal();
    double normal(double mean, double stddev);
    // Integer in [0, n).
    uint64_t uniform_int(uint64_t n);
    // Index draw from nonnegative weights (need not be normalized).
    size_t categorical(const std::vector<double>& weights);

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace tdgan
