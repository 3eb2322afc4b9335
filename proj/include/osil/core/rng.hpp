#pragma once

// Deterministic random streams. std::mt19937_64 is bit-stable across
// platforms by the standard; the distribution transforms live here because
// the standard library's are not. Child streams are derived from the
// parent's seed and a label, so adding a consumer never shifts the draws
// of an existing one.

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace osil {

std::uint64_t fnv1a64(std::string_view s);
std::uint64_t splitmix64(std::uint64_t x);

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : seed_(seed), eng_(splitmix64(seed)) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). n must be positive.
    int uniform_int(int n) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n)); }

    // Standard normal via Box-Muller with a cached spare.
    double normal();

    // Sample an index from an unnormalized nonnegative weight vector.
    int categorical(const std::vector<double>& weights);

    // k distinct indices from [0, n), order randomized.
    std::vector<int> sample_without_replacement(int n, int k);

    // Named derived stream, independent of draws made on this one.
    Rng child(std::string_view label) const {
        return Rng(splitmix64(seed_ ^ fnv1a64(label)));
    }
    Rng child(std::string_view label, std::uint64_t index) const {
        return Rng(splitmix64(splitmix64(seed_ ^ fnv1a64(label)) + index));
    }

  private:
    std::uint64_t seed_;
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace osil
