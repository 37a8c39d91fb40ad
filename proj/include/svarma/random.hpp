#pragma once

#include <cstdint>
#include <random>

namespace svarma {

/// Seeded generator with distribution code that does not depend on the
/// standard library's (implementation-defined) distribution classes, so
/// draws are reproducible across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on the open interval (0, 1).
    double uniform();
    double normal();
    /// Gamma(shape, 1) by Marsaglia-Tsang.
    double gamma(double shape);
    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound);

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
};

/// Independent child seed for replicate `index` of a master seed (splitmix64).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace svarma
