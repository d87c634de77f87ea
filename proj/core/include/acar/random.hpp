#pragma once

#include <cstdint>
#include <random>

namespace acar {

/// Named sub-streams derived from one master seed.
enum class Stream : std::uint64_t {
    covariates = 1,
    uniforms = 2,
    burn_in_covariates = 3,
    burn_in_uniforms = 4,
    starts = 5,
    replication = 6,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for (master, stream, index); different triples give decorrelated engines.
std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t index = 0) noexcept;

/**
 * Seedable generator whose outputs are fixed across platforms: the engine is
 * std::mt19937_64 (fully specified by the standard) and the uniform/normal
 * conversions are done here rather than with std:: distributions, whose
 * algorithms are implementation-defined.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}
    Rng(std::uint64_t master, Stream stream, std::uint64_t index = 0) : Rng(derive_seed(master, stream, index)) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal (Marsaglia polar method).
    double normal();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace acar
