#pragma once

#include <cstdint>
#include <random>

namespace climnorm {

/// Portable random stream: std::mt19937_64 (output fully specified by the
/// standard) seeded through splitmix64 from (seed, stream). Uniform and
/// normal draws are generated here rather than by <random> distributions,
/// whose algorithms are implementation-defined, so fixtures are identical
/// across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    /// Uniform on (0, 1), 53-bit resolution.
    double uniform();
    /// Standard normal (Marsaglia polar method).
    double normal();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace climnorm
