#ifndef SUMRULE_RNG_HPP
#define SUMRULE_RNG_HPP

#include <cstdint>
#include <random>

namespace sumrule {

/// Seeded random stream built on std::mt19937_64 with in-house variate
/// transforms, so a given seed reproduces the same chain on any platform
/// (std::*_distribution outputs are implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform in (0, 1] (safe under log).
    double uniform_pos() { return 1.0 - uniform(); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

    /// Standard normal, Marsaglia polar method.
    double normal();

    /// Gamma(shape, scale), Marsaglia-Tsang without the squeeze step;
    /// shape < 1 handled by the Gamma(shape+1) * U^{1/shape} boost.
    double gamma(double shape, double scale);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace sumrule

#endif
