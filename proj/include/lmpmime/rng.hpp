#ifndef LMPMIME_RNG_HPP
#define LMPMIME_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace lmpmime {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seedable stream generator. The engine is std::mt19937_64 (sequence fixed
/// by the standard) and the uniform/normal transforms are hand-rolled so the
/// output stream is identical across platforms and standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Stream for realization r of a Monte-Carlo batch: seed XOR r, so batches
    /// are reproducible regardless of execution order.
    static Rng stream(std::uint64_t seed, std::uint64_t realization) {
        return Rng(splitmix64(seed ^ realization));
    }

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (no implementation-defined
    /// std::normal_distribution involved).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace lmpmime

#endif
