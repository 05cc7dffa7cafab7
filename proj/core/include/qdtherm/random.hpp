#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace qdtherm {

/// SplitMix64 finalizer; derives independent stream seeds from one seed.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// std::mt19937_64 bit stream with distribution transforms written out here,
/// since the standard library distributions differ between implementations.
/// Output is identical on every conforming platform for a given seed.
class Rng {
public:
    static constexpr std::string_view kId = "mt19937_64+inv-cdf-exp+marsaglia-polar/v1";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

    /// Exponential with the given mean.
    double exponential(double mean) { return -mean * std::log1p(-uniform()); }

    /// Standard normal, Marsaglia polar method; the second deviate of each pair is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double scale = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * scale;
        has_spare_ = true;
        return u * scale;
    }

    std::uint64_t bits() { return engine_(); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace qdtherm
