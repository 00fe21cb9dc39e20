#ifndef HAZARDLAB_RNG_HPP
#define HAZARDLAB_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace hazardlab {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Mix a base seed with a stream index so that parallel streams
/// (chains, subjects) are decorrelated but fully reproducible.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t s = base;
    splitmix64(s);
    s ^= 0x94d049bb133111ebULL * (stream + 1);
    return splitmix64(s);
}

/// Deterministic random source. Distributions are hand-rolled on top of
/// mt19937_64 so that draw sequences are stable across standard libraries
/// and every variate consumes a fixed number of engine calls.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static Rng stream(std::uint64_t base, std::uint64_t index) {
        return Rng(derive_seed(base, index));
    }

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; consumes exactly two engine calls.
    double normal() {
        double u1 = 1.0 - uniform(); // (0, 1]
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer in [0, n). Lemire's bounded method, bias-free.
    std::uint64_t integer(std::uint64_t n) {
        unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            const std::uint64_t floor = (0 - n) % n;
            while (lo < floor) {
                m = static_cast<unsigned __int128>(engine_()) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

private:
    std::mt19937_64 engine_;
};

} // namespace hazardlab

#endif
