#pragma once

#include <cstdint>
#include <random>

namespace ksn {

/// splitmix64 mixing step; used to derive independent sub-seeds from one
/// user-facing seed (child i of seed s is splitmix64(s + i + 1)).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) {
    return splitmix64(parent + stream + 1);
}

/// Seedable generator with a pinned normal transform. Uniforms come from
/// mt19937_64; normals from the polar Box-Muller method, so the stream does
/// not depend on the standard library's std::normal_distribution.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    /// Uniform in [0, 1).
    double uniform() {
        return double(engine_() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via the polar method.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

    /// Uniform integer in [0, bound) by rejection, bound >= 1.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace ksn
