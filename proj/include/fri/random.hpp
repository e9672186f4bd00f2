#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace fri {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014). Used to derive
/// independent stream seeds from structured keys.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Folds a sequence of 64-bit words into one seed:
///   h = splitmix64(base); for each w: h = splitmix64(h ^ w)
/// Sweeps call this with (base_seed, psnr_index, delta_index, realization).
constexpr std::uint64_t derive_seed(std::uint64_t base,
                                    std::initializer_list<std::uint64_t> keys) noexcept
{
    std::uint64_t h = splitmix64(base);
    for (auto k : keys) {
        h = splitmix64(h ^ k);
    }
    return h;
}

/// Deterministic generator with a fully specified output sequence.
///
/// Engine: std::mt19937_64 (bit-exact by the C++ standard).
/// Uniform: (x >> 11) * 2^-53, giving doubles in [0, 1).
/// Gaussian: Box-Muller on two uniforms, u1 mapped to (0, 1] as 1 - u;
/// both outputs of each pair are used, cosine branch first.
///
/// std::normal_distribution is not used because its algorithm is
/// implementation defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform()
    {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double gaussian();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace fri
