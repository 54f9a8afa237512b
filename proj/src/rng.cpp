#include "ccb/rng.hpp"

#include <cmath>
#include <numbers>

namespace ccb {

namespace {

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

// SplitMix64 finalizer: full-avalanche 64-bit mix.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t splitmix_next(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    return mix64(state);
}

// Key of a child stream: fold the label bytes (FNV-style) into the parent key,
// then finalize. Only the identity enters, never generator state.
std::uint64_t derive_key(std::uint64_t parent, std::string_view label) {
    std::uint64_t h = parent ^ 0xa0761d6478bd642fULL;
    for (unsigned char ch : label) {
        h = (h ^ ch) * 0x100000001b3ULL;
    }
    return mix64(mix64(h ^ (static_cast<std::uint64_t>(label.size()) << 1)));
}

} // namespace

SeedStream::SeedStream(std::uint64_t master_seed)
    : SeedStream(mix64(master_seed), FromKey{}) {}

SeedStream::SeedStream(std::uint64_t key, FromKey) : key_(key) {
    std::uint64_t st = key;
    for (auto& w : s_) {
        w = splitmix_next(st);
    }
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) {
        s_[0] = 1; // xoshiro forbids the all-zero state
    }
}

SeedStream SeedStream::derive(std::string_view label) const {
    return SeedStream(derive_key(key_, label), FromKey{});
}

std::uint64_t SeedStream::next_u64() {
    // xoshiro256++
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double SeedStream::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeedStream::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
}

double SeedStream::normal() {
    // Box-Muller, cosine branch only: stateless replay beats saving the pair.
    const double u1 = 1.0 - uniform01(); // (0,1], keeps the log finite
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Eigen::VectorXd sample_sphere(int d, SeedStream& stream) {
    if (d < 1) {
        throw ConfigError("sample_sphere: dimension must be >= 1");
    }
    Eigen::VectorXd v(d);
    while (true) {
        for (int i = 0; i < d; ++i) {
            v(i) = stream.normal();
        }
        const double n = v.norm();
        if (n > 1e-300) {
            return v / n;
        }
    }
}

NoiseModel NoiseModel::zero() {
    return NoiseModel(Kind::Zero, 0.0);
}

NoiseModel NoiseModel::gaussian(double sigma) {
    if (sigma < 0.0) {
        throw ConfigError("NoiseModel: sigma must be >= 0");
    }
    return NoiseModel(Kind::Gaussian, sigma);
}

NoiseModel NoiseModel::bounded_uniform(double half_width) {
    if (half_width < 0.0) {
        throw ConfigError("NoiseModel: half_width must be >= 0");
    }
    return NoiseModel(Kind::BoundedUniform, half_width);
}

double NoiseModel::draw(SeedStream& stream) const {
    switch (kind_) {
    case Kind::Zero:
        return 0.0;
    case Kind::Gaussian:
        return param_ * stream.normal();
    case Kind::BoundedUniform:
        return param_ * (2.0 * stream.uniform01() - 1.0);
    }
    return 0.0;
}

double draw_noise(const NoiseModel& model, SeedStream& stream) {
    return model.draw(stream);
}

} // namespace ccb
