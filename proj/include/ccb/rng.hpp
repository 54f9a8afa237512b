#pragma once

#include <cstdint>
#include <string_view>

#include <Eigen/Core>

#include "ccb/errors.hpp"

namespace ccb {

// Deterministic, splittable random stream.
//
// A stream is identified by (master_seed, path of labels). Equal identities
// produce byte-identical draw sequences on every platform: the generator is a
// hand-rolled xoshiro256++ keyed by a SplitMix64 label hash, and all
// conversions (53-bit uniforms, Box-Muller normals) are fixed here rather than
// delegated to implementation-defined std:: distributions.
//
// derive() depends only on the identity, never on how many draws were
// consumed, so per-cell substreams are stable under any context arrival order.
class SeedStream {
public:
    explicit SeedStream(std::uint64_t master_seed);

    // Child stream keyed by (this stream's identity, label).
    SeedStream derive(std::string_view label) const;

    std::uint64_t next_u64();
    // Uniform on [0,1) with 53-bit resolution.
    double uniform01();
    double uniform(double lo, double hi);
    // Standard normal via Box-Muller; consumes two uniforms per draw.
    double normal();

    std::uint64_t key() const { return key_; }

private:
    struct FromKey {};
    SeedStream(std::uint64_t key, FromKey);

    std::uint64_t key_;
    std::uint64_t s_[4]; // xoshiro256++ state
};

// Uniform draw from the unit sphere in R^d (Gaussian vector, normalized;
// resamples on the measure-zero zero event). d=1 yields +-1.
Eigen::VectorXd sample_sphere(int d, SeedStream& stream);

// Zero-mean observation noise with a sub-Gaussian proxy sigma:
// proxy = sigma for Gaussian, = half_width for BoundedUniform, = 0 for Zero.
class NoiseModel {
public:
    enum class Kind { Zero, Gaussian, BoundedUniform };

    static NoiseModel zero();
    static NoiseModel gaussian(double sigma);
    static NoiseModel bounded_uniform(double half_width);

    double draw(SeedStream& stream) const;
    double proxy() const { return param_; }
    Kind kind() const { return kind_; }

private:
    NoiseModel(Kind kind, double param) : kind_(kind), param_(param) {}
    Kind kind_;
    double param_;
};

double draw_noise(const NoiseModel& model, SeedStream& stream);

} // namespace ccb
