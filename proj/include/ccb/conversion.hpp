#pragma once

#include <functional>
#include <memory>
#include <unordered_map>

#include "ccb/geometry.hpp"
#include "ccb/rng.hpp"

namespace ccb {

// Axis-aligned tiling of [0,1]^p into K^p half-open cubes of edge 1/K; the
// last cell per axis is closed so the tiling is total.
struct Partition {
    int p;
    long long K;
};

void validate_partition(const Partition& part);

// Per-axis index floor(K*c_j), clamped to K-1 at c_j = 1; row-major flat index
// (first axis varies slowest). Throws OutOfCube outside [0,1]^p.
long long cell_of(const Partition& part, const Vec& c);

std::vector<long long> axis_indices(const Partition& part, long long flat);

// Cell barycenter: per-axis (i_j + 0.5)/K.
Vec barycenter(const Partition& part, long long flat);

// Exponent triple (tau1, tau2, tau3) and T0 of the input algorithm's regret
// envelope, plus the context-regularity constants used to tune K.
struct ConversionParams {
    double tau1;
    double tau2;
    double tau3;
    double T0;
    double L;
    double gamma;
};

// tau = (1 + rho/2, 1/2, 1): the envelope of the strongly convex noisy BCO
// over a body whose barrier parameter grows like d^rho (rho = 0 for balls).
ConversionParams strongly_convex_preset(double rho, double L, double gamma, double T0 = 1.0);

// K = max(1, floor((L * p^{gamma/2} * d^{-tau1} * T^{1-tau2} * log^{-tau3}(T+1))
//                  ^{1/(p*(1-tau2)+gamma)})); natural log.
long long choose_K(const ConversionParams& params, int d, int p, long long T);

// Per-round discretization-bias envelope 2*L*(sqrt(p)/K)^gamma.
double expected_bias_bound(double L, double gamma, int p, long long K);

// Anything the router can drive: a strict propose/feed pair advancing one
// local round. Instances own their stream.
class InputAlgorithm {
public:
    virtual ~InputAlgorithm() = default;
    virtual Vec propose() = 0;
    virtual void feed(double y) = 0;
};

struct RouteRecord {
    long long global_t;
    long long cell;
    long long local_t; // this cell's round count after the round
    Vec z;
    double y;
};

// The static-to-contextual conversion: one lazily constructed input-algorithm
// instance per visited cell, each advancing on its own local clock. Instance
// streams derive from the root as "cell:<flat>", per-cell observation noise as
// "noise:<flat>", so per-cell transcripts are invariant to arrival order.
class Router {
public:
    using Factory = std::function<std::unique_ptr<InputAlgorithm>(SeedStream stream)>;
    // observe(z, noise_stream) -> y; the stream is the queried cell's noise
    // substream.
    using Observe = std::function<double(const Vec&, SeedStream&)>;

    Router(Partition part, Factory factory, SeedStream root);

    RouteRecord route_round(const Vec& c, const Observe& observe);

    const Partition& partition() const { return part_; }
    long long total_rounds() const { return total_; }
    long long visit_count(long long cell) const;
    std::size_t instantiated_cells() const { return cells_.size(); }

private:
    struct Cell {
        std::unique_ptr<InputAlgorithm> alg;
        long long n = 0;
        SeedStream noise;
    };

    Partition part_;
    Factory factory_;
    SeedStream root_;
    std::unordered_map<long long, Cell> cells_;
    long long total_ = 0;
};

} // namespace ccb
