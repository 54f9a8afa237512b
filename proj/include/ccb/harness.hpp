#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ccb/baselines.hpp"
#include "ccb/bco.hpp"
#include "ccb/conversion.hpp"
#include "ccb/environments.hpp"
#include "ccb/geometry.hpp"
#include "ccb/regret.hpp"
#include "ccb/rng.hpp"

namespace ccb {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Experiment configuration (schema spec_version 1). Stored as parameters and
// materialized per run so horizon sweeps can retune K, q_T, and the
// T-dependent pieces of the loss.
// ---------------------------------------------------------------------------
struct BodySpec {
    ConvexBody::Kind kind = ConvexBody::Kind::Ball;
    int dim = 1;
    Vec center;  // ball
    double radius = 1.0;
    Vec lo, hi;  // box
    Mat A;       // general polytope
    Vec b;

    ConvexBody build() const;
};

struct LossSpec {
    enum class Kind { Quadratic, LowerBound, LowerBoundGamma0 };
    Kind kind = Kind::Quadratic;
    double alpha = 1.0;
    double L = 1.0;
    double gamma = 1.0;
    double b0 = 0.0;
    double M = 0.0;   // <= 0: model default
    double r1 = 0.0;  // <= 0: 0.9 * admissibility cap
    double r2 = 0.0;
    long long K = 0;  // lower-bound cell count; 0 = match the algorithm's K
    std::uint64_t omega_seed = 2026;
    std::uint64_t tau_seed = 4053;
    std::uint64_t map_seed = 1;
    bool boundary_regime = false;
    bool check_admissibility = true;
};

struct ContextSpec {
    ContextProcess::Kind kind = ContextProcess::Kind::IIDUniform;
    int p = 1;
    long long K = 0;  // PK cell count; 0 = match the algorithm's K
    std::vector<Vec> sequence;
    bool cycle = true;
};

struct AlgorithmSpec {
    enum class Kind { Bco, RouterBco, RouterEpsNetUcb };
    // K policy: Fixed uses K below; Auto tunes via the strongly convex preset
    // (exponents 1+rho/2, 1/2, 1); LinearCells uses floor(T^{1/p}).
    enum class KPolicy { Fixed, Auto, LinearCells };
    Kind kind = Kind::Bco;
    KPolicy k_policy = KPolicy::Fixed;
    long long K = 1;
    double rho = 0.0;
    long long T0 = 1;
    double eps = 0.25;  // eps-net spacing for the UCB baseline
};

struct NoiseSpec {
    NoiseModel::Kind kind = NoiseModel::Kind::Zero;
    double sigma = 0.0;
    double half_width = 0.0;

    NoiseModel build() const;
};

struct ExperimentConfig {
    int spec_version = 1;
    long long T = 1;
    std::vector<std::uint64_t> seeds;
    BodySpec body;
    LossSpec loss;
    ContextSpec context;
    AlgorithmSpec algorithm;
    NoiseSpec noise;
    // Additive slack of the per-round feasibility audit on the body's
    // defining inequalities; override via the optional "tolerances" block.
    double feasibility_tol = 1e-12;
    Json echo;  // the parsed document, for summary embedding

    static ExperimentConfig from_json(const Json& j);
    static ExperimentConfig from_file(const std::string& path);
};

// ---------------------------------------------------------------------------
// Materialized run pieces.
// ---------------------------------------------------------------------------
struct AssembledRun {
    std::shared_ptr<const LossModel> model;
    std::shared_ptr<const Barrier> barrier;  // barrier over the action body
    Partition partition{1, 1};
    ContextProcess context;
    NoiseModel noise = NoiseModel::zero();
    long long K_used = 1;
    std::vector<std::string> warnings;
};

// Resolve K and build the model/barrier/context for this config (the
// algorithm instances themselves are created per seed).
AssembledRun assemble(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Run results.
// ---------------------------------------------------------------------------
struct SeedResult {
    std::uint64_t seed = 0;
    double final_regret = 0.0;         // cumulative contextual regret
    std::string transcript_sha256;
    long long instantiated_cells = 0;
};

struct RunSummary {
    long long T = 0;
    long long K_used = 1;
    std::vector<SeedResult> seeds;
    double mean_regret = 0.0;
    double sd_regret = 0.0;  // sample standard deviation (0 for one seed)
    std::vector<std::string> warnings;
    double wall_clock_seconds = 0.0;  // reported on stdout, never serialized
    Json config_echo;
};

struct RunOptions {
    std::optional<std::string> out_dir;  // write transcripts/summary here
    bool write_transcripts = false;
    int workers = 0;  // 0: CCB_WORKERS env var, else hardware default
};

// Runs every seed (parallel up to the worker cap; each seed fully isolated),
// audits feasibility of every queried point, and aggregates. Deterministic:
// the transcript bytes and hash are pure functions of (config, seed).
RunSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

// Deterministic JSON for the summary; wall-clock time is deliberately
// excluded so identical (config, seed) runs serialize byte-identically.
Json summary_to_json(const RunSummary& summary);

// ---------------------------------------------------------------------------
// Rate sweeps.
// ---------------------------------------------------------------------------
struct SweepReport {
    std::vector<long long> horizons;
    RatePoints points;
    RateFit fit;
};

// Mean final regret for one config; injectable for plumbing tests.
using SweepRunner = std::function<double(const ExperimentConfig&)>;

// Re-runs the experiment at each horizon (retuning K, q_T, and the loss's
// T-dependent constants) and fits log regret against log T.
SweepReport sweep_rates(const ExperimentConfig& base,
                        const std::vector<long long>& horizons,
                        const RunOptions& opts = {},
                        const SweepRunner& runner = {});

Json sweep_to_json(const SweepReport& report);

// "2^10..2^16" (consecutive powers of two) or a comma list of integers.
std::vector<long long> parse_horizons(const std::string& text);

} // namespace ccb
