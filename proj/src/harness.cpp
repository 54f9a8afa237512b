#include "ccb/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "ccb/errors.hpp"
#include "ccb/sha256.hpp"

namespace ccb {

namespace {

// ---------------------------------------------------------------------------
// JSON helpers
// ---------------------------------------------------------------------------
const Json& req(const Json& j, const char* key, const char* where) {
    if (!j.contains(key)) {
        throw ConfigError(std::string("config: ") + where + " is missing key '" +
                          key + "'");
    }
    return j.at(key);
}

Vec to_vec(const Json& j, const char* where) {
    if (!j.is_array()) {
        throw ConfigError(std::string("config: ") + where + " must be an array");
    }
    Vec v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) {
            throw ConfigError(std::string("config: ") + where +
                              " must contain numbers");
        }
        v(static_cast<int>(i)) = j[i].get<double>();
    }
    return v;
}

double num_or(const Json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) {
        throw ConfigError(std::string("config: '") + key + "' must be a number");
    }
    return j.at(key).get<double>();
}

long long int_or(const Json& j, const char* key, long long fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer()) {
        throw ConfigError(std::string("config: '") + key + "' must be an integer");
    }
    return j.at(key).get<long long>();
}

bool bool_or(const Json& j, const char* key, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_boolean()) {
        throw ConfigError(std::string("config: '") + key + "' must be a boolean");
    }
    return j.at(key).get<bool>();
}

std::uint64_t uint_or(const Json& j, const char* key, std::uint64_t fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer()) {
        throw ConfigError(std::string("config: '") + key + "' must be an integer");
    }
    return j.at(key).get<std::uint64_t>();
}

// ---------------------------------------------------------------------------
// Spec parsing
// ---------------------------------------------------------------------------
BodySpec parse_body(const Json& j) {
    BodySpec spec;
    const std::string kind = req(j, "kind", "body").get<std::string>();
    if (kind == "ball") {
        spec.kind = ConvexBody::Kind::Ball;
        spec.radius = num_or(j, "radius", 1.0);
        if (j.contains("center")) {
            spec.center = to_vec(j.at("center"), "body.center");
            spec.dim = static_cast<int>(spec.center.size());
            if (j.contains("dim") &&
                int_or(j, "dim", spec.dim) != spec.dim) {
                throw ConfigError("config: body.dim contradicts body.center");
            }
        } else {
            spec.dim = static_cast<int>(int_or(j, "dim", 0));
            if (spec.dim < 1) {
                throw ConfigError("config: ball body needs 'dim' or 'center'");
            }
            spec.center = Vec::Zero(spec.dim);
        }
    } else if (kind == "box") {
        spec.kind = ConvexBody::Kind::Polytope;
        spec.lo = to_vec(req(j, "lo", "body"), "body.lo");
        spec.hi = to_vec(req(j, "hi", "body"), "body.hi");
        spec.dim = static_cast<int>(spec.lo.size());
    } else if (kind == "polytope") {
        spec.kind = ConvexBody::Kind::Polytope;
        const Json& rows = req(j, "A", "body");
        if (!rows.is_array() || rows.empty()) {
            throw ConfigError("config: body.A must be a nonempty array of rows");
        }
        const auto m = static_cast<int>(rows.size());
        const Vec first = to_vec(rows[0], "body.A row");
        spec.A = Mat(m, first.size());
        spec.A.row(0) = first;
        for (int r = 1; r < m; ++r) {
            const Vec row = to_vec(rows[r], "body.A row");
            if (row.size() != first.size()) {
                throw ConfigError("config: body.A rows have mixed lengths");
            }
            spec.A.row(r) = row;
        }
        spec.b = to_vec(req(j, "b", "body"), "body.b");
        spec.dim = static_cast<int>(first.size());
    } else {
        throw ConfigError("config: unknown body kind '" + kind + "'");
    }
    return spec;
}

LossSpec parse_loss(const Json& j) {
    LossSpec spec;
    const std::string kind = req(j, "kind", "loss").get<std::string>();
    if (kind == "quadratic") {
        spec.kind = LossSpec::Kind::Quadratic;
    } else if (kind == "lower_bound") {
        spec.kind = LossSpec::Kind::LowerBound;
    } else if (kind == "lower_bound_gamma0") {
        spec.kind = LossSpec::Kind::LowerBoundGamma0;
    } else {
        throw ConfigError("config: unknown loss kind '" + kind + "'");
    }
    spec.alpha = num_or(j, "alpha", 1.0);
    spec.L = num_or(j, "L", 1.0);
    spec.gamma = num_or(j, "gamma", 1.0);
    spec.b0 = num_or(j, "b0", 0.0);
    spec.M = num_or(j, "M", 0.0);
    spec.r1 = num_or(j, "r1", 0.0);
    spec.r2 = num_or(j, "r2", 0.0);
    if (j.contains("K") && j.at("K").is_string()) {
        if (j.at("K").get<std::string>() != "match") {
            throw ConfigError("config: loss.K must be an integer or \"match\"");
        }
        spec.K = 0;
    } else {
        spec.K = int_or(j, "K", 0);
    }
    spec.omega_seed = uint_or(j, "omega_seed", 2026);
    spec.tau_seed = uint_or(j, "tau_seed", 4053);
    spec.map_seed = uint_or(j, "map_seed", 1);
    spec.boundary_regime = bool_or(j, "boundary_regime", false);
    spec.check_admissibility = bool_or(j, "check_admissibility", true);
    return spec;
}

ContextSpec parse_context(const Json& j) {
    ContextSpec spec;
    const std::string kind = req(j, "kind", "context").get<std::string>();
    if (kind == "fixed") {
        spec.kind = ContextProcess::Kind::FixedSequence;
        const Json& pts = req(j, "points", "context");
        if (!pts.is_array() || pts.empty()) {
            throw ConfigError("config: context.points must be a nonempty array");
        }
        for (const auto& pt : pts) {
            Vec c = to_vec(pt, "context point");
            for (int i = 0; i < c.size(); ++i) {
                if (!(c(i) >= 0.0 && c(i) <= 1.0)) {
                    throw ConfigError("config: context points must lie in [0,1]^p");
                }
            }
            spec.sequence.push_back(std::move(c));
        }
        spec.p = static_cast<int>(spec.sequence.front().size());
        spec.cycle = bool_or(j, "cycle", true);
    } else if (kind == "iid_uniform" || kind == "pk") {
        spec.kind = kind == "pk" ? ContextProcess::Kind::PK
                                 : ContextProcess::Kind::IIDUniform;
        spec.p = static_cast<int>(int_or(j, "p", 1));
        if (kind == "pk") {
            if (j.contains("K") && j.at("K").is_string()) {
                if (j.at("K").get<std::string>() != "match") {
                    throw ConfigError(
                        "config: context.K must be an integer or \"match\"");
                }
                spec.K = 0;
            } else {
                spec.K = int_or(j, "K", 0);
            }
        }
    } else {
        throw ConfigError("config: unknown context kind '" + kind + "'");
    }
    return spec;
}

AlgorithmSpec parse_algorithm(const Json& j) {
    AlgorithmSpec spec;
    const std::string kind = req(j, "kind", "algorithm").get<std::string>();
    if (kind == "bco") {
        spec.kind = AlgorithmSpec::Kind::Bco;
        spec.k_policy = AlgorithmSpec::KPolicy::Fixed;
        spec.K = 1;
        return spec;
    }
    if (kind == "router_bco") {
        spec.kind = AlgorithmSpec::Kind::RouterBco;
    } else if (kind == "router_eps_net_ucb") {
        spec.kind = AlgorithmSpec::Kind::RouterEpsNetUcb;
        spec.eps = num_or(j, "eps", 0.25);
    } else {
        throw ConfigError("config: unknown algorithm kind '" + kind + "'");
    }
    const Json& k = req(j, "K", "algorithm");
    if (k.is_string()) {
        const std::string policy = k.get<std::string>();
        if (policy == "auto") {
            spec.k_policy = AlgorithmSpec::KPolicy::Auto;
        } else if (policy == "linear_cells") {
            spec.k_policy = AlgorithmSpec::KPolicy::LinearCells;
        } else {
            throw ConfigError("config: algorithm.K must be an integer, \"auto\","
                              " or \"linear_cells\"");
        }
    } else if (k.is_number_integer()) {
        spec.k_policy = AlgorithmSpec::KPolicy::Fixed;
        spec.K = k.get<long long>();
        if (spec.K < 1) throw ConfigError("config: algorithm.K must be >= 1");
    } else {
        throw ConfigError("config: algorithm.K must be an integer or a policy");
    }
    spec.rho = num_or(j, "rho", 0.0);
    spec.T0 = int_or(j, "T0", 1);
    return spec;
}

NoiseSpec parse_noise(const Json& j) {
    NoiseSpec spec;
    const std::string kind = req(j, "kind", "noise").get<std::string>();
    if (kind == "zero") {
        spec.kind = NoiseModel::Kind::Zero;
    } else if (kind == "gaussian") {
        spec.kind = NoiseModel::Kind::Gaussian;
        spec.sigma = req(j, "sigma", "noise").get<double>();
    } else if (kind == "bounded_uniform") {
        spec.kind = NoiseModel::Kind::BoundedUniform;
        spec.half_width = req(j, "half_width", "noise").get<double>();
    } else {
        throw ConfigError("config: unknown noise kind '" + kind + "'");
    }
    return spec;
}

} // namespace

ConvexBody BodySpec::build() const {
    if (kind == ConvexBody::Kind::Ball) {
        return ConvexBody::ball(center, radius);
    }
    if (lo.size() > 0) return ConvexBody::box(lo, hi);
    return ConvexBody::polytope(A, b);
}

NoiseModel NoiseSpec::build() const {
    switch (kind) {
        case NoiseModel::Kind::Zero: return NoiseModel::zero();
        case NoiseModel::Kind::Gaussian: return NoiseModel::gaussian(sigma);
        case NoiseModel::Kind::BoundedUniform:
            return NoiseModel::bounded_uniform(half_width);
    }
    throw ConfigError("config: unknown noise kind");
}

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
    try {
        ExperimentConfig cfg;
        cfg.echo = j;
        if (!j.contains("spec_version") ||
            !j.at("spec_version").is_number_integer() ||
            j.at("spec_version").get<int>() != 1) {
            throw ConfigError("config: spec_version must be the integer 1");
        }
        cfg.T = req(j, "T", "config").get<long long>();
        if (cfg.T < 1) throw ConfigError("config: T must be >= 1");

        if (j.contains("seeds") && j.contains("n_seeds")) {
            throw ConfigError("config: give either 'seeds' or 'n_seeds', not both");
        }
        if (j.contains("seeds")) {
            for (const auto& s : j.at("seeds")) {
                if (!s.is_number_integer()) {
                    throw ConfigError("config: seeds must be integers");
                }
                cfg.seeds.push_back(s.get<std::uint64_t>());
            }
        } else if (j.contains("n_seeds")) {
            const long long n = j.at("n_seeds").get<long long>();
            if (n < 1) throw ConfigError("config: n_seeds must be >= 1");
            for (long long s = 1; s <= n; ++s) {
                cfg.seeds.push_back(static_cast<std::uint64_t>(s));
            }
        } else {
            throw ConfigError("config: missing 'seeds' or 'n_seeds'");
        }
        if (cfg.seeds.empty()) throw ConfigError("config: seed list is empty");

        cfg.body = parse_body(req(j, "body", "config"));
        cfg.loss = parse_loss(req(j, "loss", "config"));
        cfg.context = parse_context(req(j, "context", "config"));
        cfg.algorithm = parse_algorithm(req(j, "algorithm", "config"));
        cfg.noise = parse_noise(req(j, "noise", "config"));
        if (j.contains("tolerances")) {
            const Json& tol = j.at("tolerances");
            if (!tol.is_object()) {
                throw ConfigError("config: 'tolerances' must be an object");
            }
            for (auto it = tol.begin(); it != tol.end(); ++it) {
                if (it.key() == "feasibility") {
                    cfg.feasibility_tol = num_or(tol, "feasibility", 1e-12);
                } else {
                    throw ConfigError("config: unknown tolerance '" + it.key() +
                                      "'");
                }
            }
        }
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: parse error in '" + path + "': " + e.what());
    }
    return from_json(j);
}

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------
AssembledRun assemble(const ExperimentConfig& cfg) {
    AssembledRun run;
    ConvexBody body = cfg.body.build();
    const int d = body.dim();
    const int p = cfg.context.p;

    // Resolve the conversion's K.
    long long K = 1;
    switch (cfg.algorithm.kind == AlgorithmSpec::Kind::Bco
                ? AlgorithmSpec::KPolicy::Fixed
                : cfg.algorithm.k_policy) {
        case AlgorithmSpec::KPolicy::Fixed:
            K = cfg.algorithm.kind == AlgorithmSpec::Kind::Bco ? 1
                                                               : cfg.algorithm.K;
            break;
        case AlgorithmSpec::KPolicy::Auto: {
            if (cfg.loss.kind == LossSpec::Kind::LowerBoundGamma0) {
                throw ConfigError(
                    "config: algorithm.K='auto' tunes via the context exponent "
                    "and needs gamma > 0; use a fixed K or 'linear_cells'");
            }
            const ConversionParams params = strongly_convex_preset(
                cfg.algorithm.rho, cfg.loss.L, cfg.loss.gamma,
                static_cast<double>(cfg.algorithm.T0));
            K = choose_K(params, d, p, cfg.T);
            break;
        }
        case AlgorithmSpec::KPolicy::LinearCells:
            K = std::max<long long>(
                1, static_cast<long long>(std::floor(
                       std::pow(static_cast<double>(cfg.T), 1.0 / p))));
            break;
    }
    run.partition = Partition{p, K};
    validate_partition(run.partition);
    run.K_used = K;

    // Loss model (the body moves into the model for quadratics).
    switch (cfg.loss.kind) {
        case LossSpec::Kind::Quadratic: {
            run.model = make_random_quadratic(body, p, cfg.loss.alpha, cfg.loss.L,
                                              cfg.loss.gamma, cfg.loss.b0,
                                              cfg.loss.map_seed,
                                              cfg.loss.boundary_regime);
            break;
        }
        case LossSpec::Kind::LowerBound:
        case LossSpec::Kind::LowerBoundGamma0: {
            if (body.kind() != ConvexBody::Kind::Ball ||
                std::abs(body.radius() - 1.0) > 1e-12 ||
                body.center().norm() > 1e-12) {
                throw ConfigError(
                    "config: lower-bound losses require body = unit ball at 0");
            }
            LowerBoundSpec spec;
            spec.p = p;
            spec.K = cfg.loss.K > 0 ? cfg.loss.K : K;
            spec.d = d;
            spec.alpha = cfg.loss.alpha;
            spec.L = cfg.loss.L;
            spec.gamma = cfg.loss.gamma;
            spec.gamma_zero = cfg.loss.kind == LossSpec::Kind::LowerBoundGamma0;
            spec.r1 = cfg.loss.r1;
            spec.r2 = cfg.loss.r2;
            spec.T = cfg.T;
            spec.M = cfg.loss.M;
            spec.omega_seed = cfg.loss.omega_seed;
            spec.tau_seed = cfg.loss.tau_seed;
            spec.check_admissibility = cfg.loss.check_admissibility;
            run.model = std::make_shared<LowerBoundFamily>(std::move(spec));
            break;
        }
    }

    if (run.model->context_dim() != p) {
        throw ConfigError("config: context dimension does not match the loss");
    }

    // Context process.
    switch (cfg.context.kind) {
        case ContextProcess::Kind::FixedSequence:
            run.context = ContextProcess::fixed(cfg.context.sequence,
                                                cfg.context.cycle);
            break;
        case ContextProcess::Kind::IIDUniform:
            run.context = ContextProcess::iid_uniform(p);
            break;
        case ContextProcess::Kind::PK:
            run.context =
                ContextProcess::pk(p, cfg.context.K > 0 ? cfg.context.K : K);
            break;
    }

    run.barrier = std::make_shared<Barrier>(run.model->body());
    run.noise = cfg.noise.build();

    // Cold-start warning: fewer rounds than cells * burn-in.
    long double cells = 1.0L;
    for (int i = 0; i < p; ++i) cells *= static_cast<long double>(K);
    const long double burn =
        cells * static_cast<long double>(std::max<long long>(cfg.algorithm.T0, 1));
    if (static_cast<long double>(cfg.T) < burn) {
        std::ostringstream os;
        os << "horizon T=" << cfg.T << " is below K^p*T0=" << double(burn)
           << "; per-cell instances stay cold";
        run.warnings.push_back(os.str());
    }
    return run;
}

// ---------------------------------------------------------------------------
// Per-seed execution
// ---------------------------------------------------------------------------
namespace {

class BcoCellAlgorithm final : public InputAlgorithm {
public:
    BcoCellAlgorithm(const BcoConfig& cfg, SeedStream stream)
        : state_(cfg), stream_(std::move(stream)) {}

    Vec propose() override { return state_.propose(stream_); }
    void feed(double y) override { state_.feed(y); }

private:
    BcoState state_;
    SeedStream stream_;
};

void append_g17(std::string& row, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    row += buf;
}

std::string transcript_header(int p, int d) {
    std::string header = "t";
    for (int i = 0; i < p; ++i) header += ",c" + std::to_string(i);
    for (int i = 0; i < d; ++i) header += ",z" + std::to_string(i);
    header += ",y,f_value,f_star,inst_regret,cum_regret\n";
    return header;
}

SeedResult run_one_seed(const ExperimentConfig& cfg, const AssembledRun& run,
                        std::uint64_t seed, const RunOptions& opts) {
    const LossModel& model = *run.model;
    const ConvexBody& body = model.body();
    const int p = run.partition.p;
    const int d = model.dim();

    SeedStream root(seed);
    SeedStream ctx_stream = root.derive("context");

    Router::Factory factory;
    std::shared_ptr<const EpsNet> net;
    if (cfg.algorithm.kind == AlgorithmSpec::Kind::RouterEpsNetUcb) {
        net = std::make_shared<EpsNet>(make_eps_net(body, cfg.algorithm.eps));
        if (net->points.empty()) {
            throw ConfigError("eps-net is empty; decrease algorithm.eps");
        }
        factory = [net](SeedStream) -> std::unique_ptr<InputAlgorithm> {
            return std::make_unique<EpsNetUcb>(*net);
        };
    } else {
        const BcoConfig bco_cfg(model.alpha(), model.beta(), model.sup_bound(),
                                run.noise.proxy(), cfg.T, run.barrier);
        factory = [bco_cfg](SeedStream s) -> std::unique_ptr<InputAlgorithm> {
            return std::make_unique<BcoCellAlgorithm>(bco_cfg, std::move(s));
        };
    }
    Router router(run.partition, std::move(factory), root);

    RegretLedger ledger;
    Sha256 sha;
    std::ofstream file;
    if (opts.write_transcripts) {
        if (!opts.out_dir) {
            throw ConfigError("transcripts requested without an output directory");
        }
        const auto path = std::filesystem::path(*opts.out_dir) /
                          ("transcript_seed" + std::to_string(seed) + ".csv");
        file.open(path, std::ios::binary);
        if (!file) {
            throw ConfigError("cannot open transcript file '" + path.string() + "'");
        }
    }
    const std::string header = transcript_header(p, d);
    sha.update(header);
    if (file.is_open()) file << header;

    const NoiseModel& noise = run.noise;
    for (long long t = 1; t <= cfg.T; ++t) {
        const Vec c = sample_context(run.context, run.partition, t - 1, ctx_stream);
        const RouteRecord rec = router.route_round(
            c, [&](const Vec& z, SeedStream& noise_stream) {
                return model.eval(z, c) + noise.draw(noise_stream);
            });
        if (!body.contains(rec.z, cfg.feasibility_tol)) {
            std::ostringstream os;
            os << "feasibility audit failed at round " << t
               << ": queried point outside the body";
            throw FeasibilityViolation(os.str());
        }
        const RoundEntry& e = ledger.record_round(model, c, rec.z, rec.y);

        std::string row = std::to_string(t);
        for (int i = 0; i < p; ++i) {
            row += ',';
            append_g17(row, c(i));
        }
        for (int i = 0; i < d; ++i) {
            row += ',';
            append_g17(row, rec.z(i));
        }
        row += ',';
        append_g17(row, e.y);
        row += ',';
        append_g17(row, e.f_value);
        row += ',';
        append_g17(row, e.f_star);
        row += ',';
        append_g17(row, e.f_value - e.f_star);
        row += ',';
        append_g17(row, ledger.cumulative());
        row += '\n';
        sha.update(row);
        if (file.is_open()) file << row;
    }

    SeedResult result;
    result.seed = seed;
    result.final_regret = ledger.cumulative();
    result.transcript_sha256 = sha.hex_digest();
    result.instantiated_cells =
        static_cast<long long>(router.instantiated_cells());
    return result;
}

int resolve_workers(const RunOptions& opts, std::size_t n_seeds) {
    int w = opts.workers;
    if (w <= 0) {
        if (const char* env = std::getenv("CCB_WORKERS")) {
            w = std::atoi(env);
        }
    }
    if (w <= 0) w = static_cast<int>(std::thread::hardware_concurrency());
    if (w <= 0) w = 1;
    return std::clamp<int>(w, 1, static_cast<int>(n_seeds));
}

[[noreturn]] void rethrow_with_seed(const std::exception_ptr& ep,
                                    std::uint64_t seed) {
    const std::string prefix = "seed " + std::to_string(seed) + ": ";
    try {
        std::rethrow_exception(ep);
    } catch (const ConfigError& e) {
        throw ConfigError(prefix + e.what());
    } catch (const CertificationFailed& e) {
        throw CertificationFailed(prefix + e.what());
    } catch (const OracleFailure& e) {
        throw OracleFailure(prefix + e.what());
    } catch (const FeasibilityViolation& e) {
        throw FeasibilityViolation(prefix + e.what());
    } catch (const Error& e) {
        throw Error(prefix + e.what());
    }
}

} // namespace

RunSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
    const auto start = std::chrono::steady_clock::now();
    const AssembledRun run = assemble(cfg);
    if (opts.out_dir) {
        std::filesystem::create_directories(*opts.out_dir);
    }

    const std::size_t n = cfg.seeds.size();
    std::vector<SeedResult> results(n);
    std::vector<std::exception_ptr> errors(n);

    const int workers = resolve_workers(opts, n);
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            results[i] = run_one_seed(cfg, run, cfg.seeds[i], opts);
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    results[i] = run_one_seed(cfg, run, cfg.seeds[i], opts);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
        for (std::size_t i = 0; i < n; ++i) {
            if (errors[i]) rethrow_with_seed(errors[i], cfg.seeds[i]);
        }
    }

    RunSummary summary;
    summary.T = cfg.T;
    summary.K_used = run.K_used;
    summary.seeds = std::move(results);
    summary.warnings = run.warnings;
    summary.config_echo = cfg.echo;

    double mean = 0.0;
    for (const SeedResult& r : summary.seeds) mean += r.final_regret;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (const SeedResult& r : summary.seeds) {
        const double dev = r.final_regret - mean;
        ss += dev * dev;
    }
    summary.mean_regret = mean;
    summary.sd_regret = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    summary.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();

    if (opts.out_dir) {
        const auto path = std::filesystem::path(*opts.out_dir) / "summary.json";
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw ConfigError("cannot open summary file '" + path.string() + "'");
        }
        out << summary_to_json(summary).dump(2) << "\n";
    }
    return summary;
}

Json summary_to_json(const RunSummary& summary) {
    Json j;
    j["spec_version"] = 1;
    j["T"] = summary.T;
    j["K"] = summary.K_used;
    Json seeds = Json::array();
    Json per_seed = Json::array();
    Json cells = Json::array();
    Json hashes = Json::object();
    for (const SeedResult& r : summary.seeds) {
        seeds.push_back(r.seed);
        per_seed.push_back(r.final_regret);
        cells.push_back(r.instantiated_cells);
        hashes[std::to_string(r.seed)] = r.transcript_sha256;
    }
    j["seeds"] = std::move(seeds);
    j["mean_regret"] = summary.mean_regret;
    j["sd_regret"] = summary.sd_regret;
    j["per_seed_regret"] = std::move(per_seed);
    j["instantiated_cells"] = std::move(cells);
    j["transcript_sha256"] = std::move(hashes);
    j["warnings"] = summary.warnings;
    j["config"] = summary.config_echo;
    return j;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------
SweepReport sweep_rates(const ExperimentConfig& base,
                        const std::vector<long long>& horizons,
                        const RunOptions& opts, const SweepRunner& runner) {
    if (horizons.size() < 3) {
        throw ConfigError("sweep: need at least 3 horizons");
    }
    SweepReport report;
    report.horizons = horizons;
    RunOptions inner = opts;
    inner.out_dir.reset();
    inner.write_transcripts = false;
    for (const long long T : horizons) {
        ExperimentConfig cfg = base;
        cfg.T = T;
        cfg.echo["T"] = T;
        const double mean = runner ? runner(cfg)
                                   : run_experiment(cfg, inner).mean_regret;
        report.points.push_back({static_cast<double>(T), mean});
    }
    report.fit = rate_fit(report.points);
    return report;
}

Json sweep_to_json(const SweepReport& report) {
    Json j;
    j["horizons"] = report.horizons;
    Json regrets = Json::array();
    for (const RatePoint& pt : report.points) regrets.push_back(pt.regret);
    j["mean_regrets"] = std::move(regrets);
    j["slope"] = report.fit.slope;
    j["intercept"] = report.fit.intercept;
    j["max_residual"] = report.fit.max_residual;
    return j;
}

std::vector<long long> parse_horizons(const std::string& text) {
    std::vector<long long> out;
    const auto parse_token = [](const std::string& tok) -> long long {
        const auto caret = tok.find('^');
        try {
            if (caret != std::string::npos) {
                const long long base = std::stoll(tok.substr(0, caret));
                const long long exp = std::stoll(tok.substr(caret + 1));
                if (base < 2 || exp < 0 || exp > 62) {
                    throw ConfigError("horizons: power out of range: " + tok);
                }
                long long v = 1;
                for (long long i = 0; i < exp; ++i) v *= base;
                return v;
            }
            return std::stoll(tok);
        } catch (const std::logic_error&) {
            throw ConfigError("horizons: cannot parse token '" + tok + "'");
        }
    };

    const auto range = text.find("..");
    if (range != std::string::npos) {
        const std::string lo_tok = text.substr(0, range);
        const std::string hi_tok = text.substr(range + 2);
        const auto c1 = lo_tok.find('^');
        const auto c2 = hi_tok.find('^');
        if (c1 == std::string::npos || c2 == std::string::npos ||
            lo_tok.substr(0, c1) != hi_tok.substr(0, c2)) {
            throw ConfigError("horizons: range form must be base^a..base^b");
        }
        long long lo_exp, hi_exp, base;
        try {
            base = std::stoll(lo_tok.substr(0, c1));
            lo_exp = std::stoll(lo_tok.substr(c1 + 1));
            hi_exp = std::stoll(hi_tok.substr(c2 + 1));
        } catch (const std::logic_error&) {
            throw ConfigError("horizons: cannot parse range '" + text + "'");
        }
        if (base < 2 || lo_exp < 0 || hi_exp < lo_exp || hi_exp > 62) {
            throw ConfigError("horizons: bad range '" + text + "'");
        }
        long long v = 1;
        for (long long i = 0; i < lo_exp; ++i) v *= base;
        for (long long e = lo_exp; e <= hi_exp; ++e) {
            out.push_back(v);
            v *= base;
        }
        return out;
    }

    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(parse_token(tok));
    }
    if (out.empty()) throw ConfigError("horizons: empty list");
    return out;
}

} // namespace ccb
