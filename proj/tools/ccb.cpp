// Batch driver for continuum contextual-bandit simulations: run multi-seed
// experiments, sweep regret-rate curves, certify loss-model constants, and
// fit power laws to externally produced rate curves.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ccb/environments.hpp"
#include "ccb/errors.hpp"
#include "ccb/harness.hpp"
#include "ccb/regret.hpp"
#include "ccb/rng.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;
constexpr int kExitOracle = 4;

int do_run(const std::string& config_path, const std::vector<std::uint64_t>& seeds,
           long long n_seeds, const std::string& out_dir, bool transcript,
           int workers) {
    ccb::ExperimentConfig cfg = ccb::ExperimentConfig::from_file(config_path);
    if (!seeds.empty() && n_seeds > 0) {
        throw ccb::ConfigError("give either --seed or --seeds, not both");
    }
    if (!seeds.empty()) {
        cfg.seeds = seeds;
    } else if (n_seeds > 0) {
        cfg.seeds.clear();
        for (long long s = 1; s <= n_seeds; ++s) {
            cfg.seeds.push_back(static_cast<std::uint64_t>(s));
        }
    }
    ccb::RunOptions opts;
    if (!out_dir.empty()) opts.out_dir = out_dir;
    opts.write_transcripts = transcript;
    opts.workers = workers;
    if (transcript && !opts.out_dir) {
        throw ccb::ConfigError("--transcript requires --out DIR");
    }
    const ccb::RunSummary summary = ccb::run_experiment(cfg, opts);
    ccb::Json j = ccb::summary_to_json(summary);
    j["wall_clock_seconds"] = summary.wall_clock_seconds;
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

int do_sweep(const std::string& config_path, const std::string& horizons_text,
             const std::string& out_dir, int workers) {
    ccb::ExperimentConfig cfg = ccb::ExperimentConfig::from_file(config_path);
    const std::vector<long long> horizons = ccb::parse_horizons(horizons_text);
    ccb::RunOptions opts;
    opts.workers = workers;
    const ccb::SweepReport report = ccb::sweep_rates(cfg, horizons, opts);
    const ccb::Json j = ccb::sweep_to_json(report);
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        const auto path = std::filesystem::path(out_dir) / "sweep.json";
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw ccb::ConfigError("cannot open sweep file '" + path.string() +
                                   "'");
        }
        out << j.dump(2) << "\n";
    }
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

int do_certify(const std::string& config_path, long long n_pairs,
               std::uint64_t seed) {
    const ccb::ExperimentConfig cfg = ccb::ExperimentConfig::from_file(config_path);
    const ccb::AssembledRun run = ccb::assemble(cfg);
    ccb::SeedStream stream = ccb::SeedStream(seed).derive("certify");
    const ccb::CertificationReport report =
        ccb::certify_constants(*run.model, n_pairs, stream);
    ccb::Json j;
    j["n_pairs"] = report.n_pairs;
    j["max_holder_ratio"] = report.max_holder_ratio;
    j["min_hess_eig"] = report.min_hess_eig;
    j["max_hess_eig"] = report.max_hess_eig;
    j["max_abs_f"] = report.max_abs_f;
    j["alpha"] = run.model->alpha();
    j["beta"] = run.model->beta();
    j["L"] = run.model->holder_L();
    j["M"] = run.model->sup_bound();
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

int do_fit(const std::string& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw ccb::ConfigError("cannot open '" + csv_path + "'");
    ccb::RatePoints points;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double T = 0.0, regret = 0.0;
        if (std::sscanf(line.c_str(), "%lf , %lf", &T, &regret) == 2 ||
            std::sscanf(line.c_str(), "%lf %lf", &T, &regret) == 2) {
            points.push_back({T, regret});
        }
        // Non-numeric lines (e.g. a header) are skipped.
    }
    const ccb::RateFit fit = ccb::rate_fit(points);
    ccb::Json j;
    j["n_points"] = points.size();
    j["slope"] = fit.slope;
    j["intercept"] = fit.intercept;
    j["max_residual"] = fit.max_residual;
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Continuum contextual-bandit simulation driver"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string horizons_text;
    std::string csv_path;
    std::vector<std::uint64_t> seed_list;
    long long n_seeds = 0;
    long long n_pairs = 1000;
    std::uint64_t certify_seed = 1;
    bool transcript = false;
    int workers = 0;

    CLI::App* run = app.add_subcommand("run", "Run a multi-seed experiment");
    run->add_option("config", config_path, "Experiment config (JSON)")
        ->required();
    run->add_option("--seed", seed_list, "Explicit seed (repeatable)");
    run->add_option("--seeds", n_seeds, "Run seeds 1..N");
    run->add_option("--out", out_dir, "Output directory for summary/transcripts");
    run->add_flag("--transcript", transcript, "Write per-seed transcript CSVs");
    run->add_option("--workers", workers, "Worker thread cap (0 = auto)");

    CLI::App* sweep = app.add_subcommand("sweep", "Sweep horizons and fit a rate");
    sweep->add_option("config", config_path, "Experiment config (JSON)")
        ->required();
    sweep->add_option("--horizons", horizons_text,
                      "Horizon list: '2^10..2^16' or '1024,2048,4096'")
        ->required();
    sweep->add_option("--out", out_dir, "Output directory for sweep.json");
    sweep->add_option("--workers", workers, "Worker thread cap (0 = auto)");

    CLI::App* certify =
        app.add_subcommand("certify", "Certify loss-model constants by sampling");
    certify->add_option("config", config_path, "Experiment config (JSON)")
        ->required();
    certify->add_option("--n-pairs", n_pairs, "Sample pairs to draw");
    certify->add_option("--seed", certify_seed, "Sampling seed");

    CLI::App* fit = app.add_subcommand("fit", "Fit a power law to a T,regret CSV");
    fit->add_option("csv", csv_path, "CSV with rows 'T,regret'")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run->parsed()) {
            return do_run(config_path, seed_list, n_seeds, out_dir, transcript,
                          workers);
        }
        if (sweep->parsed()) {
            return do_sweep(config_path, horizons_text, out_dir, workers);
        }
        if (certify->parsed()) {
            return do_certify(config_path, n_pairs, certify_seed);
        }
        if (fit->parsed()) {
            return do_fit(csv_path);
        }
        std::cerr << "error: no subcommand\n";
        return kExitConfig;
    } catch (const ccb::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ccb::OracleFailure& e) {
        std::cerr << "oracle failure: " << e.what() << "\n";
        return kExitOracle;
    } catch (const ccb::FeasibilityViolation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return kExitInvariant;
    } catch (const ccb::CertificationFailed& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return kExitInvariant;
    } catch (const ccb::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvariant;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvariant;
    }
}
