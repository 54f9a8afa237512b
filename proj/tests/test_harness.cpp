#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "ccb/harness.hpp"
#include "ccb/sha256.hpp"

namespace {

namespace fs = std::filesystem;
using ccb::ExperimentConfig;
using ccb::Json;
using ccb::RunOptions;

// Minimal valid config: 1-d quadratic on the unit ball, two-cell router.
Json base_json() {
    return Json{
        {"spec_version", 1},
        {"T", 40},
        {"seeds", {1}},
        {"body", {{"kind", "ball"}, {"dim", 1}}},
        {"loss", {{"kind", "quadratic"}, {"alpha", 1.0}, {"L", 1.0}}},
        {"context", {{"kind", "iid_uniform"}, {"p", 1}}},
        {"algorithm", {{"kind", "router_bco"}, {"K", 2}}},
        {"noise", {{"kind", "zero"}}},
    };
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() /
               ("ccb_test_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------
TEST(ConfigParse, RoundTripDefaults) {
    const auto cfg = ExperimentConfig::from_json(base_json());
    EXPECT_EQ(cfg.spec_version, 1);
    EXPECT_EQ(cfg.T, 40);
    ASSERT_EQ(cfg.seeds.size(), 1u);
    EXPECT_EQ(cfg.seeds[0], 1u);
    EXPECT_EQ(cfg.body.dim, 1);
    EXPECT_EQ(cfg.loss.kind, ccb::LossSpec::Kind::Quadratic);
    EXPECT_EQ(cfg.loss.gamma, 1.0);
    EXPECT_EQ(cfg.loss.map_seed, 1u);
    EXPECT_EQ(cfg.context.p, 1);
    EXPECT_EQ(cfg.algorithm.kind, ccb::AlgorithmSpec::Kind::RouterBco);
    EXPECT_EQ(cfg.algorithm.k_policy, ccb::AlgorithmSpec::KPolicy::Fixed);
    EXPECT_EQ(cfg.algorithm.K, 2);
    EXPECT_EQ(cfg.noise.kind, ccb::NoiseModel::Kind::Zero);
    EXPECT_EQ(cfg.echo["T"], 40);
}

TEST(ConfigParse, NSeedsExpandsToOneThroughN) {
    Json j = base_json();
    j.erase("seeds");
    j["n_seeds"] = 3;
    const auto cfg = ExperimentConfig::from_json(j);
    ASSERT_EQ(cfg.seeds.size(), 3u);
    EXPECT_EQ(cfg.seeds[0], 1u);
    EXPECT_EQ(cfg.seeds[2], 3u);
}

TEST(ConfigParse, RejectsBadTopLevel) {
    {
        Json j = base_json();
        j.erase("spec_version");
        EXPECT_THROW(ExperimentConfig::from_json(j), ccb::ConfigError);
    }
    {
        Json j = base_json();
        j["spec_version"] = 2;
        EXPECT_THROW(ExperimentConfig::from_json(j), ccb::ConfigError);
    }
    {
        Json j = base_json();
        j["spec_version"] = "1";
        EXPECT_THROW(ExperimentConfig::from_json(j), ccb::ConfigError);
    }
    {
        Json j = base_json();
        j["T"] = 0;
        EXPECT_THROW(ExperimentConfig::from_json(j), ccb::ConfigError);
    }
    {
        Json j = base_json();
        j.erase("T");
        EXPECT_THROW(ExperimentConfig::from_json(j), ccb::ConfigError);
    }
    {
        Json j = base_json();
        j["n_seeds"] = 2; // both forms present
        EXPECT_THROW(ExperimentConfig::from_json(j), ccb::ConfigError);
    }
    {
        Json j = base_json();
        j.erase("seeds"); // neither form present
        EXPECT_THROW(ExperimentConfig::from_json(j), ccb::ConfigError);
    }
    {
        Json j = base_json();
        j["seeds"] = Json::array();
        EXPECT_THROW(ExperimentConfig::from_json(j), ccb::ConfigError);
    }
    {
        Json j = base_json();
        j.erase("seeds");
        j["n_seeds"] = 0;
        EXPECT_THROW(ExperimentConfig::from_json(j), ccb::ConfigError);
    }
}

TEST(ConfigParse, RejectsUnknownKinds) {
    for (const char* section : {"body", "loss", "context", "algorithm", "noise"}) {
        Json j = base_json();
        j[section]["kind"] = "no_such_kind";
        EXPECT_THROW(ExperimentConfig::from_json(j), ccb::ConfigError)
            << section;
    }
}

TEST(ConfigParse, BodyVariants) {
    {
        Json j = base_json();
        j["body"] = {{"kind", "ball"}, {"center", {1.0, 2.0}}, {"radius", 3.0}};
        const auto cfg = ExperimentConfig::from_json(j);
        EXPECT_EQ(cfg.body.dim, 2);
        const auto body = cfg.body.build();
        EXPECT_EQ(body.dim(), 2);
        ccb::Vec q(2);
        q << 3.5, 2.0;
        EXPECT_TRUE(body.contains(q));
    }
    {
        Json j = base_json();
        j["body"] = {{"kind", "ball"}, {"center", {0.0, 0.0}}, {"dim", 3}};
        EXPECT_THROW(ExperimentConfig::from_json(j), ccb::ConfigError);
    }
    {
        Json j = base_json();
        j["body"] = {{"kind", "ball"}, {"radius", 1.0}}; // no dim, no center
        EXPECT_THROW(ExperimentConfig::from_json(j), ccb::ConfigError);
    }
    {
        Json j = base_json();
        j["body"] = {{"kind", "box"}, {"lo", {0.0}}, {"hi", {1.0}}};
        const auto cfg = ExperimentConfig::from_json(j);
        const auto body = cfg.body.build();
        ccb::Vec q(1);
        q << 0.5;
        EXPECT_TRUE(body.contains(q));
        q << 1.5;
        EXPECT_FALSE(body.contains(q));
    }
    {
        Json j = base_json();
        j["body"] = {{"kind", "polytope"},
                     {"A", {{1.0, 0.0}, {0.0, 1.0, 2.0}}},
                     {"b", {1.0, 1.0}}};
        EXPECT_THROW(ExperimentConfig::from_json(j), ccb::ConfigError);
    }
}

TEST(ConfigParse, LossAndContextKMatch) {
    {
        Json j = base_json();
        j["loss"]["K"] = "match";
        EXPECT_EQ(ExperimentConfig::from_json(j).loss.K, 0);
    }
    {
        Json j = base_json();
        j["loss"]["K"] = 7;
        EXPECT_EQ(ExperimentConfig::from_json(j).loss.K, 7);
    }
    {
        Json j = base_json();
        j["loss"]["K"] = "matched"; // typo must not pass silently
        EXPECT_THROW(ExperimentConfig::from_json(j), ccb::ConfigError);
    }
    {
        Json j = base_json();
        j["context"] = {{"kind", "pk"}, {"p", 1}, {"K", "match"}};
        EXPECT_EQ(ExperimentConfig::from_json(j).context.K, 0);
    }
}

TEST(ConfigParse, AlgorithmKPolicies) {
    {
        Json j = base_json();
        j["algorithm"]["K"] = "auto";
        EXPECT_EQ(ExperimentConfig::from_json(j).algorithm.k_policy,
                  ccb::AlgorithmSpec::KPolicy::Auto);
    }
    {
        Json j = base_json();
        j["algorithm"]["K"] = "linear_cells";
        EXPECT_EQ(ExperimentConfig::from_json(j).algorithm.k_policy,
                  ccb::AlgorithmSpec::KPolicy::LinearCells);
    }
    {
        Json j = base_json();
        j["algorithm"]["K"] = 0;
        EXPECT_THROW(ExperimentConfig::from_json(j), ccb::ConfigError);
    }
    {
        Json j = base_json();
        j["algorithm"]["K"] = 2.5;
        EXPECT_THROW(ExperimentConfig::from_json(j), ccb::ConfigError);
    }
    {
        Json j = base_json();
        j["algorithm"] = {{"kind", "bco"}}; // no K needed for the flat solver
        const auto cfg = ExperimentConfig::from_json(j);
        EXPECT_EQ(cfg.algorithm.kind, ccb::AlgorithmSpec::Kind::Bco);
        EXPECT_EQ(cfg.algorithm.K, 1);
    }
}

TEST(ConfigParse, FixedContextSequence) {
    Json j = base_json();
    j["context"] = {{"kind", "fixed"}, {"points", {{0.25}, {0.75}}}};
    const auto cfg = ExperimentConfig::from_json(j);
    EXPECT_EQ(cfg.context.kind, ccb::ContextProcess::Kind::FixedSequence);
    EXPECT_TRUE(cfg.context.cycle);
    ASSERT_EQ(cfg.context.sequence.size(), 2u);
    EXPECT_EQ(cfg.context.sequence[1](0), 0.75);

    j["context"]["cycle"] = false;
    EXPECT_FALSE(ExperimentConfig::from_json(j).context.cycle);

    j["context"]["points"] = {{1.25}};
    EXPECT_THROW(ExperimentConfig::from_json(j), ccb::ConfigError);
    j["context"]["points"] = Json::array();
    EXPECT_THROW(ExperimentConfig::from_json(j), ccb::ConfigError);
}

TEST(ConfigParse, NoiseRequiresItsScale) {
    {
        Json j = base_json();
        j["noise"] = {{"kind", "gaussian"}};
        EXPECT_THROW(ExperimentConfig::from_json(j), ccb::ConfigError);
    }
    {
        Json j = base_json();
        j["noise"] = {{"kind", "gaussian"}, {"sigma", 0.5}};
        EXPECT_EQ(ExperimentConfig::from_json(j).noise.sigma, 0.5);
    }
    {
        Json j = base_json();
        j["noise"] = {{"kind", "bounded_uniform"}};
        EXPECT_THROW(ExperimentConfig::from_json(j), ccb::ConfigError);
    }
}

TEST(ConfigParse, ToleranceOverrides) {
    EXPECT_EQ(ExperimentConfig::from_json(base_json()).feasibility_tol, 1e-12);
    {
        Json j = base_json();
        j["tolerances"] = {{"feasibility", 1e-9}};
        EXPECT_EQ(ExperimentConfig::from_json(j).feasibility_tol, 1e-9);
    }
    {
        Json j = base_json();
        j["tolerances"] = {{"no_such_tolerance", 1.0}};
        EXPECT_THROW(ExperimentConfig::from_json(j), ccb::ConfigError);
    }
    {
        Json j = base_json();
        j["tolerances"] = 1e-9; // must be an object
        EXPECT_THROW(ExperimentConfig::from_json(j), ccb::ConfigError);
    }
}

TEST(RunExperiment, ImpossibleFeasibilityToleranceTripsTheAudit) {
    // A tolerance below -r^2 makes membership unsatisfiable, so the audit
    // must flag the very first queried point.
    Json j = base_json();
    j["tolerances"] = {{"feasibility", -10.0}};
    RunOptions opts;
    opts.workers = 1;
    EXPECT_THROW(ccb::run_experiment(ExperimentConfig::from_json(j), opts),
                 ccb::FeasibilityViolation);
}

TEST(ConfigParse, FromFileReportsPathOnError) {
    EXPECT_THROW(ExperimentConfig::from_file("/nonexistent/ccb.json"),
                 ccb::ConfigError);
    TempDir dir("badjson");
    const auto path = dir.path / "broken.json";
    std::ofstream(path) << "{ not json";
    EXPECT_THROW(ExperimentConfig::from_file(path.string()), ccb::ConfigError);
}

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------
TEST(Assemble, FlatSolverUsesOneCell) {
    Json j = base_json();
    j["algorithm"] = {{"kind", "bco"}};
    const auto run = ccb::assemble(ExperimentConfig::from_json(j));
    EXPECT_EQ(run.K_used, 1);
    EXPECT_EQ(run.partition.K, 1);
}

TEST(Assemble, FixedKIsUsedVerbatim) {
    Json j = base_json();
    j["algorithm"]["K"] = 5;
    const auto run = ccb::assemble(ExperimentConfig::from_json(j));
    EXPECT_EQ(run.K_used, 5);
    EXPECT_EQ(run.partition.K, 5);
}

TEST(Assemble, AutoKMatchesTuningRule) {
    Json j = base_json();
    j["T"] = 10000;
    j["algorithm"]["K"] = "auto";
    j["algorithm"]["rho"] = 1.0;
    j["algorithm"]["T0"] = 1;
    const auto run = ccb::assemble(ExperimentConfig::from_json(j));
    const auto params = ccb::strongly_convex_preset(1.0, 1.0, 1.0, 1.0);
    EXPECT_EQ(run.K_used, ccb::choose_K(params, 1, 1, 10000));
}

TEST(Assemble, LinearCellsUsesRootOfHorizon) {
    Json j = base_json();
    j["T"] = 37;
    j["algorithm"]["K"] = "linear_cells";
    EXPECT_EQ(ccb::assemble(ExperimentConfig::from_json(j)).K_used, 37);

    j["T"] = 90;
    j["context"]["p"] = 2;
    EXPECT_EQ(ccb::assemble(ExperimentConfig::from_json(j)).K_used, 9);
}

TEST(Assemble, AutoKRejectsZeroExponentLoss) {
    Json j = base_json();
    j["loss"]["kind"] = "lower_bound_gamma0";
    j["loss"]["check_admissibility"] = false;
    j["algorithm"]["K"] = "auto";
    EXPECT_THROW(ccb::assemble(ExperimentConfig::from_json(j)),
                 ccb::ConfigError);
}

TEST(Assemble, LowerBoundCellCountFollowsAlgorithm) {
    Json j = base_json();
    j["loss"] = {{"kind", "lower_bound"}, {"K", "match"}};
    j["algorithm"]["K"] = 3;
    const auto run = ccb::assemble(ExperimentConfig::from_json(j));
    const auto lb =
        std::dynamic_pointer_cast<const ccb::LowerBoundFamily>(run.model);
    ASSERT_TRUE(lb);
    EXPECT_EQ(lb->spec().K, 3);
    EXPECT_NEAR(lb->delta(), 1.0 / 6.0, 1e-15);

    j["loss"]["K"] = 5; // explicit cell count wins over the algorithm's
    const auto run2 = ccb::assemble(ExperimentConfig::from_json(j));
    const auto lb2 =
        std::dynamic_pointer_cast<const ccb::LowerBoundFamily>(run2.model);
    ASSERT_TRUE(lb2);
    EXPECT_EQ(lb2->spec().K, 5);
}

TEST(Assemble, LowerBoundNeedsCenteredUnitBall) {
    Json j = base_json();
    j["loss"] = {{"kind", "lower_bound"}};
    j["body"] = {{"kind", "ball"}, {"center", {0.1}}, {"radius", 1.0}};
    EXPECT_THROW(ccb::assemble(ExperimentConfig::from_json(j)),
                 ccb::ConfigError);
    j["body"] = {{"kind", "ball"}, {"dim", 1}, {"radius", 2.0}};
    EXPECT_THROW(ccb::assemble(ExperimentConfig::from_json(j)),
                 ccb::ConfigError);
}

TEST(Assemble, PkContextMatchesAlgorithmCells) {
    Json j = base_json();
    j["context"] = {{"kind", "pk"}, {"p", 1}};
    j["algorithm"]["K"] = 4;
    const auto run = ccb::assemble(ExperimentConfig::from_json(j));
    EXPECT_EQ(run.context.kind, ccb::ContextProcess::Kind::PK);
    EXPECT_EQ(run.context.K, 4);

    j["context"]["K"] = 9;
    EXPECT_EQ(ccb::assemble(ExperimentConfig::from_json(j)).context.K, 9);
}

TEST(Assemble, WarnsWhenHorizonBelowBurnIn) {
    Json j = base_json();
    j["T"] = 10;
    j["context"]["p"] = 2;
    j["algorithm"]["K"] = 4; // 16 cells > 10 rounds
    const auto run = ccb::assemble(ExperimentConfig::from_json(j));
    ASSERT_FALSE(run.warnings.empty());
    EXPECT_NE(run.warnings.front().find("cold"), std::string::npos);

    j["T"] = 1000;
    EXPECT_TRUE(ccb::assemble(ExperimentConfig::from_json(j)).warnings.empty());
}

// ---------------------------------------------------------------------------
// Runs
// ---------------------------------------------------------------------------
TEST(RunExperiment, SingleRoundTranscriptRoundTrips) {
    TempDir dir("single");
    Json j = base_json();
    j["T"] = 1;
    j["seeds"] = {7};
    ExperimentConfig cfg = ExperimentConfig::from_json(j);
    RunOptions opts;
    opts.out_dir = dir.path.string();
    opts.write_transcripts = true;
    opts.workers = 1;
    const auto summary = ccb::run_experiment(cfg, opts);
    ASSERT_EQ(summary.seeds.size(), 1u);
    EXPECT_EQ(summary.T, 1);

    const auto csv_path = dir.path / "transcript_seed7.csv";
    ASSERT_TRUE(fs::exists(csv_path));
    std::ifstream in(csv_path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string bytes = buf.str();

    // Header plus exactly one data row.
    EXPECT_EQ(bytes.rfind("t,c0,z0,y,f_value,f_star,inst_regret,cum_regret\n",
                          0),
              0u);
    EXPECT_EQ(std::count(bytes.begin(), bytes.end(), '\n'), 2);
    EXPECT_EQ(bytes.substr(bytes.find('\n') + 1, 2), "1,");

    // The reported hash is the hash of the file bytes.
    ccb::Sha256 sha;
    sha.update(bytes.data(), bytes.size());
    EXPECT_EQ(sha.hex_digest(), summary.seeds[0].transcript_sha256);

    // summary.json round-trips and carries the same hash.
    std::ifstream sin(dir.path / "summary.json");
    ASSERT_TRUE(sin.good());
    const Json written = Json::parse(sin);
    EXPECT_EQ(written.at("transcript_sha256").at("7").get<std::string>(),
              summary.seeds[0].transcript_sha256);
    EXPECT_EQ(written.at("T").get<long long>(), 1);
    EXPECT_FALSE(written.contains("wall_clock_seconds"));
}

TEST(RunExperiment, DeterministicAcrossCalls) {
    Json j = base_json();
    j["T"] = 60;
    j["seeds"] = {1, 2};
    j["noise"] = {{"kind", "gaussian"}, {"sigma", 0.1}};
    const ExperimentConfig cfg = ExperimentConfig::from_json(j);
    RunOptions opts;
    opts.workers = 1;
    const auto a = ccb::run_experiment(cfg, opts);
    const auto b = ccb::run_experiment(cfg, opts);
    ASSERT_EQ(a.seeds.size(), b.seeds.size());
    for (std::size_t i = 0; i < a.seeds.size(); ++i) {
        EXPECT_EQ(a.seeds[i].transcript_sha256, b.seeds[i].transcript_sha256);
        EXPECT_EQ(a.seeds[i].final_regret, b.seeds[i].final_regret);
    }
    EXPECT_EQ(a.mean_regret, b.mean_regret);
    EXPECT_EQ(ccb::summary_to_json(a).dump(), ccb::summary_to_json(b).dump());
}

TEST(RunExperiment, DistinctSeedsDiffer) {
    Json j = base_json();
    j["T"] = 60;
    j["seeds"] = {1, 2};
    j["noise"] = {{"kind", "gaussian"}, {"sigma", 0.1}};
    RunOptions opts;
    opts.workers = 1;
    const auto s = ccb::run_experiment(ExperimentConfig::from_json(j), opts);
    EXPECT_NE(s.seeds[0].transcript_sha256, s.seeds[1].transcript_sha256);
    EXPECT_NE(s.seeds[0].final_regret, s.seeds[1].final_regret);
}

TEST(RunExperiment, WorkerCountDoesNotChangeResults) {
    Json j = base_json();
    j["T"] = 50;
    j.erase("seeds");
    j["n_seeds"] = 4;
    j["noise"] = {{"kind", "gaussian"}, {"sigma", 0.2}};
    const ExperimentConfig cfg = ExperimentConfig::from_json(j);
    RunOptions serial, parallel;
    serial.workers = 1;
    parallel.workers = 4;
    const auto a = ccb::run_experiment(cfg, serial);
    const auto b = ccb::run_experiment(cfg, parallel);
    EXPECT_EQ(ccb::summary_to_json(a).dump(), ccb::summary_to_json(b).dump());
}

TEST(RunExperiment, MeanAndSdMatchPerSeedValues) {
    Json j = base_json();
    j["T"] = 50;
    j.erase("seeds");
    j["n_seeds"] = 3;
    j["noise"] = {{"kind", "gaussian"}, {"sigma", 0.3}};
    RunOptions opts;
    opts.workers = 1;
    const auto s = ccb::run_experiment(ExperimentConfig::from_json(j), opts);
    double mean = 0.0;
    for (const auto& r : s.seeds) mean += r.final_regret;
    mean /= 3.0;
    double ss = 0.0;
    for (const auto& r : s.seeds) ss += (r.final_regret - mean) *
                                        (r.final_regret - mean);
    EXPECT_NEAR(s.mean_regret, mean, 1e-12);
    EXPECT_NEAR(s.sd_regret, std::sqrt(ss / 2.0), 1e-12);
}

TEST(RunExperiment, SeedPrefixOnWorkerErrors) {
    // A non-cycling two-point context sequence exhausts at round 3.
    Json j = base_json();
    j["T"] = 10;
    j["seeds"] = {1, 2};
    j["context"] = {{"kind", "fixed"},
                    {"points", {{0.25}, {0.75}}},
                    {"cycle", false}};
    RunOptions opts;
    opts.workers = 2;
    try {
        ccb::run_experiment(ExperimentConfig::from_json(j), opts);
        FAIL() << "expected an error from the exhausted context sequence";
    } catch (const ccb::Error& e) {
        EXPECT_NE(std::string(e.what()).find("seed 1: "), std::string::npos);
    }
}

TEST(RunExperiment, TranscriptsNeedOutputDirectory) {
    Json j = base_json();
    RunOptions opts;
    opts.write_transcripts = true;
    opts.workers = 1;
    EXPECT_THROW(ccb::run_experiment(ExperimentConfig::from_json(j), opts),
                 ccb::ConfigError);
}

TEST(RunExperiment, RouterOnlyTouchesVisitedCells) {
    Json j = base_json();
    j["T"] = 6;
    j["seeds"] = {3};
    j["context"] = {{"kind", "fixed"}, {"points", {{0.1}}}, {"cycle", true}};
    j["algorithm"]["K"] = 8;
    RunOptions opts;
    opts.workers = 1;
    const auto s = ccb::run_experiment(ExperimentConfig::from_json(j), opts);
    EXPECT_EQ(s.seeds[0].instantiated_cells, 1);
    EXPECT_EQ(s.K_used, 8);
}

// ---------------------------------------------------------------------------
// Summary serialization
// ---------------------------------------------------------------------------
TEST(SummaryJson, ShapeIsStable) {
    Json j = base_json();
    j["T"] = 5;
    RunOptions opts;
    opts.workers = 1;
    const auto s = ccb::run_experiment(ExperimentConfig::from_json(j), opts);
    const Json out = ccb::summary_to_json(s);
    const std::vector<std::string> expected = {
        "spec_version",  "T",           "K",
        "seeds",         "mean_regret", "sd_regret",
        "per_seed_regret", "instantiated_cells", "transcript_sha256",
        "warnings",      "config"};
    std::vector<std::string> got;
    for (auto it = out.begin(); it != out.end(); ++it) got.push_back(it.key());
    EXPECT_EQ(got, expected);
    EXPECT_EQ(out.at("config").at("T").get<long long>(), 5);
    EXPECT_EQ(out.at("per_seed_regret").size(), 1u);
}

// ---------------------------------------------------------------------------
// Sweeps and horizon parsing
// ---------------------------------------------------------------------------
TEST(Sweep, InjectedRunnerSeesRetunedHorizons) {
    Json j = base_json();
    const ExperimentConfig cfg = ExperimentConfig::from_json(j);
    std::vector<long long> seen;
    const ccb::SweepRunner runner = [&](const ExperimentConfig& c) {
        seen.push_back(c.T);
        EXPECT_EQ(c.echo.at("T").get<long long>(), c.T);
        return std::sqrt(static_cast<double>(c.T));
    };
    const auto report =
        ccb::sweep_rates(cfg, {100, 1000, 10000, 100000}, {}, runner);
    EXPECT_EQ(seen, (std::vector<long long>{100, 1000, 10000, 100000}));
    EXPECT_NEAR(report.fit.slope, 0.5, 1e-12);
    EXPECT_NEAR(report.fit.intercept, 0.0, 1e-12);

    const Json out = ccb::sweep_to_json(report);
    EXPECT_EQ(out.at("horizons").size(), 4u);
    EXPECT_EQ(out.at("mean_regrets").size(), 4u);
    EXPECT_NEAR(out.at("slope").get<double>(), 0.5, 1e-12);
}

TEST(Sweep, NeedsAtLeastThreeHorizons) {
    const ExperimentConfig cfg = ExperimentConfig::from_json(base_json());
    const ccb::SweepRunner runner = [](const ExperimentConfig& c) {
        return static_cast<double>(c.T);
    };
    EXPECT_THROW(ccb::sweep_rates(cfg, {10, 100}, {}, runner),
                 ccb::ConfigError);
}

TEST(Sweep, EndToEndOnTinyRun) {
    Json j = base_json();
    j["seeds"] = {1};
    RunOptions opts;
    opts.workers = 1;
    const auto report = ccb::sweep_rates(ExperimentConfig::from_json(j),
                                         {8, 16, 32}, opts);
    ASSERT_EQ(report.points.size(), 3u);
    for (const auto& pt : report.points) EXPECT_GT(pt.regret, 0.0);
}

TEST(ParseHorizons, PowerRange) {
    EXPECT_EQ(ccb::parse_horizons("2^3..2^5"),
              (std::vector<long long>{8, 16, 32}));
    EXPECT_EQ(ccb::parse_horizons("10^0..10^2"),
              (std::vector<long long>{1, 10, 100}));
}

TEST(ParseHorizons, CommaList) {
    EXPECT_EQ(ccb::parse_horizons("100,2^10,7"),
              (std::vector<long long>{100, 1024, 7}));
    EXPECT_EQ(ccb::parse_horizons("50"), (std::vector<long long>{50}));
}

TEST(ParseHorizons, RejectsMalformedInput) {
    EXPECT_THROW(ccb::parse_horizons(""), ccb::ConfigError);
    EXPECT_THROW(ccb::parse_horizons("2^5..2^3"), ccb::ConfigError);
    EXPECT_THROW(ccb::parse_horizons("2^3..3^5"), ccb::ConfigError);
    EXPECT_THROW(ccb::parse_horizons("2^63"), ccb::ConfigError);
    EXPECT_THROW(ccb::parse_horizons("1^2..1^4"), ccb::ConfigError);
    EXPECT_THROW(ccb::parse_horizons("abc"), ccb::ConfigError);
    EXPECT_THROW(ccb::parse_horizons("10..100"), ccb::ConfigError);
}

} // namespace
