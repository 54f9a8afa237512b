#pragma once

#include <vector>

#include "ccb/environments.hpp"
#include "ccb/geometry.hpp"

namespace ccb {

struct RoundEntry {
    long long t = 0;  // 1-based round
    Vec c;
    Vec z;
    double y = 0.0;       // observed (noisy) loss
    double f_value = 0.0; // noiseless f(z_t, c_t)
    double f_star = 0.0;  // min_x f(x, c_t)
};

// Contextual-regret bookkeeping: cumulative sum of f(z_t, c_t) - f*(c_t),
// computed from noiseless values (y is logged but never enters regret).
class RegretLedger {
public:
    // Evaluates f and the per-context minimum, appends the record, and adds
    // the increment. Increments below -1e-9 mean the minimizer oracle failed
    // to minimize; that raises OracleFailure.
    const RoundEntry& record_round(const LossModel& model, const Vec& c,
                                   const Vec& z, double y);

    double cumulative() const { return cumulative_; }
    const std::vector<RoundEntry>& entries() const { return entries_; }
    long long rounds() const { return static_cast<long long>(entries_.size()); }

private:
    std::vector<RoundEntry> entries_;
    double cumulative_ = 0.0;
};

// Static regret of a trace: sum_t f(z_t, c_t) - min_x sum_t f(x, c_t). The
// comparator minimum is closed-form for quadratics (project the mean target)
// and for the lower-bound family (same functional form with the averaged cell
// weight); otherwise multi-start projected Newton.
double static_regret(const std::vector<RoundEntry>& trace, const LossModel& model);

struct RatePoint {
    double T = 0.0;
    double regret = 0.0;
};
using RatePoints = std::vector<RatePoint>;

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_residual = 0.0;
};

// Least-squares fit of log(regret) against log(T). Requires >= 3 points with
// strictly increasing T and positive regrets; DegenerateFit otherwise.
RateFit rate_fit(const RatePoints& points);

} // namespace ccb
