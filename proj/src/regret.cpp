#include "ccb/regret.hpp"

#include <cmath>
#include <sstream>

#include "ccb/errors.hpp"

namespace ccb {

const RoundEntry& RegretLedger::record_round(const LossModel& model, const Vec& c,
                                             const Vec& z, double y) {
    RoundEntry entry;
    entry.t = rounds() + 1;
    entry.c = c;
    entry.z = z;
    entry.y = y;
    entry.f_value = model.eval(z, c);
    entry.f_star = model.min_oracle(c).f;
    const double increment = entry.f_value - entry.f_star;
    if (increment < -1e-9) {
        std::ostringstream os;
        os << "regret increment " << increment
           << " below oracle slack at round " << entry.t
           << ": the minimizer oracle returned a non-minimal value";
        throw OracleFailure(os.str());
    }
    cumulative_ += increment;
    entries_.push_back(std::move(entry));
    return entries_.back();
}

namespace {

// Averaged objective (1/T) sum_t f(x, c_t); minimizing it minimizes the sum.
SmoothObjective averaged_objective(const std::vector<RoundEntry>& trace,
                                   const LossModel& model) {
    const double inv = 1.0 / static_cast<double>(trace.size());
    return SmoothObjective{
        [&trace, &model, inv](const Vec& x) {
            double v = 0.0;
            for (const RoundEntry& e : trace) v += model.eval(x, e.c);
            return v * inv;
        },
        [&trace, &model, inv](const Vec& x) {
            Vec g = Vec::Zero(model.dim());
            for (const RoundEntry& e : trace) g += model.grad_x(x, e.c);
            return Vec(g * inv);
        },
        [&trace, &model, inv](const Vec& x) {
            Mat h = Mat::Zero(model.dim(), model.dim());
            for (const RoundEntry& e : trace) h += model.hess_x(x, e.c);
            return Mat(h * inv);
        },
    };
}

Vec static_comparator(const std::vector<RoundEntry>& trace,
                      const LossModel& model) {
    const ConvexBody& body = model.body();

    if (const auto* quad = dynamic_cast<const ContextualQuadratic*>(&model)) {
        // Mean of per-round quadratics is a quadratic centered at the mean
        // target; its constrained minimizer is the projection.
        Vec mean_m = Vec::Zero(model.dim());
        for (const RoundEntry& e : trace) mean_m += quad->target(e.c);
        mean_m /= static_cast<double>(trace.size());
        const Vec dev = mean_m - body.center();
        const double n = dev.norm();
        if (n <= body.radius()) return mean_m;
        return body.center() + dev * (body.radius() / n);
    }

    const SmoothObjective obj = averaged_objective(trace, model);

    if (const auto* lb = dynamic_cast<const LowerBoundFamily*>(&model)) {
        // The average over contexts keeps the family's functional form with
        // the averaged signed cell weight, so the per-context closed form
        // applies with that weight.
        double mean_w = 0.0;
        for (const RoundEntry& e : trace) mean_w += lb->context_weight(e.c);
        mean_w /= static_cast<double>(trace.size());
        const LowerBoundSpec& spec = lb->spec();
        const double scale =
            spec.gamma_zero ? 1.0 : std::pow(lb->delta(), -0.5 * spec.gamma);
        Vec x(spec.d);
        x(0) = -spec.r1 * spec.L * scale * mean_w / (2.0 * spec.alpha);
        for (int i = 1; i < spec.d; ++i) {
            x(i) = -spec.r2 * lb->tau(i - 1) * lb->h() / (2.0 * spec.alpha);
        }
        const bool regime = std::abs(x(0) * scale) <= 0.25 + 1e-12 &&
                            (spec.d == 1 ||
                             spec.r2 / (2.0 * spec.alpha) <= 0.25 + 1e-12) &&
                            x.norm() <= 1.0;
        if (regime) {
            for (int iter = 0; iter < 20; ++iter) {
                const Vec g = obj.gradient(x);
                if (g.norm() <= 1e-10) break;
                Eigen::LLT<Mat> llt(obj.hessian(x));
                if (llt.info() != Eigen::Success) break;
                x -= llt.solve(g);
            }
            if (obj.gradient(x).norm() <= 1e-8 && x.norm() <= 1.0) return x;
        }
        // Fall through to the generic numerical path.
    }

    SeedStream stream = SeedStream(0x57A7).derive("static_comparator");
    return minimize_in_body(obj, body, 8, stream, 1e-8).x;
}

} // namespace

double static_regret(const std::vector<RoundEntry>& trace,
                     const LossModel& model) {
    if (trace.empty()) throw ConfigError("static_regret: empty trace");
    const Vec comparator = static_comparator(trace, model);
    double sum_f = 0.0;
    double sum_comp = 0.0;
    for (const RoundEntry& e : trace) {
        sum_f += e.f_value;
        sum_comp += model.eval(comparator, e.c);
    }
    return sum_f - sum_comp;
}

RateFit rate_fit(const RatePoints& points) {
    if (points.size() < 3) {
        throw DegenerateFit("rate_fit: need at least 3 points");
    }
    const auto n = static_cast<double>(points.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].T > 0.0)) {
            throw DegenerateFit("rate_fit: horizons must be positive");
        }
        if (i > 0 && !(points[i].T > points[i - 1].T)) {
            throw DegenerateFit("rate_fit: horizons must be strictly increasing");
        }
        if (!(points[i].regret > 0.0)) {
            throw DegenerateFit("rate_fit: regrets must be positive for a log fit");
        }
        const double x = std::log(points[i].T);
        const double y = std::log(points[i].regret);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (!(std::abs(denom) > 1e-12)) {
        throw DegenerateFit("rate_fit: degenerate horizon spread");
    }
    RateFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    for (const RatePoint& pt : points) {
        const double resid =
            std::log(pt.regret) - (fit.intercept + fit.slope * std::log(pt.T));
        fit.max_residual = std::max(fit.max_residual, std::abs(resid));
    }
    return fit;
}

} // namespace ccb
