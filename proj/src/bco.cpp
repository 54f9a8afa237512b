#include "ccb/bco.hpp"

#include <cmath>

namespace ccb {

BcoConfig::BcoConfig(double alpha_, double beta_, double M_, double sigma_,
                     long long horizon_T_, std::shared_ptr<const Barrier> barrier_)
    : alpha(alpha_),
      beta(beta_),
      M(M_),
      sigma(sigma_),
      horizon_T(horizon_T_),
      barrier(std::move(barrier_)) {
    if (!barrier) {
        throw ConfigError("BcoConfig: barrier is required");
    }
    if (!(alpha > 0.0) || beta < alpha) {
        throw ConfigError("BcoConfig: need beta >= alpha > 0");
    }
    if (!(M > 0.0) || sigma < 0.0 || horizon_T < 1) {
        throw ConfigError("BcoConfig: need M > 0, sigma >= 0, horizon_T >= 1");
    }
    q_T = M + 2.0 * sigma * std::sqrt(std::log(static_cast<double>(horizon_T) + 1.0));
    nu = 16.0 * (barrier->mu() + beta / alpha);
}

double step_size(long long t, const BcoConfig& cfg) {
    const double d = static_cast<double>(cfg.barrier->dim());
    const double td = static_cast<double>(t);
    const double decay = std::sqrt(cfg.nu * std::log(td + 1.0) / td);
    return std::min(1.0, decay) / (4.0 * d * cfg.q_T);
}

SymmetricMatrix perturbation(const SymmetricMatrix& hess_R_at_x_prev, double eta_t,
                             const BcoConfig& cfg, long long t) {
    SymmetricMatrix m = hess_R_at_x_prev;
    m.diagonal().array() += eta_t * cfg.alpha * static_cast<double>(t);
    return inv_sqrt_psd(m);
}

Vec gradient_estimate(double y, const BcoPending& pending, int d) {
    return static_cast<double>(d) * y * (pending.P_inv * pending.zeta);
}

Vec ftrl_solve(const BcoConfig& cfg, double eta_t, long long t, const Vec& sum_g,
               const Vec& sum_x, const Vec& warm_start) {
    const Barrier& bar = *cfg.barrier;
    const double at = cfg.alpha * static_cast<double>(t);
    NewtonObjective obj{
        [&bar](const Vec& u) { return bar.body().strictly_inside(u); },
        [&](const Vec& u) -> Vec {
            return eta_t * (sum_g + at * u - cfg.alpha * sum_x) + bar.gradient(u);
        },
        [&](const Vec& u) -> SymmetricMatrix {
            SymmetricMatrix h = bar.hessian(u);
            h.diagonal().array() += eta_t * at;
            return h;
        },
    };
    return damped_newton(obj, warm_start, 1e-10, 200).x;
}

BcoState::BcoState(BcoConfig cfg) : cfg_(std::move(cfg)) {
    const int d = cfg_.barrier->dim();
    x_prev_ = cfg_.barrier->center_point();
    sum_g_ = Vec::Zero(d);
    sum_x_ = Vec::Zero(d);
}

const BcoPending& BcoState::pending() const {
    if (!pending_) {
        throw PendingQuery("pending(): no outstanding query");
    }
    return *pending_;
}

Vec BcoState::propose(SeedStream& stream) {
    if (pending_) {
        throw PendingQuery("propose: query already outstanding");
    }
    const long long t = t_ + 1;
    const double eta = step_size(t, cfg_);
    SymmetricMatrix m = cfg_.barrier->hessian(x_prev_);
    m.diagonal().array() += eta * cfg_.alpha * static_cast<double>(t);
    auto [P, P_inv] = inv_sqrt_psd_pair(m);
    const Vec zeta = sample_sphere(cfg_.barrier->dim(), stream);
    Vec z = x_prev_ + P * zeta;
    pending_ = BcoPending{z, zeta, std::move(P), std::move(P_inv), eta, t};
    return z;
}

BcoRoundRecord BcoState::feed(double y) {
    if (!pending_) {
        throw PendingQuery("feed: no outstanding query");
    }
    const BcoPending& pend = *pending_;
    const Vec g = gradient_estimate(y, pend, cfg_.barrier->dim());
    sum_g_ += g;
    sum_x_ += x_prev_;
    sum_xx_ += x_prev_.squaredNorm();
    t_ = pend.t;
    Vec x = ftrl_solve(cfg_, pend.eta, t_, sum_g_, sum_x_, x_prev_);
    BcoRoundRecord rec{t_, pend.z, y, g, x};
    x_prev_ = std::move(x);
    pending_.reset();
    return rec;
}

BcoRoundRecord bco_round(BcoState& state, SeedStream& stream,
                         const std::function<double(const Vec&)>& observe) {
    const Vec z = state.propose(stream);
    return state.feed(observe(z));
}

McGradient mc_surrogate_gradient(const std::function<double(const Vec&)>& f, const Vec& x,
                                 const Mat& A, long long n, SeedStream& stream) {
    if (n < 1) {
        throw ConfigError("mc_surrogate_gradient: need n >= 1");
    }
    const int d = static_cast<int>(x.size());
    if (A.rows() != d || A.cols() != d) {
        throw ConfigError("mc_surrogate_gradient: A must be d x d");
    }
    Eigen::FullPivLU<Mat> lu(A);
    if (!lu.isInvertible()) {
        throw ConfigError("mc_surrogate_gradient: A is singular");
    }
    const Mat A_inv = lu.inverse();

    Vec mean = Vec::Zero(d);
    Vec m2 = Vec::Zero(d);
    for (long long i = 1; i <= n; ++i) {
        const Vec zeta = sample_sphere(d, stream);
        const Vec sample = static_cast<double>(d) * f(x + A * zeta) * (A_inv * zeta);
        const Vec delta = sample - mean;
        mean += delta / static_cast<double>(i);
        m2 += delta.cwiseProduct(sample - mean);
    }
    Vec se = Vec::Zero(d);
    if (n > 1) {
        se = (m2 / static_cast<double>(n - 1)).cwiseMax(0.0).cwiseSqrt() /
             std::sqrt(static_cast<double>(n));
    }
    return {std::move(mean), std::move(se)};
}

} // namespace ccb
