#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "ccb/geometry.hpp"
#include "ccb/rng.hpp"

namespace ccb {

// Constants of one noisy barrier-BCO instance. q_T and nu are fixed at
// construction; with sigma = 0, q_T = M carries no horizon dependence and the
// instance is effectively anytime.
struct BcoConfig {
    BcoConfig(double alpha, double beta, double M, double sigma, long long horizon_T,
              std::shared_ptr<const Barrier> barrier);

    double alpha;
    double beta;
    double M;
    double sigma;
    long long horizon_T;
    std::shared_ptr<const Barrier> barrier;
    double q_T; // M + 2*sigma*sqrt(log(T+1))
    double nu;  // 16*(mu + beta/alpha)
};

// eta_t = (4*d*q_T)^{-1} * min(1, sqrt(nu*log(t+1)/t)); natural log.
double step_size(long long t, const BcoConfig& cfg);

// (hess + eta*alpha*t*I)^{-1/2}.
SymmetricMatrix perturbation(const SymmetricMatrix& hess_R_at_x_prev, double eta_t,
                             const BcoConfig& cfg, long long t);

// Data held between propose and feed. P_inv is cached from the same
// eigendecomposition that produced P.
struct BcoPending {
    Vec z;
    Vec zeta;
    SymmetricMatrix P;
    SymmetricMatrix P_inv;
    double eta;
    long long t;
};

struct BcoRoundRecord {
    long long t;
    Vec z;
    double y;
    Vec g;
    Vec x;
};

// g = d * y * P^{-1} * zeta.
Vec gradient_estimate(double y, const BcoPending& pending, int d);

// Minimizer over the body interior of
//   eta * (<sum_g, u> + alpha/2 * (t*|u|^2 - 2*<sum_x, u>)) + R(u),
// by damped Newton from warm_start; the returned point has Newton decrement
// <= 1e-10 on this objective.
Vec ftrl_solve(const BcoConfig& cfg, double eta_t, long long t, const Vec& sum_g,
               const Vec& sum_x, const Vec& warm_start);

// One instance of the noisy BCO loop as a strict propose/feed state machine.
// The FTRL objective is carried through running sums (sum_g, sum_x, sum_xx),
// not per-round history.
class BcoState {
public:
    explicit BcoState(BcoConfig cfg);

    const BcoConfig& config() const { return cfg_; }
    long long completed_rounds() const { return t_; }
    const Vec& iterate() const { return x_prev_; }
    const Vec& sum_g() const { return sum_g_; }
    const Vec& sum_x() const { return sum_x_; }
    double sum_xx() const { return sum_xx_; }
    bool has_pending() const { return pending_.has_value(); }
    const BcoPending& pending() const;

    // Draws zeta, returns z = x_prev + P*zeta (inside the body by Dikin
    // containment). Throws PendingQuery if a query is already outstanding.
    Vec propose(SeedStream& stream);
    // Consumes the observation, updates sums, advances the iterate.
    BcoRoundRecord feed(double y);

private:
    BcoConfig cfg_;
    long long t_ = 0;
    Vec x_prev_;
    Vec sum_g_;
    Vec sum_x_;
    double sum_xx_ = 0.0;
    std::optional<BcoPending> pending_;
};

// propose -> observe -> feed, as one call.
BcoRoundRecord bco_round(BcoState& state, SeedStream& stream,
                         const std::function<double(const Vec&)>& observe);

// Monte Carlo estimate of the smoothed-surrogate gradient
// E[d * f(x + A*zeta) * A^{-1} * zeta] with zeta uniform on the sphere,
// plus a per-component standard error (zero when n = 1).
struct McGradient {
    Vec mean;
    Vec std_error;
};

McGradient mc_surrogate_gradient(const std::function<double(const Vec&)>& f, const Vec& x,
                                 const Mat& A, long long n, SeedStream& stream);

} // namespace ccb
