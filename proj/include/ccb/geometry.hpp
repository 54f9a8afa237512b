#pragma once

#include <functional>
#include <memory>
#include <utility>

#include <Eigen/Dense>

#include "ccb/errors.hpp"

namespace ccb {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
// Dense symmetric matrix. Producers in this library symmetrize before
// returning; consumers may assume exact symmetry.
using SymmetricMatrix = Eigen::MatrixXd;

// Compact convex body: a Euclidean ball or a polytope {u : <a_j,u> >= b_j}.
// A box is a 2d-row polytope. Polytope rows are normalized to unit-norm a_j at
// construction (this shifts the barrier by a constant and changes nothing
// else); nonempty interior is certified by finding a strictly feasible point.
class ConvexBody {
public:
    enum class Kind { Ball, Polytope };

    static ConvexBody ball(Vec center, double radius);
    static ConvexBody polytope(Mat A, Vec b);
    static ConvexBody box(const Vec& lo, const Vec& hi);

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }

    const Vec& center() const;  // Ball only
    double radius() const;      // Ball only
    const Mat& A() const;       // Polytope only
    const Vec& b() const;       // Polytope only
    int rows() const;           // Polytope only

    // Membership with additive slack tol on the defining inequalities
    // (ball: on the squared radius).
    bool contains(const Vec& x, double tol = 1e-12) const;
    bool strictly_inside(const Vec& x) const;
    // The strictly feasible point found at construction.
    const Vec& interior_point() const { return interior_point_; }

private:
    ConvexBody() = default;

    Kind kind_ = Kind::Ball;
    int dim_ = 0;
    Vec center_;
    double radius_ = 0.0;
    Mat A_;
    Vec b_;
    Vec interior_point_;
};

// Self-concordant barrier over a body: -log(r^2 - |u - c|^2) for balls
// (mu = 2), -sum_j log(<a_j,u> - b_j) for polytopes (mu = rows). Values are
// normalized so the minimum over the interior is 0; the minimizer (analytic
// center) is computed once at construction and cached.
class Barrier {
public:
    explicit Barrier(ConvexBody body);

    const ConvexBody& body() const { return body_; }
    int dim() const { return body_.dim(); }
    double mu() const { return mu_; }
    const Vec& center_point() const { return center_; }

    double value(const Vec& x) const;         // normalized, min = 0
    Vec gradient(const Vec& x) const;
    SymmetricMatrix hessian(const Vec& x) const;

private:
    double raw_value(const Vec& x) const;

    ConvexBody body_;
    double mu_ = 0.0;
    Vec center_;
    double raw_value_at_center_ = 0.0;
};

double barrier_value(const Barrier& bar, const Vec& x);
Vec barrier_gradient(const Barrier& bar, const Vec& x);
SymmetricMatrix barrier_hessian(const Barrier& bar, const Vec& x);

// sqrt(grad^T hess^{-1} grad), via Cholesky of hess.
double newton_decrement(const Vec& grad, const SymmetricMatrix& hess);

// Minimizer of the barrier, recomputed to tol if the cached center is not
// already within tolerance.
Vec analytic_center(const Barrier& bar, double tol = 1e-10);

// M^{-1/2} by symmetric eigendecomposition. Eigenvalues below
// 1e-12 * lambda_max fail rather than clamp: in the intended use the matrix
// includes a +eta*alpha*t*I term and is provably well conditioned.
SymmetricMatrix inv_sqrt_psd(const SymmetricMatrix& M);
// (M^{-1/2}, M^{+1/2}) from one eigendecomposition.
std::pair<SymmetricMatrix, SymmetricMatrix> inv_sqrt_psd_pair(const SymmetricMatrix& M);

// (z-x)^T hess (z-x) <= 1 + 1e-12.
bool dikin_contains(const SymmetricMatrix& hess_at_x, const Vec& x, const Vec& z);

// Per-axis [lo, hi] ranges covering the body. Balls use center +- radius;
// polytopes must pin every axis with axis-aligned rows (boxes), otherwise
// ConfigError.
void axis_bounding_box(const ConvexBody& body, Vec& lo, Vec& hi);

// Damped Newton for self-concordant objectives: step 1 when the decrement
// lambda <= 1/4, else 1/(1+lambda); stop at lambda <= tol; iteration cap 200.
// A numerical guard halves any step that would leave the domain.
struct NewtonObjective {
    std::function<bool(const Vec&)> interior;
    std::function<Vec(const Vec&)> gradient;
    std::function<SymmetricMatrix(const Vec&)> hessian;
};

struct NewtonOutcome {
    Vec x;
    double decrement;
    int iterations;
};

NewtonOutcome damped_newton(const NewtonObjective& obj, Vec x0, double tol = 1e-10,
                            int max_iter = 200);

} // namespace ccb
