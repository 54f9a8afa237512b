#include "ccb/geometry.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace ccb {

namespace {

// Phase one for polytopes: find a strictly feasible point by pushing the
// smallest slack up through a log-sum-exp smoothing,
// F_tau(x) = tau * log sum_j exp(-s_j(x)/tau), minimized by Newton steps with
// Armijo backtracking. Early-exits as soon as any point is strictly feasible.
Vec find_interior_point(const Mat& A, const Vec& b) {
    const int d = static_cast<int>(A.cols());
    const double want = 1e-9 * (1.0 + b.cwiseAbs().maxCoeff());
    Vec x = Vec::Zero(d);

    auto min_slack = [&](const Vec& u) { return (A * u - b).minCoeff(); };
    if (min_slack(x) >= want) {
        return x;
    }

    for (double tau : {1.0, 0.3, 0.1, 0.03, 0.01, 0.003}) {
        for (int iter = 0; iter < 100; ++iter) {
            const Vec s = A * x - b;
            const double smin = s.minCoeff();
            if (smin >= want) {
                return x;
            }
            // Softmax weights of -s/tau, stabilized around the smallest slack.
            Vec w = ((smin - s.array()) / tau).exp();
            const double wsum = w.sum();
            w /= wsum;
            const Vec aw = A.transpose() * w;                      // sum w_j a_j
            const Vec grad = -aw;
            Mat hess = (A.transpose() * w.asDiagonal() * A - aw * aw.transpose()) / tau;
            hess.diagonal().array() += 1e-10;

            const Vec dx = hess.ldlt().solve(-grad);
            const double f0 = tau * std::log(wsum) - smin;
            const double slope = grad.dot(dx);
            if (!std::isfinite(slope) || slope >= 0.0) {
                break;
            }
            double step = 1.0;
            bool moved = false;
            for (int bt = 0; bt < 60; ++bt) {
                const Vec cand = x + step * dx;
                const Vec sc = A * cand - b;
                const double scmin = sc.minCoeff();
                const double fc = tau * std::log((((scmin - sc.array()) / tau).exp()).sum()) - scmin;
                if (std::isfinite(fc) && fc <= f0 + 1e-4 * step * slope) {
                    x = cand;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if (!moved || grad.norm() <= 1e-12) {
                break;
            }
        }
        if (min_slack(x) >= want) {
            return x;
        }
    }
    if (min_slack(x) > 0.0) {
        return x;
    }
    throw DegenerateBody("polytope: no strictly feasible point found");
}

} // namespace

ConvexBody ConvexBody::ball(Vec center, double radius) {
    if (center.size() < 1) {
        throw ConfigError("ball: dimension must be >= 1");
    }
    if (!(radius > 0.0)) {
        throw DegenerateBody("ball: radius must be > 0");
    }
    ConvexBody body;
    body.kind_ = Kind::Ball;
    body.dim_ = static_cast<int>(center.size());
    body.radius_ = radius;
    body.interior_point_ = center;
    body.center_ = std::move(center);
    return body;
}

ConvexBody ConvexBody::polytope(Mat A, Vec b) {
    if (A.rows() < 1 || A.cols() < 1 || A.rows() != b.size()) {
        throw ConfigError("polytope: need m >= 1 rows with matching b");
    }
    for (int j = 0; j < A.rows(); ++j) {
        const double n = A.row(j).norm();
        if (!(n > 0.0)) {
            throw ConfigError("polytope: zero row");
        }
        A.row(j) /= n;
        b(j) /= n;
    }
    ConvexBody body;
    body.kind_ = Kind::Polytope;
    body.dim_ = static_cast<int>(A.cols());
    body.interior_point_ = find_interior_point(A, b);
    body.A_ = std::move(A);
    body.b_ = std::move(b);
    return body;
}

ConvexBody ConvexBody::box(const Vec& lo, const Vec& hi) {
    const int d = static_cast<int>(lo.size());
    if (d < 1 || hi.size() != d) {
        throw ConfigError("box: lo/hi dimension mismatch");
    }
    for (int i = 0; i < d; ++i) {
        if (!(lo(i) < hi(i))) {
            throw DegenerateBody("box: need lo < hi per axis");
        }
    }
    Mat A = Mat::Zero(2 * d, d);
    Vec b(2 * d);
    for (int i = 0; i < d; ++i) {
        A(2 * i, i) = 1.0;
        b(2 * i) = lo(i);
        A(2 * i + 1, i) = -1.0;
        b(2 * i + 1) = -hi(i);
    }
    return polytope(std::move(A), std::move(b));
}

const Vec& ConvexBody::center() const {
    if (kind_ != Kind::Ball) {
        throw ConfigError("center(): not a ball");
    }
    return center_;
}

double ConvexBody::radius() const {
    if (kind_ != Kind::Ball) {
        throw ConfigError("radius(): not a ball");
    }
    return radius_;
}

const Mat& ConvexBody::A() const {
    if (kind_ != Kind::Polytope) {
        throw ConfigError("A(): not a polytope");
    }
    return A_;
}

const Vec& ConvexBody::b() const {
    if (kind_ != Kind::Polytope) {
        throw ConfigError("b(): not a polytope");
    }
    return b_;
}

int ConvexBody::rows() const {
    if (kind_ != Kind::Polytope) {
        throw ConfigError("rows(): not a polytope");
    }
    return static_cast<int>(A_.rows());
}

bool ConvexBody::contains(const Vec& x, double tol) const {
    if (x.size() != dim_) {
        return false;
    }
    if (kind_ == Kind::Ball) {
        return (x - center_).squaredNorm() <= radius_ * radius_ + tol;
    }
    return ((A_ * x - b_).array() >= -tol).all();
}

bool ConvexBody::strictly_inside(const Vec& x) const {
    if (x.size() != dim_) {
        return false;
    }
    if (kind_ == Kind::Ball) {
        return (x - center_).squaredNorm() < radius_ * radius_;
    }
    return ((A_ * x - b_).array() > 0.0).all();
}

Barrier::Barrier(ConvexBody body) : body_(std::move(body)) {
    mu_ = body_.kind() == ConvexBody::Kind::Ball ? 2.0 : static_cast<double>(body_.rows());
    // Analytic center by damped Newton from the certified interior point.
    NewtonObjective obj{
        [this](const Vec& u) { return body_.strictly_inside(u); },
        [this](const Vec& u) { return gradient(u); },
        [this](const Vec& u) { return hessian(u); },
    };
    center_ = damped_newton(obj, body_.interior_point(), 1e-12, 200).x;
    raw_value_at_center_ = raw_value(center_);
}

double Barrier::raw_value(const Vec& x) const {
    if (body_.kind() == ConvexBody::Kind::Ball) {
        const double s = body_.radius() * body_.radius() - (x - body_.center()).squaredNorm();
        if (!(s > 0.0)) {
            throw NotInterior("barrier: point not strictly inside ball");
        }
        return -std::log(s);
    }
    const Vec s = body_.A() * x - body_.b();
    if (!((s.array() > 0.0).all())) {
        throw NotInterior("barrier: point not strictly inside polytope");
    }
    return -s.array().log().sum();
}

double Barrier::value(const Vec& x) const {
    return raw_value(x) - raw_value_at_center_;
}

Vec Barrier::gradient(const Vec& x) const {
    if (body_.kind() == ConvexBody::Kind::Ball) {
        const Vec u = x - body_.center();
        const double s = body_.radius() * body_.radius() - u.squaredNorm();
        if (!(s > 0.0)) {
            throw NotInterior("barrier: point not strictly inside ball");
        }
        return 2.0 / s * u;
    }
    const Vec s = body_.A() * x - body_.b();
    if (!((s.array() > 0.0).all())) {
        throw NotInterior("barrier: point not strictly inside polytope");
    }
    return -(body_.A().transpose() * s.cwiseInverse());
}

SymmetricMatrix Barrier::hessian(const Vec& x) const {
    const int d = body_.dim();
    if (body_.kind() == ConvexBody::Kind::Ball) {
        const Vec u = x - body_.center();
        const double s = body_.radius() * body_.radius() - u.squaredNorm();
        if (!(s > 0.0)) {
            throw NotInterior("barrier: point not strictly inside ball");
        }
        SymmetricMatrix h = (4.0 / (s * s)) * (u * u.transpose());
        h.diagonal().array() += 2.0 / s;
        return h;
    }
    const Vec s = body_.A() * x - body_.b();
    if (!((s.array() > 0.0).all())) {
        throw NotInterior("barrier: point not strictly inside polytope");
    }
    SymmetricMatrix h = SymmetricMatrix::Zero(d, d);
    for (int j = 0; j < body_.rows(); ++j) {
        h.noalias() += (body_.A().row(j).transpose() * body_.A().row(j)) / (s(j) * s(j));
    }
    return 0.5 * (h + h.transpose());
}

double barrier_value(const Barrier& bar, const Vec& x) {
    return bar.value(x);
}

Vec barrier_gradient(const Barrier& bar, const Vec& x) {
    return bar.gradient(x);
}

SymmetricMatrix barrier_hessian(const Barrier& bar, const Vec& x) {
    return bar.hessian(x);
}

double newton_decrement(const Vec& grad, const SymmetricMatrix& hess) {
    Eigen::LLT<Mat> llt(hess);
    if (llt.info() != Eigen::Success) {
        throw NotPositiveDefinite("newton_decrement: Cholesky failed");
    }
    const double q = grad.dot(llt.solve(grad));
    return std::sqrt(std::max(q, 0.0));
}

Vec analytic_center(const Barrier& bar, double tol) {
    const Vec& cached = bar.center_point();
    const double lam = newton_decrement(bar.gradient(cached), bar.hessian(cached));
    if (lam <= tol) {
        return cached;
    }
    NewtonObjective obj{
        [&bar](const Vec& u) { return bar.body().strictly_inside(u); },
        [&bar](const Vec& u) { return bar.gradient(u); },
        [&bar](const Vec& u) { return bar.hessian(u); },
    };
    return damped_newton(obj, cached, tol, 200).x;
}

std::pair<SymmetricMatrix, SymmetricMatrix> inv_sqrt_psd_pair(const SymmetricMatrix& M) {
    if (M.rows() != M.cols() || M.rows() < 1) {
        throw ConfigError("inv_sqrt_psd: matrix must be square");
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (M + M.transpose()));
    if (es.info() != Eigen::Success) {
        throw NotPositiveDefinite("inv_sqrt_psd: eigendecomposition failed");
    }
    const Vec& ev = es.eigenvalues();
    const double lam_max = ev.maxCoeff();
    const double floor = 1e-12 * lam_max;
    if (!(lam_max > 0.0) || ev.minCoeff() < floor) {
        throw NotPositiveDefinite("inv_sqrt_psd: eigenvalue below floor");
    }
    const Vec inv_sqrt = ev.array().sqrt().inverse();
    const Vec sqrt = ev.array().sqrt();
    SymmetricMatrix P = es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
    SymmetricMatrix Q = es.eigenvectors() * sqrt.asDiagonal() * es.eigenvectors().transpose();
    return {0.5 * (P + P.transpose()), 0.5 * (Q + Q.transpose())};
}

SymmetricMatrix inv_sqrt_psd(const SymmetricMatrix& M) {
    return inv_sqrt_psd_pair(M).first;
}

bool dikin_contains(const SymmetricMatrix& hess_at_x, const Vec& x, const Vec& z) {
    const Vec dxv = z - x;
    return dxv.dot(hess_at_x * dxv) <= 1.0 + 1e-12;
}

void axis_bounding_box(const ConvexBody& body, Vec& lo, Vec& hi) {
    const int d = body.dim();
    if (body.kind() == ConvexBody::Kind::Ball) {
        lo = body.center().array() - body.radius();
        hi = body.center().array() + body.radius();
        return;
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    lo = Vec::Constant(d, nan);
    hi = Vec::Constant(d, nan);
    const Mat& A = body.A();
    const Vec& b = body.b();
    for (int j = 0; j < body.rows(); ++j) {
        int axis = -1;
        double coeff = 0.0;
        for (int i = 0; i < d; ++i) {
            const double a = A(j, i);
            if (std::abs(a) > 1e-12) {
                if (axis >= 0) {
                    throw ConfigError("axis_bounding_box: polytope row is not "
                                      "axis-aligned; only boxes are supported");
                }
                axis = i;
                coeff = a;
            }
        }
        if (axis < 0) continue;
        // Row constraint: coeff * x_axis >= b_j.
        const double bound = b(j) / coeff;
        if (coeff > 0.0) {
            if (std::isnan(lo(axis)) || bound > lo(axis)) lo(axis) = bound;
        } else {
            if (std::isnan(hi(axis)) || bound < hi(axis)) hi(axis) = bound;
        }
    }
    for (int i = 0; i < d; ++i) {
        if (std::isnan(lo(i)) || std::isnan(hi(i))) {
            throw ConfigError("axis_bounding_box: polytope does not bound every axis");
        }
    }
}

NewtonOutcome damped_newton(const NewtonObjective& obj, Vec x0, double tol, int max_iter) {
    if (!obj.interior(x0)) {
        throw NotInterior("damped_newton: start point not in domain");
    }
    Vec x = std::move(x0);
    for (int iter = 0; iter < max_iter; ++iter) {
        const Vec g = obj.gradient(x);
        const SymmetricMatrix h = obj.hessian(x);
        Eigen::LLT<Mat> llt(h);
        if (llt.info() != Eigen::Success) {
            throw NotPositiveDefinite("damped_newton: Hessian not positive definite");
        }
        const Vec dx = -llt.solve(g);
        const double lambda = std::sqrt(std::max(-g.dot(dx), 0.0));
        if (lambda <= tol) {
            return {std::move(x), lambda, iter};
        }
        double step = lambda <= 0.25 ? 1.0 : 1.0 / (1.0 + lambda);
        // Self-concordance keeps the damped step in the domain in exact
        // arithmetic; halving is a float-roundoff guard only.
        Vec cand = x + step * dx;
        int halvings = 0;
        while (!obj.interior(cand) && halvings < 60) {
            step *= 0.5;
            cand = x + step * dx;
            ++halvings;
        }
        if (halvings == 60) {
            throw NoConvergence("damped_newton: could not stay in domain");
        }
        x = std::move(cand);
    }
    throw NoConvergence("damped_newton: iteration cap reached");
}

} // namespace ccb
