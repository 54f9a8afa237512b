#include "ccb/environments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "ccb/errors.hpp"
#include "ccb/quadrature.hpp"

namespace ccb {

// ---------------------------------------------------------------------------
// Mollifier
// ---------------------------------------------------------------------------
namespace {

double bump_e(double u) { return u <= 0.0 ? 0.0 : std::exp(-1.0 / u); }

// Cumulative integral of eta0 over [1/4, 1], tabulated on a dense knot grid;
// within-panel remainders are integrated on demand.
struct EtaTable {
    static constexpr int kPanels = 4096;
    static constexpr double kLo = 0.25;
    static constexpr double kHi = 1.0;
    std::array<double, kPanels + 1> cum{};
    double width = 0.0;
    double bridge_mass = 0.0;  // integral of eta0 over [1/4, 1]

    EtaTable() {
        width = (kHi - kLo) / kPanels;
        cum[0] = 0.0;
        for (int i = 0; i < kPanels; ++i) {
            const double a = kLo + i * width;
            const double b = a + width;
            cum[i + 1] = cum[i] + adaptive_simpson(mollifier_eta0, a, b, 1e-14);
        }
        bridge_mass = cum[kPanels];
    }

    double integral_from_quarter(double x) const {
        const int j = std::clamp(
            static_cast<int>((x - kLo) / width), 0, kPanels - 1);
        const double knot = kLo + j * width;
        return cum[j] + adaptive_simpson(mollifier_eta0, knot, x, 1e-13);
    }
};

const EtaTable& eta_table() {
    static const EtaTable table;
    return table;
}

} // namespace

double mollifier_eta0(double x) {
    const double a = std::abs(x);
    if (a <= 0.25) return 1.0;
    if (a >= 1.0) return 0.0;
    const double s = (a - 0.25) / 0.75;
    const double q = bump_e(1.0 - s);
    const double r = bump_e(s);
    return q / (q + r);
}

double mollifier_eta0_prime(double x) {
    const double a = std::abs(x);
    if (a <= 0.25 || a >= 1.0) return 0.0;
    const double s = (a - 0.25) / 0.75;
    const double q = bump_e(1.0 - s);
    const double r = bump_e(s);
    // d/ds of exp(-1/u) terms; underflowed factors have zero derivative too.
    const double dq = q == 0.0 ? 0.0 : -q / ((1.0 - s) * (1.0 - s));
    const double dr = r == 0.0 ? 0.0 : r / (s * s);
    const double dbridge = (dq * r - q * dr) / ((q + r) * (q + r));
    return dbridge * (4.0 / 3.0) * (x >= 0.0 ? 1.0 : -1.0);
}

double mollifier_eta(double x) {
    const EtaTable& tab = eta_table();
    const double total = 0.5 + 2.0 * tab.bridge_mass;  // eta(1) = eta(+inf)
    if (x <= -1.0) return 0.0;
    if (x >= 1.0) return total;
    if (x < -0.25) return total - mollifier_eta(-x);
    if (x <= 0.25) return tab.bridge_mass + (x + 0.25);
    return tab.bridge_mass + 0.5 + tab.integral_from_quarter(x);
}

double mollifier_eta0_prime_max() {
    static const double cached = [] {
        const int n = 1 << 20;
        double best = 0.0;
        for (int i = 1; i < n; ++i) {
            const double x = 0.25 + 0.75 * static_cast<double>(i) / n;
            best = std::max(best, std::abs(mollifier_eta0_prime(x)));
        }
        // Grid resolution margin so the cached value upper-bounds the true max.
        return best * (1.0 + 1e-4);
    }();
    return cached;
}

// ---------------------------------------------------------------------------
// Cell geometry
// ---------------------------------------------------------------------------
double dist_to_cell_boundary(const Partition& part, long long flat_cell,
                             const Vec& c) {
    const std::vector<long long> idx = axis_indices(part, flat_cell);
    if (c.size() != part.p) {
        throw NotInCell("dist_to_cell_boundary: context dimension mismatch");
    }
    const double edge = 1.0 / static_cast<double>(part.K);
    double dist = std::numeric_limits<double>::infinity();
    for (int j = 0; j < part.p; ++j) {
        const double lo = static_cast<double>(idx[j]) * edge;
        const double hi = static_cast<double>(idx[j] + 1) * edge;
        if (c(j) < lo || c(j) > hi) {
            throw NotInCell("dist_to_cell_boundary: point outside the closed cell");
        }
        dist = std::min(dist, std::min(c(j) - lo, hi - c(j)));
    }
    return std::max(dist, 0.0);
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------
namespace {

std::string vec_to_string(const Vec& v) {
    std::ostringstream os;
    os << "(";
    for (int i = 0; i < v.size(); ++i) {
        if (i) os << ", ";
        os << v(i);
    }
    os << ")";
    return os.str();
}

Vec uniform_cube(int p, SeedStream& stream) {
    Vec c(p);
    for (int i = 0; i < p; ++i) c(i) = stream.uniform01();
    return c;
}

Vec project_to_ball(const Vec& x, const Vec& center, double radius) {
    const Vec dev = x - center;
    const double n = dev.norm();
    if (n <= radius) return x;
    return center + dev * (radius / n);
}

} // namespace

// ---------------------------------------------------------------------------
// ContextualQuadratic
// ---------------------------------------------------------------------------
ContextualQuadratic::ContextualQuadratic(ConvexBody body, QuadraticSpec spec)
    : body_(std::move(body)), spec_(std::move(spec)) {
    if (body_.kind() != ConvexBody::Kind::Ball) {
        throw ConfigError("quadratic loss requires a ball body");
    }
    if (!(spec_.alpha > 0.0)) throw ConfigError("quadratic: alpha must be positive");
    if (!(spec_.gamma > 0.0 && spec_.gamma <= 1.0)) {
        throw ConfigError("quadratic: gamma must lie in (0, 1]");
    }
    if (!(spec_.clip_factor > 0.0)) {
        throw ConfigError("quadratic: clip_factor must be positive");
    }
    if (!(spec_.L >= 0.0)) throw ConfigError("quadratic: L must be nonnegative");
    const int d = body_.dim();
    const auto k = spec_.A.cols();
    if (spec_.A.rows() != d || spec_.W.rows() != k || spec_.u0.size() != k ||
        spec_.v.size() != d || spec_.W.cols() < 1) {
        throw ConfigError("quadratic: inconsistent map dimensions");
    }
    const double reach = (1.0 + spec_.clip_factor) * body_.radius();
    sup_bound_ = 0.5 * spec_.alpha * reach * reach + std::abs(spec_.b0);

    // Certify the declared Hoelder constant on sampled pairs.
    SeedStream cert(0xCE27u);
    const int p = context_dim();
    for (int it = 0; it < 256; ++it) {
        const Vec x = sample_in_body(body_, cert);
        const Vec c1 = uniform_cube(p, cert);
        const Vec c2 = uniform_cube(p, cert);
        const double dist = (c1 - c2).norm();
        if (dist < 1e-12) continue;
        const double ratio =
            std::abs(eval(x, c1) - eval(x, c2)) / std::pow(dist, spec_.gamma);
        if (!(ratio <= spec_.L * (1.0 + 1e-6) + 1e-12)) {
            std::ostringstream os;
            os << "quadratic: sampled Hoelder ratio " << ratio << " exceeds L="
               << spec_.L << " at x=" << vec_to_string(x)
               << ", c=" << vec_to_string(c1) << ", c'=" << vec_to_string(c2);
            throw CertificationFailed(os.str());
        }
    }
}

Vec ContextualQuadratic::target(const Vec& c) const {
    if (c.size() != spec_.W.cols()) {
        throw ConfigError("quadratic: context dimension mismatch");
    }
    Vec phi = spec_.W * c + spec_.u0;
    for (int i = 0; i < phi.size(); ++i) {
        phi(i) = std::pow(std::clamp(phi(i), 0.0, 1.0), spec_.gamma);
    }
    const Vec raw = spec_.v + spec_.A * phi;
    return project_to_ball(raw, body_.center(),
                           spec_.clip_factor * body_.radius());
}

double ContextualQuadratic::eval(const Vec& x, const Vec& c) const {
    return 0.5 * spec_.alpha * (x - target(c)).squaredNorm() + spec_.b0;
}

Vec ContextualQuadratic::grad_x(const Vec& x, const Vec& c) const {
    return spec_.alpha * (x - target(c));
}

Mat ContextualQuadratic::hess_x(const Vec& x, const Vec& c) const {
    (void)x;
    (void)c;
    return spec_.alpha * Mat::Identity(dim(), dim());
}

MinimizerResult ContextualQuadratic::min_oracle(const Vec& c) const {
    const Vec m = target(c);
    const Vec x = project_to_ball(m, body_.center(), body_.radius());
    return {x, eval(x, c)};
}

std::unique_ptr<ContextualQuadratic> make_random_quadratic(
    ConvexBody body, int p, double alpha, double L, double gamma, double b0,
    std::uint64_t map_seed, bool boundary_regime) {
    if (body.kind() != ConvexBody::Kind::Ball) {
        throw ConfigError("quadratic loss requires a ball body");
    }
    if (p < 1) throw ConfigError("quadratic: context dimension must be >= 1");
    const int d = body.dim();
    const int k = std::max(2, d);
    SeedStream stream = SeedStream(map_seed).derive("quadratic_map");

    QuadraticSpec spec;
    spec.alpha = alpha;
    spec.b0 = b0;
    spec.L = L;
    spec.gamma = gamma;
    spec.clip_factor = boundary_regime ? 1.5 : 0.9;

    spec.W = Mat(k, p);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < p; ++j) spec.W(i, j) = stream.uniform(-1.0, 1.0);
    }
    // Center the features at 1/2 for the cube's midpoint.
    spec.u0 = Vec::Constant(k, 0.5) - spec.W * Vec::Constant(p, 0.5);

    spec.A = Mat(d, k);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < k; ++j) spec.A(i, j) = stream.normal();
    }
    double cw = 0.0;
    for (int i = 0; i < k; ++i) {
        cw += std::pow(spec.W.row(i).norm(), 2.0 * gamma);
    }
    cw = std::sqrt(cw);
    const double a_norm = spec.A.jacobiSvd().singularValues()(0);
    const double reach = (1.0 + spec.clip_factor) * body.radius();
    const double denom = alpha * reach * a_norm * cw;
    if (!(denom > 0.0)) throw ConfigError("quadratic: degenerate context map");
    spec.A *= L / denom;

    spec.v = body.center();
    if (boundary_regime) {
        spec.v += 0.9 * body.radius() * sample_sphere(d, stream);
    }
    return std::make_unique<ContextualQuadratic>(std::move(body), std::move(spec));
}

// ---------------------------------------------------------------------------
// LowerBoundFamily
// ---------------------------------------------------------------------------
LowerBoundFamily::LowerBoundFamily(LowerBoundSpec spec)
    : spec_(std::move(spec)),
      body_(ConvexBody::ball(Vec::Zero(std::max(spec_.d, 1)), 1.0)),
      part_{spec_.p, spec_.K} {
    if (spec_.d < 1) throw ConfigError("lower-bound family: d must be >= 1");
    if (!(spec_.alpha > 0.0)) {
        throw ConfigError("lower-bound family: alpha must be positive");
    }
    if (!(spec_.L >= 0.0)) {
        throw ConfigError("lower-bound family: L must be nonnegative");
    }
    if (!spec_.gamma_zero && !(spec_.gamma > 0.0 && spec_.gamma <= 1.0)) {
        throw ConfigError("lower-bound family: gamma must lie in (0, 1]");
    }
    if (spec_.T < 1) throw ConfigError("lower-bound family: T must be >= 1");
    validate_partition(part_);
    if (static_cast<double>(spec_.K) > 0 &&
        std::pow(static_cast<double>(spec_.K), spec_.p) > double(1LL << 26)) {
        throw ConfigError("lower-bound family: K^p too large to materialize");
    }

    delta_ = 0.5 / static_cast<double>(spec_.K);
    h_ = std::min(1.0 / std::sqrt(static_cast<double>(spec_.d)),
                  std::pow(static_cast<double>(spec_.T), -0.25));

    const double eta1 = mollifier_eta(1.0);
    const double lp = mollifier_eta0_prime_max();
    const double lmax = std::max(1.0, spec_.L);
    r1_cap_ = std::min({1.0 / (2.0 * eta1 * lmax), spec_.alpha / (lp * lmax),
                        spec_.alpha / (2.0 * lmax)});
    r2_cap_ = std::min({1.0 / (2.0 * eta1), spec_.alpha / lp, spec_.alpha / 2.0});
    if (spec_.r1 <= 0.0) spec_.r1 = 0.9 * r1_cap_;
    if (spec_.r2 <= 0.0) spec_.r2 = 0.9 * r2_cap_;
    if (spec_.check_admissibility) {
        if (spec_.r1 > r1_cap_ * (1.0 + 1e-12)) {
            std::ostringstream os;
            os << "lower-bound family: r1=" << spec_.r1
               << " exceeds the admissibility cap " << r1_cap_;
            throw CertificationFailed(os.str());
        }
        if (spec_.r2 > r2_cap_ * (1.0 + 1e-12)) {
            std::ostringstream os;
            os << "lower-bound family: r2=" << spec_.r2
               << " exceeds the admissibility cap " << r2_cap_;
            throw CertificationFailed(os.str());
        }
    }
    M_ = spec_.M > 0.0 ? spec_.M : spec_.alpha + 1.0;

    long long cells = 1;
    for (int j = 0; j < spec_.p; ++j) cells *= spec_.K;
    omega_.resize(cells);
    SeedStream omega_stream = SeedStream(spec_.omega_seed).derive("omega");
    for (long long i = 0; i < cells; ++i) {
        omega_[i] = omega_stream.uniform01() < 0.5 ? -1 : 1;
    }
    tau_.resize(spec_.d >= 1 ? spec_.d - 1 : 0);
    SeedStream tau_stream = SeedStream(spec_.tau_seed).derive("tau");
    for (auto& t : tau_) t = tau_stream.uniform01() < 0.5 ? -1.0 : 1.0;
}

double LowerBoundFamily::context_weight(const Vec& c) const {
    const long long flat = cell_of(part_, c);
    const double sign = static_cast<double>(omega_[flat]);
    if (spec_.gamma_zero) return sign;
    const double dist = dist_to_cell_boundary(part_, flat, c);
    return sign * std::pow(dist, spec_.gamma);
}

namespace {
double lb_arg_scale(const LowerBoundSpec& spec, double delta) {
    // delta^{-gamma/2}; the gamma-zero variant uses exponent 0.
    return spec.gamma_zero ? 1.0 : std::pow(delta, -0.5 * spec.gamma);
}
} // namespace

double LowerBoundFamily::eval(const Vec& x, const Vec& c) const {
    if (x.size() != spec_.d) {
        throw ConfigError("lower-bound family: action dimension mismatch");
    }
    const double w = context_weight(c);
    const double scale = lb_arg_scale(spec_, delta_);
    double value = spec_.alpha * x.squaredNorm() +
                   spec_.r1 * spec_.L * mollifier_eta(x(0) * scale) * w;
    double tail = 0.0;
    for (int i = 1; i < spec_.d; ++i) {
        tail += tau_[i - 1] * mollifier_eta(x(i) / h_);
    }
    return value + spec_.r2 * h_ * h_ * tail;
}

Vec LowerBoundFamily::grad_x(const Vec& x, const Vec& c) const {
    const double w = context_weight(c);
    const double scale = lb_arg_scale(spec_, delta_);
    Vec g = 2.0 * spec_.alpha * x;
    g(0) += spec_.r1 * spec_.L * mollifier_eta0(x(0) * scale) * scale * w;
    for (int i = 1; i < spec_.d; ++i) {
        g(i) += spec_.r2 * h_ * tau_[i - 1] * mollifier_eta0(x(i) / h_);
    }
    return g;
}

Mat LowerBoundFamily::hess_x(const Vec& x, const Vec& c) const {
    const double w = context_weight(c);
    const double scale = lb_arg_scale(spec_, delta_);
    Mat h = 2.0 * spec_.alpha * Mat::Identity(spec_.d, spec_.d);
    h(0, 0) += spec_.r1 * spec_.L * mollifier_eta0_prime(x(0) * scale) * scale *
               scale * w;
    for (int i = 1; i < spec_.d; ++i) {
        h(i, i) += spec_.r2 * tau_[i - 1] * mollifier_eta0_prime(x(i) / h_);
    }
    return h;
}

Vec LowerBoundFamily::fd_scales() const {
    Vec s = Vec::Constant(spec_.d, h_);
    s(0) = 1.0 / lb_arg_scale(spec_, delta_);
    return s;
}

MinimizerResult LowerBoundFamily::min_oracle(const Vec& c) const {
    const double w = context_weight(c);
    const double scale = lb_arg_scale(spec_, delta_);
    Vec x(spec_.d);
    x(0) = -spec_.r1 * spec_.L * scale * w / (2.0 * spec_.alpha);
    for (int i = 1; i < spec_.d; ++i) {
        x(i) = -spec_.r2 * tau_[i - 1] * h_ / (2.0 * spec_.alpha);
    }

    const bool linear_regime =
        std::abs(x(0) * scale) <= 0.25 + 1e-12 &&
        (spec_.d == 1 ||
         std::abs(spec_.r2 / (2.0 * spec_.alpha)) <= 0.25 + 1e-12) &&
        x.norm() <= 1.0;

    if (linear_regime) {
        // Polish with undamped Newton (the gradient is exactly zero here in
        // the linear regime; this guards the regime boundaries).
        for (int iter = 0; iter < 20; ++iter) {
            const Vec g = grad_x(x, c);
            if (g.norm() <= 1e-10) break;
            Eigen::LLT<Mat> llt(hess_x(x, c));
            if (llt.info() != Eigen::Success) break;
            const Vec step = llt.solve(g);
            x -= step;
        }
        if (grad_x(x, c).norm() <= 1e-8 && x.norm() <= 1.0) {
            return {x, eval(x, c)};
        }
    }

    SmoothObjective obj{
        [&](const Vec& u) { return eval(u, c); },
        [&](const Vec& u) { return grad_x(u, c); },
        [&](const Vec& u) { return hess_x(u, c); },
    };
    SeedStream stream = SeedStream(0x10BB).derive("min_oracle");
    return minimize_in_body(obj, body_, 8, stream, 1e-8);
}

// ---------------------------------------------------------------------------
// Context processes
// ---------------------------------------------------------------------------
ContextProcess ContextProcess::fixed(std::vector<Vec> seq, bool cycle) {
    if (seq.empty()) throw ConfigError("fixed context sequence is empty");
    ContextProcess proc;
    proc.kind = Kind::FixedSequence;
    proc.p = static_cast<int>(seq.front().size());
    for (const Vec& c : seq) {
        if (c.size() != proc.p) {
            throw ConfigError("fixed context sequence has mixed dimensions");
        }
    }
    proc.sequence = std::move(seq);
    proc.cycle = cycle;
    return proc;
}

ContextProcess ContextProcess::iid_uniform(int p) {
    if (p < 1) throw ConfigError("context dimension must be >= 1");
    ContextProcess proc;
    proc.kind = Kind::IIDUniform;
    proc.p = p;
    return proc;
}

ContextProcess ContextProcess::pk(int p, long long K) {
    if (p < 1) throw ConfigError("context dimension must be >= 1");
    if (K < 1) throw ConfigError("context process K must be >= 1");
    ContextProcess proc;
    proc.kind = Kind::PK;
    proc.p = p;
    proc.K = K;
    return proc;
}

Vec sample_context(const ContextProcess& proc, const Partition& part,
                   long long t, SeedStream& stream) {
    if (proc.p != part.p) {
        throw ConfigError("context process dimension does not match partition");
    }
    switch (proc.kind) {
        case ContextProcess::Kind::FixedSequence: {
            const auto n = static_cast<long long>(proc.sequence.size());
            long long idx = t;
            if (idx >= n) {
                if (!proc.cycle) {
                    throw ExhaustedSequence("fixed context sequence exhausted");
                }
                idx %= n;
            }
            if (idx < 0) throw ConfigError("negative round index");
            return proc.sequence[static_cast<std::size_t>(idx)];
        }
        case ContextProcess::Kind::IIDUniform:
            return uniform_cube(proc.p, stream);
        case ContextProcess::Kind::PK: {
            const double K = static_cast<double>(proc.K);
            Vec c(proc.p);
            for (int j = 0; j < proc.p; ++j) {
                const auto idx = std::min(
                    static_cast<long long>(stream.uniform01() * K), proc.K - 1);
                const double bary = (static_cast<double>(idx) + 0.5) / K;
                c(j) = bary + (stream.uniform01() - 0.5) / (2.0 * K);
            }
            return c;
        }
    }
    throw ConfigError("unknown context process kind");
}

// ---------------------------------------------------------------------------
// Sampling and minimization
// ---------------------------------------------------------------------------
Vec sample_in_body(const ConvexBody& body, SeedStream& stream) {
    const int d = body.dim();
    if (body.kind() == ConvexBody::Kind::Ball) {
        const Vec dir = sample_sphere(d, stream);
        const double rad =
            body.radius() * std::pow(stream.uniform01(), 1.0 / d);
        return body.center() + rad * dir;
    }
    Vec lo, hi;
    axis_bounding_box(body, lo, hi);
    for (int attempt = 0; attempt < 100000; ++attempt) {
        Vec x(d);
        for (int i = 0; i < d; ++i) x(i) = stream.uniform(lo(i), hi(i));
        if (body.contains(x, 0.0)) return x;
    }
    throw NoConvergence("sample_in_body: rejection sampling failed");
}

MinimizerResult minimize_in_body(const SmoothObjective& obj,
                                 const ConvexBody& body, int n_starts,
                                 SeedStream& stream, double tol) {
    if (body.kind() != ConvexBody::Kind::Ball) {
        throw ConfigError("numerical minimization supports ball bodies only");
    }
    if (n_starts < 1) throw ConfigError("minimize_in_body: n_starts must be >= 1");
    const Vec& center = body.center();
    const double radius = body.radius();

    bool have_best = false;
    MinimizerResult best{Vec(), 0.0};

    for (int s = 0; s < n_starts; ++s) {
        Vec x = s == 0 ? center : sample_in_body(body, stream);
        double fx = obj.value(x);
        for (int iter = 0; iter < 300; ++iter) {
            const Vec g = obj.gradient(x);
            Mat h = obj.hessian(x);
            Eigen::LLT<Mat> llt(h);
            double ridge = 1e-10 * (1.0 + h.cwiseAbs().maxCoeff());
            while (llt.info() != Eigen::Success && ridge < 1e6) {
                llt.compute(h + ridge * Mat::Identity(h.rows(), h.cols()));
                ridge *= 10.0;
            }
            if (llt.info() != Eigen::Success) break;
            const Vec dx = -llt.solve(g);
            double step = 1.0;
            bool moved = false;
            for (int halving = 0; halving < 60; ++halving) {
                const Vec cand = project_to_ball(x + step * dx, center, radius);
                const double fc = obj.value(cand);
                const double pred = g.dot(x - cand);
                if (fc <= fx - 1e-4 * std::max(pred, 0.0) &&
                    fc < fx - 1e-15 * std::abs(fx)) {
                    x = cand;
                    fx = fc;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if (!moved) break;
        }
        // First-order stationarity: gradient norm in the interior, KKT
        // residual on the boundary (tangential gradient plus any inward pull).
        const Vec g = obj.gradient(x);
        const Vec dev = x - center;
        double resid;
        if (dev.norm() < radius * (1.0 - 1e-9)) {
            resid = g.norm();
        } else {
            const Vec n = dev / dev.norm();
            const double gn = g.dot(n);
            resid = (g - gn * n).norm() + std::max(gn, 0.0);
        }
        if (resid <= tol) {
            if (!have_best || fx < best.f) {
                best = {x, fx};
                have_best = true;
            }
        }
    }
    if (!have_best) {
        throw OracleFailure("minimize_in_body: no start reached stationarity");
    }
    return best;
}

// ---------------------------------------------------------------------------
// Certification
// ---------------------------------------------------------------------------
namespace {

// Richardson-extrapolated central second differences in coordinates rescaled
// by the model's natural lengths, so truncation and cancellation stay far
// below the certification tolerance.
Mat fd_hessian(const LossModel& model, const Vec& x, const Vec& c) {
    const int d = model.dim();
    const Vec scales = model.fd_scales();
    const double hu = 3e-3;
    Mat out(d, d);

    const auto f = [&](const Vec& point) { return model.eval(point, c); };
    const double f0 = f(x);

    const auto diag_fd = [&](int i, double step) {
        Vec xp = x, xm = x;
        xp(i) += step * scales(i);
        xm(i) -= step * scales(i);
        const double denom = step * scales(i) * step * scales(i);
        return (f(xp) - 2.0 * f0 + f(xm)) / denom;
    };
    const auto cross_fd = [&](int i, int j, double step) {
        const double si = step * scales(i), sj = step * scales(j);
        Vec xpp = x, xpm = x, xmp = x, xmm = x;
        xpp(i) += si; xpp(j) += sj;
        xpm(i) += si; xpm(j) -= sj;
        xmp(i) -= si; xmp(j) += sj;
        xmm(i) -= si; xmm(j) -= sj;
        return (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4.0 * si * sj);
    };

    for (int i = 0; i < d; ++i) {
        const double c1 = diag_fd(i, hu);
        const double c2 = diag_fd(i, 0.5 * hu);
        out(i, i) = (4.0 * c2 - c1) / 3.0;
        for (int j = i + 1; j < d; ++j) {
            const double m1 = cross_fd(i, j, hu);
            const double m2 = cross_fd(i, j, 0.5 * hu);
            const double mij = (4.0 * m2 - m1) / 3.0;
            out(i, j) = mij;
            out(j, i) = mij;
        }
    }
    return out;
}

} // namespace

CertificationReport certify_constants(const LossModel& model, long long n_pairs,
                                      SeedStream& stream) {
    if (n_pairs < 1) throw ConfigError("certify_constants: n_pairs must be >= 1");
    const int p = model.context_dim();
    const double L = model.holder_L();
    const double gamma = model.holder_gamma();
    const double alpha = model.alpha();
    const double beta = model.beta();
    const double M = model.sup_bound();
    const double eig_tol = 1e-5 * std::max(alpha, 1.0);

    CertificationReport report;
    report.n_pairs = n_pairs;
    report.min_hess_eig = std::numeric_limits<double>::infinity();
    report.max_hess_eig = -std::numeric_limits<double>::infinity();

    for (long long k = 0; k < n_pairs; ++k) {
        const Vec x = sample_in_body(model.body(), stream);
        const Vec c1 = uniform_cube(p, stream);
        Vec c2;
        if (k % 2 == 0) {
            c2 = uniform_cube(p, stream);
        } else {
            const double eps = std::pow(10.0, -5.0 * stream.uniform01());
            c2 = c1 + eps * sample_sphere(p, stream);
            for (int j = 0; j < p; ++j) c2(j) = std::clamp(c2(j), 0.0, 1.0);
        }

        const double f1 = model.eval(x, c1);
        const double f2 = model.eval(x, c2);
        for (const double fv : {f1, f2}) {
            report.max_abs_f = std::max(report.max_abs_f, std::abs(fv));
            if (!(std::abs(fv) <= M * (1.0 + 1e-9) + 1e-12)) {
                std::ostringstream os;
                os << "certify: |f|=" << std::abs(fv) << " exceeds M=" << M
                   << " at x=" << vec_to_string(x) << ", c=" << vec_to_string(c1);
                throw CertificationFailed(os.str());
            }
        }

        const double df = std::abs(f1 - f2);
        const double dist = (c1 - c2).norm();
        if (gamma > 0.0) {
            if (dist > 1e-12) {
                const double ratio = df / std::pow(dist, gamma);
                report.max_holder_ratio = std::max(report.max_holder_ratio, ratio);
                if (!(ratio <= L * (1.0 + 1e-6) + 1e-12)) {
                    std::ostringstream os;
                    os << "certify: Hoelder ratio " << ratio << " exceeds L=" << L
                       << " at x=" << vec_to_string(x) << ", c=" << vec_to_string(c1)
                       << ", c'=" << vec_to_string(c2);
                    throw CertificationFailed(os.str());
                }
            }
        } else {
            report.max_holder_ratio = std::max(report.max_holder_ratio, df);
            const double jump_cap = L > 0.0 ? L * (1.0 + 1e-6) : 1e-10;
            if (!(df <= jump_cap)) {
                std::ostringstream os;
                os << "certify: context jump " << df << " exceeds L=" << L
                   << " at x=" << vec_to_string(x) << ", c=" << vec_to_string(c1)
                   << ", c'=" << vec_to_string(c2);
                throw CertificationFailed(os.str());
            }
        }

        const Mat h = fd_hessian(model, x, c1);
        Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h + h.transpose()));
        if (es.info() != Eigen::Success) {
            throw NotPositiveDefinite("certify: Hessian eigensolve failed");
        }
        const double lo = es.eigenvalues().minCoeff();
        const double hi = es.eigenvalues().maxCoeff();
        report.min_hess_eig = std::min(report.min_hess_eig, lo);
        report.max_hess_eig = std::max(report.max_hess_eig, hi);
        if (!(lo >= alpha - eig_tol && hi <= beta + eig_tol)) {
            std::ostringstream os;
            os << "certify: Hessian spectrum [" << lo << ", " << hi
               << "] leaves [" << alpha << ", " << beta << "] at x="
               << vec_to_string(x) << ", c=" << vec_to_string(c1);
            throw CertificationFailed(os.str());
        }
    }
    return report;
}

} // namespace ccb
