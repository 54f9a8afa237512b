#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "ccb/conversion.hpp"
#include "ccb/geometry.hpp"
#include "ccb/rng.hpp"

namespace ccb {

// ---------------------------------------------------------------------------
// Mollifier: eta0 is an even C-infinity bump equal to 1 on |x| <= 1/4, 0 on
// |x| >= 1, bridged by e(1-s)/(e(1-s)+e(s)) with s = (|x|-1/4)/(3/4) and
// e(u) = exp(-1/u). eta is its cumulative integral from -1, evaluated via a
// cached high-accuracy quadrature table (absolute error <= 1e-10).
// ---------------------------------------------------------------------------
double mollifier_eta0(double x);
double mollifier_eta0_prime(double x);
double mollifier_eta(double x);
// Conservative upper bound on max |eta0'| (dense grid scan plus margin),
// cached after first use. Used by admissibility caps.
double mollifier_eta0_prime_max();

// Euclidean distance from c to the boundary of the stated cell:
// min over axes of min(c_j - lo_j, hi_j - c_j). Throws NotInCell when c lies
// outside the closed cell.
double dist_to_cell_boundary(const Partition& part, long long flat_cell,
                             const Vec& c);

// ---------------------------------------------------------------------------
// Loss models: f(x, c) on a convex action body with contexts in [0,1]^p.
// All evaluation is pure; models are immutable after construction.
// ---------------------------------------------------------------------------
struct MinimizerResult {
    Vec x;
    double f;
};

class LossModel {
public:
    virtual ~LossModel() = default;

    virtual double eval(const Vec& x, const Vec& c) const = 0;
    virtual Vec grad_x(const Vec& x, const Vec& c) const = 0;
    virtual Mat hess_x(const Vec& x, const Vec& c) const = 0;
    // argmin over the body of f(., c), with the attained value.
    virtual MinimizerResult min_oracle(const Vec& c) const = 0;

    virtual int dim() const = 0;
    virtual int context_dim() const = 0;
    virtual const ConvexBody& body() const = 0;

    // Declared constants: strong convexity, smoothness, sup bound, and the
    // context Hoelder pair (L, gamma); gamma == 0 marks the bounded-jump class.
    virtual double alpha() const = 0;
    virtual double beta() const = 0;
    virtual double sup_bound() const = 0;
    virtual double holder_L() const = 0;
    virtual double holder_gamma() const = 0;

    // Natural length scale of f along each action coordinate, used to size
    // finite-difference steps during certification.
    virtual Vec fd_scales() const { return Vec::Ones(dim()); }
};

// ---------------------------------------------------------------------------
// Benchmark quadratic: f(x,c) = (alpha/2) ||x - m(c)||^2 + b0 with
// m(c) = clip(v + A phi(c)) and phi_i = clamp((W c + u0)_i, 0, 1)^gamma.
// The clip keeps m inside the ball scaled by clip_factor about the center
// (clip_factor > 1 lets targets leave the body so minimizers hit the
// boundary). Requires a Ball body.
// ---------------------------------------------------------------------------
struct QuadraticSpec {
    double alpha = 1.0;
    double b0 = 0.0;
    double L = 1.0;            // Hoelder constant the map is calibrated to
    double gamma = 1.0;        // context Hoelder exponent in (0, 1]
    double clip_factor = 0.9;  // target clipped to clip_factor * radius
    Mat A;                     // d x k feature mixing
    Mat W;                     // k x p context features
    Vec u0;                    // k offsets
    Vec v;                     // d base target
};

class ContextualQuadratic : public LossModel {
public:
    ContextualQuadratic(ConvexBody body, QuadraticSpec spec);

    double eval(const Vec& x, const Vec& c) const override;
    Vec grad_x(const Vec& x, const Vec& c) const override;
    Mat hess_x(const Vec& x, const Vec& c) const override;
    MinimizerResult min_oracle(const Vec& c) const override;

    int dim() const override { return body_.dim(); }
    int context_dim() const override { return static_cast<int>(spec_.W.cols()); }
    const ConvexBody& body() const override { return body_; }
    double alpha() const override { return spec_.alpha; }
    double beta() const override { return spec_.alpha; }
    double sup_bound() const override { return sup_bound_; }
    double holder_L() const override { return spec_.L; }
    double holder_gamma() const override { return spec_.gamma; }

    Vec target(const Vec& c) const;  // m(c)
    const QuadraticSpec& spec() const { return spec_; }

private:
    ConvexBody body_;
    QuadraticSpec spec_;
    double sup_bound_;
};

// Random quadratic with the feature maps drawn from map_seed (independent of
// run seeds, so the environment is fixed across seeds) and A rescaled so the
// analytic Hoelder bound equals L exactly. boundary_regime pushes targets
// outside the body (clip_factor 1.5, off-center base target).
std::unique_ptr<ContextualQuadratic> make_random_quadratic(
    ConvexBody body, int p, double alpha, double L, double gamma, double b0,
    std::uint64_t map_seed, bool boundary_regime);

// ---------------------------------------------------------------------------
// Adversarial lower-bound family on Ball(0,1):
//   f(x,c) = alpha ||x||^2
//          + r1 L eta(x_1 delta^{-gamma/2}) * omega_cell(c) * d^gamma(c, cell)
//          + r2 h^2 sum_{i>=2} tau_i eta(x_i / h)
// with delta = 1/(2K), h = min(d^{-1/2}, T^{-1/4}). The gamma_zero variant
// replaces d^gamma(.) by 1 (bounded-jump class). Admissibility caps on
// (r1, r2) keep the Hessian spectrum in [alpha, 3 alpha], |f| <= M, and the
// context dependence Hoelder(gamma, L).
// ---------------------------------------------------------------------------
struct LowerBoundSpec {
    int p = 1;
    long long K = 1;
    int d = 1;
    double alpha = 1.0;
    double L = 1.0;
    double gamma = 1.0;
    bool gamma_zero = false;
    double r1 = 0.0;  // <= 0 means "use 0.9 * cap"
    double r2 = 0.0;
    long long T = 1;   // enters only through h
    double M = 0.0;    // <= 0 means "use alpha + 1"
    std::uint64_t omega_seed = 2026;
    std::uint64_t tau_seed = 4053;
    bool check_admissibility = true;
};

class LowerBoundFamily : public LossModel {
public:
    explicit LowerBoundFamily(LowerBoundSpec spec);

    double eval(const Vec& x, const Vec& c) const override;
    Vec grad_x(const Vec& x, const Vec& c) const override;
    Mat hess_x(const Vec& x, const Vec& c) const override;
    MinimizerResult min_oracle(const Vec& c) const override;

    int dim() const override { return spec_.d; }
    int context_dim() const override { return spec_.p; }
    const ConvexBody& body() const override { return body_; }
    double alpha() const override { return spec_.alpha; }
    double beta() const override { return 3.0 * spec_.alpha; }
    double sup_bound() const override { return M_; }
    double holder_L() const override { return spec_.L; }
    double holder_gamma() const override {
        return spec_.gamma_zero ? 0.0 : spec_.gamma;
    }

    Vec fd_scales() const override;

    const LowerBoundSpec& spec() const { return spec_; }
    double delta() const { return delta_; }
    double h() const { return h_; }
    double r1_cap() const { return r1_cap_; }
    double r2_cap() const { return r2_cap_; }
    int omega(long long flat_cell) const { return omega_.at(flat_cell); }
    double tau(int i) const { return tau_.at(i); }

    // Signed cell weight: omega_cell * d^gamma(c, cell boundary), or just
    // omega_cell for the gamma-zero variant.
    double context_weight(const Vec& c) const;

private:
    LowerBoundSpec spec_;
    ConvexBody body_;
    Partition part_;
    std::vector<std::int8_t> omega_;
    std::vector<double> tau_;
    double delta_, h_, M_, r1_cap_, r2_cap_;
};

// ---------------------------------------------------------------------------
// Context processes on the cube [0,1]^p.
// ---------------------------------------------------------------------------
struct ContextProcess {
    enum class Kind { FixedSequence, IIDUniform, PK };
    Kind kind = Kind::IIDUniform;
    int p = 1;
    long long K = 1;               // PK only
    std::vector<Vec> sequence;     // FixedSequence only
    bool cycle = true;             // FixedSequence: repeat when exhausted

    static ContextProcess fixed(std::vector<Vec> seq, bool cycle = true);
    static ContextProcess iid_uniform(int p);
    static ContextProcess pk(int p, long long K);
};

// Sample the context for 0-based round index t. FixedSequence returns element
// t (cycling if configured, ExhaustedSequence otherwise); IIDUniform is
// uniform on the cube; PK picks a cell uniformly then samples uniformly in
// the half-size sub-cube around its barycenter (per-axis half-width 1/(4K)).
Vec sample_context(const ContextProcess& proc, const Partition& part,
                   long long t, SeedStream& stream);

// ---------------------------------------------------------------------------
// Sampling and numerical minimization helpers.
// ---------------------------------------------------------------------------
// Uniform sample in the body (exact for balls; rejection from the bounding
// box for axis-aligned polytopes).
Vec sample_in_body(const ConvexBody& body, SeedStream& stream);

// Multi-start projected damped Newton minimization of a smooth function over
// a Ball body, polished and verified to first-order stationarity (interior:
// ||grad|| <= tol; boundary: KKT residual <= tol). Throws OracleFailure when
// no start converges.
struct SmoothObjective {
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> gradient;
    std::function<Mat(const Vec&)> hessian;
};
MinimizerResult minimize_in_body(const SmoothObjective& obj,
                                 const ConvexBody& body, int n_starts,
                                 SeedStream& stream, double tol = 1e-8);

// ---------------------------------------------------------------------------
// Empirical certification of declared constants by sampling.
// ---------------------------------------------------------------------------
struct CertificationReport {
    double max_holder_ratio = 0.0;  // vs L (gamma > 0) or max |df| (gamma = 0)
    double min_hess_eig = 0.0;
    double max_hess_eig = 0.0;
    double max_abs_f = 0.0;
    long long n_pairs = 0;
};

// Over n_pairs sampled (x, c, c'): Hoelder ratio <= L (1 + 1e-6); numerical
// (finite-difference) Hessian eigenvalues within [alpha, beta] up to a small
// pinned tolerance; |f| <= M. Throws CertificationFailed with the witnessing
// tuple; returns the worst-case ratios otherwise.
CertificationReport certify_constants(const LossModel& model, long long n_pairs,
                                      SeedStream& stream);

} // namespace ccb
