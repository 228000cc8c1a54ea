#pragma once

#include "groups.hpp"
#include "quadrature.hpp"

#include <optional>

namespace lgha {

using NilFn = std::function<cplx(const NilPoint6&)>;

inline NilPoint6 nil_from_span(std::span<const double> c) { return {c[0], c[1], c[2], c[3], c[4], c[5]}; }

/// Six coordinate axes (x1..x6) over a common box.
inline GridSpec nil_box(double lo, double hi, std::size_t count, AxisKind kind = AxisKind::UniformBox)
{
    GridSpec g;
    for (int i = 1; i <= 6; ++i) g.axes.push_back({kind, lo, hi, count, "x" + std::to_string(i)});
    return g;
}

/// Box of half-width r around a center point.
inline GridSpec nil_box_around(const NilPoint6& c, double r, std::size_t count)
{
    GridSpec g;
    const auto cc = c.coords();
    for (int i = 0; i < 6; ++i) g.axes.push_back(box_axis("x" + std::to_string(i + 1), cc[i] - r, cc[i] + r, count));
    return g;
}

// ----------------------------------------------------------------------------
// Actions and lifts
// ----------------------------------------------------------------------------

/// rho2(x3, x2)(y6, y5, y4) = (y6 + x3 y4, y5 + x2 y4, y4).
inline std::array<double, 3> rho2(double x3, double x2, const std::array<double, 3>& y)
{
    return {y[0] + x3 * y[2], y[1] + x2 * y[2], y[2]};
}

/// rho1(x1)(y6, y5, y4, y3, y2) = (y6 + x1 y5, y5, y4, y3 + x1 y2, y2).
inline std::array<double, 5> rho1(double x1, const std::array<double, 5>& y)
{
    return {y[0] + x1 * y[1], y[1], y[2], y[3] + x1 * y[4], y[4]};
}

enum class LiftRule {
    Invariant,  ///< last argument t1 + x1; invariant under the shift below
    Literal,    ///< last argument t1, as printed
};

/// f~ on L built from f on N by applying rho2 then rho1.
struct LiftedFunction {
    NilFn base;
    LiftRule rule = LiftRule::Invariant;

    NilPoint6 argument(const LPoint9& p) const
    {
        const auto x = rho2(p.x3, p.x2, {p.x6, p.x5, p.x4});
        const auto y = rho1(p.x1, {x[0], x[1], x[2], p.t3 + p.x3, p.t2 + p.x2});
        const double last = rule == LiftRule::Invariant ? p.t1 + p.x1 : p.t1;
        return {last, y[4], y[3], y[2], y[1], y[0]};
    }

    cplx operator()(const LPoint9& p) const { return base(argument(p)); }
};

inline LiftedFunction lift_to_L(NilFn f, LiftRule rule = LiftRule::Invariant) { return {std::move(f), rule}; }

/// The (h, r, k) shift as printed: rho2(r, k) on x, x3 - r, x2 - k, t3 + r, t2 + k,
/// then rho1(h) on (x, t3, t2), x1 - h, t1 + h. Lifts are invariant under it only for h = 0.
inline LPoint9 lift_shift_printed(const LPoint9& p, double h, double r, double k)
{
    const auto x = rho2(r, k, {p.x6, p.x5, p.x4});
    LPoint9 q;
    q.x6 = x[0] + h * x[1];
    q.x5 = x[1];
    q.x4 = x[2];
    q.x3 = p.x3 - r;
    q.x2 = p.x2 - k;
    q.t3 = p.t3 + r + h * (p.t2 + k);
    q.t2 = p.t2 + k;
    q.x1 = p.x1 - h;
    q.t1 = p.t1 + h;
    return q;
}

/// Shift preserving every argument of the invariant lift: rho1(h) acts through
/// the invariant combinations x5 + x2 x4 and t2 + x2.
inline LPoint9 lift_shift(const LPoint9& p, double h, double r, double k)
{
    const auto x = rho2(r, k, {p.x6, p.x5, p.x4});
    LPoint9 q;
    q.x6 = x[0] + h * (p.x5 + p.x2 * p.x4);
    q.x5 = x[1];
    q.x4 = x[2];
    q.x3 = p.x3 - r;
    q.x2 = p.x2 - k;
    q.t3 = p.t3 + r + h * (p.t2 + p.x2);
    q.t2 = p.t2 + k;
    q.x1 = p.x1 - h;
    q.t1 = p.t1 + h;
    return q;
}

// ----------------------------------------------------------------------------
// Test corpus: sums of separable Gaussian-times-polynomial terms
// ----------------------------------------------------------------------------

/// (c0 + c1 x + c2 x^2) exp(-(x - mu)^2 / (2 sigma^2)).
struct GaussPoly1D {
    double mu = 0, sigma = 1;
    std::array<cplx, 3> c{1.0, 0.0, 0.0};

    cplx operator()(double x) const
    {
        const double u = (x - mu) / sigma;
        return (c[0] + x * (c[1] + x * c[2])) * std::exp(-0.5 * u * u);
    }

    /// Closed-form transform with kernel e^{-i xi x}.
    cplx ft(double xi) const
    {
        const cplx G = gaussian_ft_1d(xi, mu, sigma);
        const cplx q = I * mu + sigma * sigma * xi;
        return (c[0] + c[1] * (mu - I * sigma * sigma * xi) + c[2] * (sigma * sigma - q * q)) * G;
    }
};

struct SepTerm {
    cplx coef = 1.0;
    std::array<GaussPoly1D, 6> factor;  ///< indexed x1..x6
};

/// Sum of separable terms on R^6.
struct SepFunction {
    std::vector<SepTerm> terms;

    cplx operator()(const NilPoint6& p) const
    {
        const auto c = p.coords();
        cplx v = 0;
        for (const auto& t : terms) {
            cplx prod = t.coef;
            for (int i = 0; i < 6; ++i) prod *= t.factor[i](c[i]);
            v += prod;
        }
        return v;
    }

    cplx ft(const std::array<double, 6>& xi) const
    {
        cplx v = 0;
        for (const auto& t : terms) {
            cplx prod = t.coef;
            for (int i = 0; i < 6; ++i) prod *= t.factor[i].ft(xi[i]);
            v += prod;
        }
        return v;
    }

    NilFn fn() const
    {
        return [self = *this](const NilPoint6& p) { return self(p); };
    }

    SepFunction conj() const
    {
        SepFunction out = *this;
        for (auto& t : out.terms) {
            t.coef = std::conj(t.coef);
            for (auto& f : t.factor)
                for (auto& c : f.c) c = std::conj(c);
        }
        return out;
    }

    static SepFunction gaussian(const NilPoint6& mu, const std::array<double, 6>& sigma, cplx coef = 1.0)
    {
        SepTerm t;
        t.coef = coef;
        const auto m = mu.coords();
        for (int i = 0; i < 6; ++i) t.factor[i] = {m[i], sigma[i], {1.0, 0.0, 0.0}};
        return {{t}};
    }

    /// Random corpus member: sigma in [smin, smax], mu in [-mu_max, mu_max],
    /// a product of per-axis polynomials of degree <= 2 on a few axes.
    static SepFunction random(Rng& rng, double smin = 0.5, double smax = 2.0, double mu_max = 1.0, bool complex_coeffs = false)
    {
        SepTerm t;
        for (auto& f : t.factor) {
            f.mu = rng.uniform(-mu_max, mu_max);
            f.sigma = rng.uniform(smin, smax);
            f.c = {1.0, 0.0, 0.0};
        }
        for (int k = 0; k < 2; ++k) {
            auto& f = t.factor[static_cast<std::size_t>(rng.uniform(0, 6)) % 6];
            f.c[1] = rng.uniform(-0.5, 0.5);
            f.c[2] = rng.uniform(-0.2, 0.2);
            if (complex_coeffs) f.c[1] += I * rng.uniform(-0.5, 0.5);
        }
        return {{t}};
    }

    /// Box covering the effective support of every term to margin m sigmas.
    std::pair<double, double> support(double m = 9.0) const
    {
        double lo = 0, hi = 0;
        for (const auto& t : terms)
            for (const auto& f : t.factor) {
                lo = std::min(lo, f.mu - m * f.sigma);
                hi = std::max(hi, f.mu + m * f.sigma);
            }
        return {lo, hi};
    }
};

/// int over R^6 of f conj(g), factor by factor on a 1-D uniform grid.
inline cplx sep_inner(const SepFunction& f, const SepFunction& g, std::size_t count = 2048)
{
    const auto [lo1, hi1] = f.support();
    const auto [lo2, hi2] = g.support();
    const Axis ax = box_axis("x", std::min(lo1, lo2), std::max(hi1, hi2), count);
    std::vector<double> x, w;
    ax.nodes(x, w);
    cplx total = 0;
    for (const auto& a : f.terms)
        for (const auto& b : g.terms) {
            cplx prod = a.coef * std::conj(b.coef);
            for (int i = 0; i < 6; ++i) {
                std::vector<cplx> v(x.size());
                for (std::size_t k = 0; k < x.size(); ++k) v[k] = w[k] * a.factor[i](x[k]) * std::conj(b.factor[i](x[k]));
                prod *= pairwise_sum(v);
            }
            total += prod;
        }
    return total;
}

/// (2 pi)^-6 int Ff conj(Fg) dxi with each factor transformed by a 1-D DFT.
inline cplx sep_spectral_inner(const SepFunction& f, const SepFunction& g, std::size_t count = 2048)
{
    const auto [lo1, hi1] = f.support();
    const auto [lo2, hi2] = g.support();
    GridSpec grid{{box_axis("x", std::min(lo1, lo2), std::max(hi1, hi2), count)}};
    auto transform = [&](const GaussPoly1D& p) {
        return dft_forward(sample(grid, [&](std::span<const double> x) { return p(x[0]); }));
    };
    cplx total = 0;
    for (const auto& a : f.terms)
        for (const auto& b : g.terms) {
            cplx prod = a.coef * std::conj(b.coef);
            for (int i = 0; i < 6; ++i) {
                const Spectrum A = transform(a.factor[i]), B = transform(b.factor[i]);
                std::vector<cplx> v(A.values.size());
                for (std::size_t k = 0; k < v.size(); ++k) v[k] = A.values[k] * std::conj(B.values[k]);
                prod *= pairwise_sum(v) * A.axes[0].dxi() / (2 * pi);
            }
            total += prod;
        }
    return total;
}

// ----------------------------------------------------------------------------
// Convolution on N
// ----------------------------------------------------------------------------

enum class ConvMethod { Grid, MonteCarlo };

enum class ConvChart {
    PhiSupport,  ///< int f(g^-1 X) phi(g) dg, integration variable g near phi's support
    FSupport,    ///< int f(h) phi(X h^-1) dh, integration variable h near f's support
};

struct ConvOptions {
    ConvMethod method = ConvMethod::Grid;
    ConvChart chart = ConvChart::PhiSupport;
    std::optional<GridSpec> grid;              ///< for the grid method
    std::optional<GaussianSampler> sampler;    ///< for Monte Carlo
    std::size_t samples = 100000;
    std::uint64_t seed = 1;
    std::size_t budget = static_cast<std::size_t>(-1);
};

struct ConvResult {
    cplx value{};
    double stderr_ = 0.0;  ///< zero for the grid method
};

/// (phi * f)(X) = int f(g^-1 X) phi(g) dg.
inline ConvResult convolve_N(const NilFn& phi, const NilFn& f, const NilPoint6& X, const ConvOptions& opt)
{
    const PointFn integrand = [&](std::span<const double> c) -> cplx {
        const NilPoint6 v = nil_from_span(c);
        if (opt.chart == ConvChart::PhiSupport) return f(nil_mul(nil_inv(v), X)) * phi(v);
        return f(v) * phi(nil_mul(X, nil_inv(v)));
    };
    if (opt.method == ConvMethod::Grid) {
        if (!opt.grid) throw ConfigError("convolve_N: grid method needs a grid");
        if (opt.grid->dim() != 6) throw ConfigError("convolve_N: grid must have six axes");
        return {integrate(*opt.grid, integrand, opt.budget), 0.0};
    }
    if (!opt.sampler) throw ConfigError("convolve_N: Monte Carlo needs a sampler");
    const McResult r = importance_integral(integrand, *opt.sampler, opt.samples, opt.seed, opt.budget);
    return {r.estimate, r.stderr_};
}

/// phi_check(X) = conj(phi(X^-1)).
inline NilFn check(const NilFn& phi)
{
    return [phi](const NilPoint6& x) { return std::conj(phi(nil_inv(x))); };
}

// ----------------------------------------------------------------------------
// Fourier transform and Plancherel on N
// ----------------------------------------------------------------------------

/// Euclidean transform in coordinates over all six axes.
inline Spectrum fourier_N(const SampledField& f)
{
    if (f.grid.dim() != 6) throw AxisKindMismatch("fourier_N: expects a six-axis field");
    return dft_forward(f);
}

/// Transform of a separable corpus member on a six-axis grid from per-axis 1-D DFTs.
struct SeparableSpectrum {
    std::vector<cplx> coef;
    std::vector<std::array<Spectrum, 6>> factors;

    cplx at(const std::array<std::size_t, 6>& k) const
    {
        cplx v = 0;
        for (std::size_t t = 0; t < coef.size(); ++t) {
            cplx prod = coef[t];
            for (int i = 0; i < 6; ++i) prod *= factors[t][i].values[k[i]];
            v += prod;
        }
        return v;
    }
};

inline SeparableSpectrum fourier_N_separable(const SepFunction& f, const GridSpec& g)
{
    if (g.dim() != 6) throw AxisKindMismatch("fourier_N_separable: expects six axes");
    SeparableSpectrum s;
    for (const auto& t : f.terms) {
        s.coef.push_back(t.coef);
        std::array<Spectrum, 6> sp;
        for (int i = 0; i < 6; ++i) {
            const GridSpec one{{g.axes[i]}};
            sp[i] = dft_forward(sample(one, [&](std::span<const double> x) { return t.factor[i](x[0]); }));
        }
        s.factors.push_back(std::move(sp));
    }
    return s;
}

struct NilCheck {
    double lhs = 0, rhs = 0, rel_err = 0;
    double stderr_ = 0;  ///< combined Monte Carlo error, zero on grids
    std::string path;    ///< grid, separable or mc
};

inline double relerr(double a, double b)
{
    const double s = std::max(std::abs(a), std::abs(b));
    return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

/// lhs = int |f|^2 dX on the grid, rhs = (2 pi)^-6 int |Ff|^2 dxi from the DFT.
inline NilCheck plancherel_N_check(const SampledField& f)
{
    NilCheck r;
    r.path = "grid";
    r.lhs = norm2(f);
    r.rhs = fourier_N(f).norm2() / std::pow(2 * pi, 6);
    r.rel_err = relerr(r.lhs, r.rhs);
    return r;
}

/// Separable corpus: both sides factor into one-dimensional quadratures.
inline NilCheck plancherel_N_check(const SepFunction& f, std::size_t count = 2048)
{
    NilCheck r;
    r.path = "separable";
    r.lhs = sep_inner(f, f, count).real();
    r.rhs = sep_spectral_inner(f, f, count).real();
    r.rel_err = relerr(r.lhs, r.rhs);
    return r;
}

/// Correlated Gaussian exp(-X^T A X / 2) on R^6; not separable unless A is diagonal.
struct CorrelatedGaussian {
    Eigen::Matrix<double, 6, 6> A;

    cplx operator()(const NilPoint6& p) const
    {
        const auto c = p.coords();
        const Eigen::Map<const Eigen::Matrix<double, 6, 1>> x(c.data());
        return std::exp(-0.5 * x.dot(A * x));
    }

    /// int |f|^2 = pi^3 / sqrt(det A).
    double norm2_exact() const { return std::pow(pi, 3) / std::sqrt(A.determinant()); }

    /// Ff(xi) = (2 pi)^3 / sqrt(det A) exp(-xi^T A^-1 xi / 2).
    cplx ft(const std::array<double, 6>& xi) const
    {
        const Eigen::Map<const Eigen::Matrix<double, 6, 1>> v(xi.data());
        return std::pow(2 * pi, 3) / std::sqrt(A.determinant()) * std::exp(-0.5 * v.dot(A.inverse() * v));
    }

    /// Eigenvalues in [lmin, lmax] with a random orthogonal frame.
    static CorrelatedGaussian random(Rng& rng, double lmin = 0.5, double lmax = 0.8)
    {
        Eigen::Matrix<double, 6, 6> M;
        for (int i = 0; i < 36; ++i) M.data()[i] = rng.normal();
        const Eigen::HouseholderQR<Eigen::Matrix<double, 6, 6>> qr(M);
        const Eigen::Matrix<double, 6, 6> Q = qr.householderQ();
        Eigen::Matrix<double, 6, 1> l;
        for (int i = 0; i < 6; ++i) l(i) = lmin + (lmax - lmin) * i / 5.0;
        CorrelatedGaussian g;
        g.A = Q * l.asDiagonal() * Q.transpose();
        return g;
    }
};

/// Grid path when count^6 fits the budget, otherwise both sides by Monte Carlo.
inline NilCheck plancherel_N_check(const CorrelatedGaussian& f, std::size_t count, double half_width, std::size_t budget,
                                   std::size_t mc_samples, std::uint64_t seed)
{
    const std::size_t points = static_cast<std::size_t>(std::pow(static_cast<double>(count), 6));
    if (points <= budget) {
        const GridSpec g = nil_box(-half_width, half_width, count, AxisKind::UniformPeriodic);
        return plancherel_N_check(sample(g, [&](std::span<const double> c) { return f(nil_from_span(c)); }, budget));
    }
    NilCheck r;
    r.path = "mc";
    const Eigen::Matrix<double, 6, 6> Ainv = f.A.inverse();
    const auto xs = GaussianSampler::make(Eigen::VectorXd::Zero(6), Ainv);
    const auto ls = importance_integral([&](std::span<const double> c) { return cplx(std::norm(f(nil_from_span(c)))); }, xs,
                                       mc_samples, seed);
    const auto ks = GaussianSampler::make(Eigen::VectorXd::Zero(6), f.A);
    const auto rs = importance_integral(
        [&](std::span<const double> c) {
            return cplx(std::norm(f.ft({c[0], c[1], c[2], c[3], c[4], c[5]})) / std::pow(2 * pi, 6));
        },
        ks, mc_samples, seed + 1);
    r.lhs = ls.estimate.real();
    r.rhs = rs.estimate.real();
    r.stderr_ = std::hypot(ls.stderr_, rs.stderr_);
    r.rel_err = relerr(r.lhs, r.rhs);
    return r;
}

// ----------------------------------------------------------------------------
// Bilinear identity
// ----------------------------------------------------------------------------

struct BilinearCheck {
    cplx lhs{}, rhs{};
    double abs_err = 0, rel_err = 0, stderr_ = 0;
    std::string path;
};

/// lhs = (phi_check * f)(0), rhs = (2 pi)^-6 int Ff conj(Fphi) dxi.
/// Grid path: the convolution at the identity is taken in the f-support chart where
/// its integrand f(h) phi_check(h^-1) factors over the separable corpus.
inline BilinearCheck theorem32_check(const SepFunction& f, const SepFunction& phi, std::size_t count = 2048)
{
    BilinearCheck r;
    r.path = "grid";
    r.lhs = sep_inner(f, phi, count);
    r.rhs = sep_spectral_inner(f, phi, count);
    r.abs_err = std::abs(r.lhs - r.rhs);
    r.rel_err = r.abs_err / std::max(std::abs(r.rhs), 1e-300);
    return r;
}

/// Monte Carlo lhs through the full noncommutative convolution; closed-form rhs.
inline BilinearCheck theorem32_check_mc(const SepFunction& f, const SepFunction& phi, std::size_t n, std::uint64_t seed,
                                        std::size_t budget = static_cast<std::size_t>(-1))
{
    BilinearCheck r;
    r.path = "mc";
    double smax = 0;
    Eigen::VectorXd mu(6);
    const auto& t = f.terms.front();
    for (int i = 0; i < 6; ++i) mu(i) = t.factor[i].mu;
    for (const auto* g : {&f, &phi})
        for (const auto& term : g->terms)
            for (const auto& fac : term.factor) smax = std::max(smax, fac.sigma);
    ConvOptions opt;
    opt.method = ConvMethod::MonteCarlo;
    opt.chart = ConvChart::FSupport;
    opt.sampler = GaussianSampler::make(mu, 1.2 * 1.2 * smax * smax * Eigen::MatrixXd::Identity(6, 6));
    opt.samples = n;
    opt.seed = seed;
    opt.budget = budget;
    const auto c = convolve_N(check(phi.fn()), f.fn(), {}, opt);
    r.lhs = c.value;
    r.stderr_ = c.stderr_;
    r.rhs = sep_spectral_inner(f, phi);
    r.abs_err = std::abs(r.lhs - r.rhs);
    r.rel_err = r.abs_err / std::max(std::abs(r.rhs), 1e-300);
    return r;
}

// ----------------------------------------------------------------------------
// Convolution on L against the commutative convolution on B
// ----------------------------------------------------------------------------

struct ConvEquality {
    cplx noncommutative{}, commutative{};
    double stderr_ = 0, rel_err = 0;
};

/// u * F(P) = int_N F(n^-1 P) u(n) dn and u *_c F(P) = int F(x - y, x3 - y3, x2 - y2, t3, t2, x1 - s, t1) u(y, y3, y2, s),
/// both sampled from the normalized Gaussian weight of u with common draws.
inline ConvEquality convolution_equality_check(const std::function<cplx(const LPoint9&)>& F, const SepFunction& u,
                                               const LPoint9& P, std::size_t n, std::uint64_t seed)
{
    const auto& t = u.terms.front();
    Eigen::VectorXd mu(6);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(6, 6);
    for (int i = 0; i < 6; ++i) {
        mu(i) = t.factor[i].mu;
        cov(i, i) = 1.21 * t.factor[i].sigma * t.factor[i].sigma;
    }
    const auto sampler = GaussianSampler::make(mu, cov);
    const Philox gen(seed, 0x5431);
    struct Acc {
        cplx a{}, b{};
        double aa = 0, bb = 0, dd = 0;
        Acc& operator+=(const Acc& o)
        {
            a += o.a;
            b += o.b;
            aa += o.aa;
            bb += o.bb;
            dd += o.dd;
            return *this;
        }
        Acc operator+(const Acc& y) const { Acc x = *this; return x += y; }
    };
    const Acc s = reduce_sum<Acc>(n, [&](std::size_t i) {
        std::array<double, 6> c{};
        const double p = sampler.draw(gen, i, c);
        const NilPoint6 y = nil_from_span(c);
        const cplx w = u(y) / p;
        const cplx a = F(L_mul(L_inv(nil_into_L(y)), P)) * w;
        LPoint9 q = P;
        q.x6 -= y.x6;
        q.x5 -= y.x5;
        q.x4 -= y.x4;
        q.x3 -= y.x3;
        q.x2 -= y.x2;
        q.x1 -= y.x1;
        const cplx b = F(q) * w;
        return Acc{a, b, std::norm(a), std::norm(b), std::norm(a - b)};
    });
    ConvEquality r;
    const double dn = static_cast<double>(n);
    r.noncommutative = s.a / dn;
    r.commutative = s.b / dn;
    const double var = std::max(0.0, s.dd / dn - std::norm(r.noncommutative - r.commutative));
    r.stderr_ = std::sqrt(var / (dn - 1));
    r.rel_err = std::abs(r.noncommutative - r.commutative) / std::max(std::abs(r.commutative), 1e-300);
    return r;
}

// ----------------------------------------------------------------------------
// Generic group convolution (used on the three-dimensional group)
// ----------------------------------------------------------------------------

/// (phi * f)(X) = int f(g^-1 X) phi(g) dg over a grid of g, for any group with mul and inv.
template <typename Point, typename Mul, typename Inv, typename ToPoint>
cplx group_convolve(const std::function<cplx(const Point&)>& phi, const std::function<cplx(const Point&)>& f, const Point& X,
                    const GridSpec& grid, Mul mul, Inv inv, ToPoint to_point)
{
    return integrate(grid, [&](std::span<const double> c) {
        const Point g = to_point(c);
        return f(mul(inv(g), X)) * phi(g);
    });
}

} // namespace lgha
