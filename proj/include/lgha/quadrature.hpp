#pragma once

#include "core.hpp"

#include <Eigen/Dense>
#include <fftw3.h>

#include <mutex>
#include <string>

namespace lgha {

// ----------------------------------------------------------------------------
// Grids
// ----------------------------------------------------------------------------

enum class AxisKind { UniformPeriodic, UniformBox, GaussLegendre };

inline std::string axis_kind_name(AxisKind k)
{
    switch (k) {
    case AxisKind::UniformPeriodic: return "uniform-periodic";
    case AxisKind::UniformBox: return "uniform-box";
    case AxisKind::GaussLegendre: return "gauss-legendre";
    }
    return "?";
}

inline AxisKind axis_kind_from(const std::string& s)
{
    if (s == "uniform-periodic") return AxisKind::UniformPeriodic;
    if (s == "uniform-box") return AxisKind::UniformBox;
    if (s == "gauss-legendre") return AxisKind::GaussLegendre;
    throw Error("unknown axis kind: " + s);
}

/// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch).
inline void gauss_legendre(std::size_t n, std::vector<double>& x, std::vector<double>& w)
{
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t k = 1; k < n; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        T(k, k - 1) = T(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    x.resize(n);
    w.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double xi = es.eigenvalues()(i);
        // one Newton polish on P_n
        double p0 = 1.0, p1 = xi;
        for (std::size_t k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1) * xi * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
        if (n > 1) xi -= p1 / dp;
        p0 = 1.0;
        p1 = xi;
        for (std::size_t k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1) * xi * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double d = n > 1 ? n * (xi * p1 - p0) / (xi * xi - 1.0) : 1.0;
        x[i] = xi;
        w[i] = n > 1 ? 2.0 / ((1.0 - xi * xi) * d * d) : 2.0;
    }
}

struct Axis {
    AxisKind kind = AxisKind::UniformBox;
    double lo = -1.0, hi = 1.0;
    std::size_t count = 2;
    std::string name;

    /// Uniform axes use spacing (hi-lo)/count and nodes lo + i*h.
    double spacing() const { return (hi - lo) / static_cast<double>(count); }

    void nodes(std::vector<double>& x, std::vector<double>& w) const
    {
        if (kind == AxisKind::GaussLegendre) {
            gauss_legendre(count, x, w);
            const double c = 0.5 * (hi + lo), r = 0.5 * (hi - lo);
            for (std::size_t i = 0; i < count; ++i) {
                x[i] = c + r * x[i];
                w[i] *= r;
            }
            return;
        }
        const double h = spacing();
        x.resize(count);
        w.assign(count, h);
        for (std::size_t i = 0; i < count; ++i) x[i] = lo + h * static_cast<double>(i);
    }
};

inline Axis box_axis(std::string name, double lo, double hi, std::size_t count)
{
    return {AxisKind::UniformBox, lo, hi, count, std::move(name)};
}

struct GridSpec {
    std::vector<Axis> axes;

    std::size_t size() const
    {
        std::size_t n = 1;
        for (const auto& a : axes) n *= a.count;
        return n;
    }

    std::size_t dim() const { return axes.size(); }

    void validate(std::size_t budget = static_cast<std::size_t>(-1)) const
    {
        for (const auto& a : axes) {
            if (a.count < 2) throw Error("GridSpec: axis '" + a.name + "' needs count >= 2");
            if (!(a.lo < a.hi)) throw Error("GridSpec: axis '" + a.name + "' needs lo < hi");
        }
        if (size() > budget)
            throw BudgetExceeded("GridSpec: " + std::to_string(size()) + " points exceed budget " +
                                 std::to_string(budget));
    }
};

/// Cached per-axis nodes and weights with row-major index decoding.
class TensorRule {
public:
    explicit TensorRule(const GridSpec& g) : grid_(g)
    {
        x_.resize(g.dim());
        w_.resize(g.dim());
        for (std::size_t d = 0; d < g.dim(); ++d) g.axes[d].nodes(x_[d], w_[d]);
    }

    std::size_t size() const { return grid_.size(); }
    std::size_t dim() const { return grid_.dim(); }

    /// Point coordinates and weight of flat index i.
    double point(std::size_t i, std::span<double> out) const
    {
        double w = 1.0;
        for (std::size_t d = dim(); d-- > 0;) {
            const std::size_t n = grid_.axes[d].count, k = i % n;
            i /= n;
            out[d] = x_[d][k];
            w *= w_[d][k];
        }
        return w;
    }

    const std::vector<double>& nodes(std::size_t d) const { return x_[d]; }
    const std::vector<double>& weights(std::size_t d) const { return w_[d]; }

private:
    GridSpec grid_;
    std::vector<std::vector<double>> x_, w_;
};

// ----------------------------------------------------------------------------
// Sampled fields
// ----------------------------------------------------------------------------

struct SampledField {
    GridSpec grid;
    std::vector<cplx> values;

    void validate() const
    {
        if (values.size() != grid.size()) throw Error("SampledField: value count does not match grid");
        for (const auto& v : values)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw Error("SampledField: non-finite value");
    }
};

using PointFn = std::function<cplx(std::span<const double>)>;

inline SampledField sample(const GridSpec& g, const PointFn& f, std::size_t budget = static_cast<std::size_t>(-1))
{
    g.validate(budget);
    const TensorRule rule(g);
    SampledField out{g, std::vector<cplx>(g.size())};
    const std::size_t n = g.size(), blocks = (n + reduce_block - 1) / reduce_block;
    parallel_blocks(blocks, [&](std::size_t b) {
        std::vector<double> p(g.dim());
        for (std::size_t i = b * reduce_block; i < std::min(n, (b + 1) * reduce_block); ++i) {
            rule.point(i, p);
            out.values[i] = f(p);
        }
    });
    return out;
}

inline cplx integrate(const SampledField& f)
{
    const TensorRule rule(f.grid);
    return reduce_sum<cplx>(f.values.size(), [&](std::size_t i) {
        thread_local std::vector<double> p;
        p.resize(rule.dim());
        return rule.point(i, p) * f.values[i];
    });
}

/// Quadrature of a point function without storing samples.
inline cplx integrate(const GridSpec& g, const PointFn& f, std::size_t budget = static_cast<std::size_t>(-1))
{
    g.validate(budget);
    const TensorRule rule(g);
    return reduce_sum<cplx>(g.size(), [&](std::size_t i) {
        thread_local std::vector<double> p;
        p.resize(rule.dim());
        const double w = rule.point(i, p);
        return w * f(p);
    });
}

inline double norm2(const SampledField& f)
{
    const TensorRule rule(f.grid);
    return reduce_sum<double>(f.values.size(), [&](std::size_t i) {
        thread_local std::vector<double> p;
        p.resize(rule.dim());
        return rule.point(i, p) * std::norm(f.values[i]);
    });
}

// ----------------------------------------------------------------------------
// Discrete Fourier transform
// ----------------------------------------------------------------------------

struct FreqAxis {
    std::string name;
    std::size_t count = 0;
    double h = 1.0;   ///< spatial spacing
    double lo = 0.0;  ///< spatial origin
    bool transformed = true;

    double dxi() const { return 2.0 * pi / (static_cast<double>(count) * h); }

    /// Frequency of FFT-ordered index k.
    double xi(std::size_t k) const
    {
        const long n = static_cast<long>(count), kk = static_cast<long>(k);
        const long s = kk < (n + 1) / 2 ? kk : kk - n;
        return dxi() * static_cast<double>(s);
    }
};

/// Values in FFT order on transformed axes; untransformed axes keep their grid.
struct Spectrum {
    GridSpec grid;  ///< the spatial grid the spectrum came from
    std::vector<FreqAxis> axes;
    std::vector<cplx> values;

    /// Sum of |F|^2 times the spectral cell volume over transformed axes and
    /// the spatial weights over the rest.
    double norm2() const
    {
        const TensorRule rule(grid);
        double cell = 1.0;
        for (const auto& a : axes)
            if (a.transformed) cell *= a.dxi();
        return cell * reduce_sum<double>(values.size(), [&](std::size_t i) {
                   double w = 1.0;
                   std::size_t r = i;
                   for (std::size_t d = axes.size(); d-- > 0;) {
                       const std::size_t n = axes[d].count, k = r % n;
                       r /= n;
                       if (!axes[d].transformed) w *= rule.weights(d)[k];
                   }
                   return w * std::norm(values[i]);
               });
    }
};

namespace detail {

inline std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

/// In-place unnormalized DFT of data along the chosen axes.
inline void fft_axes(std::vector<cplx>& data, const std::vector<std::size_t>& shape,
                     const std::vector<bool>& chosen, int sign)
{
    std::vector<fftw_iodim> dims, loops;
    std::size_t stride = 1;
    for (std::size_t d = shape.size(); d-- > 0;) {
        fftw_iodim io{static_cast<int>(shape[d]), static_cast<int>(stride), static_cast<int>(stride)};
        (chosen[d] ? dims : loops).push_back(io);
        stride *= shape[d];
    }
    if (dims.empty()) return;
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        plan = fftw_plan_guru_dft(static_cast<int>(dims.size()), dims.data(), static_cast<int>(loops.size()),
                                  loops.data(), buf, buf, sign, FFTW_ESTIMATE);
    }
    if (!plan) throw Error("fftw: planning failed");
    fftw_execute(plan);
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
}

inline std::vector<bool> chosen_axes(const GridSpec& g, const std::vector<std::size_t>& axes)
{
    std::vector<bool> chosen(g.dim(), false);
    for (auto a : axes) {
        if (a >= g.dim()) throw Error("dft: axis index out of range");
        if (g.axes[a].kind == AxisKind::GaussLegendre)
            throw AxisKindMismatch("dft: axis '" + g.axes[a].name + "' is not uniform");
        chosen[a] = true;
    }
    return chosen;
}

} // namespace detail

inline std::vector<std::size_t> all_axes(const GridSpec& g)
{
    std::vector<std::size_t> a(g.dim());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = i;
    return a;
}

/// Approximates F(xi) = int f(X) e^{-i<xi,X>} dX on the chosen axes.
inline Spectrum dft_forward(const SampledField& f, const std::vector<std::size_t>& axes)
{
    const auto chosen = detail::chosen_axes(f.grid, axes);
    Spectrum s{f.grid, {}, f.values};
    std::vector<std::size_t> shape;
    for (std::size_t d = 0; d < f.grid.dim(); ++d) {
        const auto& a = f.grid.axes[d];
        s.axes.push_back({a.name, a.count, a.spacing(), a.lo, static_cast<bool>(chosen[d])});
        shape.push_back(a.count);
    }
    detail::fft_axes(s.values, shape, chosen, FFTW_FORWARD);
    // spacing and origin phase
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        std::size_t r = i;
        double phase = 0.0, scale = 1.0;
        for (std::size_t d = shape.size(); d-- > 0;) {
            const std::size_t k = r % shape[d];
            r /= shape[d];
            if (!chosen[d]) continue;
            phase -= s.axes[d].xi(k) * s.axes[d].lo;
            scale *= s.axes[d].h;
        }
        s.values[i] *= scale * std::polar(1.0, phase);
    }
    return s;
}

inline Spectrum dft_forward(const SampledField& f) { return dft_forward(f, all_axes(f.grid)); }

/// f(X) = (2pi)^{-d} int F(xi) e^{i<xi,X>} dxi on the transformed axes.
inline SampledField dft_inverse(const Spectrum& s)
{
    SampledField f{s.grid, s.values};
    std::vector<std::size_t> shape;
    std::vector<bool> chosen;
    for (const auto& a : s.axes) {
        shape.push_back(a.count);
        chosen.push_back(a.transformed);
    }
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        std::size_t r = i;
        double phase = 0.0, scale = 1.0;
        for (std::size_t d = shape.size(); d-- > 0;) {
            const std::size_t k = r % shape[d];
            r /= shape[d];
            if (!chosen[d]) continue;
            phase += s.axes[d].xi(k) * s.axes[d].lo;
            scale *= s.axes[d].dxi() / (2.0 * pi);
        }
        f.values[i] *= scale * std::polar(1.0, phase);
    }
    detail::fft_axes(f.values, shape, chosen, FFTW_BACKWARD);
    return f;
}

/// Closed-form transform of exp(-(x-mu)^2/(2 sigma^2)).
inline cplx gaussian_ft_1d(double xi, double mu, double sigma)
{
    return std::sqrt(2.0 * pi) * sigma * std::exp(-0.5 * sigma * sigma * xi * xi) * std::polar(1.0, -xi * mu);
}

// ----------------------------------------------------------------------------
// Monte Carlo
// ----------------------------------------------------------------------------

/// Gaussian sampler N(mu, Sigma) through a Cholesky factor.
struct GaussianSampler {
    Eigen::VectorXd mu;
    Eigen::MatrixXd chol;  ///< lower factor of Sigma
    double log_norm = 0.0; ///< log of the density normalizer

    static GaussianSampler make(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma)
    {
        GaussianSampler s;
        s.mu = mu;
        Eigen::LLT<Eigen::MatrixXd> llt(sigma);
        if (llt.info() != Eigen::Success) throw Error("GaussianSampler: covariance not positive definite");
        s.chol = llt.matrixL();
        double logdet = 0.0;
        for (Eigen::Index i = 0; i < mu.size(); ++i) logdet += 2.0 * std::log(s.chol(i, i));
        s.log_norm = -0.5 * (static_cast<double>(mu.size()) * std::log(2.0 * pi) + logdet);
        return s;
    }

    static GaussianSampler isotropic(std::size_t dim, double sigma, double center = 0.0)
    {
        return make(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(dim), center),
                    sigma * sigma * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)));
    }

    std::size_t dim() const { return static_cast<std::size_t>(mu.size()); }

    /// Draws sample i; returns its density.
    double draw(const Philox& gen, std::uint64_t i, std::span<double> out) const
    {
        thread_local std::vector<double> z;
        z.resize(dim());
        gen.normals(i, z);
        const Eigen::Map<const Eigen::VectorXd> zv(z.data(), static_cast<Eigen::Index>(dim()));
        const Eigen::VectorXd x = mu + chol * zv;
        for (std::size_t k = 0; k < dim(); ++k) out[k] = x(static_cast<Eigen::Index>(k));
        return std::exp(log_norm - 0.5 * zv.squaredNorm());
    }
};

struct McResult {
    cplx estimate{};
    double stderr_ = 0.0;
    std::size_t n = 0;
};

namespace detail {

struct Moments {
    cplx s{};
    double s2 = 0.0;
    Moments& operator+=(const Moments& o)
    {
        s += o.s;
        s2 += o.s2;
        return *this;
    }
    friend Moments operator+(Moments a, const Moments& b) { return a += b; }
};

} // namespace detail

/// Mean of g(X) for X ~ sampler, with standard error.
inline McResult monte_carlo(const std::function<cplx(std::span<const double>, double density)>& g,
                            const GaussianSampler& sampler, std::size_t n, std::uint64_t seed,
                            std::size_t budget = static_cast<std::size_t>(-1))
{
    if (n < 1000) throw Error("monte_carlo: n must be at least 1000");
    if (n > budget) throw BudgetExceeded("monte_carlo: " + std::to_string(n) + " samples exceed budget");
    const Philox gen(seed, 0x4d43);
    const auto m = reduce_sum<detail::Moments>(n, [&](std::size_t i) {
        thread_local std::vector<double> x;
        x.resize(sampler.dim());
        const double p = sampler.draw(gen, i, x);
        const cplx v = g(x, p);
        return detail::Moments{v, std::norm(v)};
    });
    McResult r;
    r.n = n;
    r.estimate = m.s / static_cast<double>(n);
    const double var = std::max(0.0, m.s2 / static_cast<double>(n) - std::norm(r.estimate));
    r.stderr_ = std::sqrt(var * static_cast<double>(n) / static_cast<double>(n - 1) / static_cast<double>(n));
    return r;
}

/// Importance-sampled estimate of int f(X) dX.
inline McResult importance_integral(const PointFn& f, const GaussianSampler& sampler, std::size_t n,
                                    std::uint64_t seed, std::size_t budget = static_cast<std::size_t>(-1))
{
    return monte_carlo([&](std::span<const double> x, double p) { return f(x) / p; }, sampler, n, seed, budget);
}

} // namespace lgha
