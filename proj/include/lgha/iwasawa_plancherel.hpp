#pragma once

#include "groups.hpp"
#include "nilfourier.hpp"
#include "peterweyl.hpp"
#include "quadrature.hpp"

#include <optional>

namespace lgha {

// ----------------------------------------------------------------------------
// Separable Euclidean factors
// ----------------------------------------------------------------------------

/// coef * prod_i p_i(x_i) with Gaussian-times-polynomial p_i.
struct EuclidFactor {
    cplx coef = 1.0;
    std::vector<GaussPoly1D> axes;

    std::size_t dim() const { return axes.size(); }

    cplx operator()(std::span<const double> x) const
    {
        cplx v = coef;
        for (std::size_t i = 0; i < axes.size(); ++i) v *= axes[i](x[i]);
        return v;
    }

    cplx ft(std::span<const double> xi) const
    {
        cplx v = coef;
        for (std::size_t i = 0; i < axes.size(); ++i) v *= axes[i].ft(xi[i]);
        return v;
    }

    Axis axis(std::size_t i, std::size_t count) const
    {
        const auto& p = axes[i];
        return box_axis("x" + std::to_string(i + 1), p.mu - 12 * p.sigma, p.mu + 12 * p.sigma, count);
    }

    /// int |f|^2 by 1-D quadratures.
    double norm2(std::size_t count = 1024) const
    {
        double v = std::norm(coef);
        for (std::size_t i = 0; i < axes.size(); ++i) {
            const GridSpec g{{axis(i, count)}};
            v *= norm2(sample(g, [&](std::span<const double> x) { return axes[i](x[0]); }));
        }
        return v;
    }

    static double norm2(const SampledField& f) { return lgha::norm2(f); }

    /// Per-axis DFT spectra.
    std::vector<Spectrum> spectra(std::size_t count = 1024) const
    {
        std::vector<Spectrum> out;
        for (std::size_t i = 0; i < axes.size(); ++i) {
            const GridSpec g{{axis(i, count)}};
            out.push_back(dft_forward(sample(g, [&](std::span<const double> x) { return axes[i](x[0]); })));
        }
        return out;
    }

    static EuclidFactor gaussian(std::size_t dim, double sigma, double mu = 0.0)
    {
        EuclidFactor f;
        f.axes.assign(dim, GaussPoly1D{mu, sigma, {1.0, 0.0, 0.0}});
        return f;
    }

    static EuclidFactor random(Rng& rng, std::size_t dim, double smin = 0.5, double smax = 1.5, double mu_max = 0.5)
    {
        EuclidFactor f;
        for (std::size_t i = 0; i < dim; ++i) {
            GaussPoly1D p{rng.uniform(-mu_max, mu_max), rng.uniform(smin, smax), {1.0, 0.0, 0.0}};
            if (i % 2 == 0) p.c = {1.0, cplx(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)), rng.uniform(-0.1, 0.1)};
            f.axes.push_back(p);
        }
        return f;
    }
};

/// (2 pi)^-D int |F|^2 dxi from stored per-axis spectra.
inline double spectral_norm2(cplx coef, const std::vector<Spectrum>& s)
{
    double v = std::norm(coef);
    for (const auto& sp : s) v *= sp.norm2() / (2 * pi);
    return v;
}

// ----------------------------------------------------------------------------
// KNA coordinates on SL(4)
// ----------------------------------------------------------------------------

struct KNACoords {
    Mat4 k = Mat4::Identity();
    Euler left, right;  ///< a lift of k to SU(2) x SU(2)
    NilPoint6 n;        ///< the N factor in g = k n a
    LogA3 t = LogA3::Zero();  ///< log A
};

inline Mat4 kna_matrix(const Mat4& k, const NilPoint6& n, const LogA3& t) { return k * nil_to_matrix(n) * a_from_log(t); }

/// g = k n a from the k a n' decomposition with n = a n' a^-1.
inline KNACoords kna_coords(const Mat4& g)
{
    const IwasawaFactors f = iwasawa_decompose(MatrixElement::make(g, Tag::SL4));
    KNACoords c;
    c.k = f.k;
    c.t = f.logA;
    c.n = conjugate_by_a(f.logA, nil_from_matrix(f.n));
    const auto [UL, UR] = su2_from_so4(f.k);
    c.left = euler_from_su2(UL);
    c.right = euler_from_su2(UR);
    return c;
}

/// f(v0, k n a) = r(v0) u(k) v(n) w(t); r is absent on SL(4).
struct SeparableKNAFunction {
    BandLimited u;
    EuclidFactor v;  ///< six N coordinates x1..x6
    EuclidFactor w;  ///< three log A coordinates
    std::optional<EuclidFactor> r;  ///< translation part on R^4

    cplx at(const Euler& l, const Euler& rr, const NilPoint6& n, const LogA3& t) const
    {
        const auto c = n.coords();
        return u(l, rr) * v(c) * w(std::span<const double>(t.data(), 3));
    }

    /// Value at a group element through its Iwasawa coordinates.
    cplx operator()(const Mat4& g) const
    {
        const KNACoords c = kna_coords(g);
        return at(c.left, c.right, c.n, c.t);
    }

    cplx operator()(const Vec4& v0, const Mat4& g) const
    {
        return (r ? (*r)(std::span<const double>(v0.data(), 4)) : cplx(1.0)) * (*this)(g);
    }
};

/// T F f(lambda, xi, gamma) = Tu(gamma) Fv(xi) Fw(lambda), with the optional R^4 factor Fr(eta).
struct KNASpectrum {
    CompactSpectrum Tu;
    cplx v_coef = 1.0, w_coef = 1.0, r_coef = 1.0;
    std::vector<Spectrum> v, w, r;  ///< per-axis DFT spectra

    std::size_t euclid_dim() const { return v.size() + w.size() + r.size(); }

    /// Scalar Euclidean part at FFT indices.
    cplx euclid_at(const std::vector<std::size_t>& kxi, const std::vector<std::size_t>& klambda,
                   const std::vector<std::size_t>& keta = {}) const
    {
        cplx s = v_coef * w_coef * (r.empty() ? cplx(1.0) : r_coef);
        for (std::size_t i = 0; i < v.size(); ++i) s *= v[i].values[kxi[i]];
        for (std::size_t i = 0; i < w.size(); ++i) s *= w[i].values[klambda[i]];
        for (std::size_t i = 0; i < r.size(); ++i) s *= r[i].values[keta[i]];
        return s;
    }

    MatXc at(const IrrepLabel& l, const std::vector<std::size_t>& kxi, const std::vector<std::size_t>& klambda,
             const std::vector<std::size_t>& keta = {}) const
    {
        return Tu.at(l) * euclid_at(kxi, klambda, keta);
    }

    /// sum_gamma d_gamma (2 pi)^-D int ||T F f||_HS^2.
    double norm2() const
    {
        double s = spectrum_norm2(Tu) * spectral_norm2(v_coef, v) * spectral_norm2(w_coef, w);
        if (!r.empty()) s *= spectral_norm2(r_coef, r);
        return s;
    }
};

inline KNASpectrum kna_transform(const SeparableKNAFunction& f, int two_J, std::size_t count = 1024)
{
    KNASpectrum s;
    const auto q = so4_quadrature(two_J);
    s.Tu = compact_transform(f.u.sample(q), two_J, q);
    s.v_coef = f.v.coef;
    s.w_coef = f.w.coef;
    s.v = f.v.spectra(count);
    s.w = f.w.spectra(count);
    if (f.r) {
        s.r_coef = f.r->coef;
        s.r = f.r->spectra(count);
    }
    return s;
}

/// Transform including the R^4 factor e^{-i <eta, v>}.
inline KNASpectrum semidirect_transform(const SeparableKNAFunction& f, int two_J, std::size_t count = 1024)
{
    if (!f.r) throw ConfigError("semidirect_transform: needs the translation factor");
    return kna_transform(f, two_J, count);
}

struct PlancherelTriple {
    double lhs = 0, rhs = 0, rel_err = 0;
};

inline double group_norm2(const SeparableKNAFunction& f, int two_J, std::size_t count = 1024)
{
    const auto q = so4_quadrature(two_J);
    const auto U = f.u.sample(q);
    const std::size_t nr = q.right.size();
    double s = reduce_sum<double>(U.size(), [&](std::size_t i) { return q.weight(i / nr, i % nr) * std::norm(U[i]); });
    s *= f.v.norm2(count) * f.w.norm2(count);
    if (f.r) s *= f.r->norm2(count);
    return s;
}

/// lhs = ||u||^2 ||v||^2 ||w||^2 under dk dn dt; rhs = sum d_gamma (2 pi)^-9 int int ||T F f||^2.
inline PlancherelTriple plancherel_sl4_check(const SeparableKNAFunction& f, int two_J, std::size_t count = 1024)
{
    PlancherelTriple p;
    p.lhs = group_norm2(f, two_J, count);
    p.rhs = kna_transform(f, two_J, count).norm2();
    p.rel_err = relerr(p.lhs, p.rhs);
    return p;
}

/// Same with the R^4 factor and (2 pi)^-13.
inline PlancherelTriple plancherel_P_check(const SeparableKNAFunction& f, int two_J, std::size_t count = 1024)
{
    PlancherelTriple p;
    p.lhs = group_norm2(f, two_J, count);
    p.rhs = semidirect_transform(f, two_J, count).norm2();
    p.rel_err = relerr(p.lhs, p.rhs);
    return p;
}

// ----------------------------------------------------------------------------
// Nested quadrature spot checks
// ----------------------------------------------------------------------------

struct SpectralPoint {
    IrrepLabel label;
    std::array<double, 6> xi{};
    std::array<double, 3> lambda{};
    std::array<double, 4> eta{};
};

struct NestedRules {
    EulerQuadSO4 K;
    GridSpec N, A;
    std::optional<GridSpec> V;  ///< translation part
};

inline NestedRules nested_rules(const SeparableKNAFunction& f, int two_J_rule, std::size_t n_nodes, std::size_t a_nodes,
                                std::size_t v_nodes = 3)
{
    auto gl = [](const EuclidFactor& e, std::size_t count) {
        GridSpec g;
        for (std::size_t i = 0; i < e.dim(); ++i) {
            const auto& p = e.axes[i];
            g.axes.push_back({AxisKind::GaussLegendre, p.mu - 3 * p.sigma, p.mu + 3 * p.sigma, count, "x" + std::to_string(i + 1)});
        }
        return g;
    };
    NestedRules r{so4_quadrature(two_J_rule), gl(f.v, n_nodes), gl(f.w, a_nodes), std::nullopt};
    if (f.r) r.V = gl(*f.r, v_nodes);
    return r;
}

/// Each spectral point by one brute-force sum over K x N x A (x R^4): the group element
/// g = k n a is assembled, decomposed again, and the kernel is evaluated at the recovered factors.
inline std::vector<MatXc> nested_transform(const SeparableKNAFunction& f, const std::vector<SpectralPoint>& pts,
                                           const NestedRules& rules)
{
    const TensorRule N(rules.N), A(rules.A);
    const auto& K = rules.K;
    const std::size_t nk = K.size(), nn = N.size(), na = A.size(), nr = K.right.size();
    std::vector<MatXc> out;
    for (const auto& p : pts) out.push_back(MatXc::Zero(p.label.dim(), p.label.dim()));
    std::vector<std::vector<MatXc>> partial(nk);
    parallel_blocks(nk, [&](std::size_t ik) {
        const auto& l = K.left[ik / nr];
        const auto& r = K.right[ik % nr];
        const Mat4 k = so4_from_su2(su2_from_euler(l.angles), su2_from_euler(r.angles));
        std::vector<cplx> acc(pts.size(), 0.0);
        std::vector<MatXc> gam(pts.size());
        std::array<double, 6> nc{};
        std::array<double, 3> tc{};
        for (std::size_t in = 0; in < nn; ++in) {
            const double wn = N.point(in, nc);
            for (std::size_t ia = 0; ia < na; ++ia) {
                const double wa = A.point(ia, tc);
                const Mat4 g = kna_matrix(k, NilPoint6::from(nc), LogA3(tc[0], tc[1], tc[2]));
                const KNACoords c = kna_coords(g);
                const cplx val = wn * wa * f.at(c.left, c.right, c.n, c.t);
                const auto ncc = c.n.coords();
                for (std::size_t ip = 0; ip < pts.size(); ++ip) {
                    double phase = 0;
                    for (int i = 0; i < 6; ++i) phase += pts[ip].xi[i] * ncc[i];
                    for (int i = 0; i < 3; ++i) phase += pts[ip].lambda[i] * c.t(i);
                    acc[ip] += val * std::polar(1.0, -phase);
                    if (in == 0 && ia == 0) gam[ip] = so4_rep(pts[ip].label, c.left, c.right).adjoint();
                }
            }
        }
        partial[ik].resize(pts.size());
        for (std::size_t ip = 0; ip < pts.size(); ++ip) partial[ik][ip] = (l.weight * r.weight * acc[ip]) * gam[ip];
    });
    for (std::size_t ik = 0; ik < nk; ++ik)
        for (std::size_t ip = 0; ip < pts.size(); ++ip) out[ip] += partial[ik][ip];
    if (rules.V && f.r) {
        const TensorRule V(*rules.V);
        std::array<double, 4> vc{};
        for (std::size_t ip = 0; ip < pts.size(); ++ip) {
            cplx s = 0;
            for (std::size_t iv = 0; iv < V.size(); ++iv) {
                const double w = V.point(iv, vc);
                double phase = 0;
                for (int i = 0; i < 4; ++i) phase += pts[ip].eta[i] * vc[i];
                s += w * (*f.r)(vc) * std::polar(1.0, -phase);
            }
            out[ip] *= s;
        }
    }
    return out;
}

/// The same sums evaluated factor by factor with the same rules.
inline std::vector<MatXc> factorized_transform(const SeparableKNAFunction& f, const std::vector<SpectralPoint>& pts,
                                               const NestedRules& rules)
{
    const auto& K = rules.K;
    std::vector<MatXc> out;
    for (const auto& p : pts) {
        MatXc Tu = MatXc::Zero(p.label.dim(), p.label.dim());
        for (const auto& l : K.left)
            for (const auto& r : K.right)
                Tu += (l.weight * r.weight * f.u(l.angles, r.angles)) * so4_rep(p.label, l.angles, r.angles).adjoint();
        auto euclid = [](const EuclidFactor& e, const GridSpec& g, std::span<const double> freq) {
            const TensorRule rule(g);
            std::vector<double> x(g.dim());
            cplx s = 0;
            for (std::size_t i = 0; i < rule.size(); ++i) {
                const double w = rule.point(i, x);
                double phase = 0;
                for (std::size_t d = 0; d < x.size(); ++d) phase += freq[d] * x[d];
                s += w * e(x) * std::polar(1.0, -phase);
            }
            return s;
        };
        cplx s = euclid(f.v, rules.N, p.xi) * euclid(f.w, rules.A, p.lambda);
        if (rules.V && f.r) s *= euclid(*f.r, *rules.V, p.eta);
        out.push_back(Tu * s);
    }
    return out;
}

// ----------------------------------------------------------------------------
// SP(4): K = U(2), N = SP_N, A = diag(a1, a2, 1/a1, 1/a2)
// ----------------------------------------------------------------------------

inline Mat4 sp4_a(double t1, double t2)
{
    return Vec4(std::exp(t1), std::exp(t2), std::exp(-t1), std::exp(-t2)).asDiagonal();
}

inline Mat4 sp4_kna(const U2Point& k, const SpNPoint4& n, double t1, double t2)
{
    return u2_real_matrix(k) * spn_matrix(n) * sp4_a(t1, t2);
}

struct SP4Coords {
    U2Point k;
    SpNPoint4 n;
    double t1 = 0, t2 = 0;
};

inline U2Point u2_from_real(const Mat4& k)
{
    Mat2c g;
    g.real() = k.topLeftCorner<2, 2>();
    g.imag() = k.topRightCorner<2, 2>();
    const double phi = 0.5 * std::arg(g.determinant());
    return {phi, euler_from_su2(std::polar(1.0, -phi) * g)};
}

inline SP4Coords sp4_coords(const Mat4& g)
{
    const IwasawaFactors f = iwasawa_decompose(MatrixElement::make(g, Tag::SP4));
    SP4Coords c;
    c.k = u2_from_real(f.k);
    c.t1 = std::log(f.a(0, 0));
    c.t2 = std::log(f.a(1, 1));
    c.n = spn_from_matrix(f.a * f.n * f.a.inverse());
    return c;
}

/// f(k n a) = u(k) v(n) w(t1, t2) with u band-limited on U(2).
struct SeparableSP4Function {
    U2Spectrum u;  ///< coefficients: u(k) = sum d tr[C rho(k)]
    EuclidFactor v;  ///< (x, y, z, t)
    EuclidFactor w;  ///< (t1, t2)

    cplx u_at(const U2Point& p) const
    {
        cplx s = 0;
        for (const auto& [l, C] : u) s += double(l.dim()) * (C * u2_rep(l, p)).trace();
        return s;
    }

    cplx operator()(const Mat4& g) const
    {
        const SP4Coords c = sp4_coords(g);
        const double nv[4] = {c.n.x, c.n.y, c.n.z, c.n.t}, tv[2] = {c.t1, c.t2};
        return u_at(c.k) * v(nv) * w(tv);
    }
};

inline int u2_band(const U2Spectrum& u)
{
    int M = 0;
    for (const auto& [l, C] : u) M = std::max({M, std::abs(l.m1), std::abs(l.m2)});
    return M;
}

inline PlancherelTriple sp4_restrict_check(const SeparableSP4Function& f, std::size_t count = 1024)
{
    const int M = u2_band(f.u);
    const auto q = u2_quadrature(M);
    const U2Fn u = [&](const U2Point& p) { return f.u_at(p); };
    PlancherelTriple p;
    p.lhs = u2_norm2(u, q) * f.v.norm2(count) * f.w.norm2(count);
    double spec = 0;
    for (const auto& [l, T] : u2_transform(u, M, q)) spec += l.dim() * T.squaredNorm();
    p.rhs = spec * spectral_norm2(f.v.coef, f.v.spectra(count)) * spectral_norm2(f.w.coef, f.w.spectra(count));
    p.rel_err = relerr(p.lhs, p.rhs);
    return p;
}

struct LieDims {
    int k = 0, a = 0, n = 0, total = 0;
};

/// Dimensions of sp(4) intersected with so(4), the diagonal, the SP_N pattern, and sp(4) itself.
inline LieDims sp4_lie_dims()
{
    auto dim_of = [](const std::function<bool(int, int)>& allowed, bool antisym) {
        std::vector<std::pair<int, int>> slots;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                if (allowed(i, j)) slots.emplace_back(i, j);
        const int m = static_cast<int>(slots.size());
        // constraints: X^T J + J X = 0 (16 equations), optionally X + X^T = 0
        Eigen::MatrixXd C = Eigen::MatrixXd::Zero(32, m);
        const Mat4 J = symplectic_J();
        for (int s = 0; s < m; ++s) {
            Mat4 E = Mat4::Zero();
            E(slots[s].first, slots[s].second) = 1.0;
            const Mat4 h = E.transpose() * J + J * E;
            const Mat4 o = antisym ? Mat4(E + E.transpose()) : Mat4::Zero();
            for (int e = 0; e < 16; ++e) {
                C(e, s) = h.data()[e];
                C(16 + e, s) = o.data()[e];
            }
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(C);
        return m - static_cast<int>(lu.rank());
    };
    const Mat4 P = swap34();
    LieDims d;
    d.k = dim_of([](int, int) { return true; }, true);
    d.a = dim_of([](int i, int j) { return i == j; }, false);
    // strictly upper after conjugation by swap34
    d.n = dim_of([&](int i, int j) {
        int pi_ = -1, pj = -1;
        for (int r = 0; r < 4; ++r) {
            if (P(r, i) != 0) pi_ = r;
            if (P(r, j) != 0) pj = r;
        }
        return pi_ < pj;
    }, false);
    d.total = dim_of([](int, int) { return true; }, false);
    return d;
}

// ----------------------------------------------------------------------------
// Semidirect product R^4 x SL(4)
// ----------------------------------------------------------------------------

struct AffinePoint {
    Vec4 v = Vec4::Zero();
    Mat4 g = Mat4::Identity();
};

inline AffinePoint affine_mul(const AffinePoint& a, const AffinePoint& b) { return {a.v + a.g * b.v, a.g * b.g}; }

inline AffinePoint affine_inv(const AffinePoint& a)
{
    const Mat4 gi = a.g.inverse();
    return {-(gi * a.v), gi};
}

inline Eigen::Matrix<double, 5, 5> affine_matrix(const AffinePoint& a)
{
    Eigen::Matrix<double, 5, 5> m = Eigen::Matrix<double, 5, 5>::Identity();
    m.topLeftCorner<4, 4>() = a.g;
    m.topRightCorner<4, 1>() = a.v;
    return m;
}

// ----------------------------------------------------------------------------
// Lifts
// ----------------------------------------------------------------------------

using GFn = std::function<cplx(const Mat4&)>;
using PFn = std::function<cplx(const Vec4&, const Mat4&)>;

/// Upsilon(f)(g, k1) = f(g k1).
inline std::function<cplx(const Mat4&, const Mat4&)> lift_upsilon(GFn f)
{
    return [f = std::move(f)](const Mat4& g, const Mat4& k1) { return f(g * k1); };
}

/// f~(v, g, h) = f(g v, g h).
inline std::function<cplx(const Vec4&, const Mat4&, const Mat4&)> lift_semidirect(PFn f)
{
    return [f = std::move(f)](const Vec4& v, const Mat4& g, const Mat4& h) { return f(g * v, g * h); };
}

/// h(f)(v, g) = f(g v, g).
inline PFn lift_h(PFn f)
{
    return [f = std::move(f)](const Vec4& v, const Mat4& g) { return f(g * v, g); };
}

} // namespace lgha
