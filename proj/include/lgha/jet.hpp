#pragma once

#include "poly.hpp"

#include <algorithm>

namespace lgha {

using Vec3 = std::array<double, 3>;

inline constexpr int jet_degree = 4;
inline constexpr std::size_t jet_size = 35;

namespace detail {

struct JetTables {
    std::array<Mono, jet_size> mono{};
    std::array<int, 5 * 5 * 5> index{};  // [a][b][c] flattened, -1 when degree > 4
    std::vector<std::array<std::uint8_t, 3>> products;  // (i, j, k) with mono[i] + mono[j] = mono[k], by degree of k
    std::array<std::size_t, jet_degree + 1> products_upto{};  // products with output degree <= d
    std::array<std::size_t, jet_degree + 1> size_upto{};      // monomials of degree <= d

    int at(int a, int b, int c) const
    {
        if (a < 0 || b < 0 || c < 0 || a + b + c > jet_degree) return -1;
        return index[(a * 5 + b) * 5 + c];
    }

    JetTables()
    {
        index.fill(-1);
        int n = 0;
        for (int d = 0; d <= jet_degree; ++d)
            for (int a = d; a >= 0; --a)
                for (int b = d - a; b >= 0; --b) {
                    const int c = d - a - b;
                    mono[n] = {a, b, c};
                    index[(a * 5 + b) * 5 + c] = n++;
                }
        for (std::size_t i = 0; i < jet_size; ++i)
            for (std::size_t j = 0; j < jet_size; ++j) {
                const int k = at(mono[i][0] + mono[j][0], mono[i][1] + mono[j][1], mono[i][2] + mono[j][2]);
                if (k >= 0)
                    products.push_back({static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(j),
                                        static_cast<std::uint8_t>(k)});
            }
        std::stable_sort(products.begin(), products.end(),
                         [this](const auto& a, const auto& b) { return mono_degree(mono[a[2]]) < mono_degree(mono[b[2]]); });
        for (int d = 0; d <= jet_degree; ++d) {
            products_upto[d] = 0;
            for (const auto& p : products)
                if (mono_degree(mono[p[2]]) <= d) ++products_upto[d];
            size_upto[d] = 0;
            for (const auto& m : mono)
                if (mono_degree(m) <= d) ++size_upto[d];
        }
    }
};

inline const JetTables& jet_tables()
{
    static const JetTables t;
    return t;
}

} // namespace detail

/// Truncated Taylor expansion sum_a c_a (p - p0)^a in (z, y, x), total
/// degree <= 4. Coefficients are f^(a)(p0)/a!. valid is the degree up to
/// which the coefficients are exact; derivatives lower it.
class Jet {
public:
    std::array<cplx, jet_size> c{};
    int valid = jet_degree;

    static int index(const Mono& m) { return detail::jet_tables().at(m[0], m[1], m[2]); }
    static const Mono& mono(std::size_t i) { return detail::jet_tables().mono[i]; }

    static Jet constant(cplx v)
    {
        Jet j;
        j.c[0] = v;
        return j;
    }

    /// The coordinate function k expanded at value v.
    static Jet variable(int k, double v)
    {
        Jet j = constant(v);
        Mono m{0, 0, 0};
        m[k] = 1;
        j.c[index(m)] = 1.0;
        return j;
    }

    cplx value() const { return c[0]; }

    /// Drops coefficients above degree d.
    Jet truncated(int d) const
    {
        Jet r = *this;
        if (d >= valid) return r;
        r.valid = d;
        for (std::size_t i = detail::jet_tables().size_upto[static_cast<std::size_t>(d)]; i < jet_size; ++i) r.c[i] = 0.0;
        return r;
    }

    /// Taylor coefficient for multi-index m.
    cplx coef(const Mono& m) const
    {
        const int i = index(m);
        return i < 0 ? cplx{} : c[i];
    }

    /// Exact partial derivative d^m f(p0) when |m| <= valid.
    cplx derivative(const Mono& m) const
    {
        if (mono_degree(m) > valid) throw DegreeOverflow("Jet: derivative order exceeds valid degree");
        double f = 1.0;
        for (int k = 0; k < 3; ++k)
            for (int j = 2; j <= m[k]; ++j) f *= j;
        return f * coef(m);
    }

    Jet& operator+=(const Jet& o)
    {
        for (std::size_t i = 0; i < jet_size; ++i) c[i] += o.c[i];
        valid = std::min(valid, o.valid);
        return *this;
    }
    Jet& operator-=(const Jet& o)
    {
        for (std::size_t i = 0; i < jet_size; ++i) c[i] -= o.c[i];
        valid = std::min(valid, o.valid);
        return *this;
    }
    Jet& operator*=(cplx s)
    {
        for (auto& v : c) v *= s;
        return *this;
    }
    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(Jet a, cplx s) { return a *= s; }
    friend Jet operator*(cplx s, Jet a) { return a *= s; }
    friend Jet operator*(const Jet& a, const Jet& b)
    {
        Jet r;
        r.valid = std::min(a.valid, b.valid);
        const auto& t = detail::jet_tables();
        const std::size_t n = t.products_upto[static_cast<std::size_t>(std::max(r.valid, 0))];
        for (std::size_t q = 0; q < n; ++q) {
            const auto& [i, j, k] = t.products[q];
            r.c[k] += a.c[i] * b.c[j];
        }
        return r;
    }

    /// d/d(coordinate k); the valid degree drops by one.
    Jet diff(int k) const
    {
        if (valid < 1) throw DegreeOverflow("Jet: differentiation beyond valid degree");
        Jet r;
        r.valid = valid - 1;
        for (std::size_t i = 0; i < jet_size; ++i) {
            Mono m = mono(i);
            ++m[k];
            const int s = index(m);
            if (s >= 0) r.c[i] = static_cast<double>(m[k]) * c[s];
        }
        return r;
    }

    Jet diff(const Mono& alpha) const
    {
        Jet r = *this;
        for (int k = 0; k < 3; ++k)
            for (int j = 0; j < alpha[k]; ++j) r = r.diff(k);
        return r;
    }

    /// exp of the jet through the series of its non-constant part.
    Jet exp() const
    {
        Jet h = *this;
        h.c[0] = 0.0;
        Jet term = constant(1.0), sum = constant(1.0);
        for (int n = 1; n <= jet_degree; ++n) {
            term = term * h;
            term *= 1.0 / n;
            sum += term;
        }
        sum *= std::exp(c[0]);
        sum.valid = valid;
        return sum;
    }
};

/// Jet at p0 of the polynomial q (exact up to degree 4).
inline Jet poly_jet(const Poly& q, const Vec3& p0, int degree = jet_degree)
{
    Jet r;
    r.valid = degree;
    const std::size_t n = detail::jet_tables().size_upto[static_cast<std::size_t>(std::clamp(degree, 0, jet_degree))];
    for (const auto& [m, coef] : q.terms()) {
        // (p0 + d)^m expanded binomially in each coordinate
        const cplx cv = coef.value();
        for (std::size_t i = 0; i < n; ++i) {
            const Mono& e = Jet::mono(i);
            double t = 1.0;
            for (int k = 0; k < 3 && t != 0.0; ++k) {
                if (e[k] > m[k]) t = 0.0;
                else {
                    double b = 1.0;
                    for (int j = 0; j < e[k]; ++j) b = b * (m[k] - j) / (j + 1);
                    for (int j = 0; j < m[k] - e[k]; ++j) b *= p0[k];
                    t *= b;
                }
            }
            if (t != 0.0) r.c[i] += cv * t;
        }
    }
    return r;
}

/// Jet of g o m at p0, given the jet of g at m(p0) and the jets of the
/// components of m at p0.
inline Jet compose(const Jet& g, const std::array<Jet, 3>& m)
{
    const int v = std::max(0, std::min({g.valid, m[0].valid, m[1].valid, m[2].valid}));
    std::array<std::array<Jet, jet_degree + 1>, 3> pw;
    for (int k = 0; k < 3; ++k) {
        Jet d = m[k].truncated(v);
        d.c[0] = 0.0;
        pw[k][0] = Jet::constant(1.0);
        pw[k][0].valid = v;
        for (int n = 1; n <= v; ++n) pw[k][n] = pw[k][n - 1] * d;
    }
    Jet r;
    r.valid = v;
    const std::size_t n = detail::jet_tables().size_upto[static_cast<std::size_t>(v)];
    for (std::size_t i = 0; i < n; ++i) {
        if (g.c[i] == cplx{}) continue;
        const Mono& a = Jet::mono(i);
        r += g.c[i] * (pw[0][a[0]] * pw[1][a[1]] * pw[2][a[2]]);
    }
    r.valid = v;
    return r;
}

/// Function providing degree-4 jets at any point.
using JetFn = std::function<Jet(const Vec3&)>;

// ----------------------------------------------------------------------------
// Test-function corpus with closed-form jets
// ----------------------------------------------------------------------------

/// 1-D Taylor coefficients of exp(-s (u - mu)^2) at u0 through Hermite
/// polynomials: c_n = e^{-s d^2} H_n(sqrt(s) d) (-sqrt(s))^n / n!.
inline std::array<double, jet_degree + 1> gaussian_taylor_1d(double s, double mu, double u0)
{
    const double d = u0 - mu, r = std::sqrt(s), x = r * d;
    std::array<double, jet_degree + 1> h{1.0, 2.0 * x, 0, 0, 0};
    for (int n = 2; n <= jet_degree; ++n) h[n] = 2.0 * x * h[n - 1] - 2.0 * (n - 1) * h[n - 2];
    std::array<double, jet_degree + 1> out{};
    double f = std::exp(-s * d * d), pw = 1.0, fact = 1.0;
    for (int n = 0; n <= jet_degree; ++n) {
        if (n > 0) {
            pw *= -r;
            fact *= n;
        }
        out[n] = f * h[n] * pw / fact;
    }
    return out;
}

struct CorpusFn {
    std::string name;
    JetFn jet;
    std::function<cplx(const Vec3&)> value;
};

/// amp * exp(i <k, p>).
inline CorpusFn plane_wave(const Vec3& k, cplx amp = 1.0)
{
    auto jet = [k, amp](const Vec3& p) {
        Jet j;
        const cplx v = amp * std::polar(1.0, k[0] * p[0] + k[1] * p[1] + k[2] * p[2]);
        for (std::size_t i = 0; i < jet_size; ++i) {
            const Mono& m = Jet::mono(i);
            cplx t = v;
            for (int a = 0; a < 3; ++a)
                for (int n = 1; n <= m[a]; ++n) t *= I * k[a] / static_cast<double>(n);
            j.c[i] = t;
        }
        return j;
    };
    auto value = [k, amp](const Vec3& p) { return amp * std::polar(1.0, k[0] * p[0] + k[1] * p[1] + k[2] * p[2]); };
    return {"plane_wave", jet, value};
}

/// amp * q(p) * exp(-sum_a s_a (p_a - mu_a)^2).
inline CorpusFn gaussian_poly(const Vec3& s, const Vec3& mu, cplx amp = 1.0, Poly q = Poly(1))
{
    const bool plain = q == Poly(1);
    auto jet = [=](const Vec3& p) {
        std::array<std::array<double, jet_degree + 1>, 3> t;
        for (int a = 0; a < 3; ++a) t[a] = gaussian_taylor_1d(s[a], mu[a], p[a]);
        Jet j;
        for (std::size_t i = 0; i < jet_size; ++i) {
            const Mono& m = Jet::mono(i);
            j.c[i] = amp * (t[0][m[0]] * t[1][m[1]] * t[2][m[2]]);
        }
        if (!plain) j = j * poly_jet(q, p);
        return j;
    };
    auto value = [=](const Vec3& p) {
        double e = 0.0;
        for (int a = 0; a < 3; ++a) e += s[a] * (p[a] - mu[a]) * (p[a] - mu[a]);
        return amp * q(p) * std::exp(-e);
    };
    return {q == Poly(1) ? "gaussian" : "gaussian_poly", jet, value};
}

/// Ten functions: four plane waves, three Gaussians, three Gaussian times
/// polynomial, with random parameters.
inline std::vector<CorpusFn> standard_corpus(std::uint64_t seed)
{
    Rng rng(seed, 0x6a657473);
    std::vector<CorpusFn> out;
    auto amp = [&] { return cplx(rng.uniform(-1, 1), rng.uniform(-1, 1)); };
    for (int n = 0; n < 4; ++n) out.push_back(plane_wave({rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)}, amp()));
    auto gauss_params = [&] {
        Vec3 s{rng.uniform(0.3, 1.0), rng.uniform(0.3, 1.0), rng.uniform(0.3, 1.0)};
        Vec3 mu{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
        return std::pair{s, mu};
    };
    for (int n = 0; n < 3; ++n) {
        const auto [s, mu] = gauss_params();
        out.push_back(gaussian_poly(s, mu, amp()));
    }
    for (int n = 0; n < 3; ++n) {
        const auto [s, mu] = gauss_params();
        const Poly q = Poly(1) + Poly::x() * Poly::y() - Poly(CRational(Rat(1, 2))) * Poly::z() * Poly::z() +
                       Poly(CRational(Rat(n + 1, 3), Rat(1))) * Poly::x();
        out.push_back(gaussian_poly(s, mu, amp(), q));
    }
    return out;
}

/// Uniform points in [-r, r]^3.
inline std::vector<Vec3> random_points(std::uint64_t seed, std::size_t n, double r = 1.5)
{
    Rng rng(seed, 0x706f696e);
    std::vector<Vec3> pts(n);
    for (auto& p : pts) p = {rng.uniform(-r, r), rng.uniform(-r, r), rng.uniform(-r, r)};
    return pts;
}

} // namespace lgha
