#pragma once

#include "jet.hpp"

#include <Eigen/Dense>

#include <variant>

namespace lgha {

// ----------------------------------------------------------------------------
// Differential operators with polynomial coefficients
// ----------------------------------------------------------------------------

inline long long binomial(int n, int k)
{
    long long r = 1;
    for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
    return r;
}

/// sum_a c_a(z, y, x) d^a with a = (a_z, a_y, a_x); canonical (like terms merged).
class PolyDiffOp {
public:
    PolyDiffOp() = default;

    /// The single term c d^a.
    static PolyDiffOp term(const Poly& c, const Mono& a)
    {
        PolyDiffOp o;
        o.add(a, c);
        return o;
    }
    static PolyDiffOp identity() { return term(Poly(1), {0, 0, 0}); }
    static PolyDiffOp dz() { return term(Poly(1), {1, 0, 0}); }
    static PolyDiffOp dy() { return term(Poly(1), {0, 1, 0}); }
    static PolyDiffOp dx() { return term(Poly(1), {0, 0, 1}); }

    const std::map<Mono, Poly>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    int order() const
    {
        int d = 0;
        for (const auto& [a, c] : terms_) d = std::max(d, mono_degree(a));
        return d;
    }

    bool constant_coefficients() const
    {
        for (const auto& [a, c] : terms_)
            if (!c.is_constant()) return false;
        return true;
    }

    PolyDiffOp& operator+=(const PolyDiffOp& o)
    {
        for (const auto& [a, c] : o.terms_) add(a, c);
        return *this;
    }
    PolyDiffOp& operator-=(const PolyDiffOp& o)
    {
        for (const auto& [a, c] : o.terms_) add(a, -c);
        return *this;
    }
    friend PolyDiffOp operator+(PolyDiffOp a, const PolyDiffOp& b) { return a += b; }
    friend PolyDiffOp operator-(PolyDiffOp a, const PolyDiffOp& b) { return a -= b; }
    PolyDiffOp operator-() const { return PolyDiffOp{} - *this; }

    /// Left multiplication by a polynomial.
    friend PolyDiffOp operator*(const Poly& q, const PolyDiffOp& o)
    {
        PolyDiffOp r;
        for (const auto& [a, c] : o.terms_) r.add(a, q * c);
        return r;
    }

    /// Composition (A B) f = A (B f) by the Leibniz rule.
    friend PolyDiffOp operator*(const PolyDiffOp& A, const PolyDiffOp& B)
    {
        PolyDiffOp r;
        for (const auto& [alpha, a] : A.terms_)
            for (const auto& [beta, b] : B.terms_)
                for (int g0 = 0; g0 <= alpha[0]; ++g0)
                    for (int g1 = 0; g1 <= alpha[1]; ++g1)
                        for (int g2 = 0; g2 <= alpha[2]; ++g2) {
                            const Poly db = b.diff(Mono{g0, g1, g2});
                            if (db.is_zero()) continue;
                            const long long k = binomial(alpha[0], g0) * binomial(alpha[1], g1) * binomial(alpha[2], g2);
                            r.add({alpha[0] - g0 + beta[0], alpha[1] - g1 + beta[1], alpha[2] - g2 + beta[2]},
                                  Poly(k) * a * db);
                        }
        return r;
    }

    friend bool operator==(const PolyDiffOp& a, const PolyDiffOp& b) { return a.terms_ == b.terms_; }

    PolyDiffOp pow(int n) const
    {
        PolyDiffOp r = identity();
        for (int k = 0; k < n; ++k) r = r * *this;
        return r;
    }

    /// Jet of (this f) at p0 from the jet of f at p0.
    Jet apply(const Jet& f, const Vec3& p0) const
    {
        if (order() > f.valid)
            throw DegreeOverflow("PolyDiffOp: order " + std::to_string(order()) + " exceeds jet degree " +
                                 std::to_string(f.valid));
        Jet r;
        r.valid = f.valid - order();
        if (r.valid == 0) {
            for (const auto& [a, c] : terms_) r.c[0] += c(p0) * f.derivative(a);
            return r;
        }
        for (const auto& [a, c] : terms_) {
            Jet d = f.diff(a);
            r += c.is_constant() ? d * c.constant().value() : poly_jet(c, p0, f.valid) * d;
        }
        r.valid = f.valid - order();
        return r;
    }

    cplx apply(const JetFn& f, const Vec3& p) const { return apply(f(p), p).value(); }

    /// Full symbol sum_a c_a(p) (i xi)^a, xi ordered (z, y, x).
    cplx symbol(const Vec3& xi, const Vec3& p = {0, 0, 0}) const
    {
        cplx s = 0.0;
        for (const auto& [a, c] : terms_) s += c(p) * monomial_symbol(a, xi);
        return s;
    }

    /// Principal symbol: the top-order part of symbol().
    cplx principal_symbol(const Vec3& xi, const Vec3& p) const
    {
        const int m = order();
        cplx s = 0.0;
        for (const auto& [a, c] : terms_)
            if (mono_degree(a) == m) s += c(p) * monomial_symbol(a, xi);
        return s;
    }

    /// Canonical text in the operator DSL.
    std::string str() const
    {
        if (terms_.empty()) return "0";
        std::string s;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            const auto& [a, c] = *it;
            std::string t = "(" + c.str() + ")";
            for (int k = 0; k < 3; ++k) {
                if (a[k] == 0) continue;
                t += std::string("*d") + coord_names[k];
                if (a[k] > 1) t += "^" + std::to_string(a[k]);
            }
            s += s.empty() ? t : " + " + t;
        }
        return s;
    }

private:
    static cplx monomial_symbol(const Mono& a, const Vec3& xi)
    {
        cplx v = 1.0;
        for (int k = 0; k < 3; ++k)
            for (int j = 0; j < a[k]; ++j) v *= I * xi[k];
        return v;
    }

    void add(const Mono& a, const Poly& c)
    {
        auto& slot = terms_[a];
        slot += c;
        if (slot.is_zero()) terms_.erase(a);
    }

    std::map<Mono, Poly> terms_;
};

inline PolyDiffOp operator*(const CRational& c, const PolyDiffOp& o) { return Poly(c) * o; }

// ----------------------------------------------------------------------------
// Vector fields
// ----------------------------------------------------------------------------

/// p_z dz + p_y dy + p_x dx.
struct PolyVectorField {
    std::array<Poly, 3> p;

    PolyDiffOp op() const
    {
        return p[0] * PolyDiffOp::dz() + p[1] * PolyDiffOp::dy() + p[2] * PolyDiffOp::dx();
    }

    /// Derivative of a polynomial along the field.
    Poly apply(const Poly& f) const { return p[0] * f.diff(0) + p[1] * f.diff(1) + p[2] * f.diff(2); }

    Vec3 at(const Vec3& x) const { return {p[0].real_at(x), p[1].real_at(x), p[2].real_at(x)}; }

    PolyVectorField operator*(const CRational& c) const { return {{Poly(c) * p[0], Poly(c) * p[1], Poly(c) * p[2]}}; }
    friend PolyVectorField operator+(const PolyVectorField& a, const PolyVectorField& b)
    {
        return {{a.p[0] + b.p[0], a.p[1] + b.p[1], a.p[2] + b.p[2]}};
    }
    friend bool operator==(const PolyVectorField& a, const PolyVectorField& b) { return a.p == b.p; }
    bool is_zero() const { return p[0].is_zero() && p[1].is_zero() && p[2].is_zero(); }
};

/// [V, W] = V W - W V, exact.
inline PolyVectorField lie_bracket(const PolyVectorField& V, const PolyVectorField& W)
{
    PolyVectorField r;
    for (int k = 0; k < 3; ++k) r.p[k] = V.apply(W.p[k]) - W.apply(V.p[k]);
    return r;
}

/// Fields plus iterated brackets [f, g] with f a generator, up to total
/// length depth.
inline std::vector<PolyVectorField> bracket_closure(const std::vector<PolyVectorField>& fields, int depth)
{
    std::vector<PolyVectorField> all = fields, level = fields;
    for (int d = 2; d <= depth; ++d) {
        std::vector<PolyVectorField> next;
        for (const auto& f : fields)
            for (const auto& g : level) {
                auto b = lie_bracket(f, g);
                if (!b.is_zero()) next.push_back(std::move(b));
            }
        all.insert(all.end(), next.begin(), next.end());
        level = std::move(next);
    }
    return all;
}

/// Rank at a point of the span of the fields and their brackets.
inline int hormander_rank(const std::vector<PolyVectorField>& fields, const Vec3& point, int depth)
{
    const auto all = bracket_closure(fields, depth);
    Eigen::MatrixXd M(3, static_cast<Eigen::Index>(all.size()));
    for (std::size_t j = 0; j < all.size(); ++j) {
        const Vec3 v = all[j].at(point);
        for (int k = 0; k < 3; ++k) M(k, static_cast<Eigen::Index>(j)) = v[k];
    }
    if (all.empty()) return 0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    lu.setThreshold(1e-10);
    return static_cast<int>(lu.rank());
}

// ----------------------------------------------------------------------------
// Coordinate maps
// ----------------------------------------------------------------------------

/// Polynomial map of R^3 with polynomial inverse; acts on functions by
/// pullback, (m f)(p) = f(m(p)).
struct CoordMap {
    std::string name;
    std::array<Poly, 3> fwd;
    std::array<Poly, 3> inv;

    static CoordMap identity()
    {
        return {"id", {Poly::z(), Poly::y(), Poly::x()}, {Poly::z(), Poly::y(), Poly::x()}};
    }

    Vec3 operator()(const Vec3& p) const { return {fwd[0].real_at(p), fwd[1].real_at(p), fwd[2].real_at(p)}; }
    Vec3 inverse_at(const Vec3& p) const { return {inv[0].real_at(p), inv[1].real_at(p), inv[2].real_at(p)}; }

    std::array<Jet, 3> jets(const Vec3& p, int degree = jet_degree) const
    {
        return {poly_jet(fwd[0], p, degree), poly_jet(fwd[1], p, degree), poly_jet(fwd[2], p, degree)};
    }

    CoordMap inverse() const { return {name + "^-1", inv, fwd}; }

    /// Map whose pullback is (this pullback) after (o pullback): p -> o(this(p)).
    CoordMap then(const CoordMap& o) const
    {
        std::array<Poly, 3> f, g;
        for (int k = 0; k < 3; ++k) {
            f[k] = o.fwd[k].substitute(fwd);
            g[k] = inv[k].substitute(o.inv);
        }
        return {name + ";" + o.name, f, g};
    }

    bool is_identity() const
    {
        return fwd[0] == Poly::z() && fwd[1] == Poly::y() && fwd[2] == Poly::x();
    }

    /// fwd o inv = inv o fwd = id as polynomials.
    bool inverse_exact() const
    {
        const std::array<Poly, 3> id{Poly::z(), Poly::y(), Poly::x()};
        for (int k = 0; k < 3; ++k)
            if (!(fwd[k].substitute(inv) == id[k]) || !(inv[k].substitute(fwd) == id[k])) return false;
        return true;
    }

    /// The pullback as a jet-evaluable function.
    JetFn pullback(const JetFn& f) const
    {
        return [m = *this, f](const Vec3& p) { return compose(f(m(p)), m.jets(p)); };
    }
};

/// Exact operator T with T f = (op (f o m^-1)) o m, the word m op m^-1.
inline PolyDiffOp conjugated(const CoordMap& m, const PolyDiffOp& op)
{
    std::array<PolyDiffOp, 3> v;
    for (int k = 0; k < 3; ++k) {
        PolyDiffOp t;
        for (int j = 0; j < 3; ++j) {
            Mono a{0, 0, 0};
            a[j] = 1;
            t += PolyDiffOp::term(m.inv[j].diff(k).substitute(m.fwd), a);
        }
        v[k] = t;
    }
    PolyDiffOp r;
    for (const auto& [a, c] : op.terms()) r += c.substitute(m.fwd) * (v[0].pow(a[0]) * v[1].pow(a[1]) * v[2].pow(a[2]));
    return r;
}

inline Poly rat_poly(long long n, long long d = 1) { return Poly(CRational(Rat(n, d))); }

/// hbar: (z, y, x) -> (z - 2xy, y, -x); an involution.
inline CoordMap hbar_map()
{
    const Poly z = Poly::z(), y = Poly::y(), x = Poly::x();
    return {"hbar", {z - rat_poly(2) * x * y, y, -x}, {z - rat_poly(2) * x * y, y, -x}};
}

/// Gamma: (z, y, x) -> (z - xy, y, x).
inline CoordMap gamma_map()
{
    const Poly z = Poly::z(), y = Poly::y(), x = Poly::x();
    return {"Gamma", {z - x * y, y, x}, {z + x * y, y, x}};
}

inline CoordMap gamma_inv_map() { return gamma_map().inverse(); }

/// Lambda: (z, y, x) -> (z + xy, y, x).
inline CoordMap lambda_map()
{
    const Poly z = Poly::z(), y = Poly::y(), x = Poly::x();
    return {"Lambda", {z + x * y, y, x}, {z - x * y, y, x}};
}

/// tau: (z, y, x) -> (z + xy, -y, x).
inline CoordMap tau_map()
{
    const Poly z = Poly::z(), y = Poly::y(), x = Poly::x();
    return {"tau", {z + x * y, -y, x}, {z + x * y, -y, x}};
}

/// pi: (z, y, x) -> (z + xy, y, -x).
inline CoordMap pi_map()
{
    const Poly z = Poly::z(), y = Poly::y(), x = Poly::x();
    return {"pi", {z + x * y, y, -x}, {z + x * y, y, -x}};
}

/// (z, y, x) -> (z, y, -x).
inline CoordMap flip_x_map()
{
    const Poly z = Poly::z(), y = Poly::y(), x = Poly::x();
    return {"flip_x", {z, y, -x}, {z, y, -x}};
}

/// (z, y, x) -> (z, -y, x).
inline CoordMap flip_y_map()
{
    const Poly z = Poly::z(), y = Poly::y(), x = Poly::x();
    return {"flip_y", {z, -y, x}, {z, -y, x}};
}

// ----------------------------------------------------------------------------
// Named operators
// ----------------------------------------------------------------------------

namespace ops {

inline const PolyDiffOp Dz = PolyDiffOp::dz(), Dy = PolyDiffOp::dy(), Dx = PolyDiffOp::dx();
inline const Poly X = Poly::x(), Y = Poly::y(), Z = Poly::z();
inline const CRational i = CRational::i();

inline Poly c(long long n, long long d = 1) { return rat_poly(n, d); }

/// L = -dx - i dy - 2y dz + 2i x dz.
inline PolyDiffOp lewy() { return -Dx - i * Dy - c(2) * Y * Dz + (c(2) * Poly(i) * X) * Dz; }

/// L_star = -dx + i dy - 2y dz - 2i x dz.
inline PolyDiffOp lewy_star() { return -Dx + i * Dy - c(2) * Y * Dz - (c(2) * Poly(i) * X) * Dz; }

/// L_star written as (i dy - 2i x dz) + (-dx - 2y dz).
inline PolyDiffOp lewy_star_split() { return (i * Dy - (c(2) * Poly(i) * X) * Dz) + (-Dx - c(2) * Y * Dz); }

/// -dx - i dy + 2i (x + i y) dz.
inline PolyDiffOp lewy_complex_form() { return -Dx - i * Dy + (c(2) * Poly(i) * (X + Poly(i) * Y)) * Dz; }

/// Conjugate of Q under hbar, computed: -dx - i dy - 2y dz - 2i x dz.
inline PolyDiffOp lewy_conjugate() { return -Dx - i * Dy - c(2) * Y * Dz - (c(2) * Poly(i) * X) * Dz; }

/// Q = dx - i dy.
inline PolyDiffOp cauchy_riemann() { return Dx - i * Dy; }

/// Q_star = dx + i dy.
inline PolyDiffOp cauchy_riemann_star() { return Dx + i * Dy; }

/// Delta = dx^2 + dy^2.
inline PolyDiffOp laplace2() { return Dx * Dx + Dy * Dy; }

/// Delta = dx^2 + dy^2 + dz^2.
inline PolyDiffOp laplace3() { return Dx * Dx + Dy * Dy + Dz * Dz; }

/// [(-dx - 2y dz) + (-i dy + 2i x dz)] [(-dx - 2y dz) + (i dy - 2i x dz)], with the
/// coefficient of y in both factors set to ycoef (2 as displayed).
inline PolyDiffOp bracketed_product(const Rat& ycoef = Rat(2))
{
    const Poly yc = Poly(CRational(ycoef)) * Y;
    const PolyDiffOp a = (-Dx - yc * Dz) + (-i * Dy + (c(2) * Poly(i) * X) * Dz);
    const PolyDiffOp b = (-Dx - yc * Dz) + (i * Dy - (c(2) * Poly(i) * X) * Dz);
    return a * b;
}

/// y dz + dx + i dy + i x dz.
inline PolyDiffOp gamma_first_order() { return Y * Dz + Dx + i * Dy + (Poly(i) * X) * Dz; }

/// dx^2 - dy^2 - 2x dz dy + 2y dz dx + (y^2 - x^2) dz^2 + dz^2.
inline PolyDiffOp gamma_second_order()
{
    return Dx * Dx - Dy * Dy - (c(2) * X) * (Dz * Dy) + (c(2) * Y) * (Dz * Dx) + (Y * Y - X * X) * (Dz * Dz) + Dz * Dz;
}

/// dx^2 + dy^2 + 4x dz dy - 4y dz dx + 4(y^2 + x^2) dz^2.
inline PolyDiffOp sublaplacian()
{
    return Dx * Dx + Dy * Dy + (c(4) * X) * (Dz * Dy) - (c(4) * Y) * (Dz * Dx) + (c(4) * (Y * Y + X * X)) * (Dz * Dz);
}

/// The sublaplacian minus 4i dz.
inline PolyDiffOp sublaplacian_shifted() { return sublaplacian() - (c(4) * Poly(i)) * Dz; }

inline PolyVectorField field_X() { return {{-Y, Poly(0), Poly(1)}}; }
inline PolyVectorField field_Y() { return {{X, Poly(1), Poly(0)}}; }
inline PolyVectorField field_Z() { return {{Poly(1), Poly(0), Poly(0)}}; }

/// X^2 + Y^2.
inline PolyDiffOp sum_of_squares()
{
    const auto x = field_X().op(), y = field_Y().op();
    return x * x + y * y;
}

/// X^2 + Y^2 + Z^2.
inline PolyDiffOp sum_of_squares_z() { return sum_of_squares() + Dz * Dz; }

/// dz^2 + (x dz + dy)^2 + (-y dz + dx)^2.
inline PolyDiffOp laplace_h1()
{
    const PolyDiffOp a = X * Dz + Dy, b = -Y * Dz + Dx;
    return Dz * Dz + a * a + b * b;
}

/// dz^2 + (-x dz + dy)^2 + (y dz + dx)^2.
inline PolyDiffOp laplace_h2()
{
    const PolyDiffOp a = -X * Dz + Dy, b = Y * Dz + Dx;
    return Dz * Dz + a * a + b * b;
}

/// R = -i dx + dy.
inline PolyDiffOp cr_R() { return -i * Dx + Dy; }

/// R_star = i dx + dy.
inline PolyDiffOp cr_R_star() { return i * Dx + Dy; }

/// P(x, D) = -i dx + dy - 2x dz - 2i y dz.
inline PolyDiffOp hormander_P() { return -i * Dx + Dy - (c(2) * X) * Dz - (c(2) * Poly(i) * Y) * Dz; }

/// conj P(x, D) = i dx + dy - 2x dz + 2i y dz.
inline PolyDiffOp hormander_Pbar() { return i * Dx + Dy - (c(2) * X) * Dz + (c(2) * Poly(i) * Y) * Dz; }

/// Q(x, D) = P Pbar Pbar P.
inline PolyDiffOp hormander_Q()
{
    const auto P = hormander_P(), Pb = hormander_Pbar();
    return P * Pb * Pb * P;
}

/// X + iY - 4iZ as a sum of fields.
inline PolyDiffOp x_iy_4iz() { return field_X().op() + i * field_Y().op() - (c(4) * Poly(i)) * Dz; }

/// i x dz + i dy - y dz + dx - 4i dz.
inline PolyDiffOp x_iy_4iz_expanded()
{
    return (Poly(i) * X) * Dz + i * Dy - Y * Dz + Dx - (c(4) * Poly(i)) * Dz;
}

} // namespace ops

// ----------------------------------------------------------------------------
// Operator words and identity verification
// ----------------------------------------------------------------------------

/// A word M1 M2 ... Mn applied right to left to f, each factor an operator or
/// a pullback, then evaluated at at(p).
struct OpExpr {
    std::string text;
    std::vector<std::variant<PolyDiffOp, CoordMap>> word;
    CoordMap at = CoordMap::identity();

    static OpExpr op(std::string text, PolyDiffOp o) { return {std::move(text), {std::move(o)}, CoordMap::identity()}; }

    OpExpr evaluated_at(const CoordMap& m) const
    {
        OpExpr r = *this;
        r.at = m;
        return r;
    }

    int order() const
    {
        int d = 0;
        for (const auto& f : word)
            if (const auto* o = std::get_if<PolyDiffOp>(&f)) d += o->order();
        return d;
    }

    /// Jet of the word from position k on, exact to degree need.
    Jet jet(const JetFn& f, const Vec3& p, std::size_t k = 0, int need = 0) const
    {
        if (k == word.size()) return f(p).truncated(need);
        if (const auto* o = std::get_if<PolyDiffOp>(&word[k])) return o->apply(jet(f, p, k + 1, need + o->order()), p);
        const auto& m = std::get<CoordMap>(word[k]);
        return compose(jet(f, m(p), k + 1, need), m.jets(p, need));
    }

    cplx operator()(const JetFn& f, const Vec3& p) const { return jet(f, at(p)).value(); }
};

/// Concatenation: (a b) f = a (b f).
inline OpExpr operator*(const OpExpr& a, const OpExpr& b)
{
    OpExpr r{a.text + " " + b.text, a.word, CoordMap::identity()};
    r.word.insert(r.word.end(), b.word.begin(), b.word.end());
    return r;
}

inline OpExpr map_expr(const CoordMap& m) { return {m.name, {m}, CoordMap::identity()}; }

struct Identity {
    std::string name;
    std::string anchor;
    OpExpr lhs, rhs;
};

struct IdentityReport {
    std::string name;
    std::string anchor;
    double max_abs = 0.0;
    double max_ref = 0.0;  ///< largest |lhs| seen
    double tol = 1e-9;
    std::size_t evaluations = 0;
    bool pass = false;
};

/// Max |lhs f (p) - rhs f (p)| over corpus x points; pass iff below tol.
inline IdentityReport verify_identity(const Identity& id, const std::vector<CorpusFn>& corpus,
                                      const std::vector<Vec3>& points, double tol = 1e-9)
{
    IdentityReport r{id.name, id.anchor, 0.0, 0.0, tol, 0, false};
    for (const auto& f : corpus) {
        std::vector<double> err(points.size()), ref(points.size());
        parallel_blocks(points.size(), [&](std::size_t k) {
            const cplx a = id.lhs(f.jet, points[k]), b = id.rhs(f.jet, points[k]);
            err[k] = std::abs(a - b);
            ref[k] = std::abs(a);
        });
        for (std::size_t k = 0; k < points.size(); ++k) {
            r.max_abs = std::max(r.max_abs, err[k]);
            r.max_ref = std::max(r.max_ref, ref[k]);
        }
        r.evaluations += points.size();
    }
    r.pass = r.max_abs < tol;
    return r;
}

inline IdentityReport verify_identity(const OpExpr& lhs, const OpExpr& rhs, const std::vector<CorpusFn>& corpus,
                                      const std::vector<Vec3>& points, double tol = 1e-9)
{
    return verify_identity(Identity{lhs.text + " = " + rhs.text, "plumbing", lhs, rhs}, corpus, points, tol);
}

/// (m o op o m) f evaluated at p.
inline cplx conjugate_apply(const CoordMap& m, const PolyDiffOp& op, const JetFn& f, const Vec3& p)
{
    const OpExpr e{"", {m, op, m}, CoordMap::identity()};
    return e(f, p);
}

inline cplx apply(const PolyDiffOp& op, const JetFn& f, const Vec3& p) { return op.apply(f, p); }

/// The displayed operator identities, each as printed (both sides at the
/// same evaluation map).
inline std::vector<Identity> paper_identities()
{
    using namespace ops;
    const auto H = map_expr(hbar_map()), G = map_expr(gamma_map()), Gi = map_expr(gamma_inv_map());
    const auto Lm = map_expr(lambda_map()), Tm = map_expr(tau_map()), Pm = map_expr(pi_map());
    const auto sx = flip_x_map(), sy = flip_y_map();
    auto E = [](std::string t, PolyDiffOp o) { return OpExpr::op(std::move(t), std::move(o)); };

    std::vector<Identity> out;
    auto add = [&](std::string name, std::string anchor, OpExpr l, OpExpr r, const CoordMap& at) {
        out.push_back({std::move(name), std::move(anchor), l.evaluated_at(at), r.evaluated_at(at)});
    };
    const auto id = CoordMap::identity();

    add("L = hbar Q hbar", "lewy-cauchy-riemann-conjugation", E("L", lewy()), H * E("Q", cauchy_riemann()) * H, sx);
    add("hbar Q Q_star hbar = hbar Delta hbar", "lewy-square-chain", H * E("Q", cauchy_riemann()) * E("Q_star", cauchy_riemann_star()) * H,
        H * E("Delta", laplace2()) * H, sx);
    add("hbar Delta hbar = bracketed product", "lewy-square-chain", H * E("Delta", laplace2()) * H,
        E("bracketed", bracketed_product()), sx);
    add("bracketed product = L L_star", "lewy-square-chain", E("bracketed", bracketed_product()),
        E("L", lewy()) * E("L_star", lewy_star_split()), sx);
    add("Gamma (dx + i dy) Gamma^-1 = y dz + dx + i dy + i x dz", "gamma-conjugation-first-order",
        G * E("Q_star", cauchy_riemann_star()) * Gi, E("gamma_first", gamma_first_order()), id);
    add("Gamma Delta3 Gamma^-1 = expansion", "gamma-conjugation-second-order", G * E("Delta3", laplace3()) * Gi,
        E("gamma_second", gamma_second_order()), id);
    out.push_back({"tau Delta Lambda = Delta_h1 at (z,-y,x)", "heisenberg-laplacian-left",
                   Tm * E("Delta3", laplace3()) * Lm, E("Delta_h1", laplace_h1()).evaluated_at(sy)});
    out.push_back({"pi Delta Lambda = Delta_h2 at (z,y,-x)", "heisenberg-laplacian-right",
                   Pm * E("Delta3", laplace3()) * Lm, E("Delta_h2", laplace_h2()).evaluated_at(sx)});
    add("hbar (-i dx) hbar = -i dx - 2i y dz", "hormander-example-conjugation", H * E("-i dx", -i * Dx) * H,
        E("-i dx - 2i y dz", -i * Dx - (c(2) * Poly(i) * Y) * Dz), sx);
    add("hbar dy hbar = dy - 2x dz", "hormander-example-conjugation", H * E("dy", Dy) * H,
        E("dy - 2x dz", Dy - (c(2) * X) * Dz), sx);
    add("P = hbar R hbar", "hormander-example-conjugation", E("P", hormander_P()), H * E("R", cr_R()) * H, sx);
    add("Pbar = hbar R_star hbar", "hormander-example-conjugation", E("Pbar", hormander_Pbar()),
        H * E("R_star", cr_R_star()) * H, sx);
    add("Pbar P = hbar R_star R hbar", "hormander-example-conjugation", E("Pbar", hormander_Pbar()) * E("P", hormander_P()),
        H * E("R_star", cr_R_star()) * E("R", cr_R()) * H, sx);
    add("P Pbar = hbar R R_star hbar", "hormander-example-conjugation", E("P", hormander_P()) * E("Pbar", hormander_Pbar()),
        H * E("R", cr_R()) * E("R_star", cr_R_star()) * H, sx);
    add("Q(x,D) = hbar R R_star R_star R hbar", "hormander-example-conjugation", E("Q(x,D)", hormander_Q()),
        H * E("R", cr_R()) * E("R_star", cr_R_star()) * E("R_star", cr_R_star()) * E("R", cr_R()) * H, sx);
    return out;
}

/// Consistency identities between displayed forms of the same operator.
inline std::vector<Identity> form_identities()
{
    using namespace ops;
    auto E = [](std::string t, PolyDiffOp o) { return OpExpr::op(std::move(t), std::move(o)); };
    const auto H = map_expr(hbar_map());
    return {
        {"L = -dx - i dy + 2i(x + iy) dz", "lewy-complex-form", E("L", lewy()), E("L_complex", lewy_complex_form())},
        {"L_star split form", "lewy-star-forms", E("L_star", lewy_star()), E("L_star_split", lewy_star_split())},
        {"X + iY - 4iZ expansion", "bracket-field-combination", E("X+iY-4iZ", x_iy_4iz()), E("expanded", x_iy_4iz_expanded())},
        {"hbar Q hbar = computed conjugate", "lewy-cauchy-riemann-conjugation", H * E("Q", cauchy_riemann()) * H,
         E("L_conj", lewy_conjugate())},
    };
}

/// The true step of the square chain with the y coefficient moved from 2 to
/// 2.1 in the bracketed product; must fail.
inline Identity mutated_identity()
{
    using namespace ops;
    auto E = [](std::string t, PolyDiffOp o) { return OpExpr::op(std::move(t), std::move(o)); };
    const auto sx = flip_x_map();
    return {"mutated bracketed product = L L_star", "mutation-check",
            E("bracketed_2.1y", bracketed_product(Rat(21, 10))).evaluated_at(sx),
            (E("L", lewy()) * E("L_star", lewy_star_split())).evaluated_at(sx)};
}

// ----------------------------------------------------------------------------
// Lifts to G x R
// ----------------------------------------------------------------------------

/// rho(x)(z, y) = (z + x y, y).
inline std::array<double, 2> rho_action(double x, const std::array<double, 2>& X) { return {X[0] + x * X[1], X[1]}; }

using Fn3 = std::function<cplx(const Vec3&)>;

/// Points of G x R as (X = (z, y), x, s).
struct GRPoint {
    std::array<double, 2> X;
    double x, s;
};

/// tau phi (X, x, s) = phi(x^-1 X, x + s) with x^-1 X = rho(-x) X.
inline cplx tau_lift(const Fn3& phi, const GRPoint& p)
{
    const auto X = rho_action(-p.x, p.X);
    return phi({X[0], X[1], p.x + p.s});
}

/// iota phi (X, x, s) = phi(x X, x + s).
inline cplx iota_lift(const Fn3& phi, const GRPoint& p)
{
    const auto X = rho_action(p.x, p.X);
    return phi({X[0], X[1], p.x + p.s});
}

/// (rho(k) X, x + k, s - k); leaves tau phi invariant.
inline GRPoint tau_shift(const GRPoint& p, double k) { return {rho_action(k, p.X), p.x + k, p.s - k}; }

/// (rho(k) X, x - k, s + k); leaves iota phi invariant.
inline GRPoint iota_shift(const GRPoint& p, double k) { return {rho_action(k, p.X), p.x - k, p.s + k}; }

} // namespace lgha
