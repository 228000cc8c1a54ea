#pragma once

#include "groups.hpp"
#include "quadrature.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <map>
#include <string>

namespace lgha {

using MatXd = Eigen::MatrixXd;
using MatXc = Eigen::MatrixXcd;
using Mat2c = Eigen::Matrix2cd;

// ----------------------------------------------------------------------------
// Wigner matrices
// ----------------------------------------------------------------------------

/// Small Wigner d^j(beta) for j = two_j/2, rows and columns ordered m = j, j-1, ..., -j.
/// Built by coupling d^{j-1/2} with d^{1/2} into the top spin.
inline MatXd wigner_d(int two_j, double beta)
{
    const double c = std::cos(beta / 2), s = std::sin(beta / 2);
    MatXd d = MatXd::Ones(1, 1);
    const double half[2][2] = {{c, -s}, {s, c}};
    for (int tj = 1; tj <= two_j; ++tj) {
        // d currently has size tj (spin (tj-1)/2)
        MatXd next = MatXd::Zero(tj + 1, tj + 1);
        // |j m> = a |j-1/2, m-1/2>|+> + b |j-1/2, m+1/2>|->
        // index r <-> m = tj/2 - r; in spin (tj-1)/2, m-1/2 has index r, m+1/2 has index r-1
        auto a = [&](int r) { return std::sqrt(static_cast<double>(tj - r) / tj); };
        auto b = [&](int r) { return std::sqrt(static_cast<double>(r) / tj); };
        for (int r = 0; r <= tj; ++r)
            for (int k = 0; k <= tj; ++k) {
                double v = 0;
                if (r < tj && k < tj) v += a(r) * a(k) * d(r, k) * half[0][0];
                if (r < tj && k > 0) v += a(r) * b(k) * d(r, k - 1) * half[0][1];
                if (r > 0 && k < tj) v += b(r) * a(k) * d(r - 1, k) * half[1][0];
                if (r > 0 && k > 0) v += b(r) * b(k) * d(r - 1, k - 1) * half[1][1];
                next(r, k) = v;
            }
        d = std::move(next);
    }
    return d;
}

/// D^j(alpha, beta, gamma) = e^{-i m alpha} d^j_{mn}(beta) e^{-i n gamma}.
inline MatXc wigner_D(int two_j, double alpha, double beta, double gamma)
{
    const MatXd d = wigner_d(two_j, beta);
    MatXc D(two_j + 1, two_j + 1);
    for (int r = 0; r <= two_j; ++r)
        for (int k = 0; k <= two_j; ++k) {
            const double m = 0.5 * two_j - r, n = 0.5 * two_j - k;
            D(r, k) = std::polar(d(r, k), -m * alpha - n * gamma);
        }
    return D;
}

struct Euler {
    double alpha = 0, beta = 0, gamma = 0;
};

inline Mat2c su2_from_euler(const Euler& e) { return wigner_D(1, e.alpha, e.beta, e.gamma); }

/// Euler angles with alpha in [0, 2pi), beta in [0, pi], gamma in [0, 4pi).
inline Euler euler_from_su2(const Mat2c& U)
{
    Euler e;
    const double c = std::abs(U(1, 1)), s = std::abs(U(1, 0));
    e.beta = 2.0 * std::atan2(s, c);
    const double sigma = c > 1e-300 ? std::arg(U(1, 1)) : 0.0;  // (alpha+gamma)/2
    const double delta = s > 1e-300 ? std::arg(U(1, 0)) : 0.0;  // (alpha-gamma)/2
    double alpha = sigma + delta, gamma = sigma - delta;
    const double two_pi = 2 * pi, four_pi = 4 * pi;
    const double shift = std::floor(alpha / two_pi);
    alpha -= shift * two_pi;
    gamma += shift * two_pi;
    gamma = std::fmod(gamma, four_pi);
    if (gamma < 0) gamma += four_pi;
    e.alpha = alpha;
    e.gamma = gamma;
    return e;
}

// ----------------------------------------------------------------------------
// SO(4) as (SU(2) x SU(2)) / {+-1}
// ----------------------------------------------------------------------------

/// Quaternion x as the 2x2 matrix [[x0 + i x3, x2 + i x1], [-x2 + i x1, x0 - i x3]].
inline Mat2c quat_matrix(const Vec4& x)
{
    Mat2c m;
    m << cplx{x(0), x(3)}, cplx{x(2), x(1)}, cplx{-x(2), x(1)}, cplx{x(0), -x(3)};
    return m;
}

inline Vec4 quat_coords(const Mat2c& m) { return {m(0, 0).real(), m(0, 1).imag(), m(0, 1).real(), m(0, 0).imag()}; }

/// Rotation x -> U_L X(x) U_R^dagger of R^4.
inline Mat4 so4_from_su2(const Mat2c& UL, const Mat2c& UR)
{
    Mat4 R;
    for (int j = 0; j < 4; ++j) R.col(j) = quat_coords(UL * quat_matrix(Vec4::Unit(j)) * UR.adjoint());
    return R;
}

/// Inverse of so4_from_su2 up to the common sign.
inline std::pair<Mat2c, Mat2c> su2_from_so4(const Mat4& R)
{
    static const std::array<Mat4, 16> basis = [] {
        std::array<Mat4, 16> c;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) c[4 * a + b] = so4_from_su2(quat_matrix(Vec4::Unit(a)), quat_matrix(Vec4::Unit(b)));
        return c;
    }();
    Mat4 M;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) M(a, b) = (basis[4 * a + b].array() * R.array()).sum() / 4.0;
    Eigen::Index ra, cb;
    M.cwiseAbs().maxCoeff(&ra, &cb);
    Vec4 p = M.col(cb), q = M.row(ra).transpose();
    p.normalize();
    q.normalize();
    if (p(ra) * q(cb) * M(ra, cb) < 0) q = -q;
    return {quat_matrix(p), quat_matrix(q)};
}

struct IrrepLabel {
    int two_j1 = 0, two_j2 = 0;

    int dim() const { return (two_j1 + 1) * (two_j2 + 1); }
    bool valid() const { return two_j1 >= 0 && two_j2 >= 0 && (two_j1 + two_j2) % 2 == 0; }
    auto operator<=>(const IrrepLabel&) const = default;
};

inline std::string half_int(int two)
{
    return two % 2 ? std::to_string(two) + "/2" : std::to_string(two / 2);
}

inline std::string label_string(const IrrepLabel& l) { return "(" + half_int(l.two_j1) + "," + half_int(l.two_j2) + ")"; }

/// All SO(4) labels with j1, j2 <= J (two_J = 2J).
inline std::vector<IrrepLabel> so4_labels(int two_J)
{
    std::vector<IrrepLabel> out;
    for (int a = 0; a <= two_J; ++a)
        for (int b = 0; b <= two_J; ++b)
            if ((a + b) % 2 == 0) out.push_back({a, b});
    return out;
}

inline Eigen::MatrixXcd kron(const MatXc& A, const MatXc& B)
{
    MatXc K(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j) K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return K;
}

inline MatXc so4_rep(const IrrepLabel& l, const Euler& left, const Euler& right)
{
    if (!l.valid()) throw ParityViolation("so4_rep: j1 + j2 must be an integer");
    return kron(wigner_D(l.two_j1, left.alpha, left.beta, left.gamma),
                wigner_D(l.two_j2, right.alpha, right.beta, right.gamma));
}

// ----------------------------------------------------------------------------
// Haar quadrature
// ----------------------------------------------------------------------------

struct SU2Node {
    Euler angles;
    double weight = 1.0;
};

/// Normalized Haar rule on SU(2), exact for products of two coefficients with j <= J.
inline std::vector<SU2Node> su2_rule(int two_J)
{
    const int na = 2 * two_J + 1, ng = 2 * two_J + 1, nb = two_J + 1;
    std::vector<double> x, w;
    gauss_legendre(static_cast<std::size_t>(nb), x, w);
    std::vector<SU2Node> nodes;
    nodes.reserve(static_cast<std::size_t>(na * nb * ng));
    for (int a = 0; a < na; ++a)
        for (int b = 0; b < nb; ++b)
            for (int g = 0; g < ng; ++g)
                nodes.push_back({{2 * pi * a / na, std::acos(x[b]), 4 * pi * g / ng}, w[b] / 2 / na / ng});
    return nodes;
}

struct EulerQuadSO4 {
    int two_J = 0;
    std::vector<SU2Node> left, right;

    std::size_t size() const { return left.size() * right.size(); }
    double weight(std::size_t i, std::size_t k) const { return left[i].weight * right[k].weight; }
};

inline EulerQuadSO4 so4_quadrature(int two_J, std::size_t budget = static_cast<std::size_t>(-1))
{
    if (two_J < 0) throw Error("so4_quadrature: J must be nonnegative");
    EulerQuadSO4 q{two_J, su2_rule(two_J), su2_rule(two_J)};
    if (q.size() > budget)
        throw BudgetExceeded("so4_quadrature: " + std::to_string(q.size()) + " nodes exceed budget");
    return q;
}

/// D^j at every node of an SU(2) rule, for all two_j <= two_J.
struct RepTable {
    std::vector<std::vector<MatXc>> D;  ///< D[two_j][node]

    RepTable(const std::vector<SU2Node>& nodes, int two_J)
    {
        D.resize(two_J + 1);
        for (int tj = 0; tj <= two_J; ++tj) {
            D[tj].resize(nodes.size());
            parallel_blocks(nodes.size(), [&](std::size_t i) {
                const auto& e = nodes[i].angles;
                D[tj][i] = wigner_D(tj, e.alpha, e.beta, e.gamma);
            });
        }
    }
};

// ----------------------------------------------------------------------------
// Compact Fourier transform
// ----------------------------------------------------------------------------

using CompactSpectrum = std::map<IrrepLabel, MatXc>;

/// Function on SO(4) given through its lift to SU(2) x SU(2).
using SO4Fn = std::function<cplx(const Euler& left, const Euler& right)>;

/// Values of f at the product nodes, row-major (left index outer).
inline std::vector<cplx> sample_so4(const SO4Fn& f, const EulerQuadSO4& q)
{
    const std::size_t nl = q.left.size(), nr = q.right.size();
    std::vector<cplx> F(nl * nr);
    parallel_blocks(nl, [&](std::size_t i) {
        for (std::size_t k = 0; k < nr; ++k) F[i * nr + k] = f(q.left[i].angles, q.right[k].angles);
    });
    return F;
}

/// Tf(gamma) from sampled values, summed right factor first.
inline CompactSpectrum compact_transform(const std::vector<cplx>& F, int two_J, const EulerQuadSO4& q)
{
    const std::size_t nl = q.left.size(), nr = q.right.size();
    if (F.size() != nl * nr) throw Error("compact_transform: sample count mismatch");
    const RepTable TL(q.left, two_J), TR(q.right, two_J);
    CompactSpectrum out;
    for (int b = 0; b <= two_J; ++b) {
        std::vector<MatXc> M(nl);
        parallel_blocks(nl, [&](std::size_t i) {
            MatXc acc = MatXc::Zero(b + 1, b + 1);
            for (std::size_t k = 0; k < nr; ++k) acc += (q.right[k].weight * F[i * nr + k]) * TR.D[b][k].adjoint();
            M[i] = acc;
        });
        for (int a = 0; a <= two_J; ++a) {
            if ((a + b) % 2) continue;
            MatXc acc = MatXc::Zero((a + 1) * (b + 1), (a + 1) * (b + 1));
            for (std::size_t i = 0; i < nl; ++i) acc += q.left[i].weight * kron(TL.D[a][i].adjoint(), M[i]);
            out[{a, b}] = acc;
        }
    }
    return out;
}

/// Tf(gamma) = sum_nodes w f(k) gamma(k^-1) for all labels with j1, j2 <= J.
inline CompactSpectrum compact_transform(const SO4Fn& f, int two_J, const EulerQuadSO4& q)
{
    return compact_transform(sample_so4(f, q), two_J, q);
}

inline CompactSpectrum compact_transform(const SO4Fn& f, int two_J) { return compact_transform(f, two_J, so4_quadrature(two_J)); }

/// f(x) = sum_gamma d_gamma tr[Tf(gamma) gamma(x)].
inline cplx compact_inverse(const CompactSpectrum& s, const Euler& left, const Euler& right)
{
    std::vector<cplx> terms;
    for (const auto& [l, T] : s) terms.push_back(static_cast<double>(l.dim()) * (T * so4_rep(l, left, right)).trace());
    return pairwise_sum(terms);
}

inline cplx compact_inverse(const CompactSpectrum& s, const Mat2c& UL, const Mat2c& UR)
{
    return compact_inverse(s, euler_from_su2(UL), euler_from_su2(UR));
}

struct PlancherelResult {
    double lhs = 0, rhs = 0, rel_err = 0;
};

inline double rel_error(double lhs, double rhs)
{
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    return scale == 0.0 ? 0.0 : std::abs(lhs - rhs) / scale;
}

inline double spectrum_norm2(const CompactSpectrum& s)
{
    std::vector<double> terms;
    for (const auto& [l, T] : s) terms.push_back(l.dim() * T.squaredNorm());
    return pairwise_sum(terms);
}

inline PlancherelResult compact_plancherel_check(const std::vector<cplx>& F, int two_J, const EulerQuadSO4& q)
{
    const std::size_t nr = q.right.size();
    PlancherelResult r;
    r.lhs = reduce_sum<double>(F.size(), [&](std::size_t i) { return q.weight(i / nr, i % nr) * std::norm(F[i]); });
    r.rhs = spectrum_norm2(compact_transform(F, two_J, q));
    r.rel_err = rel_error(r.lhs, r.rhs);
    return r;
}

inline PlancherelResult compact_plancherel_check(const SO4Fn& f, int two_J)
{
    const auto q = so4_quadrature(two_J);
    return compact_plancherel_check(sample_so4(f, q), two_J, q);
}

/// Band-limited function f(k) = sum_gamma d_gamma tr[C_gamma gamma(k)]; its transform is C.
struct BandLimited {
    CompactSpectrum coeffs;

    cplx operator()(const Euler& left, const Euler& right) const { return compact_inverse(coeffs, left, right); }

    int two_J() const
    {
        int J = 0;
        for (const auto& [l, C] : coeffs) J = std::max({J, l.two_j1, l.two_j2});
        return J;
    }

    /// Values at every product node, using tabulated Wigner matrices.
    std::vector<cplx> sample(const EulerQuadSO4& q) const
    {
        const int J = two_J();
        const RepTable TL(q.left, J), TR(q.right, J);
        const std::size_t nl = q.left.size(), nr = q.right.size();
        std::vector<cplx> F(nl * nr);
        parallel_blocks(nl, [&](std::size_t i) {
            // d tr[C (A x B)] = tr[G B] with G = d sum_{a,c} A_{ac} C[(c,.),(a,.)]
            std::vector<std::pair<int, MatXc>> G;
            for (const auto& [l, C] : coeffs) {
                const MatXc& A = TL.D[l.two_j1][i];
                const Eigen::Index n2 = l.two_j2 + 1;
                MatXc g = MatXc::Zero(n2, n2);
                for (Eigen::Index a = 0; a < A.rows(); ++a)
                    for (Eigen::Index c = 0; c < A.cols(); ++c) g += A(a, c) * C.block(c * n2, a * n2, n2, n2);
                G.emplace_back(l.two_j2, static_cast<double>(l.dim()) * g);
            }
            for (std::size_t k = 0; k < nr; ++k) {
                cplx v = 0;
                for (const auto& [tj2, g] : G) v += (g.array() * TR.D[tj2][k].transpose().array()).sum();
                F[i * nr + k] = v;
            }
        });
        return F;
    }

    static BandLimited random(int two_J, Rng& rng)
    {
        BandLimited f;
        for (const auto& l : so4_labels(two_J)) {
            MatXc C(l.dim(), l.dim());
            for (Eigen::Index i = 0; i < C.size(); ++i) C.data()[i] = {rng.normal(), rng.normal()};
            f.coeffs[l] = C / static_cast<double>(l.dim());
        }
        return f;
    }
};

/// Group product on the double cover, (UL, UR)(VL, VR) = (UL VL, UR VR).
struct SO4Elem {
    Mat2c left = Mat2c::Identity(), right = Mat2c::Identity();

    SO4Elem operator*(const SO4Elem& o) const { return {left * o.left, right * o.right}; }
    SO4Elem inverse() const { return {left.adjoint(), right.adjoint()}; }
    static SO4Elem from(const Euler& l, const Euler& r) { return {su2_from_euler(l), su2_from_euler(r)}; }
    Mat4 rotation() const { return so4_from_su2(left, right); }
};

/// (f * g)(x) = int f(y) g(y^-1 x) dy by product quadrature of level two_J.
inline cplx compact_convolve_at(const SO4Fn& f, const SO4Fn& g, const SO4Elem& x, const EulerQuadSO4& q)
{
    const std::size_t nr = q.right.size();
    return reduce_sum<cplx>(q.size(), [&](std::size_t idx) {
        const auto& l = q.left[idx / nr];
        const auto& r = q.right[idx % nr];
        const SO4Elem z = SO4Elem::from(l.angles, r.angles).inverse() * x;
        return l.weight * r.weight * f(l.angles, r.angles) * g(euler_from_su2(z.left), euler_from_su2(z.right));
    });
}

/// Pointwise product of spectra in the order T(f * g) = Tg Tf.
inline CompactSpectrum convolution_spectrum(const CompactSpectrum& Tf, const CompactSpectrum& Tg)
{
    CompactSpectrum out;
    for (const auto& [l, A] : Tf) {
        auto it = Tg.find(l);
        if (it != Tg.end()) out[l] = it->second * A;
    }
    return out;
}

// ----------------------------------------------------------------------------
// U(2)
// ----------------------------------------------------------------------------

struct U2Label {
    int m1 = 0, m2 = 0;

    int dim() const { return m1 - m2 + 1; }
    bool valid() const { return m1 >= m2; }
    auto operator<=>(const U2Label&) const = default;
};

inline std::string label_string(const U2Label& l) { return "[" + std::to_string(l.m1) + "," + std::to_string(l.m2) + "]"; }

/// U(2) element e^{i phi} V with V in SU(2).
struct U2Point {
    double phi = 0;
    Euler v;
};

/// rho(e^{i phi} V) = e^{i (m1 + m2) phi} D^{(m1-m2)/2}(V).
inline MatXc u2_rep(const U2Label& l, const U2Point& p)
{
    if (!l.valid()) throw ParityViolation("u2_rep: needs m1 >= m2");
    return std::polar(1.0, (l.m1 + l.m2) * p.phi) * wigner_D(l.m1 - l.m2, p.v.alpha, p.v.beta, p.v.gamma);
}

inline std::vector<U2Label> u2_labels(int M)
{
    std::vector<U2Label> out;
    for (int m1 = -M; m1 <= M; ++m1)
        for (int m2 = -M; m2 <= m1; ++m2) out.push_back({m1, m2});
    return out;
}

struct U2Quad {
    std::vector<double> phi;
    std::vector<SU2Node> su2;

    std::size_t size() const { return phi.size() * su2.size(); }
};

/// Exact for products of two coefficients with labels in [-M, M].
inline U2Quad u2_quadrature(int M)
{
    U2Quad q;
    const int nphi = 8 * M + 1;
    for (int i = 0; i < nphi; ++i) q.phi.push_back(2 * pi * i / nphi);
    q.su2 = su2_rule(2 * M);
    return q;
}

using U2Fn = std::function<cplx(const U2Point&)>;
using U2Spectrum = std::map<U2Label, MatXc>;

inline U2Spectrum u2_transform(const U2Fn& f, int M, const U2Quad& q)
{
    U2Spectrum out;
    for (const auto& l : u2_labels(M)) {
        MatXc acc = MatXc::Zero(l.dim(), l.dim());
        for (double phi : q.phi)
            for (const auto& n : q.su2) {
                const U2Point p{phi, n.angles};
                acc += (n.weight / q.phi.size()) * f(p) * u2_rep(l, p).adjoint();
            }
        out[l] = acc;
    }
    return out;
}

inline double u2_norm2(const U2Fn& f, const U2Quad& q)
{
    std::vector<double> terms;
    for (double phi : q.phi)
        for (const auto& n : q.su2) terms.push_back(n.weight / q.phi.size() * std::norm(f({phi, n.angles})));
    return pairwise_sum(terms);
}

/// U(2) element as the 4x4 real matrix [[A, B], [-B, A]] for A + iB = e^{i phi} V.
inline Mat4 u2_real_matrix(const U2Point& p)
{
    const Mat2c g = std::polar(1.0, p.phi) * su2_from_euler(p.v);
    Mat4 k;
    k.topLeftCorner<2, 2>() = g.real();
    k.topRightCorner<2, 2>() = g.imag();
    k.bottomLeftCorner<2, 2>() = -g.imag();
    k.bottomRightCorner<2, 2>() = g.real();
    return k;
}

// ----------------------------------------------------------------------------
// Serialization
// ----------------------------------------------------------------------------

inline nlohmann::json matrix_json(const MatXc& m)
{
    auto a = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) a.push_back({m(r, c).real(), m(r, c).imag()});
    return a;
}

inline nlohmann::json spectrum_json(const CompactSpectrum& s)
{
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [l, T] : s) j[label_string(l)] = matrix_json(T);
    return j;
}

inline int parse_half_int(const std::string& s)
{
    const auto slash = s.find('/');
    if (slash == std::string::npos) return 2 * std::stoi(s);
    if (s.substr(slash + 1) != "2") throw ParseError("bad half-integer: " + s);
    return std::stoi(s.substr(0, slash));
}

inline CompactSpectrum spectrum_from_json(const nlohmann::json& j)
{
    CompactSpectrum s;
    for (const auto& [key, arr] : j.items()) {
        if (key.size() < 5 || key.front() != '(' || key.back() != ')') throw ParseError("bad label: " + key);
        const auto comma = key.find(',');
        const IrrepLabel l{parse_half_int(key.substr(1, comma - 1)), parse_half_int(key.substr(comma + 1, key.size() - comma - 2))};
        MatXc T(l.dim(), l.dim());
        if (arr.size() != static_cast<std::size_t>(T.size())) throw ParseError("bad matrix size for " + key);
        for (Eigen::Index i = 0; i < T.size(); ++i) T(i / T.cols(), i % T.cols()) = {arr[i][0].get<double>(), arr[i][1].get<double>()};
        s[l] = T;
    }
    return s;
}

} // namespace lgha
