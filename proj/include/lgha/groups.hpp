#pragma once

#include "core.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <string_view>

namespace lgha {

using Mat4 = Eigen::Matrix4d;
using LogA3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;

enum class Tag { SL4, SP4, SO4, UpperUnipotent, DiagPositive, SpN };

inline std::string_view tag_name(Tag t)
{
    switch (t) {
    case Tag::SL4: return "SL4";
    case Tag::SP4: return "SP4";
    case Tag::SO4: return "SO4";
    case Tag::UpperUnipotent: return "UpperUnipotent";
    case Tag::DiagPositive: return "DiagPositive";
    case Tag::SpN: return "SpN";
    }
    return "?";
}

/// Symplectic form [[0, I], [-I, 0]].
inline Mat4 symplectic_J()
{
    Mat4 J = Mat4::Zero();
    J(0, 2) = J(1, 3) = 1.0;
    J(2, 0) = J(3, 1) = -1.0;
    return J;
}

inline double symplectic_defect(const Mat4& g)
{
    const Mat4 J = symplectic_J();
    return (g * J * g.transpose() - J).cwiseAbs().maxCoeff();
}

inline double orthogonal_defect(const Mat4& g) { return (g.transpose() * g - Mat4::Identity()).cwiseAbs().maxCoeff(); }

/// Permutation exchanging basis vectors 3 and 4. Conjugating by it turns
/// the SP_N pattern into an upper unipotent one.
inline Mat4 swap34()
{
    Mat4 P = Mat4::Zero();
    P(0, 0) = P(1, 1) = P(2, 3) = P(3, 2) = 1.0;
    return P;
}

/// Empty string when m satisfies the invariants of tag, otherwise a reason.
inline std::string membership_error(const Mat4& m, Tag tag)
{
    switch (tag) {
    case Tag::SL4:
        if (std::abs(m.determinant() - 1.0) > 1e-10) return "det != 1";
        return {};
    case Tag::SP4:
        if (symplectic_defect(m) > 1e-10) return "g J g^T != J";
        return {};
    case Tag::SO4:
        if (orthogonal_defect(m) > 1e-10) return "g^T g != I";
        if (m.determinant() <= 0) return "det <= 0";
        return {};
    case Tag::UpperUnipotent:
        for (int i = 0; i < 4; ++i) {
            if (m(i, i) != 1.0) return "diagonal entry != 1";
            for (int j = 0; j < i; ++j)
                if (m(i, j) != 0.0) return "nonzero below diagonal";
        }
        return {};
    case Tag::DiagPositive: {
        double prod = 1.0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                if (i != j && m(i, j) != 0.0) return "off-diagonal entry";
                if (i == j && !(m(i, i) > 0.0)) return "nonpositive diagonal";
            }
        for (int i = 0; i < 4; ++i) prod *= m(i, i);
        if (std::abs(prod - 1.0) > 1e-12) return "diagonal product != 1";
        return {};
    }
    case Tag::SpN: {
        const Mat4 p = swap34() * m * swap34();
        if (!membership_error(p, Tag::UpperUnipotent).empty()) return "not unipotent in SP_N order";
        if (symplectic_defect(m) > 1e-10) return "g J g^T != J";
        return {};
    }
    }
    return "unknown tag";
}

struct MatrixElement {
    Mat4 entries = Mat4::Identity();
    Tag tag = Tag::SL4;

    static MatrixElement make(const Mat4& m, Tag tag)
    {
        if (auto why = membership_error(m, tag); !why.empty())
            throw Error("MatrixElement(" + std::string(tag_name(tag)) + "): " + why);
        return {m, tag};
    }
};

// ----------------------------------------------------------------------------
// Unipotent group N
// ----------------------------------------------------------------------------

struct NilPoint6 {
    double x1 = 0, x2 = 0, x3 = 0, x4 = 0, x5 = 0, x6 = 0;

    std::array<double, 6> coords() const { return {x1, x2, x3, x4, x5, x6}; }
    static NilPoint6 from(const std::array<double, 6>& c) { return {c[0], c[1], c[2], c[3], c[4], c[5]}; }
};

inline NilPoint6 nil_mul(const NilPoint6& p, const NilPoint6& q)
{
    return {p.x1 + q.x1,
            p.x2 + q.x2,
            p.x3 + q.x3 + p.x1 * q.x2,
            p.x4 + q.x4,
            p.x5 + q.x5 + p.x2 * q.x4,
            p.x6 + q.x6 + p.x1 * q.x5 + p.x3 * q.x4};
}

inline NilPoint6 nil_inv(const NilPoint6& p)
{
    return {-p.x1,
            -p.x2,
            -p.x3 + p.x1 * p.x2,
            -p.x4,
            -p.x5 + p.x2 * p.x4,
            -p.x6 + p.x1 * p.x5 + p.x3 * p.x4 - p.x1 * p.x2 * p.x4};
}

inline Mat4 nil_to_matrix(const NilPoint6& p)
{
    Mat4 m = Mat4::Identity();
    m(0, 1) = p.x1;
    m(1, 2) = p.x2;
    m(0, 2) = p.x3;
    m(2, 3) = p.x4;
    m(1, 3) = p.x5;
    m(0, 3) = p.x6;
    return m;
}

inline NilPoint6 nil_from_matrix(const Mat4& m) { return {m(0, 1), m(1, 2), m(0, 2), m(2, 3), m(1, 3), m(0, 3)}; }

// ----------------------------------------------------------------------------
// Auxiliary group L
// ----------------------------------------------------------------------------

struct LPoint9 {
    double x6 = 0, x5 = 0, x4 = 0, x3 = 0, x2 = 0, t3 = 0, t2 = 0, x1 = 0, t1 = 0;

    std::array<double, 9> coords() const { return {x6, x5, x4, x3, x2, t3, t2, x1, t1}; }
    static LPoint9 from(const std::array<double, 9>& c)
    {
        return {c[0], c[1], c[2], c[3], c[4], c[5], c[6], c[7], c[8]};
    }
};

inline LPoint9 L_mul(const LPoint9& p, const LPoint9& q)
{
    LPoint9 r;
    r.x6 = p.x6 + q.x6 + p.t1 * q.x5 + p.t3 * q.x4;
    r.x5 = p.x5 + q.x5 + p.t2 * q.x4;
    r.x4 = p.x4 + q.x4;
    r.x3 = p.x3 + q.x3;
    r.x2 = p.x2 + q.x2;
    r.t3 = p.t3 + q.t3 + p.t1 * q.t2;
    r.t2 = p.t2 + q.t2;
    r.x1 = p.x1 + q.x1;
    r.t1 = p.t1 + q.t1;
    return r;
}

inline LPoint9 L_inv(const LPoint9& p)
{
    LPoint9 r;
    r.t1 = -p.t1;
    r.t2 = -p.t2;
    r.t3 = -p.t3 + p.t1 * p.t2;
    r.x1 = -p.x1;
    r.x2 = -p.x2;
    r.x3 = -p.x3;
    r.x4 = -p.x4;
    r.x5 = -p.x5 - r.t2 * p.x4;
    r.x6 = -p.x6 - r.t1 * p.x5 - r.t3 * p.x4;
    return r;
}

/// N sits in L with its (1,3), (2,3), (1,2) entries in the t-slots.
inline LPoint9 nil_into_L(const NilPoint6& n) { return {n.x6, n.x5, n.x4, 0, 0, n.x3, n.x2, 0, n.x1}; }

inline NilPoint6 nil_from_L(const LPoint9& p) { return {p.t1, p.t2, p.t3, p.x4, p.x5, p.x6}; }

// ----------------------------------------------------------------------------
// Three-dimensional nilpotent symplectic group
// ----------------------------------------------------------------------------

struct HeisPoint3 {
    double z = 0, y = 0, x = 0;
};

inline HeisPoint3 heis_mul(const HeisPoint3& p, const HeisPoint3& q)
{
    return {p.z + q.z + p.x * q.y - q.x * p.y, p.y + q.y, p.x + q.x};
}

inline HeisPoint3 heis_inv(const HeisPoint3& p) { return {-p.z, -p.y, -p.x}; }

inline Mat4 heis_to_matrix(const HeisPoint3& p)
{
    Mat4 m = Mat4::Identity();
    m(0, 1) = p.x;
    m(0, 2) = p.z;
    m(0, 3) = p.y;
    m(1, 2) = p.y;
    m(3, 2) = -p.x;
    return m;
}

// ----------------------------------------------------------------------------
// SP_N
// ----------------------------------------------------------------------------

struct SpNPoint4 {
    double x = 0, y = 0, z = 0, t = 0;
};

inline Mat4 spn_matrix(const SpNPoint4& p)
{
    Mat4 m = Mat4::Identity();
    m(0, 1) = p.x;
    m(0, 2) = p.y;
    m(0, 3) = p.z;
    m(1, 2) = p.z - p.x * p.t;
    m(1, 3) = p.t;
    m(3, 2) = -p.x;
    return m;
}

inline MatrixElement spn_embed(const SpNPoint4& p)
{
    const Mat4 m = spn_matrix(p);
    if (symplectic_defect(m) > 1e-10) throw SymplecticViolation("spn_embed: g J g^T != J");
    return {m, Tag::SpN};
}

inline SpNPoint4 spn_from_matrix(const Mat4& m) { return {m(0, 1), m(0, 2), m(0, 3), m(1, 3)}; }

// ----------------------------------------------------------------------------
// Iwasawa decomposition
// ----------------------------------------------------------------------------

struct IwasawaFactors {
    Mat4 k = Mat4::Identity();
    Mat4 a = Mat4::Identity();
    Mat4 n = Mat4::Identity();
    LogA3 logA = LogA3::Zero();

    Mat4 product() const { return k * a * n; }
};

/// Modified Gram-Schmidt with one re-orthogonalization pass: g = Q R with
/// R upper triangular, positive diagonal.
inline void mgs_qr(const Mat4& g, Mat4& Q, Mat4& R)
{
    Q = g;
    R = Mat4::Zero();
    for (int j = 0; j < 4; ++j) {
        for (int pass = 0; pass < 2; ++pass)
            for (int i = 0; i < j; ++i) {
                const double c = Q.col(i).dot(Q.col(j));
                R(i, j) += c;
                Q.col(j) -= c * Q.col(i);
            }
        const double nrm = Q.col(j).norm();
        if (nrm < 1e-13) throw NearSingular("iwasawa_decompose: Gram-Schmidt pivot below 1e-13");
        R(j, j) = nrm;
        Q.col(j) /= nrm;
    }
}

inline IwasawaFactors iwasawa_decompose(const MatrixElement& g)
{
    if (g.tag != Tag::SL4 && g.tag != Tag::SP4) throw Error("iwasawa_decompose: expects SL4 or SP4 input");
    const bool sp = g.tag == Tag::SP4;
    const Mat4 P = swap34();
    const Mat4 work = sp ? Mat4(P * g.entries * P) : g.entries;

    Mat4 Q, R;
    mgs_qr(work, Q, R);
    Mat4 a = Mat4::Zero(), n = R;
    for (int i = 0; i < 4; ++i) {
        a(i, i) = R(i, i);
        n.row(i) /= R(i, i);
        n(i, i) = 1.0;
        for (int j = 0; j < i; ++j) n(i, j) = 0.0;
    }
    IwasawaFactors f;
    f.k = sp ? Mat4(P * Q * P) : Q;
    f.a = sp ? Mat4(P * a * P) : a;
    f.n = sp ? Mat4(P * n * P) : n;
    for (int i = 0; i < 3; ++i) f.logA(i) = std::log(f.a(i, i));
    return f;
}

inline Mat4 a_from_log(const LogA3& t)
{
    Mat4 a = Mat4::Zero();
    a(0, 0) = std::exp(t(0));
    a(1, 1) = std::exp(t(1));
    a(2, 2) = std::exp(t(2));
    a(3, 3) = std::exp(-t(0) - t(1) - t(2));
    return a;
}

inline Vec4 a_diag(const LogA3& t) { return {std::exp(t(0)), std::exp(t(1)), std::exp(t(2)), std::exp(-t.sum())}; }

/// Product over i<j of a_i/a_j = a1^3 a2 a3^-1 a4^-3.
inline double modulus_factor(const LogA3& logA)
{
    const Vec4 a = a_diag(logA);
    double r = 1.0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) r *= a(i) / a(j);
    return r;
}

/// n -> a n a^-1 in coordinates.
inline NilPoint6 conjugate_by_a(const LogA3& logA, const NilPoint6& n)
{
    const Vec4 a = a_diag(logA);
    return {n.x1 * a(0) / a(1), n.x2 * a(1) / a(2), n.x3 * a(0) / a(2),
            n.x4 * a(2) / a(3), n.x5 * a(1) / a(3), n.x6 * a(0) / a(3)};
}

// ----------------------------------------------------------------------------
// Random elements
// ----------------------------------------------------------------------------

inline Mat4 random_sl4(Rng& rng, double scale = 0.5)
{
    Mat4 X;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) X(i, j) = scale * rng.normal();
    X -= (X.trace() / 4.0) * Mat4::Identity();
    return X.exp();
}

inline Mat4 random_sp4(Rng& rng, double scale = 0.5)
{
    Mat4 S;
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) S(i, j) = S(j, i) = scale * rng.normal();
    return Mat4(symplectic_J() * S).exp();
}

inline Mat4 random_so4(Rng& rng)
{
    Mat4 X;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) X(i, j) = rng.normal();
    return Mat4(X - X.transpose()).exp();
}

inline NilPoint6 random_nil(Rng& rng, double scale = 1.0)
{
    return {scale * rng.normal(), scale * rng.normal(), scale * rng.normal(),
            scale * rng.normal(), scale * rng.normal(), scale * rng.normal()};
}

} // namespace lgha

namespace lgha {

/// Y^-1 X' expanded component by component exactly as it is usually quoted,
/// typos included. nil_mul(nil_inv(Y), X) is the correct form.
inline NilPoint6 inverse_expansion_reference(const NilPoint6& Y, const NilPoint6& Xp)
{
    const auto [x1, x2, x3, x4, x5, x6] = Y.coords();
    const auto [y1, y2, y3, y4, y5, y6] = Xp.coords();
    NilPoint6 r;
    r.x6 = y6 - x6 + x1 * x5 - x1 * y5 - x1 * x2 * x4 + x3 * x4 - x3 * y4 + x1 * x2 * y4;
    r.x5 = y5 - x5 + x2 * y4 - x2 * x4;
    r.x4 = x4 + y4;
    r.x3 = y3 - x3 - x1 * y2 + x1 * x2;
    r.x2 = y2 - x2;
    r.x1 = y1 - x1;
    return r;
}

/// Corrected expansion of Y^-1 X'.
inline NilPoint6 inverse_expansion_corrected(const NilPoint6& Y, const NilPoint6& Xp)
{
    NilPoint6 r = inverse_expansion_reference(Y, Xp);
    r.x5 = Xp.x5 - Y.x5 - Y.x2 * Xp.x4 + Y.x2 * Y.x4;
    r.x4 = Xp.x4 - Y.x4;
    return r;
}

} // namespace lgha
