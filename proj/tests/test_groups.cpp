#include <lgha/groups.hpp>

#include <gtest/gtest.h>

using namespace lgha;

namespace {

double max_diff(const NilPoint6& a, const NilPoint6& b)
{
    double m = 0;
    const auto ca = a.coords(), cb = b.coords();
    for (int i = 0; i < 6; ++i) m = std::max(m, std::abs(ca[i] - cb[i]));
    return m;
}

double max_diff(const LPoint9& a, const LPoint9& b)
{
    double m = 0;
    const auto ca = a.coords(), cb = b.coords();
    for (int i = 0; i < 9; ++i) m = std::max(m, std::abs(ca[i] - cb[i]));
    return m;
}

LPoint9 random_L(Rng& rng)
{
    std::array<double, 9> c;
    for (auto& v : c) v = rng.normal();
    return LPoint9::from(c);
}

} // namespace

TEST(NilGroup, IdentityIsNeutral)
{
    Rng rng(1);
    const auto p = random_nil(rng);
    EXPECT_EQ(max_diff(nil_mul(NilPoint6{}, p), p), 0.0);
    EXPECT_EQ(max_diff(nil_mul(p, NilPoint6{}), p), 0.0);
    EXPECT_EQ(max_diff(nil_inv(NilPoint6{}), NilPoint6{}), 0.0);
}

TEST(NilGroup, MatchesMatrixProduct)
{
    Rng rng(2);
    double err = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto p = random_nil(rng), q = random_nil(rng);
        err = std::max(err, max_diff(nil_mul(p, q), nil_from_matrix(nil_to_matrix(p) * nil_to_matrix(q))));
    }
    EXPECT_LE(err, 1e-12);
}

TEST(NilGroup, InverseMatchesMatrixInverse)
{
    Rng rng(3);
    double err = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto p = random_nil(rng);
        err = std::max(err, max_diff(nil_inv(p), nil_from_matrix(nil_to_matrix(p).inverse())));
        err = std::max(err, max_diff(nil_mul(nil_inv(p), p), NilPoint6{}));
    }
    EXPECT_LE(err, 1e-12);
}

TEST(NilGroup, CorrectedExpansionReproducesLeftQuotient)
{
    Rng rng(4);
    double err = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto Y = random_nil(rng), X = random_nil(rng);
        err = std::max(err, max_diff(nil_mul(nil_inv(Y), X), inverse_expansion_corrected(Y, X)));
    }
    EXPECT_LE(err, 1e-12);
}

TEST(NilGroup, ReferenceExpansionDiffersOnlyInTwoSlots)
{
    Rng rng(5);
    const auto Y = random_nil(rng), X = random_nil(rng);
    const auto exact = nil_mul(nil_inv(Y), X), quoted = inverse_expansion_reference(Y, X);
    EXPECT_NEAR(exact.x6, quoted.x6, 1e-12);
    EXPECT_NEAR(exact.x3, quoted.x3, 1e-12);
    EXPECT_NEAR(exact.x2, quoted.x2, 1e-12);
    EXPECT_NEAR(exact.x1, quoted.x1, 1e-12);
    EXPECT_NEAR(quoted.x4 - exact.x4, 2 * Y.x4, 1e-12);
    EXPECT_NEAR(quoted.x5 - exact.x5, 2 * Y.x2 * (X.x4 - Y.x4), 1e-12);
}

TEST(LGroup, IdentityAssociativityInverse)
{
    Rng rng(6);
    double assoc = 0, inv = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto p = random_L(rng), q = random_L(rng), r = random_L(rng);
        assoc = std::max(assoc, max_diff(L_mul(L_mul(p, q), r), L_mul(p, L_mul(q, r))));
        inv = std::max(inv, max_diff(L_mul(L_inv(p), p), LPoint9{}));
        inv = std::max(inv, max_diff(L_mul(p, L_inv(p)), LPoint9{}));
    }
    EXPECT_LE(assoc, 1e-12);
    EXPECT_LE(inv, 1e-12);
    const auto p = random_L(rng);
    EXPECT_EQ(max_diff(L_mul(LPoint9{}, p), p), 0.0);
}

TEST(LGroup, RestrictionToNReproducesNilMul)
{
    Rng rng(7);
    double err = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto p = random_nil(rng), q = random_nil(rng);
        const auto prod = L_mul(nil_into_L(p), nil_into_L(q));
        err = std::max(err, max_diff(nil_from_L(prod), nil_mul(p, q)));
        err = std::max(err, std::abs(prod.x3) + std::abs(prod.x2) + std::abs(prod.x1));
    }
    EXPECT_LE(err, 1e-12);
}

TEST(HeisGroup, HomomorphismIntoMatrices)
{
    Rng rng(8);
    double err = 0;
    for (int i = 0; i < 1000; ++i) {
        const HeisPoint3 p{rng.normal(), rng.normal(), rng.normal()}, q{rng.normal(), rng.normal(), rng.normal()};
        err = std::max(err, (heis_to_matrix(heis_mul(p, q)) - heis_to_matrix(p) * heis_to_matrix(q)).cwiseAbs().maxCoeff());
        const auto e = heis_mul(heis_inv(p), p);
        err = std::max({err, std::abs(e.z), std::abs(e.y), std::abs(e.x)});
    }
    EXPECT_LE(err, 1e-12);
}

TEST(HeisGroup, ImageIsSymplectic)
{
    Rng rng(9);
    const HeisPoint3 p{rng.normal(), rng.normal(), rng.normal()};
    EXPECT_LE(symplectic_defect(heis_to_matrix(p)), 1e-12);
}

TEST(SpN, EmbeddingIsSymplecticAndClosed)
{
    EXPECT_EQ((spn_embed({}).entries - Mat4::Identity()).cwiseAbs().maxCoeff(), 0.0);
    Rng rng(10);
    for (int i = 0; i < 100; ++i) {
        const SpNPoint4 p{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
        const SpNPoint4 q{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
        const Mat4 g = spn_embed(p).entries, h = spn_embed(q).entries;
        EXPECT_LE(symplectic_defect(g), 1e-12);
        const Mat4 gh = g * h;
        for (auto [r, c] : {std::pair{2, 0}, {2, 1}, {3, 0}, {3, 1}}) EXPECT_EQ(gh(r, c), 0.0);
        for (int d = 0; d < 4; ++d) EXPECT_EQ(gh(d, d), 1.0);
        EXPECT_LE((spn_matrix(spn_from_matrix(gh)) - gh).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Iwasawa, IdentityDecomposesTrivially)
{
    const auto f = iwasawa_decompose(MatrixElement::make(Mat4::Identity(), Tag::SL4));
    EXPECT_LE((f.k - Mat4::Identity()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LE((f.a - Mat4::Identity()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LE((f.n - Mat4::Identity()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Iwasawa, ReconstructsRandomSL4)
{
    Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
        const Mat4 g = random_sl4(rng);
        const auto f = iwasawa_decompose(MatrixElement::make(g, Tag::SL4));
        EXPECT_LE((f.product() - g).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_TRUE(membership_error(f.k, Tag::SO4).empty());
        EXPECT_TRUE(membership_error(f.a, Tag::DiagPositive).empty());
        EXPECT_TRUE(membership_error(f.n, Tag::UpperUnipotent).empty());
        EXPECT_LE((a_from_log(f.logA) - f.a).cwiseAbs().maxCoeff(), 1e-12 * f.a.cwiseAbs().maxCoeff());
    }
}

TEST(Iwasawa, UniqueOnFactorTriples)
{
    Rng rng(12);
    for (int i = 0; i < 200; ++i) {
        const Mat4 k = random_so4(rng);
        const LogA3 t{0.5 * rng.normal(), 0.5 * rng.normal(), 0.5 * rng.normal()};
        const Mat4 n = nil_to_matrix(random_nil(rng));
        const auto f = iwasawa_decompose(MatrixElement::make(k * a_from_log(t) * n, Tag::SL4));
        EXPECT_LE((f.k - k).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_LE((f.logA - t).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_LE((f.n - n).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(Iwasawa, IllConditionedInput)
{
    const LogA3 t{4.0, 2.5, -1.0};
    Rng rng(13);
    const Mat4 g = random_so4(rng) * a_from_log(t) * nil_to_matrix(random_nil(rng));
    const auto f = iwasawa_decompose(MatrixElement::make(g, Tag::SL4));
    EXPECT_LE((f.product() - g).cwiseAbs().maxCoeff(), 1e-10 * g.cwiseAbs().maxCoeff());
    EXPECT_LE(orthogonal_defect(f.k), 1e-12);
}

TEST(Iwasawa, SymplecticFactorsStaySymplectic)
{
    Rng rng(14);
    for (int i = 0; i < 1000; ++i) {
        const Mat4 g = random_sp4(rng);
        const auto f = iwasawa_decompose(MatrixElement::make(g, Tag::SP4));
        EXPECT_LE((f.product() - g).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_LE(symplectic_defect(f.k), 1e-10);
        EXPECT_LE(symplectic_defect(f.a), 1e-10);
        EXPECT_LE(symplectic_defect(f.n), 1e-10);
        EXPECT_TRUE(membership_error(f.k, Tag::SO4).empty());
        EXPECT_TRUE(membership_error(f.n, Tag::SpN).empty());
        EXPECT_NEAR(f.a(0, 0) * f.a(2, 2), 1.0, 1e-12);
        EXPECT_NEAR(f.a(1, 1) * f.a(3, 3), 1.0, 1e-12);
    }
}

TEST(Iwasawa, RejectsOtherTags)
{
    EXPECT_THROW(iwasawa_decompose(MatrixElement::make(Mat4::Identity(), Tag::SO4)), Error);
}

TEST(Modulus, ClosedFormValues)
{
    EXPECT_DOUBLE_EQ(modulus_factor(LogA3::Zero()), 1.0);
    EXPECT_NEAR(modulus_factor(LogA3{std::log(2.0), 0.0, 0.0}), 64.0, 1e-12);
}

TEST(Modulus, MatchesFiniteDifferenceJacobian)
{
    Rng rng(15);
    for (int s = 0; s < 100; ++s) {
        const LogA3 t{0.7 * rng.normal(), 0.7 * rng.normal(), 0.7 * rng.normal()};
        const NilPoint6 n0 = random_nil(rng);
        Eigen::Matrix<double, 6, 6> Jac;
        const double h = 1e-4;
        for (int j = 0; j < 6; ++j) {
            auto cp = n0.coords(), cm = n0.coords();
            cp[j] += h;
            cm[j] -= h;
            const Mat4 a = a_from_log(t);
            const auto fp = nil_from_matrix(a * nil_to_matrix(NilPoint6::from(cp)) * a.inverse()).coords();
            const auto fm = nil_from_matrix(a * nil_to_matrix(NilPoint6::from(cm)) * a.inverse()).coords();
            for (int i = 0; i < 6; ++i) Jac(i, j) = (fp[i] - fm[i]) / (2 * h);
        }
        const double m = modulus_factor(t);
        EXPECT_LE(std::abs(Jac.determinant() - m) / m, 1e-8);
    }
}

TEST(Modulus, ConjugationMatchesMatrices)
{
    Rng rng(16);
    const LogA3 t{0.3, -0.2, 0.5};
    const auto n = random_nil(rng);
    const Mat4 a = a_from_log(t);
    EXPECT_LE(max_diff(conjugate_by_a(t, n), nil_from_matrix(a * nil_to_matrix(n) * a.inverse())), 1e-12);
}

TEST(MatrixElement, InvariantChecks)
{
    Mat4 m = Mat4::Identity();
    m(1, 0) = 1e-3;
    EXPECT_THROW(MatrixElement::make(m, Tag::UpperUnipotent), Error);
    EXPECT_THROW(MatrixElement::make(2.0 * Mat4::Identity(), Tag::SL4), Error);
    EXPECT_NO_THROW(MatrixElement::make(Mat4::Identity(), Tag::DiagPositive));
}
