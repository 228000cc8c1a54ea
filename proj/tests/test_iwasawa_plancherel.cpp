#include <lgha/iwasawa_plancherel.hpp>

#include <gtest/gtest.h>

using namespace lgha;

namespace {

BandLimited trivial_u()
{
    BandLimited u;
    u.coeffs[{0, 0}] = MatXc::Ones(1, 1);
    return u;
}

/// sqrt(d) times one (1/2,1/2) matrix coefficient.
BandLimited half_half_u()
{
    BandLimited u;
    MatXc C = MatXc::Zero(4, 4);
    C(2, 1) = 0.5;  // f = d tr[C gamma] = 4 * 0.5 * gamma(1,2)
    u.coeffs[{1, 1}] = C;
    return u;
}

SeparableKNAFunction corpus(Rng& rng, BandLimited u, bool with_r = false)
{
    SeparableKNAFunction f{std::move(u), EuclidFactor::random(rng, 6), EuclidFactor::random(rng, 3), std::nullopt};
    if (with_r) f.r = EuclidFactor::random(rng, 4);
    return f;
}

double max_abs(const MatXc& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

} // namespace

TEST(KNA, CoordinatesRoundTrip)
{
    Rng rng(1);
    for (int t = 0; t < 200; ++t) {
        const Mat4 k = random_so4(rng);
        const NilPoint6 n = random_nil(rng, 0.7);
        const LogA3 a(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5));
        const KNACoords c = kna_coords(kna_matrix(k, n, a));
        EXPECT_LT((c.k - k).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_LT((c.t - a).cwiseAbs().maxCoeff(), 1e-10);
        const auto d1 = c.n.coords(), d2 = n.coords();
        for (int i = 0; i < 6; ++i) EXPECT_NEAR(d1[i], d2[i], 1e-10);
        EXPECT_LT((so4_from_su2(su2_from_euler(c.left), su2_from_euler(c.right)) - k).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(KNA, TrivialLabelClosedForm)
{
    const SeparableKNAFunction f{trivial_u(), EuclidFactor::gaussian(6, 0.9, 0.2), EuclidFactor::gaussian(3, 0.7, -0.1), std::nullopt};
    const auto S = kna_transform(f, 2);
    for (const auto& [l, T] : S.Tu) {
        if (l == IrrepLabel{0, 0})
            EXPECT_LT(std::abs(T(0, 0) - 1.0), 1e-12);
        else
            EXPECT_LT(max_abs(T), 1e-12);
    }
    Rng rng(2);
    double err = 0;
    const cplx peak = S.euclid_at(std::vector<std::size_t>(6, 0), std::vector<std::size_t>(3, 0));
    for (int t = 0; t < 200; ++t) {
        std::vector<std::size_t> kx(6), kl(3);
        std::array<double, 6> xi{};
        std::array<double, 3> la{};
        for (int i = 0; i < 6; ++i) {
            kx[i] = static_cast<std::size_t>(rng.uniform(0, 40));
            xi[i] = S.v[i].axes[0].xi(kx[i]);
        }
        for (int i = 0; i < 3; ++i) {
            kl[i] = static_cast<std::size_t>(rng.uniform(0, 40));
            la[i] = S.w[i].axes[0].xi(kl[i]);
        }
        const cplx exact = f.v.ft(xi) * f.w.ft(la);
        err = std::max(err, std::abs(S.at({0, 0}, kx, kl)(0, 0) - exact));
    }
    EXPECT_LT(err / std::abs(peak), 1e-8);
    EXPECT_LT(std::abs(peak - f.v.ft(std::array<double, 6>{}) * f.w.ft(std::array<double, 3>{})) / std::abs(peak), 1e-8);
}

TEST(KNA, Linearity)
{
    Rng rng(3);
    auto f = corpus(rng, BandLimited::random(2, rng));
    auto g = f;
    g.u = BandLimited::random(2, rng);
    auto h = f;
    const cplx c{0.4, 0.9};
    for (auto& [l, C] : h.u.coeffs) C += c * g.u.coeffs.at(l);
    const auto F = kna_transform(f, 2, 256), G = kna_transform(g, 2, 256), H = kna_transform(h, 2, 256);
    const std::vector<std::size_t> kx{1, 2, 0, 3, 1, 0}, kl{2, 1, 0};
    for (const auto& l : so4_labels(2)) EXPECT_LT(max_abs(H.at(l, kx, kl) - F.at(l, kx, kl) - c * G.at(l, kx, kl)), 1e-12);
}

TEST(KNA, NestedQuadratureSpotChecks)
{
    Rng rng(4);
    auto u = half_half_u();
    u.coeffs[{0, 0}] = MatXc::Constant(1, 1, 0.7);
    const auto f = corpus(rng, u);
    const auto rules = nested_rules(f, 1, 2, 3);
    std::vector<SpectralPoint> pts;
    for (int t = 0; t < 5; ++t) {
        SpectralPoint p;
        p.label = t % 2 ? IrrepLabel{1, 1} : IrrepLabel{0, 0};
        for (auto& x : p.xi) x = rng.uniform(-1, 1);
        for (auto& x : p.lambda) x = rng.uniform(-1, 1);
        pts.push_back(p);
    }
    pts[1].label = {1, 1};
    const auto nested = nested_transform(f, pts, rules);
    const auto fact = factorized_transform(f, pts, rules);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double scale = std::max(max_abs(fact[i]), 1e-300);
        EXPECT_LT(max_abs(nested[i] - fact[i]) / scale, 1e-6) << i;
    }
    EXPECT_GT(max_abs(fact[0]), 1e-6);
    EXPECT_GT(max_abs(fact[1]), 1e-6);
}

TEST(Plancherel, SL4TrivialAndHalfHalf)
{
    Rng rng(5);
    for (auto u : {trivial_u(), half_half_u()}) {
        const auto p = plancherel_sl4_check(corpus(rng, u), 2);
        EXPECT_LT(p.rel_err, 1e-6);
        EXPECT_GT(p.lhs, 0.0);
    }
    const auto p = plancherel_sl4_check(corpus(rng, BandLimited::random(2, rng)), 2);
    EXPECT_LT(p.rel_err, 1e-6);
}

TEST(Plancherel, ZeroFunction)
{
    Rng rng(6);
    auto f = corpus(rng, trivial_u());
    f.v.coef = 0.0;
    const auto p = plancherel_sl4_check(f, 1);
    EXPECT_EQ(p.lhs, 0.0);
    EXPECT_EQ(p.rhs, 0.0);
    EXPECT_EQ(p.rel_err, 0.0);
}

TEST(Plancherel, SemidirectGaussian)
{
    Rng rng(7);
    const auto f = corpus(rng, trivial_u(), true);
    const auto p = plancherel_P_check(f, 2);
    EXPECT_LT(p.rel_err, 1e-6);
    EXPECT_EQ(semidirect_transform(f, 1, 64).euclid_dim(), 13u);
    EXPECT_THROW(semidirect_transform(corpus(rng, trivial_u()), 1), ConfigError);
    auto z = f;
    z.r->coef = 0.0;
    EXPECT_EQ(plancherel_P_check(z, 1).rel_err, 0.0);
}

TEST(Plancherel, SemidirectNestedSpotCheck)
{
    Rng rng(8);
    const auto f = corpus(rng, half_half_u(), true);
    const auto rules = nested_rules(f, 1, 2, 2, 3);
    SpectralPoint p;
    p.label = {1, 1};
    for (auto& x : p.xi) x = rng.uniform(-1, 1);
    for (auto& x : p.lambda) x = rng.uniform(-1, 1);
    for (auto& x : p.eta) x = rng.uniform(-1, 1);
    const auto a = nested_transform(f, {p}, rules), b = factorized_transform(f, {p}, rules);
    EXPECT_LT(max_abs(a[0] - b[0]) / max_abs(b[0]), 1e-6);
}

TEST(SP4, CoordinatesRoundTrip)
{
    Rng rng(9);
    for (int t = 0; t < 100; ++t) {
        const U2Point k{rng.uniform(0, 2 * pi), {rng.uniform(0, 2 * pi), std::acos(rng.uniform(-1, 1)), rng.uniform(0, 4 * pi)}};
        const SpNPoint4 n{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
        const double t1 = rng.uniform(-0.5, 0.5), t2 = rng.uniform(-0.5, 0.5);
        const Mat4 g = sp4_kna(k, n, t1, t2);
        EXPECT_LT(symplectic_defect(g), 1e-10);
        const SP4Coords c = sp4_coords(g);
        EXPECT_NEAR(c.t1, t1, 1e-10);
        EXPECT_NEAR(c.t2, t2, 1e-10);
        EXPECT_NEAR(c.n.x, n.x, 1e-9);
        EXPECT_NEAR(c.n.y, n.y, 1e-9);
        EXPECT_NEAR(c.n.z, n.z, 1e-9);
        EXPECT_NEAR(c.n.t, n.t, 1e-9);
        EXPECT_LT((u2_real_matrix(c.k) - u2_real_matrix(k)).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(SP4, PlancherelAndDimensions)
{
    Rng rng(10);
    SeparableSP4Function f;
    f.u[{0, 0}] = MatXc::Ones(1, 1);
    f.v = EuclidFactor::random(rng, 4);
    f.w = EuclidFactor::random(rng, 2);
    EXPECT_LT(sp4_restrict_check(f).rel_err, 1e-6);
    for (const auto& l : u2_labels(1)) f.u[l] = MatXc::Random(l.dim(), l.dim());
    EXPECT_LT(sp4_restrict_check(f).rel_err, 1e-6);
    // through the group: value at k n a equals the factor product
    const U2Point k{0.3, {0.2, 1.1, 2.0}};
    const SpNPoint4 n{0.1, -0.2, 0.3, 0.05};
    const double nv[4] = {n.x, n.y, n.z, n.t}, tv[2] = {0.1, -0.2};
    EXPECT_LT(std::abs(f(sp4_kna(k, n, 0.1, -0.2)) - f.u_at(k) * f.v(nv) * f.w(tv)), 1e-9);
    auto z = f;
    z.v.coef = 0.0;
    const auto p = sp4_restrict_check(z);
    EXPECT_EQ(p.lhs, 0.0);
    EXPECT_EQ(p.rhs, 0.0);
    const LieDims d = sp4_lie_dims();
    EXPECT_EQ(d.k, 4);
    EXPECT_EQ(d.a, 2);
    EXPECT_EQ(d.n, 4);
    EXPECT_EQ(d.total, 10);
    EXPECT_EQ(d.k + d.a + d.n, d.total);
}

TEST(Semidirect, LawMatchesAffineMatrices)
{
    Rng rng(11);
    for (int t = 0; t < 100; ++t) {
        const AffinePoint a{Vec4::Random(), random_sl4(rng)}, b{Vec4::Random(), random_sl4(rng)};
        EXPECT_LT((affine_matrix(affine_mul(a, b)) - affine_matrix(a) * affine_matrix(b)).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((affine_matrix(affine_inv(a)) - affine_matrix(a).inverse()).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(Lifts, UpsilonInvariance)
{
    Rng rng(12);
    const auto f = corpus(rng, BandLimited::random(1, rng));
    const GFn fg = [&](const Mat4& g) { return f(g); };
    const auto U = lift_upsilon(fg);
    double err = 0, restrict_err = 0;
    for (int t = 0; t < 1000; ++t) {
        const Mat4 g = random_sl4(rng, 0.3), h = random_so4(rng), k1 = random_so4(rng);
        err = std::max(err, std::abs(U(g * h, h.transpose() * k1) - U(g, k1)));
        restrict_err = std::max(restrict_err, std::abs(U(g, Mat4::Identity()) - fg(g)));
        EXPECT_EQ(U(g, k1), U(g * Mat4::Identity(), Mat4::Identity() * k1));
    }
    EXPECT_LT(err, 1e-10);
    EXPECT_EQ(restrict_err, 0.0);
}

TEST(Lifts, SemidirectInvariance)
{
    Rng rng(13);
    const auto f = corpus(rng, trivial_u(), true);
    const PFn fp = [&](const Vec4& v, const Mat4& g) { return f(v, g); };
    const auto ft = lift_semidirect(fp);
    const auto hf = lift_h(fp);
    double err = 0, herr = 0;
    for (int t = 0; t < 1000; ++t) {
        const Vec4 v = 0.5 * Vec4::Random();
        const Mat4 g = random_sl4(rng, 0.3), h = random_sl4(rng, 0.3), q = random_sl4(rng, 0.3);
        const Mat4 qi = q.inverse();
        err = std::max(err, std::abs(ft(qi * v, g, qi * h) - ft(v, g * qi, h)));
        herr = std::max(herr, std::abs(hf(v, g) - ft(v, g, Mat4::Identity())));
    }
    EXPECT_LT(err, 1e-10);
    EXPECT_EQ(herr, 0.0);
}

TEST(Modulus, ChangeOfMeasureOnN)
{
    // int v(a n a^-1) dn = int v(n) dn / prod_{i<j} a_i/a_j
    Rng rng(14);
    const auto v = EuclidFactor::gaussian(6, 0.8, 0.1);
    for (int t = 0; t < 5; ++t) {
        const LogA3 s(rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4));
        const Vec4 a = a_diag(s);
        const double scale[6] = {a(0) / a(1), a(1) / a(2), a(0) / a(2), a(2) / a(3), a(1) / a(3), a(0) / a(3)};
        cplx lhs = 1, rhs = 1;
        for (int i = 0; i < 6; ++i) {
            const GridSpec g{{box_axis("x", -15, 15, 3000)}};
            lhs *= integrate(g, [&](std::span<const double> x) { return v.axes[i](scale[i] * x[0]); });
            rhs *= integrate(g, [&](std::span<const double> x) { return v.axes[i](x[0]); });
        }
        EXPECT_LT(std::abs(lhs - rhs / modulus_factor(s)) / std::abs(lhs), 1e-10);
    }
}
