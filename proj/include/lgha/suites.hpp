#pragma once

#include "dsl.hpp"
#include "iwasawa_plancherel.hpp"
#include "nilfourier.hpp"
#include "peterweyl.hpp"
#include "report.hpp"
#include "solvers.hpp"

#include <fstream>

namespace lgha {

// ----------------------------------------------------------------------------
// Configuration
// ----------------------------------------------------------------------------

struct Budgets {
    std::size_t max_grid_points = 16777216;
    std::size_t max_mc_samples = 1000000;
    int max_so4_bandlimit = 2;  ///< J, with half-integer labels j <= J
};

inline std::map<std::string, double> default_tolerances()
{
    return {{"group_law", 1e-12},       {"nil_inverse", 1e-12},
            {"iwasawa", 1e-10},         {"modulus", 1e-8},
            {"nil_plancherel_separable", 1e-8}, {"nil_plancherel_bump", 1e-6},
            {"bilinear_grid", 1e-6},    {"mc_sigmas", 3.0},
            {"convolution_equality", 2e-2}, {"so4_schur", 1e-12},
            {"so4_inversion", 1e-10},   {"so4_plancherel", 1e-10},
            {"kna_plancherel", 1e-6},   {"kna_spot", 1e-6},
            {"lift", 1e-10},            {"operator_identity", 1e-9},
            {"mutation_min", 1e-3},     {"cr_solve", 1e-6},
            {"cr_residual", 1e-8},      {"lewy_solve", 1e-4},
            {"four_stage", 1e-3},       {"solve_residual", 1e-3}};
}

struct SuiteConfig {
    std::string suite = "all";
    std::uint64_t seed = 42;
    Budgets budgets;
    std::map<std::string, double> tol = default_tolerances();
    std::string out;
    std::string format = "json";

    double t(const std::string& key) const { return tol.at(key); }

    void validate() const
    {
        if (budgets.max_grid_points == 0 || budgets.max_mc_samples == 0 || budgets.max_so4_bandlimit <= 0)
            throw ConfigError("budgets must be positive");
        if (format != "json" && format != "csv") throw ConfigError("format must be json or csv");
        for (const auto& [k, v] : tol)
            if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("tolerance '" + k + "' must be positive");
    }

    nlohmann::ordered_json echo() const
    {
        nlohmann::ordered_json j;
        j["suite"] = suite;
        j["seed"] = seed;
        j["budgets"] = {{"max_grid_points", budgets.max_grid_points},
                        {"max_mc_samples", budgets.max_mc_samples},
                        {"max_so4_bandlimit", budgets.max_so4_bandlimit}};
        nlohmann::ordered_json t = nlohmann::ordered_json::object();
        for (const auto& [k, v] : tol) t[k] = v;
        j["tolerances"] = t;
        j["format"] = format;
        return j;
    }
};

namespace detail {

template <typename T>
T json_get(const nlohmann::json& j, const std::string& key)
{
    try {
        return j.get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("config key '" + key + "' has the wrong type");
    }
}

inline std::size_t json_count(const nlohmann::json& j, const std::string& key)
{
    if (!j.is_number()) throw ConfigError("config key '" + key + "' must be a number");
    const double v = j.get<double>();
    if (!(v >= 1.0) || v > 1e15 || v != std::floor(v)) throw ConfigError("config key '" + key + "' must be a positive integer");
    return static_cast<std::size_t>(v);
}

} // namespace detail

/// Applies a JSON object on top of cfg. Unknown keys are rejected.
inline void apply_config_json(SuiteConfig& cfg, const nlohmann::json& j)
{
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, v] : j.items()) {
        if (key == "suite") cfg.suite = detail::json_get<std::string>(v, key);
        else if (key == "seed") {
            if (!v.is_number_unsigned()) throw ConfigError("config key 'seed' must be a nonnegative integer");
            cfg.seed = v.get<std::uint64_t>();
        } else if (key == "output") cfg.out = detail::json_get<std::string>(v, key);
        else if (key == "format") cfg.format = detail::json_get<std::string>(v, key);
        else if (key == "budgets") {
            if (!v.is_object()) throw ConfigError("config key 'budgets' must be an object");
            for (const auto& [b, bv] : v.items()) {
                if (b == "max_grid_points") cfg.budgets.max_grid_points = detail::json_count(bv, b);
                else if (b == "max_mc_samples") cfg.budgets.max_mc_samples = detail::json_count(bv, b);
                else if (b == "max_so4_bandlimit") cfg.budgets.max_so4_bandlimit = static_cast<int>(detail::json_count(bv, b));
                else throw ConfigError("unknown budget key '" + b + "'");
            }
        } else if (key == "tolerances") {
            if (!v.is_object()) throw ConfigError("config key 'tolerances' must be an object");
            for (const auto& [t, tv] : v.items()) {
                if (!cfg.tol.count(t)) throw ConfigError("unknown tolerance key '" + t + "'");
                if (!tv.is_number()) throw ConfigError("tolerance '" + t + "' must be a number");
                cfg.tol[t] = tv.get<double>();
            }
        } else
            throw ConfigError("unknown config key '" + key + "'");
    }
}

inline void load_config_file(SuiteConfig& cfg, const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("malformed config JSON: ") + e.what());
    }
    apply_config_json(cfg, j);
}

// ----------------------------------------------------------------------------
// Batteries
// ----------------------------------------------------------------------------

using Battery = std::function<std::vector<Check>(const SuiteConfig&)>;

namespace battery {

inline Rng rng_for(const SuiteConfig& c, std::uint64_t stream) { return Rng(c.seed, stream); }

inline double max_diff(const NilPoint6& a, const NilPoint6& b)
{
    double m = 0;
    const auto ca = a.coords(), cb = b.coords();
    for (int i = 0; i < 6; ++i) m = std::max(m, std::abs(ca[i] - cb[i]));
    return m;
}

inline LPoint9 random_L(Rng& rng, double s = 1.0)
{
    std::array<double, 9> c{};
    for (auto& v : c) v = rng.uniform(-s, s);
    return LPoint9::from(c);
}

inline std::vector<Check> group_laws(const SuiteConfig& c)
{
    Rng rng = rng_for(c, 1);
    double nil = 0, heis = 0, Lres = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto p = random_nil(rng), q = random_nil(rng);
        nil = std::max(nil, max_diff(nil_mul(p, q), nil_from_matrix(nil_to_matrix(p) * nil_to_matrix(q))));
        const auto prod = L_mul(nil_into_L(p), nil_into_L(q));
        Lres = std::max(Lres, max_diff(nil_from_L(prod), nil_mul(p, q)));
    }
    for (int i = 0; i < 1000; ++i) {
        const HeisPoint3 p{rng.normal(), rng.normal(), rng.normal()}, q{rng.normal(), rng.normal(), rng.normal()};
        heis = std::max(heis, (heis_to_matrix(heis_mul(p, q)) - heis_to_matrix(p) * heis_to_matrix(q)).cwiseAbs().maxCoeff());
    }
    const double tol = c.t("group_law");
    return {abs_check("unipotent-law-vs-matrix-product", "unipotent-group-law", nil, tol),
            abs_check("heisenberg-law-vs-matrix-product", "heisenberg-group-law", heis, tol),
            abs_check("L-law-restricts-to-unipotent-law", "lifted-group-law", Lres, tol)};
}

inline std::vector<Check> nil_inverse(const SuiteConfig& c)
{
    Rng rng = rng_for(c, 2);
    double printed = 0, corrected = 0, matrix = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto Y = random_nil(rng), X = random_nil(rng);
        const auto exact = nil_mul(nil_inv(Y), X);
        printed = std::max(printed, max_diff(exact, inverse_expansion_reference(Y, X)));
        corrected = std::max(corrected, max_diff(exact, inverse_expansion_corrected(Y, X)));
        matrix = std::max(matrix, max_diff(nil_inv(Y), nil_from_matrix(nil_to_matrix(Y).inverse())));
    }
    const double tol = c.t("nil_inverse");
    return {abs_check("inverse-expansion-as-printed", "unipotent-inverse-expansion", printed, tol),
            abs_check("inverse-expansion-corrected", "plumbing", corrected, tol),
            abs_check("inverse-vs-matrix-inverse", "unipotent-group-law", matrix, tol)};
}

inline std::vector<Check> iwasawa(const SuiteConfig& c)
{
    Rng rng = rng_for(c, 3);
    double sl_rec = 0, sl_member = 0, sp_rec = 0, sp_sym = 0;
    bool sl_ok = true, sp_ok = true;
    for (int i = 0; i < 1000; ++i) {
        const Mat4 g = random_sl4(rng);
        const auto f = iwasawa_decompose(MatrixElement::make(g, Tag::SL4));
        sl_rec = std::max(sl_rec, (f.product() - g).cwiseAbs().maxCoeff());
        sl_member = std::max(sl_member, orthogonal_defect(f.k));
        sl_ok = sl_ok && membership_error(f.a, Tag::DiagPositive).empty() && membership_error(f.n, Tag::UpperUnipotent).empty();
    }
    for (int i = 0; i < 1000; ++i) {
        const Mat4 g = random_sp4(rng);
        const auto f = iwasawa_decompose(MatrixElement::make(g, Tag::SP4));
        sp_rec = std::max(sp_rec, (f.product() - g).cwiseAbs().maxCoeff());
        sp_sym = std::max({sp_sym, symplectic_defect(f.k), symplectic_defect(f.a), symplectic_defect(f.n)});
        sp_ok = sp_ok && membership_error(f.k, Tag::SO4).empty() && membership_error(f.n, Tag::SpN).empty();
    }
    const double tol = c.t("iwasawa");
    return {abs_check("sl4-kan-reconstruction", "iwasawa-decomposition", sl_rec, tol),
            abs_check("sl4-k-orthogonal", "iwasawa-decomposition", sl_member, tol),
            exact_check("sl4-a-positive-n-unipotent", "iwasawa-decomposition", sl_ok),
            abs_check("sp4-kan-reconstruction", "symplectic-iwasawa", sp_rec, tol),
            abs_check("sp4-factors-symplectic", "symplectic-iwasawa", sp_sym, tol),
            exact_check("sp4-k-orthogonal-n-in-spn", "symplectic-iwasawa", sp_ok)};
}

inline std::vector<Check> modulus(const SuiteConfig& c)
{
    Rng rng = rng_for(c, 4);
    double worst = 0;
    for (int s = 0; s < 100; ++s) {
        const LogA3 t{0.7 * rng.normal(), 0.7 * rng.normal(), 0.7 * rng.normal()};
        const NilPoint6 n0 = random_nil(rng);
        Eigen::Matrix<double, 6, 6> Jac;
        const double h = 1e-4;
        const Mat4 a = a_from_log(t), ai = a.inverse();
        for (int j = 0; j < 6; ++j) {
            auto cp = n0.coords(), cm = n0.coords();
            cp[j] += h;
            cm[j] -= h;
            const auto fp = nil_from_matrix(a * nil_to_matrix(NilPoint6::from(cp)) * ai).coords();
            const auto fm = nil_from_matrix(a * nil_to_matrix(NilPoint6::from(cm)) * ai).coords();
            for (int i = 0; i < 6; ++i) Jac(i, j) = (fp[i] - fm[i]) / (2 * h);
        }
        worst = std::max(worst, rel_of(Jac.determinant(), modulus_factor(t)));
    }
    Check ch = abs_check("conjugation-jacobian-vs-root-product", "modulus-factor", worst, c.t("modulus"));
    ch.kind = "rel";
    ch.note = "max relative error over 100 samples";
    return {ch};
}

inline std::vector<Check> nil_plancherel(const SuiteConfig& c)
{
    Rng rng = rng_for(c, 5);
    std::vector<Check> out;
    for (int t = 0; t < 4; ++t) {
        const auto f = SepFunction::random(rng, 0.5, 2.0, 1.0, true);
        const auto r = plancherel_N_check(f);
        out.push_back(rel_check("separable-corpus-" + std::to_string(t), "unipotent-plancherel", r.lhs, r.rhs,
                                c.t("nil_plancherel_separable")));
    }
    const auto bump = CorrelatedGaussian::random(rng);
    const auto r = plancherel_N_check(bump, 12, 5.5, c.budgets.max_grid_points, std::min<std::size_t>(c.budgets.max_mc_samples, 200000),
                                      c.seed + 5);
    if (r.path == "grid") {
        out.push_back(rel_check("non-separable-bump-grid", "unipotent-plancherel", r.lhs, r.rhs, c.t("nil_plancherel_bump")));
        out.push_back(rel_check("non-separable-bump-vs-closed-form", "unipotent-plancherel", r.lhs, bump.norm2_exact(),
                                c.t("nil_plancherel_bump")));
    } else {
        out.push_back(mc_check("non-separable-bump-mc", "unipotent-plancherel", r.lhs, r.rhs, r.stderr_, c.t("mc_sigmas")));
    }
    return out;
}

inline std::vector<Check> nil_bilinear(const SuiteConfig& c)
{
    Rng rng = rng_for(c, 6);
    std::vector<Check> out;
    for (int t = 0; t < 5; ++t) {
        const auto f = SepFunction::random(rng, 0.5, 2.0, 1.0, true), phi = SepFunction::random(rng, 0.5, 2.0, 1.0, true);
        const auto r = theorem32_check(f, phi);
        Check ch = abs_check("bilinear-grid-" + std::to_string(t), "unipotent-bilinear-identity", r.rel_err,
                             c.t("bilinear_grid"));
        ch.kind = "rel";
        ch.lhs = std::abs(r.lhs);
        ch.rhs = std::abs(r.rhs);
        ch.abs_err = r.abs_err;
        out.push_back(ch);
    }
    const auto f = SepFunction::random(rng, 0.7, 1.2, 0.5), phi = SepFunction::random(rng, 0.7, 1.2, 0.5);
    const auto r = theorem32_check_mc(f, phi, c.budgets.max_mc_samples, c.seed + 6);
    Check ch = mc_check("bilinear-monte-carlo", "unipotent-bilinear-identity", 0.0, 0.0, r.stderr_, c.t("mc_sigmas"));
    ch.lhs = r.lhs.real();
    ch.rhs = r.rhs.real();
    ch.abs_err = r.abs_err;
    ch.rel_err = r.rel_err;
    ch.pass = ch.abs_err <= ch.tol;
    ch.note += " n=" + std::to_string(c.budgets.max_mc_samples);
    out.push_back(ch);
    return out;
}

inline std::vector<Check> nil_convolution_equality(const SuiteConfig& c)
{
    Rng rng = rng_for(c, 7);
    const auto f = SepFunction::gaussian({0.1, -0.2, 0.2, 0.3, 0.1, -0.1}, {1, 1, 1, 1, 1, 1});
    const auto F = lift_to_L(f.fn());
    const auto u = SepFunction::gaussian({}, {0.7, 0.7, 0.7, 0.7, 0.7, 0.7});
    const std::size_t n = std::min<std::size_t>(c.budgets.max_mc_samples, 100000);
    std::vector<Check> out;
    for (int t = 0; t < 10; ++t) {
        const LPoint9 P = random_L(rng, 1.0);
        const auto r = convolution_equality_check(F, u, P, n, c.seed * 31 + t);
        Check ch = abs_check("convolution-equality-point-" + std::to_string(t), "lifted-convolution-equality", r.rel_err,
                             c.t("convolution_equality"));
        ch.kind = "rel";
        ch.lhs = std::abs(r.noncommutative);
        ch.rhs = std::abs(r.commutative);
        ch.abs_err = std::abs(r.noncommutative - r.commutative);
        ch.note = "stderr=" + std::to_string(r.stderr_);
        out.push_back(ch);
    }
    return out;
}

inline std::vector<Check> nil_lift(const SuiteConfig& c)
{
    Rng rng = rng_for(c, 8);
    const auto f = SepFunction::random(rng);
    const auto ft = lift_to_L(f.fn());
    double err = 0, restrict_err = 0;
    for (int t = 0; t < 1000; ++t) {
        const LPoint9 p = random_L(rng);
        const double h = rng.uniform(-1, 1), r = rng.uniform(-1, 1), k = rng.uniform(-1, 1);
        err = std::max(err, std::abs(ft(lift_shift(p, h, r, k)) - ft(p)));
        const NilPoint6 m = random_nil(rng);
        restrict_err = std::max(restrict_err, std::abs(ft(nil_into_L(m)) - f(m)));
    }
    return {abs_check("unipotent-lift-shift-invariance", "unipotent-lift-invariance", err, c.t("lift")),
            abs_check("unipotent-lift-restriction", "unipotent-lift-invariance", restrict_err, c.t("lift"))};
}

inline std::vector<Check> so4_peter_weyl(const SuiteConfig& c)
{
    if (c.budgets.max_so4_bandlimit < 2)
        throw BudgetExceeded("so4 battery needs max_so4_bandlimit >= 2, got " + std::to_string(c.budgets.max_so4_bandlimit));
    const int J = 4;  // twice the band limit 2
    Rng rng = rng_for(c, 9);
    // Schur orthogonality: the SO(4) Gram matrix on the product rule is the
    // Kronecker product of the SU(2) Gram matrices on valid label pairs.
    const auto nodes = su2_rule(J);
    const RepTable T(nodes, J);
    std::vector<std::pair<int, int>> index;
    for (int tj = 0; tj <= J; ++tj)
        for (int e = 0; e < (tj + 1) * (tj + 1); ++e) index.emplace_back(tj, e);
    const auto n = static_cast<Eigen::Index>(index.size());
    MatXc G = MatXc::Zero(n, n);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        Eigen::VectorXcd v(n);
        for (Eigen::Index p = 0; p < n; ++p) v(p) = T.D[index[p].first][k].data()[index[p].second];
        G += nodes[k].weight * v * v.adjoint();
    }
    MatXc E = MatXc::Zero(n, n);
    for (Eigen::Index p = 0; p < n; ++p) E(p, p) = 1.0 / (index[p].first + 1);
    double schur = 0;
    for (Eigen::Index p = 0; p < n; ++p)
        for (Eigen::Index r = 0; r < n; ++r)
            for (Eigen::Index s = 0; s < n; ++s) {
                if ((index[p].first + index[s].first) % 2) continue;
                for (Eigen::Index u = 0; u < n; ++u) {
                    if ((index[r].first + index[u].first) % 2) continue;
                    schur = std::max(schur, std::abs(G(p, r) * G(s, u) - E(p, r) * E(s, u)));
                }
            }
    const auto f = BandLimited::random(J, rng);
    const auto q = so4_quadrature(J, c.budgets.max_grid_points);
    const auto F = f.sample(q);
    const auto Tf = compact_transform(F, J, q);
    double coef = 0;
    for (const auto& [l, C] : f.coeffs) coef = std::max(coef, (Tf.at(l) - C).cwiseAbs().maxCoeff());
    double inv = 0;
    for (int t = 0; t < 200; ++t) {
        const Euler a{rng.uniform(0, 2 * pi), std::acos(rng.uniform(-1, 1)), rng.uniform(0, 4 * pi)};
        const Euler b{rng.uniform(0, 2 * pi), std::acos(rng.uniform(-1, 1)), rng.uniform(0, 4 * pi)};
        inv = std::max(inv, std::abs(compact_inverse(Tf, a, b) - f(a, b)));
    }
    const auto p = compact_plancherel_check(F, J, q);
    return {abs_check("schur-orthogonality", "so4-schur-orthogonality", schur, c.t("so4_schur")),
            abs_check("transform-recovers-coefficients", "so4-inversion", coef, c.t("so4_inversion")),
            abs_check("inversion-at-200-points", "so4-inversion", inv, c.t("so4_inversion")),
            rel_check("plancherel", "so4-plancherel", p.lhs, p.rhs, c.t("so4_plancherel"))};
}

inline SeparableKNAFunction kna_corpus(Rng& rng, BandLimited u, bool with_r = false)
{
    SeparableKNAFunction f{std::move(u), EuclidFactor::random(rng, 6), EuclidFactor::random(rng, 3), std::nullopt};
    if (with_r) f.r = EuclidFactor::random(rng, 4);
    return f;
}

inline BandLimited trivial_u()
{
    BandLimited u;
    u.coeffs[{0, 0}] = MatXc::Ones(1, 1);
    return u;
}

inline BandLimited half_half_u()
{
    BandLimited u;
    MatXc C = MatXc::Zero(4, 4);
    C(2, 1) = 0.5;
    u.coeffs[{1, 1}] = C;
    return u;
}

inline double max_abs(const MatXc& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

inline std::vector<Check> sl4_plancherel(const SuiteConfig& c)
{
    Rng rng = rng_for(c, 10);
    std::vector<Check> out;
    const double tol = c.t("kna_plancherel");
    int t = 0;
    for (auto u : {trivial_u(), half_half_u(), BandLimited::random(2, rng)}) {
        const auto p = plancherel_sl4_check(kna_corpus(rng, u), 2);
        out.push_back(rel_check("sl4-plancherel-" + std::to_string(t++), "sl4-combined-plancherel", p.lhs, p.rhs, tol));
    }
    auto u = half_half_u();
    u.coeffs[{0, 0}] = MatXc::Constant(1, 1, 0.7);
    const auto f = kna_corpus(rng, u);
    const auto rules = nested_rules(f, 1, 2, 3);
    std::vector<SpectralPoint> pts;
    for (int s = 0; s < 5; ++s) {
        SpectralPoint p;
        p.label = s % 2 ? IrrepLabel{1, 1} : IrrepLabel{0, 0};
        for (auto& x : p.xi) x = rng.uniform(-1, 1);
        for (auto& x : p.lambda) x = rng.uniform(-1, 1);
        pts.push_back(p);
    }
    const auto nested = nested_transform(f, pts, rules);
    const auto fact = factorized_transform(f, pts, rules);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double scale = std::max(max_abs(fact[i]), 1e-300);
        Check ch = abs_check("factorized-vs-nested-" + std::to_string(i), "kna-transform-factorization",
                             max_abs(nested[i] - fact[i]) / scale, c.t("kna_spot"));
        ch.kind = "rel";
        ch.lhs = max_abs(nested[i]);
        ch.rhs = max_abs(fact[i]);
        out.push_back(ch);
    }
    return out;
}

inline std::vector<Check> sp4_plancherel(const SuiteConfig& c)
{
    Rng rng = rng_for(c, 11);
    SeparableSP4Function f;
    f.u[{0, 0}] = MatXc::Ones(1, 1);
    f.v = EuclidFactor::random(rng, 4);
    f.w = EuclidFactor::random(rng, 2);
    const auto a = sp4_restrict_check(f);
    for (const auto& l : u2_labels(1)) {
        MatXc m(l.dim(), l.dim());
        for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
        f.u[l] = m;
    }
    const auto b = sp4_restrict_check(f);
    double coord = 0;
    for (int t = 0; t < 100; ++t) {
        const U2Point k{rng.uniform(0, 2 * pi), {rng.uniform(0, 2 * pi), std::acos(rng.uniform(-1, 1)), rng.uniform(0, 4 * pi)}};
        const SpNPoint4 n{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
        const double t1 = rng.uniform(-0.5, 0.5), t2 = rng.uniform(-0.5, 0.5);
        const SP4Coords cc = sp4_coords(sp4_kna(k, n, t1, t2));
        coord = std::max({coord, std::abs(cc.t1 - t1), std::abs(cc.t2 - t2), std::abs(cc.n.x - n.x), std::abs(cc.n.y - n.y),
                          std::abs(cc.n.z - n.z), std::abs(cc.n.t - n.t)});
    }
    const LieDims d = sp4_lie_dims();
    return {rel_check("sp4-plancherel-trivial-u2", "sp4-combined-plancherel", a.lhs, a.rhs, c.t("kna_plancherel")),
            rel_check("sp4-plancherel-band-1", "sp4-combined-plancherel", b.lhs, b.rhs, c.t("kna_plancherel")),
            abs_check("sp4-kna-coordinates-round-trip", "symplectic-iwasawa", coord, 1e-9),
            exact_check("sp4-dimension-count", "sp4-combined-plancherel", d.k + d.a + d.n == d.total && d.total == 10)};
}

inline std::vector<Check> semidirect_plancherel(const SuiteConfig& c)
{
    Rng rng = rng_for(c, 12);
    std::vector<Check> out;
    const auto f = kna_corpus(rng, trivial_u(), true);
    const auto p = plancherel_P_check(f, 2);
    out.push_back(rel_check("semidirect-plancherel-gaussian", "semidirect-plancherel", p.lhs, p.rhs, c.t("kna_plancherel")));
    const auto g = kna_corpus(rng, half_half_u(), true);
    const auto q = plancherel_P_check(g, 2);
    out.push_back(rel_check("semidirect-plancherel-half-half", "semidirect-plancherel", q.lhs, q.rhs, c.t("kna_plancherel")));
    const auto rules = nested_rules(g, 1, 2, 2, 3);
    SpectralPoint sp;
    sp.label = {1, 1};
    for (auto& x : sp.xi) x = rng.uniform(-1, 1);
    for (auto& x : sp.lambda) x = rng.uniform(-1, 1);
    for (auto& x : sp.eta) x = rng.uniform(-1, 1);
    const auto a = nested_transform(g, {sp}, rules), b = factorized_transform(g, {sp}, rules);
    Check ch = abs_check("semidirect-factorized-vs-nested", "kna-transform-factorization", max_abs(a[0] - b[0]) / max_abs(b[0]),
                         c.t("kna_spot"));
    ch.kind = "rel";
    out.push_back(ch);
    return out;
}

inline std::vector<Check> kna_lifts(const SuiteConfig& c)
{
    Rng rng = rng_for(c, 13);
    const auto f = kna_corpus(rng, BandLimited::random(1, rng));
    const GFn fg = [&](const Mat4& g) { return f(g); };
    const auto U = lift_upsilon(fg);
    double up = 0;
    for (int t = 0; t < 1000; ++t) {
        const Mat4 g = random_sl4(rng, 0.3), h = random_so4(rng), k1 = random_so4(rng);
        up = std::max(up, std::abs(U(g * h, h.transpose() * k1) - U(g, k1)));
    }
    const auto fs = kna_corpus(rng, trivial_u(), true);
    const PFn fp = [&](const Vec4& v, const Mat4& g) { return fs(v, g); };
    const auto ft = lift_semidirect(fp);
    double sd = 0;
    for (int t = 0; t < 1000; ++t) {
        Vec4 v;
        for (int i = 0; i < 4; ++i) v(i) = rng.uniform(-0.5, 0.5);
        const Mat4 g = random_sl4(rng, 0.3), h = random_sl4(rng, 0.3), q = random_sl4(rng, 0.3);
        const Mat4 qi = q.inverse();
        sd = std::max(sd, std::abs(ft(qi * v, g, qi * h) - ft(v, g * qi, h)));
    }
    return {abs_check("upsilon-lift-invariance", "compact-lift-invariance", up, c.t("lift")),
            abs_check("semidirect-lift-invariance", "semidirect-lift-invariance", sd, c.t("lift"))};
}

inline std::vector<Check> operator_lifts(const SuiteConfig& c)
{
    const auto corpus = standard_corpus(c.seed);
    const auto& f = corpus[6];
    Rng rng = rng_for(c, 14);
    double tau = 0, iota = 0;
    for (int n = 0; n < 1000; ++n) {
        const GRPoint p{{rng.uniform(-2, 2), rng.uniform(-2, 2)}, rng.uniform(-2, 2), rng.uniform(-2, 2)};
        const double k = rng.uniform(-2, 2);
        tau = std::max(tau, std::abs(tau_lift(f.value, tau_shift(p, k)) - tau_lift(f.value, p)));
        iota = std::max(iota, std::abs(iota_lift(f.value, iota_shift(p, k)) - iota_lift(f.value, p)));
    }
    return {abs_check("tau-lift-invariance", "existence-lift-invariance", tau, c.t("lift")),
            abs_check("iota-lift-invariance", "existence-lift-invariance", iota, c.t("lift"))};
}

inline Check identity_check(const IdentityReport& r, double tol)
{
    Check ch = abs_check(r.name, r.anchor, r.max_abs, tol);
    ch.rhs = r.max_ref;
    ch.note = std::to_string(r.evaluations) + " evaluations";
    return ch;
}

inline std::vector<Check> operator_identities(const SuiteConfig& c)
{
    const auto corpus = standard_corpus(c.seed);
    const auto points = random_points(c.seed + 1, 100);
    const double tol = c.t("operator_identity");
    std::vector<Check> out;
    for (const auto& id : paper_identities()) out.push_back(identity_check(verify_identity(id, corpus, points, tol), tol));
    for (const auto& id : form_identities()) {
        Check ch = identity_check(verify_identity(id, corpus, points, tol), tol);
        ch.paper_anchor = "plumbing";
        out.push_back(ch);
    }
    const auto m = verify_identity(mutated_identity(), corpus, points, tol);
    Check ch = exact_check("mutation-is-detected", "mutation-check", m.max_abs > c.t("mutation_min"),
                           "max_abs=" + std::to_string(m.max_abs));
    ch.lhs = m.max_abs;
    ch.rhs = c.t("mutation_min");
    out.push_back(ch);
    return out;
}

inline std::vector<Check> brackets(const SuiteConfig& c)
{
    using namespace ops;
    const auto X = field_X(), Y = field_Y(), Z = field_Z();
    bool rank_ok = true;
    for (const auto& p : random_points(c.seed + 2, 100, 5.0)) rank_ok = rank_ok && hormander_rank({X, Y}, p, 2) == 3;
    return {exact_check("[X,Y] = 2Z", "heisenberg-bracket", lie_bracket(X, Y) == Z * CRational(2)),
            exact_check("[Z,X] = 0 and [Z,Y] = 0", "heisenberg-bracket",
                        lie_bracket(Z, X).is_zero() && lie_bracket(Z, Y).is_zero()),
            exact_check("bracket equals operator commutator", "plumbing", X.op() * Y.op() - Y.op() * X.op() == lie_bracket(X, Y).op()),
            exact_check("hormander-rank-3-at-100-points", "hormander-bracket-condition", rank_ok)};
}

inline std::vector<Check> hormander_ops(const SuiteConfig& c)
{
    using namespace ops;
    const auto Q = hormander_Q(), P = hormander_P(), Pb = hormander_Pbar();
    Rng rng = rng_for(c, 15);
    double sym = 0;
    for (int t = 0; t < 100; ++t) {
        const Vec3 xi{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        const Vec3 p{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        const cplx a = P.principal_symbol(xi, p), b = Pb.principal_symbol(xi, p);
        sym = std::max(sym, std::abs(Q.principal_symbol(xi, p) - a * b * b * a) / std::max(1.0, std::abs(a * b * b * a)));
    }
    return {exact_check("Q(x,D) has order 4", "hormander-example-operator", Q.order() == 4),
            abs_check("Q(x,D) principal symbol is the product", "hormander-example-operator", sym, 1e-12)};
}

inline CorpusFn solver_bump()
{
    using namespace ops;
    return gaussian_poly({0.5, 2.0, 2.0}, {0.0, 0.1, -0.2}, cplx(1.0, 0.5), Poly(1) + c(1, 2) * X - Poly(i) * Y * Y);
}

inline std::vector<Check> solvers(const SuiteConfig& c)
{
    using namespace ops;
    const GridSpec box = zyx_box(6.0, 24, 3.2, 64);
    {
        const GridSpec E = detail::hbar_extended(box);
        const std::size_t padded = E.size() * 4;
        if (padded > c.budgets.max_grid_points)
            throw BudgetExceeded("solver grid of " + std::to_string(padded) + " points exceeds max_grid_points");
    }
    std::vector<Check> out;
    const auto h = solver_bump();
    const GridSpec plane{{box_axis("y", -4, 4, 64), box_axis("x", -4, 4, 64)}};
    const GridSpec cube{{box_axis("z", -6, 6, 48), box_axis("y", -4, 4, 48), box_axis("x", -4, 4, 48)}};
    const std::vector<std::tuple<std::string, PolyDiffOp, GridSpec>> cases{
        {"Q", cauchy_riemann(), plane}, {"Q_star", cauchy_riemann_star(), plane}, {"Delta", laplace2(), plane}, {"Delta3", laplace3(), cube}};
    for (const auto& [name, op, g] : cases) {
        CrOptions o;
        o.strict = false;
        const SampledField rhs = sample_op(g, op, h.jet);
        const auto sol = cr_solve(rhs, op, o);
        SampledField ref = sample_fn(g, h.value);
        ref = field_diff(ref, kernel_projection(ref, op));
        Check ch = abs_check("cr-solve-manufactured-" + name, "cauchy-riemann-spectral-solve", interior_rel_error(sol.f, ref),
                             c.t("cr_solve"));
        ch.kind = "rel";
        ch.note = "projected=" + std::to_string(sol.projected_rel);
        out.push_back(ch);
        if (name == "Q") {
            const SampledField fx = spectral_diff(sol.padded, 1), fy = spectral_diff(sol.padded, 0);
            SampledField q = sol.padded;
            for (std::size_t k = 0; k < q.values.size(); ++k) q.values[k] = fx.values[k] - I * fy.values[k];
            Check r = abs_check("cr-solve-residual-Q", "cauchy-riemann-spectral-solve",
                                interior_rel_error(crop_field(q, g, sol.offset), rhs), c.t("cr_residual"));
            r.kind = "rel";
            out.push_back(r);
            const SampledField zero{g, std::vector<cplx>(g.size())};
            const auto z = cr_solve(zero, op);
            out.push_back(exact_check("cr-solve-zero-rhs", "plumbing",
                                      std::all_of(z.f.values.begin(), z.f.values.end(), [](cplx v) { return v == cplx{}; })));
        }
    }

    const auto hb = hbar_map();
    auto rel = [](std::string name, std::string anchor, double v, double tol, std::string note) {
        Check ch = abs_check(std::move(name), std::move(anchor), v, tol);
        ch.kind = "rel";
        ch.note = std::move(note);
        return ch;
    };
    {
        const auto r = conjugate_round_trip(h, OpExpr::op("L", lewy()), box, false);
        out.push_back(rel("lewy-solve-manufactured", "lewy-constructive-solve", r.rel_err, c.t("lewy_solve"),
                          "g = L h, f = hbar Q^-1 hbar g"));
        const auto d = conjugate_round_trip(h, OpExpr::op("hQh", conjugated(hb, cauchy_riemann())), box, false);
        out.push_back(rel("lewy-solve-manufactured-conjugated-operator-diagnostic", "plumbing", d.rel_err, c.t("lewy_solve"),
                          "g = (hbar Q hbar) h"));
    }
    {
        auto g = [](const Vec3& p) { return cplx(std::exp(-(p[1] * p[1] + p[2] * p[2]) / 0.5 - p[0] * p[0] / 2)); };
        const auto r = lewy_solve(g, box);
        out.push_back(rel("lewy-solve-generic-residual", "lewy-constructive-solve", r.residual, c.t("solve_residual"),
                          "||L f - g|| / ||g|| on the interior"));
        ConjugateSolveOptions o;
        o.residual_op = conjugated(hb, cauchy_riemann());
        const auto d = lewy_solve(g, box, o);
        out.push_back(rel("lewy-solve-generic-residual-conjugated-operator-diagnostic", "plumbing", d.residual,
                          c.t("solve_residual"), "||(hbar Q hbar) f - g|| / ||g||"));
    }
    {
        const auto r = conjugate_round_trip(h, OpExpr::op("QxD", hormander_Q()), box, true);
        out.push_back(rel("four-stage-solve-manufactured", "hormander-four-stage-solve", r.rel_err, c.t("four_stage"),
                          "g = Q(x,D) h"));
        const auto chain = cr_R() * cr_R_star() * cr_R_star() * cr_R();
        const auto d = conjugate_round_trip(h, OpExpr::op("hRRRRh", conjugated(hb, chain)), box, true);
        out.push_back(rel("four-stage-solve-manufactured-conjugated-operator-diagnostic", "plumbing", d.rel_err,
                          c.t("four_stage"), "g = (hbar R R_star R_star R hbar) h"));
    }
    return out;
}

} // namespace battery

struct NamedBattery {
    std::string name;
    Battery run;
};

inline const std::vector<NamedBattery>& all_batteries()
{
    static const std::vector<NamedBattery> b{
        {"group-laws", battery::group_laws},
        {"nil-inverse", battery::nil_inverse},
        {"iwasawa", battery::iwasawa},
        {"modulus", battery::modulus},
        {"nil-plancherel", battery::nil_plancherel},
        {"nil-bilinear", battery::nil_bilinear},
        {"nil-convolution-equality", battery::nil_convolution_equality},
        {"nil-lift", battery::nil_lift},
        {"so4-peter-weyl", battery::so4_peter_weyl},
        {"sl4-plancherel", battery::sl4_plancherel},
        {"sp4-plancherel", battery::sp4_plancherel},
        {"semidirect-plancherel", battery::semidirect_plancherel},
        {"kna-lifts", battery::kna_lifts},
        {"operator-identities", battery::operator_identities},
        {"operator-lifts", battery::operator_lifts},
        {"brackets", battery::brackets},
        {"hormander-ops", battery::hormander_ops},
        {"solvers", battery::solvers},
    };
    return b;
}

/// Suite name to battery names.
inline const std::vector<std::pair<std::string, std::vector<std::string>>>& suite_table()
{
    static const std::vector<std::pair<std::string, std::vector<std::string>>> t{
        {"groups", {"group-laws", "nil-inverse", "iwasawa", "modulus"}},
        {"nil-plancherel", {"nil-plancherel", "nil-bilinear", "nil-convolution-equality", "nil-lift"}},
        {"so4", {"so4-peter-weyl"}},
        {"sl4-plancherel", {"sl4-plancherel"}},
        {"sp4-plancherel", {"sp4-plancherel"}},
        {"semidirect-plancherel", {"semidirect-plancherel", "kna-lifts"}},
        {"operator-identities", {"operator-identities", "operator-lifts"}},
        {"hormander", {"brackets", "hormander-ops"}},
        {"solvers", {"solvers"}},
    };
    return t;
}

inline std::vector<std::string> suite_names()
{
    std::vector<std::string> n;
    for (const auto& [s, b] : suite_table()) n.push_back(s);
    n.push_back("all");
    return n;
}

inline std::vector<std::string> suite_batteries(const std::string& suite)
{
    if (suite == "all") {
        std::vector<std::string> out;
        for (const auto& [s, b] : suite_table()) out.insert(out.end(), b.begin(), b.end());
        return out;
    }
    for (const auto& [s, b] : suite_table())
        if (s == suite) return b;
    throw ConfigError("unknown suite '" + suite + "'");
}

using BatteryObserver = std::function<void(const std::string& battery, const std::vector<Check>& checks, double seconds)>;

/// Runs every battery of the suite; check names are prefixed by the battery.
inline Report run_suite(const SuiteConfig& cfg, const BatteryObserver& observe = {})
{
    cfg.validate();
    const auto names = suite_batteries(cfg.suite);
    Report r;
    r.suite = cfg.suite;
    r.seed = cfg.seed;
    r.config = cfg.echo();
    r.timestamp = utc_timestamp();
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& n : names) {
        const auto it = std::find_if(all_batteries().begin(), all_batteries().end(), [&](const NamedBattery& b) { return b.name == n; });
        const auto b0 = std::chrono::steady_clock::now();
        auto checks = it->run(cfg);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - b0).count();
        for (auto& c : checks) c.name = n + "/" + c.name;
        if (observe) observe(n, checks, secs);
        r.checks.insert(r.checks.end(), checks.begin(), checks.end());
    }
    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

} // namespace lgha
