#pragma once

#include "diffops.hpp"
#include "quadrature.hpp"

#include <limits>
#include <optional>

namespace lgha {

struct CrOptions {
    int margin = 2;                  ///< padded length per axis as a multiple of the box
    double zero_tol = 1e-10;         ///< |symbol| below this is treated as zero
    double incompatible_tol = 1e-6;  ///< allowed projected fraction of ||g||
    bool strict = true;              ///< throw IncompatibleRHS above the tolerance
};

struct CrSolution {
    SampledField f;                    ///< solution on the input grid
    SampledField padded;               ///< solution on the padded grid
    std::vector<std::size_t> offset;   ///< index of the input box inside padded
    double projected_rel = 0.0;        ///< ||projected part|| / ||g||
};

namespace detail {

inline int axis_var(const Axis& a)
{
    for (int k = 0; k < 3; ++k)
        if (a.name == coord_names[k]) return k;
    throw ConfigError("solver: axis '" + a.name + "' must be named z, y or x");
}

inline std::vector<std::size_t> shape_of(const GridSpec& g)
{
    std::vector<std::size_t> s;
    for (const auto& a : g.axes) s.push_back(a.count);
    return s;
}

inline void unravel(std::size_t i, const std::vector<std::size_t>& shape, std::vector<std::size_t>& idx)
{
    idx.resize(shape.size());
    for (std::size_t d = shape.size(); d-- > 0;) {
        idx[d] = i % shape[d];
        i /= shape[d];
    }
}

inline std::size_t ravel(const std::vector<std::size_t>& idx, const std::vector<std::size_t>& shape)
{
    std::size_t i = 0;
    for (std::size_t d = 0; d < shape.size(); ++d) i = i * shape[d] + idx[d];
    return i;
}

/// Axes differentiated by a constant-coefficient op.
inline std::vector<bool> op_axes(const PolyDiffOp& op, const GridSpec& g)
{
    if (!op.constant_coefficients()) throw ConfigError("solver: operator must have constant coefficients");
    std::vector<bool> used(g.dim(), false);
    for (const auto& [a, c] : op.terms())
        for (int k = 0; k < 3; ++k) {
            if (a[k] == 0) continue;
            bool found = false;
            for (std::size_t d = 0; d < g.dim(); ++d)
                if (axis_var(g.axes[d]) == k) {
                    used[d] = true;
                    found = true;
                }
            if (!found) throw ConfigError(std::string("solver: operator differentiates in ") + coord_names[k] +
                                          " which is not a grid axis");
        }
    for (std::size_t d = 0; d < g.dim(); ++d)
        if (g.axes[d].kind == AxisKind::GaussLegendre) throw AxisKindMismatch("solver: axes must be uniform");
    return used;
}

struct SymbolTerm {
    cplx coef;
    Mono alpha;
};

inline std::vector<SymbolTerm> symbol_terms(const PolyDiffOp& op)
{
    std::vector<SymbolTerm> t;
    for (const auto& [a, c] : op.terms()) t.push_back({c.constant().value(), a});
    return t;
}

inline cplx eval_symbol(const std::vector<SymbolTerm>& terms, const Vec3& xi)
{
    cplx s = 0.0;
    for (const auto& t : terms) {
        cplx v = t.coef;
        for (int k = 0; k < 3; ++k)
            for (int j = 0; j < t.alpha[k]; ++j) v *= I * xi[k];
        s += v;
    }
    return s;
}

} // namespace detail

/// Zero-padded copy: chosen axes grow to margin * count, box centered.
inline SampledField pad_field(const SampledField& f, const std::vector<bool>& axes, int margin,
                              std::vector<std::size_t>& offset)
{
    GridSpec g = f.grid;
    offset.assign(g.dim(), 0);
    for (std::size_t d = 0; d < g.dim(); ++d) {
        if (!axes[d]) continue;
        auto& a = g.axes[d];
        const double h = a.spacing();
        const std::size_t n = a.count * static_cast<std::size_t>(margin);
        offset[d] = (n - a.count) / 2;
        a.lo -= h * static_cast<double>(offset[d]);
        a.count = n;
        a.hi = a.lo + h * static_cast<double>(n);
        a.kind = AxisKind::UniformPeriodic;
    }
    SampledField out{g, std::vector<cplx>(g.size())};
    const auto small = detail::shape_of(f.grid), big = detail::shape_of(g);
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        detail::unravel(i, small, idx);
        for (std::size_t d = 0; d < idx.size(); ++d) idx[d] += offset[d];
        out.values[detail::ravel(idx, big)] = f.values[i];
    }
    return out;
}

inline SampledField crop_field(const SampledField& big, const GridSpec& inner, const std::vector<std::size_t>& offset)
{
    SampledField out{inner, std::vector<cplx>(inner.size())};
    const auto small = detail::shape_of(inner), shape = detail::shape_of(big.grid);
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        detail::unravel(i, small, idx);
        for (std::size_t d = 0; d < idx.size(); ++d) idx[d] += offset[d];
        out.values[i] = big.values[detail::ravel(idx, shape)];
    }
    return out;
}

/// Divides a spectrum by the symbol of op on its transformed axes, zeroing
/// modes with |symbol| < zero_tol. Returns the projected L2 fraction.
inline double divide_by_symbol(Spectrum& s, const PolyDiffOp& op, const CrOptions& opt)
{
    const auto terms = detail::symbol_terms(op);
    std::vector<int> var(s.axes.size());
    for (std::size_t d = 0; d < s.axes.size(); ++d) var[d] = detail::axis_var(s.grid.axes[d]);
    std::vector<std::size_t> shape;
    for (const auto& a : s.axes) shape.push_back(a.count);
    double total = 0.0, projected = 0.0;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        detail::unravel(i, shape, idx);
        Vec3 xi{0, 0, 0};
        for (std::size_t d = 0; d < shape.size(); ++d)
            if (s.axes[d].transformed) xi[var[d]] = s.axes[d].xi(idx[d]);
        const cplx sym = detail::eval_symbol(terms, xi);
        const double m = std::norm(s.values[i]);
        total += m;
        if (std::abs(sym) < opt.zero_tol) {
            projected += m;
            s.values[i] = 0.0;
        } else {
            s.values[i] /= sym;
        }
    }
    const double rel = total > 0.0 ? std::sqrt(projected / total) : 0.0;
    if (opt.strict && rel > opt.incompatible_tol)
        throw IncompatibleRHS("cr_solve: projected fraction " + std::to_string(rel) + " exceeds " +
                              std::to_string(opt.incompatible_tol));
    return rel;
}

/// Spectral solve of op f = g for a constant-coefficient op on a 2-D or 3-D
/// box with axes named from {z, y, x}.
inline CrSolution cr_solve(const SampledField& g, const PolyDiffOp& op, const CrOptions& opt = {})
{
    if (g.grid.dim() < 1 || g.grid.dim() > 3) throw ConfigError("cr_solve: grid must have 1 to 3 axes");
    g.validate();
    const auto used = detail::op_axes(op, g.grid);
    CrSolution out;
    out.padded = pad_field(g, used, opt.margin, out.offset);
    std::vector<std::size_t> axes;
    for (std::size_t d = 0; d < used.size(); ++d)
        if (used[d]) axes.push_back(d);
    Spectrum s = dft_forward(out.padded, axes);
    out.projected_rel = divide_by_symbol(s, op, opt);
    out.padded = dft_inverse(s);
    out.f = crop_field(out.padded, g.grid, out.offset);
    return out;
}

/// The part of f (on the padded grid used by cr_solve) in the kernel of
/// op's symbol, cropped back to f's grid.
inline SampledField kernel_projection(const SampledField& f, const PolyDiffOp& op, const CrOptions& opt = {})
{
    const auto used = detail::op_axes(op, f.grid);
    std::vector<std::size_t> offset;
    const SampledField p = pad_field(f, used, opt.margin, offset);
    std::vector<std::size_t> axes;
    for (std::size_t d = 0; d < used.size(); ++d)
        if (used[d]) axes.push_back(d);
    Spectrum s = dft_forward(p, axes);
    const auto terms = detail::symbol_terms(op);
    std::vector<std::size_t> shape, idx;
    for (const auto& a : s.axes) shape.push_back(a.count);
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        detail::unravel(i, shape, idx);
        Vec3 xi{0, 0, 0};
        for (std::size_t d = 0; d < shape.size(); ++d)
            if (s.axes[d].transformed) xi[detail::axis_var(s.grid.axes[d])] = s.axes[d].xi(idx[d]);
        if (std::abs(detail::eval_symbol(terms, xi)) >= opt.zero_tol) s.values[i] = 0.0;
    }
    return crop_field(dft_inverse(s), f.grid, offset);
}

/// Spectral derivative along axis d of a periodic field.
inline SampledField spectral_diff(const SampledField& f, std::size_t d)
{
    Spectrum s = dft_forward(f, {d});
    const auto shape = detail::shape_of(f.grid);
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        detail::unravel(i, shape, idx);
        const std::size_t n = shape[d];
        // the Nyquist mode has no odd-symmetric partner
        if (n % 2 == 0 && idx[d] == n / 2) s.values[i] = 0.0;
        else s.values[i] *= I * s.axes[d].xi(idx[d]);
    }
    return dft_inverse(s);
}

/// Discrete L2 norm over points inside the inner fraction of every axis.
inline double interior_norm(const SampledField& f, double fraction = 0.5)
{
    const auto shape = detail::shape_of(f.grid);
    std::vector<std::size_t> idx;
    double s = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        detail::unravel(i, shape, idx);
        bool inside = true;
        for (std::size_t d = 0; d < shape.size(); ++d) {
            const auto& a = f.grid.axes[d];
            const double x = a.lo + a.spacing() * static_cast<double>(idx[d]), c = 0.5 * (a.lo + a.hi),
                         r = 0.5 * (a.hi - a.lo) * fraction;
            if (std::abs(x - c) > r) inside = false;
        }
        if (inside) s += std::norm(f.values[i]);
    }
    return std::sqrt(s);
}

inline SampledField field_diff(const SampledField& a, const SampledField& b)
{
    SampledField r = a;
    for (std::size_t i = 0; i < r.values.size(); ++i) r.values[i] -= b.values[i];
    return r;
}

inline double interior_rel_error(const SampledField& f, const SampledField& ref, double fraction = 0.5)
{
    const double n = interior_norm(ref, fraction);
    return interior_norm(field_diff(f, ref), fraction) / (n > 0.0 ? n : 1.0);
}

/// Samples (op h)(p) on a grid with axes named from {z, y, x} using jets.
inline SampledField sample_op(const GridSpec& g, const PolyDiffOp& op, const JetFn& h)
{
    std::vector<int> var(g.dim());
    for (std::size_t d = 0; d < g.dim(); ++d) var[d] = detail::axis_var(g.axes[d]);
    return sample(g, [&](std::span<const double> x) {
        Vec3 p{0, 0, 0};
        for (std::size_t d = 0; d < x.size(); ++d) p[var[d]] = x[d];
        return op.apply(h, p);
    });
}

inline SampledField sample_fn(const GridSpec& g, const std::function<cplx(const Vec3&)>& h)
{
    std::vector<int> var(g.dim());
    for (std::size_t d = 0; d < g.dim(); ++d) var[d] = detail::axis_var(g.axes[d]);
    return sample(g, [&](std::span<const double> x) {
        Vec3 p{0, 0, 0};
        for (std::size_t d = 0; d < x.size(); ++d) p[var[d]] = x[d];
        return h(p);
    });
}

/// Box with axes (z, y, x): z in [-lz, lz), y, x in [-lxy, lxy).
inline GridSpec zyx_box(double lz, std::size_t nz, double lxy, std::size_t nxy)
{
    return {{box_axis("z", -lz, lz, nz), box_axis("y", -lxy, lxy, nxy), box_axis("x", -lxy, lxy, nxy)}};
}

// ----------------------------------------------------------------------------
// Solves through hbar conjugation
// ----------------------------------------------------------------------------

/// Q U = psi for psi = exp(-r^2/s^2)/(pi s^2): U = (1 - exp(-r^2/s^2)) / (2 pi (x - i y)).
struct CauchyPair {
    double s = 0.7;

    double psi(double y, double x) const { return std::exp(-(x * x + y * y) / (s * s)) / (pi * s * s); }

    /// Returns U, dU/dy, dU/dx.
    std::array<cplx, 3> U(double y, double x) const
    {
        const double t = x * x + y * y, s2 = s * s;
        const cplx w{x, y};
        if (t < 1e-8 * s2) {
            const double c = 1.0 / (2.0 * pi * s2);
            return {c * w * (1.0 - t / (2.0 * s2)), c * I, c};
        }
        const double e = std::exp(-t / s2), K = (1.0 - e) / (2.0 * pi), Kp = e / (2.0 * pi * s2);
        const cplx wb{x, -y};
        return {K / wb, 2.0 * y * Kp / wb + I * K / (wb * wb), 2.0 * x * Kp / wb - K / (wb * wb)};
    }
};

struct ConjugateSolveOptions {
    CrOptions cr;
    bool cauchy_correction = true;  ///< remove the per-z mean through the closed-form Q solution
    CauchyPair cauchy;
    std::optional<PolyDiffOp> residual_op;  ///< first-order operator for the residual check
    double interior = 0.5;
};

struct ConjugateSolveResult {
    SampledField f;
    std::vector<double> stage_projected;
    double residual = std::numeric_limits<double>::quiet_NaN();
    GridSpec extended;  ///< grid the pulled-back right-hand side was sampled on
};

namespace detail {

/// Extended grid: z grown by whole steps so it covers z - 2xy over the box.
inline GridSpec hbar_extended(const GridSpec& box)
{
    if (box.dim() != 3 || box.axes[0].name != "z" || box.axes[1].name != "y" || box.axes[2].name != "x")
        throw ConfigError("conjugate solve: box axes must be (z, y, x)");
    for (std::size_t d = 1; d < 3; ++d) {
        const auto& a = box.axes[d];
        if (a.count % 2 != 0 || std::abs(a.lo + a.hi) > 1e-12 * (a.hi - a.lo))
            throw ConfigError("conjugate solve: y and x axes must be symmetric with even counts");
    }
    GridSpec e = box;
    auto& z = e.axes[0];
    const double h = z.spacing();
    const double reach = 2.0 * std::max(std::abs(box.axes[1].lo), std::abs(box.axes[1].hi)) *
                         std::max(std::abs(box.axes[2].lo), std::abs(box.axes[2].hi));
    const auto ext = static_cast<std::size_t>(std::ceil(reach / h)) + 2;
    z.lo -= h * static_cast<double>(ext);
    z.count += 2 * ext;
    z.hi = z.lo + h * static_cast<double>(z.count);
    z.kind = AxisKind::UniformPeriodic;
    return e;
}

/// S(z, y, x) = F(z + 2(-x)y, y, -x) on the box grid, from F on the extended grid:
/// each column is shifted by trigonometric interpolation, then x is reflected.
inline SampledField hbar_pullback_grid(const SampledField& F, const GridSpec& box)
{
    const auto& gz = F.grid.axes[0];
    const std::size_t nz = gz.count, ny = F.grid.axes[1].count, nx = F.grid.axes[2].count;
    Spectrum s = dft_forward(F, {0});
    const double hy = F.grid.axes[1].spacing(), hx = F.grid.axes[2].spacing();
    for (std::size_t k = 0; k < nz; ++k) {
        const double xi = (nz % 2 == 0 && k == nz / 2) ? 0.0 : s.axes[0].xi(k);
        for (std::size_t j = 0; j < ny; ++j) {
            const double y = F.grid.axes[1].lo + hy * static_cast<double>(j);
            for (std::size_t i = 0; i < nx; ++i) {
                const double x = F.grid.axes[2].lo + hx * static_cast<double>(i);
                const double shift = 2.0 * x * y;
                auto& v = s.values[(k * ny + j) * nx + i];
                v = (nz % 2 == 0 && k == nz / 2) ? cplx(0.0) : v * std::polar(1.0, xi * shift);
            }
        }
    }
    const SampledField shifted = dft_inverse(s);
    const double hz = gz.spacing();
    const auto z0 = static_cast<std::size_t>(std::llround((box.axes[0].lo - gz.lo) / hz));
    SampledField out{box, std::vector<cplx>(box.size())};
    const std::size_t bz = box.axes[0].count;
    for (std::size_t k = 0; k < bz; ++k)
        for (std::size_t j = 0; j < ny; ++j)
            for (std::size_t i = 0; i < nx; ++i) {
                const std::size_t ri = (nx - i) % nx;
                out.values[(k * ny + j) * nx + i] = shifted.values[((k + z0) * ny + j) * nx + ri];
            }
    return out;
}

} // namespace detail

/// Solves (hbar S1 S2 ... Sn hbar) f = g by sampling hbar g on a z-extended
/// box, inverting S1, ..., Sn in turn spectrally over (y, x), and pulling the
/// result back through hbar onto the box.
inline ConjugateSolveResult hbar_conjugate_solve(const std::function<cplx(const Vec3&)>& g, const GridSpec& box,
                                                 const std::vector<PolyDiffOp>& stages,
                                                 const ConjugateSolveOptions& opt = {})
{
    if (stages.empty()) throw ConfigError("conjugate solve: no stages");
    ConjugateSolveResult out;
    out.extended = detail::hbar_extended(box);
    const GridSpec& E = out.extended;
    const auto hb = hbar_map();
    SampledField G = sample_fn(E, [&](const Vec3& p) { return g(hb(p)); });

    const std::size_t nz = E.axes[0].count, ny = E.axes[1].count, nx = E.axes[2].count;
    const double hy = E.axes[1].spacing(), hx = E.axes[2].spacing();
    auto ynode = [&](std::size_t j) { return E.axes[1].lo + hy * static_cast<double>(j); };
    auto xnode = [&](std::size_t i) { return E.axes[2].lo + hx * static_cast<double>(i); };

    std::vector<cplx> M(nz, 0.0);
    if (opt.cauchy_correction) {
        if (stages.size() != 1 || !(stages[0] == ops::cauchy_riemann()))
            throw ConfigError("conjugate solve: the mean correction applies to the single stage dx - i dy");
        for (std::size_t k = 0; k < nz; ++k) {
            cplx m = 0.0;
            for (std::size_t j = 0; j < ny * nx; ++j) m += G.values[k * ny * nx + j];
            M[k] = m * hy * hx;
            for (std::size_t j = 0; j < ny; ++j)
                for (std::size_t i = 0; i < nx; ++i)
                    G.values[(k * ny + j) * nx + i] -= M[k] * opt.cauchy.psi(ynode(j), xnode(i));
        }
    }

    std::vector<std::size_t> offset;
    SampledField P = pad_field(G, {false, true, true}, opt.cr.margin, offset);
    Spectrum s = dft_forward(P, {1, 2});
    for (const auto& st : stages) {
        const auto used = detail::op_axes(st, E);
        if (used[0]) throw ConfigError("conjugate solve: stages may only differentiate in y and x");
        out.stage_projected.push_back(divide_by_symbol(s, st, opt.cr));
    }
    P = dft_inverse(s);
    SampledField F = crop_field(P, E, offset);
    if (opt.cauchy_correction)
        for (std::size_t k = 0; k < nz; ++k)
            for (std::size_t j = 0; j < ny; ++j)
                for (std::size_t i = 0; i < nx; ++i)
                    F.values[(k * ny + j) * nx + i] += M[k] * opt.cauchy.U(ynode(j), xnode(i))[0];
    out.f = detail::hbar_pullback_grid(F, box);

    if (opt.residual_op) {
        const PolyDiffOp& op = *opt.residual_op;
        if (op.order() > 1) throw ConfigError("conjugate solve: residual operator must be first order");
        // derivatives of F on the extended grid: (y, x) spectrally on the padded grid, z along the column
        SampledField Fy = crop_field(spectral_diff(P, 1), E, offset), Fx = crop_field(spectral_diff(P, 2), E, offset);
        const SampledField Fz = spectral_diff(F, 0);
        if (opt.cauchy_correction)
            for (std::size_t k = 0; k < nz; ++k)
                for (std::size_t j = 0; j < ny; ++j)
                    for (std::size_t i = 0; i < nx; ++i) {
                        const auto u = opt.cauchy.U(ynode(j), xnode(i));
                        const std::size_t q = (k * ny + j) * nx + i;
                        Fy.values[q] += M[k] * u[1];
                        Fx.values[q] += M[k] * u[2];
                    }
        const SampledField Sz = detail::hbar_pullback_grid(Fz, box), Sy = detail::hbar_pullback_grid(Fy, box),
                           Sx = detail::hbar_pullback_grid(Fx, box);
        SampledField Lf = out.f, G0 = out.f;
        const TensorRule rule(box);
        std::vector<double> pt(3);
        for (std::size_t q = 0; q < box.size(); ++q) {
            rule.point(q, pt);
            const Vec3 p{pt[0], pt[1], pt[2]};
            Jet j = Jet::constant(out.f.values[q]);
            j.c[Jet::index({1, 0, 0})] = Sz.values[q];
            j.c[Jet::index({0, 1, 0})] = Sy.values[q];
            j.c[Jet::index({0, 0, 1})] = Sx.values[q];
            j.valid = 1;
            const Jet fj = compose(j, hb.jets(p));
            Lf.values[q] = op.apply(fj, p).value();
            G0.values[q] = g(p);
        }
        out.residual = interior_rel_error(Lf, G0, opt.interior);
    }
    return out;
}

/// f = hbar Q^{-1} hbar g, the construction offered for L f = g; the residual
/// is measured against L.
inline ConjugateSolveResult lewy_solve(const std::function<cplx(const Vec3&)>& g, const GridSpec& box,
                                       ConjugateSolveOptions opt = {})
{
    if (!opt.residual_op) opt.residual_op = ops::lewy();
    return hbar_conjugate_solve(g, box, {ops::cauchy_riemann()}, opt);
}

/// f = hbar R^{-1} R_star^{-1} R_star^{-1} R^{-1} hbar g, offered for Q(x, D) f = g.
inline ConjugateSolveResult hormander_four_stage_solve(const std::function<cplx(const Vec3&)>& g, const GridSpec& box,
                                                       ConjugateSolveOptions opt = {})
{
    opt.cauchy_correction = false;
    opt.residual_op.reset();
    return hbar_conjugate_solve(g, box, {ops::cr_R(), ops::cr_R_star(), ops::cr_R_star(), ops::cr_R()}, opt);
}

/// hbar applied to the per-z kernel projection of hbar h: the part of h that a
/// conjugated solve cannot recover.
inline SampledField hbar_kernel_part(const std::function<cplx(const Vec3&)>& h, const GridSpec& box, int margin = 2)
{
    const GridSpec E = detail::hbar_extended(box);
    const auto hb = hbar_map();
    const SampledField H = sample_fn(E, [&](const Vec3& p) { return h(hb(p)); });
    const std::size_t nz = E.axes[0].count, nxy = E.axes[1].count * E.axes[2].count;
    const double area = (E.axes[1].hi - E.axes[1].lo) * (E.axes[2].hi - E.axes[2].lo) * margin * margin;
    SampledField K{E, std::vector<cplx>(E.size())};
    for (std::size_t k = 0; k < nz; ++k) {
        cplx m = 0.0;
        for (std::size_t j = 0; j < nxy; ++j) m += H.values[k * nxy + j];
        m *= E.axes[1].spacing() * E.axes[2].spacing() / area;
        for (std::size_t j = 0; j < nxy; ++j) K.values[k * nxy + j] = m;
    }
    return detail::hbar_pullback_grid(K, box);
}

struct RoundTrip {
    double rel_err = 0.0;
    double residual = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> stage_projected;
};

/// Manufactured round trip: g = rhs h, solve, compare with h minus the
/// unrecoverable kernel part on the interior.
inline RoundTrip conjugate_round_trip(const CorpusFn& h, const OpExpr& rhs, const GridSpec& box, bool four_stage,
                                      ConjugateSolveOptions opt = {})
{
    opt.cr.strict = false;
    auto g = [&](const Vec3& p) { return rhs(h.jet, p); };
    const auto r = four_stage ? hormander_four_stage_solve(g, box, opt) : lewy_solve(g, box, opt);
    SampledField ref = sample_fn(box, h.value);
    const SampledField k = hbar_kernel_part(h.value, box, opt.cr.margin);
    for (std::size_t i = 0; i < ref.values.size(); ++i) ref.values[i] -= k.values[i];
    return {interior_rel_error(r.f, ref, opt.interior), r.residual, r.stage_projected};
}

} // namespace lgha
