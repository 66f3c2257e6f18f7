#include "cflat/immersion.hpp"

#include "cflat/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace cflat {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// True when every node the derivative stencil at k along axis reaches is
/// unmasked.
bool stencil_clear(const PointMask& mask, const GridGeometry& g, std::size_t k, int axis)
{
    const int i = g.index_along(k, axis);
    const int last = g.steps(axis) - 1;
    const std::size_t s = g.stride(axis);
    if (mask.masked(k)) {
        return false;
    }
    if (i > 0 && i < last) {
        return !mask.masked(k + s) && !mask.masked(k - s);
    }
    if (i == 0) {
        return !mask.masked(k + s) && !mask.masked(k + 2 * s);
    }
    return !mask.masked(k - s) && !mask.masked(k - 2 * s);
}

double euclidean_sine(const RVec& a, const RVec& b)
{
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0) {
        throw CurvatureDegenerate("vanishing tangent vector");
    }
    const RVec bh = b / nb;
    return (a - a.dot(bh) * bh).norm() / na;
}

// Euclidean component of b orthogonal to the line of a.
double off_line(const RVec& b, const RVec& a)
{
    const double na = a.norm();
    if (na == 0.0) {
        throw CurvatureDegenerate("vanishing tangent vector");
    }
    const RVec ah = a / na;
    return (b - b.dot(ah) * ah).norm();
}

RVec column(const RMat& m, int c) { return m.col(c); }

/// Normal-bundle projection of the lift F: sum_k J_kk (X, u_k) u_k.
RVec project_normal(const RVec& x, const RMat& frame, const QuadraticForm& form)
{
    const int n = form.n();
    RVec out = RVec::Zero(2 * n);
    for (int k = 0; k < n; ++k) {
        const RVec uk = frame.col(n + k);
        out += form.normal_sign(k) * inner(x, uk, form) * uk;
    }
    return out;
}

/// Orthonormal basis of the tangent space of f from its (spacelike) partials.
std::vector<RVec> orthonormal_tangents(const std::vector<RVec>& tangents, const QuadraticForm& form)
{
    std::vector<RVec> basis;
    for (const RVec& t : tangents) {
        RVec w = t;
        for (const RVec& b : basis) {
            w -= inner(w, b, form) * b;
        }
        const double nn = inner(w, w, form);
        if (!(nn > 0.0)) {
            throw CurvatureDegenerate("tangent vectors of f are degenerate");
        }
        basis.push_back(w / std::sqrt(nn));
    }
    return basis;
}

/// Projection onto N_f: remove the tangents, f and t_0.
RVec project_sphere_normal(const RVec& x, const std::vector<RVec>& tangent_basis, const RVec& f,
                           const QuadraticForm& form)
{
    RVec out = x;
    for (const RVec& b : tangent_basis) {
        out -= inner(x, b, form) * b;
    }
    out -= inner(x, f, form) * f;
    const RVec t0 = form.t0();
    out += inner(x, t0, form) * t0;
    return out;
}

std::vector<RVec> f_tangents(const ImmersionGrid& grid, std::size_t k)
{
    std::vector<RVec> out;
    for (int i = 0; i < grid.geometry.dim(); ++i) {
        out.push_back(partial(grid.f, grid.geometry, k, i));
    }
    return out;
}

bool all_clear(const ImmersionGrid& grid, std::size_t k)
{
    if (!grid.geometry.interior(k)) {
        return false;
    }
    return !grid.mask.stencil_masked(k, grid.geometry);
}

} // namespace

RVec default_null_vector(int n)
{
    if (n < 2) {
        throw ArgumentError("default_null_vector: n must be at least 2");
    }
    // equal spatial entries 1/sqrt(n-1), last entry 1
    RVec c = RVec::Constant(n, 1.0 / std::sqrt(n - 1.0));
    c(n - 1) = 1.0;
    return c;
}

void require_null(const RVec& c, const QuadraticForm& form)
{
    if (c.size() != form.n()) {
        throw ArgumentError("null vector c must have length n = " + std::to_string(form.n()));
    }
    const double scale = c.squaredNorm();
    if (!(scale > 0.0)) {
        throw ArgumentError("null vector c must be nonzero");
    }
    if (std::abs(normal_inner(c, c, form)) > 1e-12 * scale) {
        throw ArgumentError("c is not null for J: c^T J c = " + std::to_string(normal_inner(c, c, form)));
    }
}

LiftPoint flat_lift(const ExtendedFrame& frame, const RVec& x, const RVec& c)
{
    const QuadraticForm& form = frame.form();
    const int n = form.n();
    const CMat phi1 = frame.evaluate(x, 1.0);
    if (max_imag(phi1) > 1e-9) {
        throw StructureError("flat_lift: Phi_1 has imaginary part " + std::to_string(max_imag(phi1)));
    }
    const auto [g1, g2] = split_at_zero(frame, x);
    LiftPoint out;
    out.phi1 = phi1.real();
    out.q = g2.partialPivLu().solve(c);
    RVec base = RVec::Zero(2 * n);
    base.tail(n) = out.q;
    out.F = out.phi1 * base;
    return out;
}

SpherePoint project_to_sphere(const RVec& F, const QuadraticForm& form)
{
    if (F.size() != form.dim()) {
        throw ArgumentError("project_to_sphere: F has wrong dimension");
    }
    const RVec t0 = form.t0();
    double s = inner(F, t0, form);
    if (!(std::abs(s) >= 1e-12)) {
        throw ProjectionSingular("project_to_sphere: (F, t_0) vanishes");
    }
    SpherePoint out;
    out.orientation = s < 0.0 ? -1.0 : 1.0;
    s *= out.orientation;
    out.f = -(out.orientation * F) / s - t0;
    out.u = std::log(s);
    return out;
}

std::vector<RVec> frame_curvature_normals(const RMat& phi1, const RVec& q, const CartanBasis& basis)
{
    const QuadraticForm& form = basis.form();
    const int n = form.n();
    const double scale = q.cwiseAbs().maxCoeff();
    std::vector<RVec> out;
    for (int i = 0; i < n; ++i) {
        if (!basis.nilpotent(i)) {
            if (std::abs(q(i)) < 1e-8 * scale) {
                throw CurvatureDegenerate("q_" + std::to_string(i + 1) + " vanishes");
            }
            out.push_back(-form.normal_sign(i) * phi1.col(n + i) / q(i));
        } else {
            const double d = q(n - 2) - q(n - 1);
            if (std::abs(d) < 1e-8 * scale) {
                throw CurvatureDegenerate("q_{n-1} - q_n vanishes");
            }
            out.push_back(-(phi1.col(2 * n - 2) + phi1.col(2 * n - 1)) / d);
        }
    }
    return out;
}

ImmersionGrid::ImmersionGrid(CartanBasis basis_, GridGeometry geometry_)
    : basis(std::move(basis_)), geometry(std::move(geometry_))
{
    const std::size_t size = geometry.size();
    const int n = basis.n();
    const RVec nan_n = RVec::Constant(n, kNaN);
    const RVec nan_2n = RVec::Constant(2 * n, kNaN);
    frame.assign(size, RMat::Constant(2 * n, 2 * n, kNaN));
    F.assign(size, nan_2n);
    orientation.assign(size, kNaN);
    f.assign(size, nan_2n);
    u.assign(size, kNaN);
    q.assign(size, nan_n);
    h.assign(size, nan_n);
    v.assign(size, std::vector<RVec>(n, nan_2n));
    eps.assign(size, nan_n);
    norms.assign(size, nan_n);
    mask = PointMask(size);
}

std::vector<RVec> ImmersionGrid::raw_lift() const
{
    std::vector<RVec> out(F.size());
    for (std::size_t k = 0; k < F.size(); ++k) {
        out[k] = mask.masked(k) ? F[k] : RVec(orientation[k] * F[k]);
    }
    return out;
}

ImmersionGrid build_immersion(const ExtendedFrame& frame, const GridGeometry& geometry, const RVec& c, Exec exec)
{
    const QuadraticForm& form = frame.form();
    require_null(c, form);
    if (geometry.dim() != form.n()) {
        throw ArgumentError("build_immersion: grid dimension differs from n");
    }
    const int n = form.n();
    ImmersionGrid out(frame.basis(), geometry);
    std::vector<std::string> reasons(geometry.size());
    for_each_index(geometry.size(), exec, [&](std::size_t k) {
        try {
            const LiftPoint lift = flat_lift(frame, geometry.point(k), c);
            const SpherePoint sp = project_to_sphere(lift.F, form);
            const RMat phi = sp.orientation * lift.phi1;
            std::vector<RVec> normals = frame_curvature_normals(phi, lift.q, frame.basis());
            RVec e(n);
            RVec nn(n);
            for (int i = 0; i < n; ++i) {
                const double vv = inner(normals[i], normals[i], form);
                e(i) = vv < 0.0 ? -1.0 : 1.0;
                nn(i) = std::sqrt(std::abs(vv));
            }
            out.frame[k] = phi;
            out.F[k] = sp.orientation * lift.F;
            out.orientation[k] = sp.orientation;
            out.f[k] = sp.f;
            out.u[k] = sp.u;
            out.q[k] = lift.q;
            out.v[k] = std::move(normals);
            out.eps[k] = e;
            out.norms[k] = nn;
        } catch (const Error& err) {
            reasons[k] = err.what();
        }
    });
    for (std::size_t k = 0; k < reasons.size(); ++k) {
        if (!reasons[k].empty()) {
            out.mask.mark(k, reasons[k]);
        }
    }
    const std::vector<RVec> raw = out.raw_lift();
    for_each_index(geometry.size(), exec, [&](std::size_t k) {
        if (out.mask.masked(k)) {
            return;
        }
        for (int i = 0; i < n; ++i) {
            if (!stencil_clear(out.mask, geometry, k, i)) {
                continue;
            }
            const RVec dF = partial(raw, geometry, k, i);
            out.h[k](i) = std::sqrt(std::max(0.0, inner(dF, dF, form)));
        }
    });
    return out;
}

Measure null_lift_residual(const ImmersionGrid& grid)
{
    Measure m;
    for (std::size_t k = 0; k < grid.geometry.size(); ++k) {
        if (grid.mask.masked(k)) {
            ++m.skipped;
            continue;
        }
        m.add(std::abs(inner(grid.F[k], grid.F[k], grid.form())));
    }
    return m;
}

Measure sphere_residual(const ImmersionGrid& grid)
{
    Measure m;
    const RVec t0 = grid.form().t0();
    for (std::size_t k = 0; k < grid.geometry.size(); ++k) {
        if (grid.mask.masked(k)) {
            ++m.skipped;
            continue;
        }
        const double ff = inner(grid.f[k], grid.f[k], grid.form());
        m.add(std::max(std::abs(ff - 1.0), std::abs(inner(grid.f[k], t0, grid.form()))));
    }
    return m;
}

Measure frame_gram_residual(const ImmersionGrid& grid)
{
    Measure m;
    for (std::size_t k = 0; k < grid.geometry.size(); ++k) {
        if (grid.mask.masked(k)) {
            ++m.skipped;
            continue;
        }
        m.add(group_residual(grid.frame[k], grid.form()));
    }
    return m;
}

std::vector<std::vector<RVec>> fd_curvature_normals(const ImmersionGrid& grid)
{
    const GridGeometry& g = grid.geometry;
    const QuadraticForm& form = grid.form();
    const int n = form.n();
    std::vector<std::vector<RVec>> out(g.size());
    for_each_index(g.size(), Exec::parallel, [&](std::size_t k) {
        if (!all_clear(grid, k)) {
            return;
        }
        std::vector<RVec> normals;
        for (int i = 0; i < n; ++i) {
            const std::size_t s = g.stride(i);
            const double h2 = 2.0 * g.spacing(i);
            const RVec de = (grid.frame[k + s].col(i) - grid.frame[k - s].col(i)) / h2;
            const RVec dF = partial(grid.F, g, k, i);
            const double w = inner(dF, column(grid.frame[k], i), form);
            if (std::abs(w) < 1e-14) {
                return;
            }
            normals.push_back(project_normal(de, grid.frame[k], form) / w);
        }
        out[k] = std::move(normals);
    });
    return out;
}

CurvatureReport curvature_identities(const ImmersionGrid& grid, const std::vector<std::vector<RVec>>& fd_normals)
{
    if (grid.basis.variant() != BasisVariant::semisimple) {
        throw ArgumentError("curvature_identities: applies to semisimple immersions");
    }
    const QuadraticForm& form = grid.form();
    const int n = form.n();
    CurvatureReport out;
    for (std::size_t k = 0; k < grid.geometry.size(); ++k) {
        if (grid.mask.masked(k)) {
            continue;
        }
        bool pattern = true;
        for (int i = 0; i < n; ++i) {
            pattern = pattern && grid.eps[k](i) == form.normal_sign(i);
        }
        if (!pattern) {
            ++out.sign_pattern_failures;
        }
        if (fd_normals[k].empty()) {
            ++out.route_agreement.skipped;
            ++out.orthogonality.skipped;
            ++out.reconstruction.skipped;
            continue;
        }
        const std::vector<RVec>& v = fd_normals[k];
        double agree = 0.0;
        double orth = 0.0;
        RVec recon = grid.F[k];
        for (int i = 0; i < n; ++i) {
            agree = std::max(agree, (v[i] - grid.v[k][i]).cwiseAbs().maxCoeff());
            const double vv = inner(v[i], v[i], form);
            if (std::abs(vv) < 1e-12 * v[i].squaredNorm()) {
                throw StructureError("curvature_identities: isotropic curvature normal at grid point " +
                                     std::to_string(k));
            }
            recon += v[i] / vv;
            for (int j = i + 1; j < n; ++j) {
                orth = std::max(orth, std::abs(inner(v[i], v[j], form)));
            }
        }
        out.route_agreement.add(agree);
        out.orthogonality.add(orth);
        out.reconstruction.add(recon.cwiseAbs().maxCoeff());
    }
    return out;
}

Measure first_form_residual(const ImmersionGrid& grid, int power)
{
    if (power != 1 && power != 2) {
        throw ArgumentError("first_form_residual: power must be 1 or 2");
    }
    Measure m;
    const int n = grid.form().n();
    for (std::size_t k = 0; k < grid.geometry.size(); ++k) {
        if (!all_clear(grid, k)) {
            if (!grid.mask.masked(k)) {
                ++m.skipped;
            }
            continue;
        }
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            const double target = power == 2 ? grid.q[k](i) * grid.q[k](i) : std::abs(grid.q[k](i));
            worst = std::max(worst, std::abs(grid.h[k](i) * grid.h[k](i) - target));
        }
        m.add(worst);
    }
    return m;
}

Measure metric_flatness_residual(const std::vector<RVec>& h, const GridGeometry& g, const PointMask* mask)
{
    const int n = g.dim();
    if (h.size() != g.size()) {
        throw ArgumentError("metric_flatness_residual: field size differs from grid size");
    }
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (mask && mask->stencil_masked(k, g)) {
            continue;
        }
        if (!(h[k].minCoeff() > 0.0)) {
            throw DegenerateMetric("metric_flatness_residual: nonpositive metric coefficient at grid point " +
                                   std::to_string(k));
        }
    }
    const auto idx = [n](int a, int b, int c) { return (a * n + b) * n + c; };
    std::vector<RVec> gamma(g.size(), RVec::Zero(n * n * n));
    for_each_index(g.size(), Exec::parallel, [&](std::size_t k) {
        if (mask && mask->stencil_masked(k, g)) {
            return;
        }
        std::vector<RVec> dh(n);
        for (int c = 0; c < n; ++c) {
            dh[c] = partial(h, g, k, c);
        }
        RVec& gk = gamma[k];
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                const double mixed = dh[b](a) / h[k](a);
                gk(idx(a, a, b)) = mixed;
                gk(idx(a, b, a)) = mixed;
                if (b != a) {
                    gk(idx(a, b, b)) = -h[k](b) * dh[a](b) / (h[k](a) * h[k](a));
                }
            }
        }
    });
    Measure m;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!g.interior(k)) {
            continue;
        }
        bool blocked = false;
        if (mask) {
            blocked = mask->stencil_masked(k, g);
            for (int a = 0; a < n && !blocked; ++a) {
                blocked = mask->stencil_masked(k + g.stride(a), g) || mask->stencil_masked(k - g.stride(a), g);
            }
        }
        if (blocked) {
            ++m.skipped;
            continue;
        }
        std::vector<RVec> dg(n);
        for (int c = 0; c < n; ++c) {
            dg[c] = partial(gamma, g, k, c);
        }
        const RVec& gk = gamma[k];
        double worst = 0.0;
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                for (int c = 0; c < n; ++c) {
                    for (int d = c + 1; d < n; ++d) {
                        double r = dg[c](idx(a, d, b)) - dg[d](idx(a, c, b));
                        for (int e = 0; e < n; ++e) {
                            r += gk(idx(a, c, e)) * gk(idx(e, d, b)) - gk(idx(a, d, e)) * gk(idx(e, c, b));
                        }
                        worst = std::max(worst, std::abs(h[k](a) * h[k](a) * r));
                    }
                }
            }
        }
        m.add(worst);
    }
    return m;
}

CombescureReport combescure_compare(const ImmersionGrid& lift_c, const ImmersionGrid& lift_b)
{
    if (!(lift_c.geometry == lift_b.geometry)) {
        throw ArgumentError("combescure_compare: lifts live on different grids");
    }
    const GridGeometry& g = lift_c.geometry;
    const int n = g.dim();
    PointMask mask = lift_c.mask;
    mask.merge(lift_b.mask);
    const std::vector<RVec> raw_c = lift_c.raw_lift();
    const std::vector<RVec> raw_b = lift_b.raw_lift();
    CombescureReport out;
    out.christoffel.assign(g.size(), 0);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (mask.masked(k)) {
            continue;
        }
        out.christoffel[k] = lift_c.q[k].prod() * lift_b.q[k].prod() < 0.0 ? 1 : 0;
        out.flagged += out.christoffel[k];
        if (!g.interior(k) || mask.stencil_masked(k, g)) {
            ++out.parallelism.skipped;
            ++out.sine.skipped;
            continue;
        }
        try {
            double worst = 0.0;
            double sine = 0.0;
            for (int i = 0; i < n; ++i) {
                const RVec dc = partial(raw_c, g, k, i);
                const RVec db = partial(raw_b, g, k, i);
                worst = std::max(worst, off_line(db, dc));
                sine = std::max(sine, euclidean_sine(db, dc));
            }
            out.parallelism.add(worst);
            out.sine.add(sine);
        } catch (const CurvatureDegenerate&) {
            ++out.parallelism.skipped;
            ++out.sine.skipped;
        }
    }
    return out;
}

Measure sphere_normal_residual(const ImmersionGrid& grid)
{
    const GridGeometry& g = grid.geometry;
    const QuadraticForm& form = grid.form();
    const int n = form.n();
    Measure m;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!all_clear(grid, k)) {
            continue;
        }
        const std::vector<RVec> tangents = f_tangents(grid, k);
        const std::vector<RVec> basis = orthonormal_tangents(tangents, form);
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            const std::size_t s = g.stride(i);
            const double hh = g.spacing(i);
            const RVec second = (grid.f[k + s] - 2.0 * grid.f[k] + grid.f[k - s]) / (hh * hh);
            const RVec fd = project_sphere_normal(second, basis, grid.f[k], form) / inner(tangents[i], tangents[i], form);
            const RVec vs = -std::exp(grid.u[k]) * project_sphere_normal(grid.v[k][i], basis, grid.f[k], form);
            worst = std::max(worst, (fd - vs).cwiseAbs().maxCoeff());
        }
        m.add(worst);
    }
    return m;
}

Measure sphere_direction_residual(const ImmersionGrid& grid)
{
    const GridGeometry& g = grid.geometry;
    const QuadraticForm& form = grid.form();
    const int n = form.n();
    const RVec t0 = form.t0();
    Measure m;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!all_clear(grid, k)) {
            continue;
        }
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            const RVec e = grid.frame[k].col(i);
            const RVec predicted = -e + std::exp(-grid.u[k]) * inner(e, t0, form) * grid.F[k];
            worst = std::max(worst, euclidean_sine(partial(grid.f, g, k, i), predicted));
        }
        m.add(worst);
    }
    return m;
}

ChannelReport channel_checks(const ImmersionGrid& grid, const std::vector<std::vector<RVec>>& fd_normals)
{
    if (grid.basis.variant() != BasisVariant::channel) {
        throw ArgumentError("channel_checks: applies to channel immersions");
    }
    const GridGeometry& g = grid.geometry;
    const QuadraticForm& form = grid.form();
    const int n = form.n();
    const int p = grid.basis.p();
    ChannelReport out;

    // leaf-sphere centres f + v^R/(v^R, v^R) with v^R = -e^u pi_{N_f} v - f
    std::vector<RVec> centers(g.size(), RVec::Constant(2 * n, kNaN));
    for_each_index(g.size(), Exec::parallel, [&](std::size_t k) {
        if (grid.mask.stencil_masked(k, g)) {
            return;
        }
        const std::vector<RVec> basis = orthonormal_tangents(f_tangents(grid, k), form);
        const RVec vs = -std::exp(grid.u[k]) * project_sphere_normal(grid.v[k][p], basis, grid.f[k], form);
        const RVec vr = vs - grid.f[k];
        centers[k] = grid.f[k] + vr / inner(vr, vr, form);
    });

    for (std::size_t k = 0; k < g.size(); ++k) {
        if (grid.mask.masked(k)) {
            continue;
        }
        const RVec& rep = grid.v[k][p];
        out.isotropy_frame.add(std::abs(inner(rep, rep, form)));
        double orth = 0.0;
        for (int i = 0; i < p; ++i) {
            orth = std::max(orth, std::abs(inner(rep, grid.v[k][i], form)));
        }
        out.orthogonality.add(orth);
        if (!all_clear(grid, k)) {
            continue;
        }
        double ff = 0.0;
        const RVec& y = grid.q[k];
        for (int j = 0; j < n; ++j) {
            const double target = j < p ? y(j) * y(j) : (y(n - 2) - y(n - 1)) * (y(n - 2) - y(n - 1));
            ff = std::max(ff, std::abs(grid.h[k](j) * grid.h[k](j) - target));
        }
        out.first_form.add(ff);
        if (!fd_normals[k].empty()) {
            double iso = 0.0;
            double rep_fd = 0.0;
            for (int j = p; j < n; ++j) {
                const RVec& vj = fd_normals[k][j];
                iso = std::max(iso, std::abs(inner(vj, vj, form)));
                rep_fd = std::max(rep_fd, (vj - fd_normals[k][p]).cwiseAbs().maxCoeff());
            }
            out.isotropy_fd.add(iso);
            out.repeated_fd.add(rep_fd);
        }
        bool blocked = false;
        for (int a = 0; a < n && !blocked; ++a) {
            blocked = !centers[k + g.stride(a)].allFinite() || !centers[k - g.stride(a)].allFinite();
        }
        if (blocked) {
            ++out.leaf_sphere.skipped;
            continue;
        }
        double leaf = 0.0;
        for (int j = p; j < n; ++j) {
            leaf = std::max(leaf, partial(centers, g, k, j).cwiseAbs().maxCoeff());
        }
        out.leaf_sphere.add(leaf);
    }
    return out;
}

} // namespace cflat

namespace cflat {

RegularityScreen screen_regularity(const ExtendedFrame& frame, const GridGeometry& coarse, const RVec& c,
                                   double min_q, double max_potential)
{
    RegularityScreen out;
    out.min_q = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < coarse.size(); ++k) {
        try {
            const RVec x = coarse.point(k);
            const LiftPoint lift = flat_lift(frame, x, c);
            project_to_sphere(lift.F, frame.form());
            out.min_q = std::min(out.min_q, lift.q.cwiseAbs().minCoeff());
            out.max_potential = std::max(out.max_potential, max_abs(frame.potential(x)));
        } catch (const Error& err) {
            out.min_q = 0.0;
            out.reason = err.what();
            return out;
        }
    }
    out.regular = out.min_q >= min_q && out.max_potential <= max_potential;
    if (!out.regular) {
        out.reason = out.min_q < min_q ? "metric coefficient q_i comes close to zero" : "potential too large";
    }
    return out;
}

} // namespace cflat
