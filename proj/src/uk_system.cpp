#include "cflat/uk_system.hpp"

#include "cflat/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace cflat {

CartanBasis::CartanBasis(BasisVariant variant, int n, int p)
    : variant_(variant), form_(n), p_(p)
{
    const int dim = 2 * n;
    for (int i = 0; i < n; ++i) {
        RMat a = RMat::Zero(dim, dim);
        if (i < p) {
            a(i, n + i) = form_.normal_sign(i);
            a(n + i, i) = -1.0;
        } else {
            a(i, 2 * n - 2) = 1.0;
            a(i, 2 * n - 1) = -1.0;
            a(2 * n - 2, i) = -1.0;
            a(2 * n - 1, i) = -1.0;
        }
        elements_.push_back(a);
    }
    RMat gram(n, n);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            gram(i, k) = pairing(i, elements_[k]);
        }
    }
    gram_lu_ = gram.partialPivLu();
}

CartanBasis CartanBasis::semisimple(int n)
{
    if (n < 3) {
        throw ArgumentError("CartanBasis: n must be at least 3, got " + std::to_string(n));
    }
    return CartanBasis(BasisVariant::semisimple, n, n);
}

CartanBasis CartanBasis::channel(int n, int p)
{
    if (n < 3) {
        throw ArgumentError("CartanBasis: n must be at least 3, got " + std::to_string(n));
    }
    if (p < 1 || p > n - 2) {
        throw ArgumentError("CartanBasis: channel rank p must satisfy 1 <= p <= n-2, got p = " + std::to_string(p));
    }
    return CartanBasis(BasisVariant::channel, n, p);
}

CartanBasis make_basis(BasisVariant variant, int n, int p)
{
    return variant == BasisVariant::semisimple ? CartanBasis::semisimple(n) : CartanBasis::channel(n, p);
}

double CartanBasis::pairing(int i, const RMat& x) const
{
    // the trace form vanishes on the nilpotent directions, so those use the
    // Frobenius pairing instead
    if (nilpotent(i)) {
        return (x.array() * elements_[i].array()).sum();
    }
    return (x * elements_[i]).trace();
}

RMat CartanBasis::project(const RMat& x) const
{
    const int n = this->n();
    RVec rhs(n);
    for (int i = 0; i < n; ++i) {
        rhs(i) = pairing(i, x);
    }
    const RVec c = gram_lu_.solve(rhs);
    RMat out = x;
    for (int k = 0; k < n; ++k) {
        out -= c(k) * elements_[k];
    }
    return out;
}

double CartanBasis::constraint_violation(const RMat& x) const
{
    double worst = 0.0;
    for (int i = 0; i < n(); ++i) {
        worst = std::max(worst, std::abs(pairing(i, x)));
    }
    return worst;
}

RMat embed(const RMat& xi, const QuadraticForm& form)
{
    const int n = form.n();
    if (xi.rows() != n || xi.cols() != n) {
        throw ArgumentError("embed: xi must be " + std::to_string(n) + "x" + std::to_string(n));
    }
    RMat out = RMat::Zero(2 * n, 2 * n);
    out.topRightCorner(n, n) = xi.transpose();
    out.bottomLeftCorner(n, n) = -(form.diag_J().asDiagonal() * xi);
    return out;
}

RMat extract_xi(const RMat& big_xi, int n) { return big_xi.topRightCorner(n, n).transpose(); }

double off_p_residual(const RMat& x, int n)
{
    return std::max(max_abs(x.topLeftCorner(n, n)), max_abs(x.bottomRightCorner(n, n)));
}

PPotential PPotential::make(const RMat& xi, const CartanBasis& basis)
{
    RMat big = embed(xi, basis.form());
    const double violation = basis.constraint_violation(big);
    if (violation > 1e-10 * (1.0 + max_abs(xi))) {
        throw ArgumentError("PPotential: xi violates the gauge constraint by " + std::to_string(violation));
    }
    return PPotential(xi, std::move(big));
}

PPotential PPotential::projected(const RMat& xi, const CartanBasis& basis)
{
    RMat big = basis.project(embed(xi, basis.form()));
    RMat coord = extract_xi(big, basis.n());
    return PPotential(std::move(coord), std::move(big));
}

CMat lax_coefficient(const CartanBasis& basis, const RMat& big_xi, int i, Complex lambda)
{
    if (i < 0 || i >= basis.n()) {
        throw ArgumentError("lax_coefficient: axis index " + std::to_string(i) + " out of range");
    }
    const RMat& a = basis[i];
    return lambda * a.cast<Complex>() + commutator(a, big_xi).cast<Complex>();
}

std::vector<CMat> lax_pair(const CartanBasis& basis, const RMat& big_xi, Complex lambda)
{
    std::vector<CMat> out;
    out.reserve(basis.n());
    for (int i = 0; i < basis.n(); ++i) {
        out.push_back(lax_coefficient(basis, big_xi, i, lambda));
    }
    return out;
}

SolutionGrid::SolutionGrid(CartanBasis basis_, GridGeometry geometry_, std::vector<RMat> values_, PointMask mask_)
    : basis(std::move(basis_)), geometry(std::move(geometry_)), values(std::move(values_)), mask(std::move(mask_))
{
    if (geometry.dim() != basis.n()) {
        throw ArgumentError("SolutionGrid: grid dimension differs from n");
    }
    if (values.size() != geometry.size()) {
        throw ArgumentError("SolutionGrid: value count differs from grid size");
    }
    if (mask.size() == 0) {
        mask = PointMask(geometry.size());
    }
}

double uk_residual_at(const SolutionGrid& grid, std::size_t point)
{
    const CartanBasis& b = grid.basis;
    const int n = b.n();
    const RMat& x = grid.values[point];
    std::vector<RMat> d(n);
    std::vector<RMat> ad(n);
    for (int i = 0; i < n; ++i) {
        d[i] = partial(grid.values, grid.geometry, point, i);
        ad[i] = commutator(b[i], x);
    }
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const RMat r = commutator(b[i], d[j]) - commutator(b[j], d[i]) + kUkQuadraticSign * commutator(ad[i], ad[j]);
            worst = std::max(worst, max_abs(r));
        }
    }
    return worst;
}

namespace {

FieldResidual reduce(std::vector<double> field, const std::vector<char>& used)
{
    FieldResidual out;
    for (std::size_t k = 0; k < field.size(); ++k) {
        if (used[k] == 1) {
            out.max = std::max(out.max, field[k]);
            ++out.evaluated;
        } else if (used[k] == 2) {
            ++out.skipped;
        }
    }
    out.field = std::move(field);
    return out;
}

} // namespace

FieldResidual uk_residual(const SolutionGrid& grid, Exec exec)
{
    const GridGeometry& g = grid.geometry;
    std::vector<double> field(g.size(), 0.0);
    std::vector<char> used(g.size(), 0);
    for_each_index(g.size(), exec, [&](std::size_t k) {
        if (!g.interior(k)) {
            return;
        }
        if (grid.mask.stencil_masked(k, g)) {
            used[k] = 2;
            return;
        }
        field[k] = uk_residual_at(grid, k);
        used[k] = 1;
    });
    return reduce(std::move(field), used);
}

FieldResidual flatness_residual(const LaxEvaluator& theta, const GridGeometry& g, Complex lambda, Exec exec,
                                const PointMask* mask)
{
    std::vector<std::vector<CMat>> values(g.size());
    for_each_index(g.size(), exec, [&](std::size_t k) {
        if (mask && mask->masked(k)) {
            return;
        }
        values[k] = theta(g.point(k), lambda);
    });
    std::vector<double> field(g.size(), 0.0);
    std::vector<char> used(g.size(), 0);
    for_each_index(g.size(), exec, [&](std::size_t k) {
        if (!g.interior(k)) {
            return;
        }
        if (mask && mask->stencil_masked(k, g)) {
            used[k] = 2;
            return;
        }
        const int n = g.dim();
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const std::size_t si = g.stride(i);
                const std::size_t sj = g.stride(j);
                const CMat dj_i = (values[k + si][j] - values[k - si][j]) / (2.0 * g.spacing(i));
                const CMat di_j = (values[k + sj][i] - values[k - sj][i]) / (2.0 * g.spacing(j));
                const CMat r = dj_i - di_j + commutator(values[k][i], values[k][j]);
                worst = std::max(worst, max_abs(r));
            }
        }
        field[k] = worst;
        used[k] = 1;
    });
    return reduce(std::move(field), used);
}

std::vector<RMat> xi_from_metric(const std::vector<RVec>& h, const GridGeometry& g, const PointMask* mask)
{
    if (h.size() != g.size()) {
        throw ArgumentError("xi_from_metric: field size differs from grid size");
    }
    const int n = g.dim();
    const auto skip = [&](std::size_t k) { return mask && mask->stencil_masked(k, g); };
    for (std::size_t k = 0; k < h.size(); ++k) {
        if (skip(k)) {
            continue;
        }
        if (h[k].size() != n) {
            throw ArgumentError("xi_from_metric: metric coefficient vector has wrong length");
        }
        if (!(h[k].minCoeff() > 0.0)) {
            throw DegenerateMetric("xi_from_metric: nonpositive metric coefficient at grid point " + std::to_string(k));
        }
    }
    std::vector<RMat> out(g.size(), RMat::Zero(n, n));
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (skip(k)) {
            out[k] = RMat::Constant(n, n, std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        for (int j = 0; j < n; ++j) {
            const RVec dh = partial(h, g, k, j);
            for (int i = 0; i < n; ++i) {
                if (i != j) {
                    out[k](i, j) = dh(i) / h[k](j);
                }
            }
        }
    }
    return out;
}

RMat metric_gauge(const RMat& xi_metric, const RVec& q, const QuadraticForm& form)
{
    const int n = form.n();
    RVec sigma(n);
    for (int i = 0; i < n; ++i) {
        sigma(i) = form.normal_sign(i) * (q(i) < 0.0 ? -1.0 : 1.0);
    }
    return -(sigma * sigma.transpose()).cwiseProduct(xi_metric);
}

} // namespace cflat
