#include "cflat/frames.hpp"

#include "cflat/errors.hpp"
#include "cflat/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

namespace cflat {

CMat vacuum_frame(const CartanBasis& basis, const RVec& x, Complex lambda)
{
    const int n = basis.n();
    if (x.size() != n) {
        throw ArgumentError("vacuum_frame: point has wrong dimension");
    }
    if (basis.variant() == BasisVariant::channel) {
        CMat gen = CMat::Zero(2 * n, 2 * n);
        for (int i = 0; i < n; ++i) {
            gen += (lambda * x(i)) * basis[i].cast<Complex>();
        }
        return expm(gen);
    }
    CMat out = CMat::Identity(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        const Complex t = lambda * x(i);
        if (basis.form().normal_sign(i) > 0) {
            const Complex c = std::cos(t);
            const Complex s = std::sin(t);
            out(i, i) = c;
            out(i, n + i) = s;
            out(n + i, i) = -s;
            out(n + i, n + i) = c;
        } else {
            const Complex c = std::cosh(t);
            const Complex s = std::sinh(t);
            out(i, i) = c;
            out(i, n + i) = -s;
            out(n + i, i) = -s;
            out(n + i, n + i) = c;
        }
    }
    return out;
}

namespace {

/// Cubic Lagrange interpolation of node values along one grid line at the
/// fractional node coordinate s, using the four nodes around s (shifted to
/// stay inside the line).
RMat interpolate_line(const std::vector<const RMat*>& line, double s)
{
    const int last = static_cast<int>(line.size()) - 1;
    int j0 = static_cast<int>(std::floor(s)) - 1;
    j0 = std::clamp(j0, 0, last - 3);
    RMat out = RMat::Zero(line[0]->rows(), line[0]->cols());
    for (int a = 0; a < 4; ++a) {
        double w = 1.0;
        for (int b = 0; b < 4; ++b) {
            if (b != a) {
                w *= (s - (j0 + b)) / static_cast<double>(a - b);
            }
        }
        out += w * (*line[j0 + a]);
    }
    return out;
}

CMat theta_along(const RMat& a, const RMat& xi, Complex lambda)
{
    return lambda * a.cast<Complex>() + commutator(a, xi).cast<Complex>();
}

} // namespace

std::vector<CMat> integrate_frame(const SolutionGrid& grid, Complex lambda, const CMat& base,
                                  const std::vector<int>& axis_order)
{
    const GridGeometry& g = grid.geometry;
    const int n = g.dim();
    std::vector<int> order = axis_order;
    if (order.empty()) {
        order.resize(n);
        std::iota(order.begin(), order.end(), 0);
    }
    {
        std::vector<int> sorted = order;
        std::sort(sorted.begin(), sorted.end());
        std::vector<int> want(n);
        std::iota(want.begin(), want.end(), 0);
        if (sorted != want) {
            throw ArgumentError("integrate_frame: axis_order must be a permutation of 0..n-1");
        }
    }
    const std::size_t origin = g.nearest_origin();
    const std::vector<int> origin_idx = g.multi_index(origin);

    std::vector<CMat> out(g.size());
    std::vector<char> done(g.size(), 0);
    out[origin] = base;
    done[origin] = 1;

    constexpr int kSubsteps = 4;
    for (int t = 0; t < n; ++t) {
        const int axis = order[t];
        const RMat& a = grid.basis[axis];
        const int steps = g.steps(axis);
        const std::size_t stride = g.stride(axis);
        std::vector<std::size_t> starts;
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (!done[k]) {
                continue;
            }
            bool on_start = g.index_along(k, axis) == origin_idx[axis];
            for (int r = t + 1; r < n && on_start; ++r) {
                on_start = g.index_along(k, order[r]) == origin_idx[order[r]];
            }
            if (on_start) {
                starts.push_back(k);
            }
        }
        for_each_index(starts.size(), Exec::parallel, [&](std::size_t si) {
            const std::size_t start = starts[si];
            const int j_start = g.index_along(start, axis);
            const std::size_t line0 = start - stride * static_cast<std::size_t>(j_start);
            std::vector<const RMat*> line(steps);
            for (int j = 0; j < steps; ++j) {
                line[j] = &grid.values[line0 + stride * static_cast<std::size_t>(j)];
            }
            for (int dir : {+1, -1}) {
                CMat phi = out[start];
                for (int j = j_start; (dir > 0 ? j < steps - 1 : j > 0); j += dir) {
                    const double dt = dir * g.spacing(axis) / kSubsteps;
                    for (int sub = 0; sub < kSubsteps; ++sub) {
                        const double s0 = j + dir * static_cast<double>(sub) / kSubsteps;
                        const double sm = s0 + 0.5 * dir / kSubsteps;
                        const double s1 = s0 + 1.0 * dir / kSubsteps;
                        const CMat th0 = theta_along(a, interpolate_line(line, s0), lambda);
                        const CMat thm = theta_along(a, interpolate_line(line, sm), lambda);
                        const CMat th1 = theta_along(a, interpolate_line(line, s1), lambda);
                        const CMat k1 = phi * th0;
                        const CMat k2 = (phi + 0.5 * dt * k1) * thm;
                        const CMat k3 = (phi + 0.5 * dt * k2) * thm;
                        const CMat k4 = (phi + dt * k3) * th1;
                        phi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                    }
                    if (!phi.allFinite()) {
                        throw IntegrationError("integrate_frame: non-finite frame along axis " +
                                               std::to_string(axis + 1));
                    }
                    const std::size_t next = line0 + stride * static_cast<std::size_t>(j + dir);
                    out[next] = phi;
                    done[next] = 1;
                }
            }
        });
    }
    return out;
}

CMat ExtendedFrame::Core::evaluate(const RVec& x, Complex lambda) const
{
    if (!grid) {
        return vacuum_frame(basis, x, lambda);
    }
    const std::size_t k = grid->geometry.locate(x);
    std::shared_ptr<const std::vector<CMat>> values;
    {
        std::lock_guard<std::mutex> lock(mutex);
        for (const auto& entry : cache) {
            if (entry.first == lambda) {
                values = entry.second;
                break;
            }
        }
    }
    if (!values) {
        const int dim = basis.form().dim();
        auto fresh = std::make_shared<const std::vector<CMat>>(
            integrate_frame(*grid, lambda, CMat::Identity(dim, dim)));
        std::lock_guard<std::mutex> lock(mutex);
        values = fresh;
        bool present = false;
        for (const auto& entry : cache) {
            if (entry.first == lambda) {
                values = entry.second;
                present = true;
                break;
            }
        }
        if (!present) {
            cache.emplace_back(lambda, fresh);
        }
    }
    return (*values)[k];
}

RMat ExtendedFrame::Core::potential(const RVec& x) const
{
    const int dim = basis.form().dim();
    if (!grid) {
        return RMat::Zero(dim, dim);
    }
    return grid->values[grid->geometry.locate(x)];
}

ExtendedFrame ExtendedFrame::vacuum(const CartanBasis& basis)
{
    return ExtendedFrame(std::make_shared<const Core>(basis));
}

ExtendedFrame ExtendedFrame::from_solution(SolutionGrid grid)
{
    auto core = std::make_shared<Core>(grid.basis);
    core->base_point = grid.geometry.nearest_origin();
    core->grid = std::make_shared<const SolutionGrid>(std::move(grid));
    return ExtendedFrame(std::move(core));
}

ExtendedFrame ExtendedFrame::dressed(const SimpleElement& element) const
{
    if (!(element.line().vector().size() == form().dim())) {
        throw ArgumentError("dressed: element dimension differs from the frame");
    }
    ExtendedFrame out = *this;
    out.chain_.push_back(element);
    return out;
}

ExtendedFrame ExtendedFrame::prefix(std::size_t k) const
{
    if (k > chain_.size()) {
        throw ArgumentError("prefix: chain has only " + std::to_string(chain_.size()) + " elements");
    }
    ExtendedFrame out = *this;
    out.chain_.erase(out.chain_.begin() + static_cast<std::ptrdiff_t>(k), out.chain_.end());
    return out;
}

CVec ExtendedFrame::transported_vector(std::size_t k, const RVec& x) const
{
    if (k >= chain_.size()) {
        throw ArgumentError("transported_vector: chain index out of range");
    }
    const SimpleElement& e = chain_[k];
    const CMat phi = evaluate_level(k, x, e.alpha());
    return phi.partialPivLu().solve(e.line().vector());
}

CMat ExtendedFrame::evaluate_level(std::size_t level, const RVec& x, Complex lambda) const
{
    if (level == 0) {
        return core_->evaluate(x, lambda);
    }
    const SimpleElement& e = chain_[level - 1];
    const CMat prev = evaluate_level(level - 1, x, lambda);
    const LineProjectors moved = line_projector(transported_vector(level - 1, x), form());
    return e.evaluate(lambda) * prev * simple_factor(-e.alpha(), moved, lambda);
}

RMat ExtendedFrame::potential_level(std::size_t level, const RVec& x) const
{
    if (level == 0) {
        return core_->potential(x);
    }
    const SimpleElement& e = chain_[level - 1];
    const LineProjectors moved = line_projector(transported_vector(level - 1, x), form());
    const CMat jump = 2.0 * e.alpha() * (moved.onto_line - moved.onto_rho_line);
    if (max_imag(jump) > 1e-8 * (1.0 + max_abs(jump))) {
        throw NumericalError("potential: dressed potential has imaginary part " + std::to_string(max_imag(jump)));
    }
    return potential_level(level - 1, x) + basis().project(jump.real());
}

std::pair<RMat, RMat> split_at_zero(const CMat& phi0, const QuadraticForm& form)
{
    const int n = form.n();
    const double leak = std::max(max_abs(phi0.topRightCorner(n, n)), max_abs(phi0.bottomLeftCorner(n, n)));
    if (leak > 1e-9) {
        throw StructureError("split_at_zero: off-diagonal blocks of Phi_0 reach " + std::to_string(leak));
    }
    if (max_imag(phi0) > 1e-9) {
        throw StructureError("split_at_zero: Phi_0 has imaginary part " + std::to_string(max_imag(phi0)));
    }
    RMat g1 = phi0.topLeftCorner(n, n).real();
    RMat g2 = phi0.bottomRightCorner(n, n).real();
    const RMat j = form.J();
    const double orth1 = max_abs(RMat(g1.transpose() * g1 - RMat::Identity(n, n)));
    const double orth2 = max_abs(RMat(g2.transpose() * j * g2 - j));
    if (orth1 > 1e-9 || orth2 > 1e-9) {
        throw StructureError("split_at_zero: diagonal blocks are not in O(n) x O(n-1,1)");
    }
    return {std::move(g1), std::move(g2)};
}

std::pair<RMat, RMat> split_at_zero(const ExtendedFrame& frame, const RVec& x)
{
    return split_at_zero(frame.evaluate(x, 0.0), frame.form());
}

std::vector<CMat> log_derivative(const FrameEvaluator& frame, const RVec& x, Complex lambda, const RVec& step)
{
    const auto n = x.size();
    if (step.size() != n) {
        throw ArgumentError("log_derivative: step has wrong dimension");
    }
    const auto lu = frame(x, lambda).partialPivLu();
    if (!(lu.rcond() > 1e-14)) {
        throw NumericalError("log_derivative: frame is numerically singular");
    }
    std::vector<CMat> out;
    out.reserve(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        RVec xp = x;
        RVec xm = x;
        xp(i) += step(i);
        xm(i) -= step(i);
        out.push_back(lu.solve(CMat((frame(xp, lambda) - frame(xm, lambda)) / (2.0 * step(i)))));
    }
    return out;
}

double reality_residual(const FrameEvaluator& frame, const RVec& x, Complex lambda, const QuadraticForm& form)
{
    const CMat phi = frame(x, lambda);
    const CMat rho = form.rho_matrix().cast<Complex>();
    const double conj_res = max_abs(CMat(phi.conjugate() - frame(x, std::conj(lambda))));
    const double twist_res = max_abs(CMat(rho * phi * rho - frame(x, -lambda)));
    return std::max(conj_res, twist_res);
}

std::vector<Complex> default_lambda_samples()
{
    return {0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0, Complex(0.0, 0.7), Complex(0.0, -0.7)};
}

} // namespace cflat
