#include "cflat/dressing.hpp"

#include "cflat/errors.hpp"

#include <cmath>
#include <string>

namespace cflat {

CVec TransportedLine::stacked() const
{
    CVec out(W.size() + Z.size());
    out.head(W.size()) = W.cast<Complex>();
    out.tail(Z.size()) = Z;
    return out;
}

TransportedLine normalize_transported(const CVec& y, LineFlavor flavor, const QuadraticForm& form)
{
    const int n = form.n();
    if (y.size() != form.dim()) {
        throw ArgumentError("normalize_transported: vector has wrong dimension");
    }
    const double scale = y.norm();
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw DegenerateLine("transported line: zero or non-finite spanning vector");
    }
    const CVec w = normalize_phase(y, LineFlavor::split, n) / scale;
    const double w_norm = w.head(n).real().norm();
    if (w_norm < 1e-10) {
        throw DegenerateLine("transported line: W vanishes, cannot normalise |W|^2 = 2");
    }
    if (flavor_residual(w, flavor, n) > 1e-8) {
        throw DegenerateLine(std::string("transported line: entries leave the ") + to_string(flavor) + " pattern");
    }
    double factor = std::sqrt(2.0) / w_norm;
    const RVec wr = w.head(n).real();
    for (int i = 0; i < n; ++i) {
        if (std::abs(factor * wr(i)) > 1e-6) {
            if (wr(i) < 0.0) {
                factor = -factor;
            }
            break;
        }
    }
    TransportedLine out;
    out.flavor = flavor;
    out.W = factor * wr;
    if (flavor == LineFlavor::real) {
        out.Z = (factor * w.tail(n).real()).cast<Complex>();
    } else {
        out.Z = kI * (factor * w.tail(n).imag()).cast<Complex>();
    }
    const Complex zjz = normal_inner(out.Z, out.Z, form);
    if (std::abs(zjz + 2.0) > 1e-8) {
        throw DegenerateLine("transported line: Z^T J Z = " + std::to_string(zjz.real()) + ", expected -2");
    }
    return out;
}

TransportedLine transport_line(const ExtendedFrame& frame, std::size_t k, const RVec& x)
{
    const SimpleElement& e = frame.chain().at(k);
    return normalize_transported(frame.transported_vector(k, x), e.line().flavor(), frame.form());
}

TransportedLine transport_line(const ExtendedFrame& frame, const SimpleElement& element, const RVec& x)
{
    const CMat phi = frame.evaluate(x, element.alpha());
    return normalize_transported(phi.partialPivLu().solve(element.line().vector()), element.line().flavor(),
                                 frame.form());
}

CVec transport_line_ode(const ExtendedFrame& frame, const SimpleElement& element, const RVec& x, int steps_per_unit)
{
    if (!frame.is_vacuum_core()) {
        throw ArgumentError("transport_line_ode: needs a frame with off-grid potential");
    }
    const int n = frame.basis().n();
    const Complex alpha = element.alpha();
    CVec y = element.line().vector();
    RVec z = RVec::Zero(n);
    for (int axis = 0; axis < n; ++axis) {
        const double length = x(axis);
        const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(length) * steps_per_unit)));
        const double dt = length / steps;
        auto rhs = [&](const RVec& at, const CVec& v) -> CVec {
            return -lax_coefficient(frame.basis(), frame.potential(at), axis, alpha) * v;
        };
        for (int s = 0; s < steps; ++s) {
            RVec zm = z;
            zm(axis) += 0.5 * dt;
            RVec z1 = z;
            z1(axis) += dt;
            const CVec k1 = rhs(z, y);
            const CVec k2 = rhs(zm, y + 0.5 * dt * k1);
            const CVec k3 = rhs(zm, y + 0.5 * dt * k2);
            const CVec k4 = rhs(z1, y + dt * k3);
            y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            z = z1;
        }
        z(axis) = length;
        if (!y.allFinite()) {
            throw IntegrationError("transport_line_ode: non-finite solution");
        }
    }
    return y;
}

double collinearity_residual(const CVec& a, const CVec& b)
{
    const double na = a.norm();
    const double nb2 = b.squaredNorm();
    if (na == 0.0 || nb2 == 0.0) {
        return na == 0.0 && nb2 == 0.0 ? 0.0 : 1.0;
    }
    const Complex c = b.dot(a) / nb2;
    return (a - c * b).norm() / na;
}

SolutionGrid dressed_solution(const ExtendedFrame& frame, const GridGeometry& geometry, Exec exec)
{
    const int dim = frame.form().dim();
    std::vector<RMat> values(geometry.size(), RMat::Zero(dim, dim));
    PointMask mask(geometry.size());
    std::vector<std::string> reasons(geometry.size());
    for_each_index(geometry.size(), exec, [&](std::size_t k) {
        try {
            values[k] = frame.potential(geometry.point(k));
        } catch (const Error& err) {
            reasons[k] = err.what();
        }
    });
    for (std::size_t k = 0; k < reasons.size(); ++k) {
        if (!reasons[k].empty()) {
            mask.mark(k, reasons[k]);
        }
    }
    return SolutionGrid(frame.basis(), geometry, std::move(values), std::move(mask));
}

RMat extract_potential(const CartanBasis& basis, const std::vector<CMat>& theta0)
{
    const int n = basis.n();
    const int dim = 2 * n;
    if (static_cast<int>(theta0.size()) != n) {
        throw ArgumentError("extract_potential: need one matrix per axis");
    }
    std::vector<RMat> spanning;
    spanning.reserve(n * n);
    for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
            RMat e = RMat::Zero(n, n);
            e(k, l) = 1.0;
            spanning.push_back(basis.project(embed(e, basis.form())));
        }
    }
    const Eigen::Index rows = static_cast<Eigen::Index>(n) * dim * dim;
    RMat a(rows, n * n);
    RVec rhs(rows);
    for (std::size_t c = 0; c < spanning.size(); ++c) {
        for (int i = 0; i < n; ++i) {
            const RMat ad = commutator(basis[i], spanning[c]);
            a.block(static_cast<Eigen::Index>(i) * dim * dim, c, dim * dim, 1) =
                Eigen::Map<const RVec>(ad.data(), dim * dim);
        }
    }
    for (int i = 0; i < n; ++i) {
        const RMat t = theta0[i].real();
        rhs.segment(static_cast<Eigen::Index>(i) * dim * dim, dim * dim) = Eigen::Map<const RVec>(t.data(), dim * dim);
    }
    const RVec coeff = a.completeOrthogonalDecomposition().solve(rhs);
    RMat out = RMat::Zero(dim, dim);
    for (std::size_t c = 0; c < spanning.size(); ++c) {
        out += coeff(static_cast<Eigen::Index>(c)) * spanning[c];
    }
    return basis.project(out);
}

SolutionGrid extracted_solution(const ExtendedFrame& frame, const GridGeometry& geometry, Exec exec)
{
    const int n = frame.basis().n();
    const int dim = 2 * n;
    RVec step(n);
    for (int a = 0; a < n; ++a) {
        step(a) = geometry.spacing(a);
    }
    const FrameEvaluator eval = evaluator(frame);
    std::vector<RMat> values(geometry.size(), RMat::Zero(dim, dim));
    std::vector<std::string> reasons(geometry.size());
    for_each_index(geometry.size(), exec, [&](std::size_t k) {
        try {
            const std::vector<CMat> theta = log_derivative(eval, geometry.point(k), 0.0, step);
            values[k] = extract_potential(frame.basis(), theta);
        } catch (const Error& err) {
            reasons[k] = err.what();
        }
    });
    PointMask mask(geometry.size());
    for (std::size_t k = 0; k < reasons.size(); ++k) {
        if (!reasons[k].empty()) {
            mask.mark(k, reasons[k]);
        }
    }
    return SolutionGrid(frame.basis(), geometry, std::move(values), std::move(mask));
}

RMat DressedImmersion::frame() const
{
    const auto n = static_cast<Eigen::Index>(e.size());
    RMat out(2 * n, 2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.col(i) = e[i];
        out.col(n + i) = u[i];
    }
    return out;
}

DressedImmersion dressed_immersion(const RMat& phi1, const RVec& m, Complex alpha, const TransportedLine& tl,
                                   const QuadraticForm& form)
{
    const int n = form.n();
    if (std::abs(alpha - 1.0) < 1e-12 || std::abs(alpha + 1.0) < 1e-12) {
        throw ArgumentError("dressed_immersion: alpha = +-1 is excluded");
    }
    const CMat phi = phi1.cast<Complex>();
    const CVec mc = m.cast<Complex>();
    const CVec w = tl.W.cast<Complex>();
    const Complex s = normal_inner(tl.Z, mc, form);
    const Complex denom = 1.0 - alpha * alpha;

    CVec stacked_a(2 * n);
    stacked_a << alpha * w, tl.Z;
    CVec stacked_b(2 * n);
    stacked_b << w, alpha * tl.Z;
    const CVec shift_e = phi * stacked_a;
    const CVec shift_u = phi * stacked_b;

    DressedImmersion out;
    double imag = 0.0;
    for (int i = 0; i < n; ++i) {
        const CVec ei = phi.col(i) + (alpha * w(i) / denom) * shift_e;
        const CVec ui = phi.col(n + i) - (alpha * form.normal_sign(i) * tl.Z(i) / denom) * shift_u;
        imag = std::max({imag, max_imag(ei), max_imag(ui)});
        out.e.push_back(ei.real());
        out.u.push_back(ui.real());
    }
    const CVec mt = mc + s * tl.Z;
    CVec base(2 * n);
    base << CVec::Zero(n), mc;
    const CVec ft = phi * base + (s / denom) * shift_e;
    imag = std::max({imag, max_imag(mt), max_imag(ft)});
    out.m = mt.real();
    out.F = ft.real();
    out.imag = imag;
    return out;
}

const char* to_string(CongruenceKind kind) { return kind == CongruenceKind::hyperbola ? "hyperbola" : "sphere"; }

RibaucourData ribaucour_data(const RMat& phi1, const RVec& m, const DressedImmersion& target,
                             const TransportedLine& tl, const QuadraticForm& form)
{
    const int n = form.n();
    const Complex s = normal_inner(tl.Z, m.cast<Complex>(), form);
    if (std::abs(s) < 1e-12) {
        throw DegenerateCongruence("ribaucour_data: (Z, m) = 0, the congruence degenerates to a point");
    }
    CVec xi = CVec::Zero(2 * n);
    CVec xt = CVec::Zero(2 * n);
    for (int j = 0; j < n; ++j) {
        xi += (0.5 * s * tl.Z(j)) * phi1.col(n + j).cast<Complex>();
        xt -= (0.5 * s * tl.Z(j)) * target.u[j].cast<Complex>();
    }
    RibaucourData out;
    out.imag = std::max(max_imag(xi), max_imag(xt));
    out.xi = xi.real();
    out.xi_tilde = xt.real();
    RVec f(2 * n);
    f = phi1 * (RVec(2 * n) << RVec::Zero(n), m).finished();
    out.center = f + out.xi;
    out.xi_pairing = inner(out.xi, out.xi, form);
    out.radius2 = std::abs(out.xi_pairing);
    out.kind = out.xi_pairing > 0.0 ? CongruenceKind::sphere : CongruenceKind::hyperbola;
    out.plane.resize(2 * n, n + 1);
    out.plane.leftCols(n) = phi1.leftCols(n);
    out.plane.col(n) = out.xi;
    return out;
}

RibaucourChecks check_ribaucour(const RMat& phi1, const RVec& m, const RVec& F, const DressedImmersion& target,
                                const RibaucourData& data, const TransportedLine& tl, Complex alpha,
                                const QuadraticForm& form)
{
    const int n = form.n();
    RibaucourChecks out;
    out.envelope = (F + data.xi - target.F - data.xi_tilde).cwiseAbs().maxCoeff();
    out.radius = std::abs(inner(data.xi, data.xi, form) - inner(data.xi_tilde, data.xi_tilde, form));
    const Complex s = normal_inner(tl.Z, m.cast<Complex>(), form);
    for (int i = 0; i < n; ++i) {
        if (std::abs(tl.W(i)) <= 1e-6) {
            continue;
        }
        const Complex ratio = s / (alpha * tl.W(i));
        out.imag = std::max(out.imag, std::abs(ratio.imag()));
        const RVec diff = (target.F - F) - ratio.real() * (target.e[i] - phi1.col(i));
        out.collinearity = std::max(out.collinearity, diff.cwiseAbs().maxCoeff());
    }
    const CongruenceKind expected =
        tl.flavor == LineFlavor::real ? CongruenceKind::hyperbola : CongruenceKind::sphere;
    out.kind_matches = data.kind == expected;
    const double sign = expected == CongruenceKind::hyperbola ? 1.0 : -1.0;
    out.cone = std::abs(inner(data.center, data.center, form) - sign * data.radius2);
    const RMat gram = data.plane.transpose() * form.I() * data.plane;
    out.plane_min_eig = Eigen::SelfAdjointEigenSolver<RMat>(gram).eigenvalues().minCoeff();
    out.imag = std::max({out.imag, data.imag, target.imag});
    return out;
}

SimpleElement moved_element(const SimpleElement& target, const SimpleElement& by, const QuadraticForm& form)
{
    return SimpleElement::make(target.alpha(), by.evaluate(target.alpha()) * target.line().vector(), form);
}

double permutability_residual(const SimpleElement& a, const SimpleElement& b, const std::vector<Complex>& lambdas,
                              const QuadraticForm& form)
{
    const SimpleElement a_moved = moved_element(a, b, form);
    const SimpleElement b_moved = moved_element(b, a, form);
    double worst = 0.0;
    for (const Complex& l : lambdas) {
        const CMat lhs = a_moved.evaluate(l) * b.evaluate(l);
        const CMat rhs = b_moved.evaluate(l) * a.evaluate(l);
        worst = std::max(worst, max_abs(CMat(lhs - rhs)));
    }
    return worst;
}

std::vector<Complex> permutability_samples(const SimpleElement& a, const SimpleElement& b)
{
    const double radii[] = {0.3, 0.9, 1.7, 3.1};
    const double angles[] = {0.1, 0.9, 1.7, 2.6, 4.0};
    std::vector<Complex> out;
    for (double r : radii) {
        for (double t : angles) {
            Complex l = std::polar(r, t);
            for (int tries = 0; tries < 8; ++tries) {
                const double d = std::min({std::abs(l - a.alpha()), std::abs(l + a.alpha()), std::abs(l - b.alpha()),
                                           std::abs(l + b.alpha())});
                if (d > 0.05) {
                    break;
                }
                l *= std::polar(1.0, 0.2);
            }
            out.push_back(l);
        }
    }
    return out;
}

std::pair<std::vector<SimpleElement>, std::vector<SimpleElement>>
bianchi_chains(const SimpleElement& a, const SimpleElement& b, const QuadraticForm& form)
{
    std::vector<SimpleElement> first{b, moved_element(a, b, form)};
    std::vector<SimpleElement> second{a, moved_element(b, a, form)};
    return {std::move(first), std::move(second)};
}

} // namespace cflat
