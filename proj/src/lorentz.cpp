#include "cflat/lorentz.hpp"

#include "cflat/errors.hpp"

#include <cmath>
#include <string>

namespace cflat {

QuadraticForm::QuadraticForm(int n)
    : n_(n)
{
    if (n < 2) {
        throw ArgumentError("QuadraticForm: half-dimension must be at least 2, got " + std::to_string(n));
    }
    diag_i_ = RVec::Ones(2 * n);
    diag_i_(2 * n - 1) = -1.0;
    diag_j_ = RVec::Ones(n);
    diag_j_(n - 1) = -1.0;
    rho_ = RVec::Ones(2 * n);
    rho_.tail(n).setConstant(-1.0);
}

RVec QuadraticForm::t0() const
{
    RVec t = RVec::Zero(dim());
    t(t0_index()) = 1.0;
    return t;
}

namespace {

void require_dim(Eigen::Index got, Eigen::Index want, const char* what)
{
    if (got != want) {
        throw ArgumentError(std::string(what) + ": dimension " + std::to_string(got) + ", expected " +
                            std::to_string(want));
    }
}

} // namespace

Complex inner(const CVec& x, const CVec& y, const QuadraticForm& form)
{
    require_dim(x.size(), form.dim(), "inner");
    require_dim(y.size(), form.dim(), "inner");
    return (x.array() * form.diag_I().array().cast<Complex>() * y.array()).sum();
}

double inner(const RVec& x, const RVec& y, const QuadraticForm& form)
{
    require_dim(x.size(), form.dim(), "inner");
    require_dim(y.size(), form.dim(), "inner");
    return (x.array() * form.diag_I().array() * y.array()).sum();
}

Complex normal_inner(const CVec& x, const CVec& y, const QuadraticForm& form)
{
    require_dim(x.size(), form.n(), "normal_inner");
    require_dim(y.size(), form.n(), "normal_inner");
    return (x.array() * form.diag_J().array().cast<Complex>() * y.array()).sum();
}

double normal_inner(const RVec& x, const RVec& y, const QuadraticForm& form)
{
    require_dim(x.size(), form.n(), "normal_inner");
    require_dim(y.size(), form.n(), "normal_inner");
    return (x.array() * form.diag_J().array() * y.array()).sum();
}

double group_residual(const CMat& m, const QuadraticForm& form)
{
    require_dim(m.rows(), form.dim(), "group_residual");
    require_dim(m.cols(), form.dim(), "group_residual");
    const CMat i = form.I().cast<Complex>();
    return max_abs(CMat(m.transpose() * i * m - i));
}

double group_residual(const RMat& m, const QuadraticForm& form)
{
    require_dim(m.rows(), form.dim(), "group_residual");
    require_dim(m.cols(), form.dim(), "group_residual");
    const RMat i = form.I();
    return max_abs(RMat(m.transpose() * i * m - i));
}

double algebra_residual(const RMat& x, const QuadraticForm& form)
{
    const RMat i = form.I();
    return max_abs(RMat(x.transpose() * i + i * x));
}

const char* to_string(LineFlavor flavor)
{
    return flavor == LineFlavor::real ? "real" : "split";
}

CVec normalize_phase(const CVec& v, LineFlavor flavor, int n)
{
    const Eigen::Index count = flavor == LineFlavor::real ? v.size() : n;
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index k = 0; k < count; ++k) {
        if (std::abs(v(k)) > best_abs) {
            best_abs = std::abs(v(k));
            best = k;
        }
    }
    if (best_abs <= 0.0) {
        return v;
    }
    const Complex phase = std::conj(v(best)) / best_abs;
    return v * phase;
}

double flavor_residual(const CVec& v, LineFlavor flavor, int n)
{
    const double scale = v.norm();
    if (scale == 0.0) {
        return 0.0;
    }
    double worst = 0.0;
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        const bool should_be_real = flavor == LineFlavor::real || k < n;
        const double off = should_be_real ? std::abs(v(k).imag()) : std::abs(v(k).real());
        worst = std::max(worst, off);
    }
    return worst / scale;
}

IsotropicLine IsotropicLine::make(const CVec& v, LineFlavor flavor, const QuadraticForm& form)
{
    require_dim(v.size(), form.dim(), "IsotropicLine");
    const double norm2 = v.squaredNorm();
    if (norm2 == 0.0) {
        throw ArgumentError("IsotropicLine: zero vector");
    }
    const CVec w = normalize_phase(v, flavor, form.n());
    const double iso = std::abs(inner(w, w, form)) / norm2;
    if (iso > 1e-9) {
        throw ArgumentError("IsotropicLine: (v,v) = " + std::to_string(iso) + " relative, not isotropic");
    }
    const double pattern = flavor_residual(w, flavor, form.n());
    if (pattern > 1e-9) {
        throw ArgumentError(std::string("IsotropicLine: entries do not follow the ") + to_string(flavor) +
                            " pattern (residual " + std::to_string(pattern) + ")");
    }
    const CVec rv = form.rho().cast<Complex>().asDiagonal() * w;
    const double pairing = std::abs(inner(w, rv, form)) / norm2;
    if (pairing < kDegeneracyThreshold) {
        throw DegenerateLine("IsotropicLine: rho L coincides with L (|(v, rho v)|/|v|^2 = " +
                             std::to_string(pairing) + ")");
    }
    return IsotropicLine(w, flavor, pairing);
}

LineProjectors line_projector(const CVec& v, const QuadraticForm& form)
{
    require_dim(v.size(), form.dim(), "line_projector");
    const CVec rho = form.rho().cast<Complex>();
    const CVec rv = rho.asDiagonal() * v;
    const Complex pairing = inner(v, rv, form);
    if (std::abs(pairing) < kDegeneracyThreshold * v.squaredNorm()) {
        throw DegenerateLine("line_projector: |(v, rho v)| = " + std::to_string(std::abs(pairing)) +
                             " below threshold");
    }
    // pi_L x = ((x, rho v) / (v, rho v)) v
    const CVec functional = form.diag_I().cast<Complex>().asDiagonal() * rv;
    LineProjectors out;
    out.onto_line = v * functional.transpose() / pairing;
    out.onto_rho_line = rho.asDiagonal() * out.onto_line * rho.asDiagonal();
    out.complement = CMat::Identity(form.dim(), form.dim()) - out.onto_line - out.onto_rho_line;
    return out;
}

} // namespace cflat
