#include "cflat/simple_element.hpp"

#include "cflat/errors.hpp"

#include <cmath>
#include <sstream>

namespace cflat {

AlphaKind classify_alpha(Complex alpha)
{
    const double mag = std::abs(alpha);
    if (!(mag > 0.0) || !std::isfinite(mag)) {
        throw ArgumentError("alpha must be finite and nonzero");
    }
    if (std::abs(alpha.imag()) <= 1e-14 * mag) {
        return AlphaKind::real;
    }
    if (std::abs(alpha.real()) <= 1e-14 * mag) {
        return AlphaKind::imaginary;
    }
    std::ostringstream os;
    os << "alpha = " << alpha.real() << (alpha.imag() < 0 ? "" : "+") << alpha.imag()
       << "i is neither real nor purely imaginary";
    throw ArgumentError(os.str());
}

CMat simple_factor(Complex alpha, const LineProjectors& proj, Complex lambda)
{
    const double scale = std::max(1.0, std::abs(alpha));
    if (std::abs(lambda - alpha) < 1e-12 * scale || std::abs(lambda + alpha) < 1e-12 * scale) {
        throw PoleError("simple element evaluated at a pole");
    }
    const Complex down = (lambda - alpha) / (lambda + alpha);
    return down * proj.onto_line + proj.complement + (1.0 / down) * proj.onto_rho_line;
}

SimpleElement SimpleElement::make(Complex alpha, const CVec& v, const QuadraticForm& form)
{
    const AlphaKind kind = classify_alpha(alpha);
    IsotropicLine line = IsotropicLine::make(v, flavor_for(kind), form);
    LineProjectors proj = line_projector(line, form);
    return SimpleElement(alpha, kind, std::move(line), std::move(proj));
}

CVec random_isotropic_vector(AlphaKind kind, const QuadraticForm& form, std::mt19937_64& rng, double min_pairing)
{
    const int n = form.n();
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        RVec w(n);
        RVec z(n);
        for (int i = 0; i < n; ++i) {
            w(i) = normal(rng);
        }
        for (int i = 0; i < n; ++i) {
            z(i) = normal(rng);
        }
        CVec v(2 * n);
        if (kind == AlphaKind::real) {
            // (W; Z', z_n) with z_n^2 = |W|^2 + |Z'|^2
            const double zn = std::sqrt(w.squaredNorm() + z.head(n - 1).squaredNorm());
            z(n - 1) = z(n - 1) < 0.0 ? -zn : zn;
            v.head(n) = w.cast<Complex>();
            v.tail(n) = z.cast<Complex>();
        } else {
            // (W; i gamma) with gamma^T J gamma = |W|^2
            const double head2 = z.head(n - 1).squaredNorm();
            if (head2 < 1e-12) {
                continue;
            }
            z.head(n - 1) *= std::sqrt((w.squaredNorm() + z(n - 1) * z(n - 1)) / head2);
            v.head(n) = w.cast<Complex>();
            v.tail(n) = kI * z.cast<Complex>();
        }
        const CVec rv = form.rho().cast<Complex>().asDiagonal() * v;
        if (std::abs(inner(v, rv, form)) >= min_pairing * v.squaredNorm()) {
            return v;
        }
    }
    throw NumericalError("random_isotropic_vector: rejection sampling did not find a non-degenerate line");
}

SimpleElement random_simple_element(Complex alpha, const QuadraticForm& form, std::mt19937_64& rng)
{
    const AlphaKind kind = classify_alpha(alpha);
    return SimpleElement::make(alpha, random_isotropic_vector(kind, form, rng), form);
}

} // namespace cflat
