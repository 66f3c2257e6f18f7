#pragma once

#include "cflat/linalg.hpp"
#include "cflat/lorentz.hpp"

#include <random>

namespace cflat {

enum class AlphaKind { real, imaginary };

/// Classifies a pole parameter; throws ArgumentError unless alpha is nonzero
/// and either real or purely imaginary (to 1e-14 relative).
AlphaKind classify_alpha(Complex alpha);

inline LineFlavor flavor_for(AlphaKind kind)
{
    return kind == AlphaKind::real ? LineFlavor::real : LineFlavor::split;
}

/// ((l-a)/(l+a)) pi_L + pi_perp + ((l+a)/(l-a)) pi_rhoL. Passing -a gives the
/// inverse. Throws PoleError at l = +-a.
CMat simple_factor(Complex alpha, const LineProjectors& proj, Complex lambda);

/// The rational loop p_{alpha,L} with poles at +-alpha.
class SimpleElement {
public:
    static SimpleElement make(Complex alpha, const CVec& v, const QuadraticForm& form);

    Complex alpha() const { return alpha_; }
    AlphaKind kind() const { return kind_; }
    const IsotropicLine& line() const { return line_; }
    const LineProjectors& projectors() const { return proj_; }

    CMat evaluate(Complex lambda) const { return simple_factor(alpha_, proj_, lambda); }
    CMat inverse(Complex lambda) const { return simple_factor(-alpha_, proj_, lambda); }

private:
    SimpleElement(Complex alpha, AlphaKind kind, IsotropicLine line, LineProjectors proj)
        : alpha_(alpha), kind_(kind), line_(std::move(line)), proj_(std::move(proj))
    {
    }

    Complex alpha_;
    AlphaKind kind_;
    IsotropicLine line_;
    LineProjectors proj_;
};

/// Seeded random isotropic line of the flavor required by alpha, rejection
/// sampled until |(v, rho v)| / |v|^2 exceeds min_pairing.
CVec random_isotropic_vector(AlphaKind kind, const QuadraticForm& form, std::mt19937_64& rng,
                             double min_pairing = 1e-2);

SimpleElement random_simple_element(Complex alpha, const QuadraticForm& form, std::mt19937_64& rng);

} // namespace cflat
