#pragma once

#include "cflat/frames.hpp"
#include "cflat/grid.hpp"
#include "cflat/parallel.hpp"
#include "cflat/simple_element.hpp"
#include "cflat/uk_system.hpp"

#include <utility>
#include <vector>

namespace cflat {

/// A transported line Phi_alpha(x)^{-1} L written as (W; Z) with W real,
/// |W|^2 = 2 and Z^T J Z = -2. Z is real for real alpha and purely imaginary
/// for imaginary alpha.
struct TransportedLine {
    RVec W;
    CVec Z;
    LineFlavor flavor = LineFlavor::real;

    CVec stacked() const;
};

/// Fixes phase, scale and sign of a spanning vector (first entry of W with
/// magnitude above 1e-6 positive). DegenerateLine when W vanishes or the
/// flavor pattern fails by more than 1e-8.
TransportedLine normalize_transported(const CVec& y, LineFlavor flavor, const QuadraticForm& form);

/// Line of chain element k of the frame, transported by the prefix frame.
TransportedLine transport_line(const ExtendedFrame& frame, std::size_t k, const RVec& x);
/// Line of an element not (yet) in the chain, transported by the whole frame.
TransportedLine transport_line(const ExtendedFrame& frame, const SimpleElement& element, const RVec& x);

/// Integrates dY = -theta_alpha Y from Y(0) = v along axis-ordered straight
/// segments with RK4; returns the unnormalised Y(x). Needs a frame whose
/// potential is defined off the grid (vacuum core).
CVec transport_line_ode(const ExtendedFrame& frame, const SimpleElement& element, const RVec& x,
                        int steps_per_unit = 200);

/// |a - proj_b a| / |a|, zero when a and b span the same complex line.
double collinearity_residual(const CVec& a, const CVec& b);

/// Closed-form potential of the frame at every node; points where the
/// chain breaks down are masked with the failure reason.
SolutionGrid dressed_solution(const ExtendedFrame& frame, const GridGeometry& geometry, Exec exec = Exec::parallel);

/// Least-squares Xi in the gauge complement with [a_i, Xi] = theta0_i.
RMat extract_potential(const CartanBasis& basis, const std::vector<CMat>& theta0);

/// Potential recovered numerically from the lambda = 0 log-derivative of the
/// frame, with central differences of the grid spacing.
SolutionGrid extracted_solution(const ExtendedFrame& frame, const GridGeometry& geometry, Exec exec = Exec::parallel);

/// Explicit dressed frame columns, normal vector and lift for a source frame
/// Phi_1 = (e_i, u_i) and m = g_2^{-1} c.
struct DressedImmersion {
    std::vector<RVec> e;
    std::vector<RVec> u;
    RVec m;
    RVec F;
    /// Largest imaginary part met before taking real parts.
    double imag = 0.0;

    RMat frame() const;
};

/// Throws ArgumentError for alpha = +-1.
DressedImmersion dressed_immersion(const RMat& phi1, const RVec& m, Complex alpha, const TransportedLine& tl,
                                   const QuadraticForm& form);

enum class CongruenceKind { hyperbola, sphere };
const char* to_string(CongruenceKind kind);

struct RibaucourData {
    RVec xi;
    RVec xi_tilde;
    RVec center;
    double radius2 = 0.0;
    /// (xi, xi): negative for hyperbolae, positive for spheres.
    double xi_pairing = 0.0;
    CongruenceKind kind = CongruenceKind::hyperbola;
    /// Columns e_1..e_n, xi spanning V(x).
    RMat plane;
    double imag = 0.0;
};

/// Throws DegenerateCongruence when (Z, m) vanishes.
RibaucourData ribaucour_data(const RMat& phi1, const RVec& m, const DressedImmersion& target,
                             const TransportedLine& tl, const QuadraticForm& form);

struct RibaucourChecks {
    double envelope = 0.0;     ///< |(F + xi) - (F~ + xi~)|
    double radius = 0.0;       ///< |(xi, xi) - (xi~, xi~)|
    double collinearity = 0.0; ///< max_i |(F~ - F) - ((Z,m)/(alpha W_i)) (e~_i - e_i)|
    double cone = 0.0;         ///< |(c, c) - s r^2|, s = +1 hyperbola, -1 sphere
    bool kind_matches = false;
    /// Smallest eigenvalue of the Gram matrix of V(x).
    double plane_min_eig = 0.0;
    double imag = 0.0;
};

RibaucourChecks check_ribaucour(const RMat& phi1, const RVec& m, const RVec& F, const DressedImmersion& target,
                                const RibaucourData& data, const TransportedLine& tl, Complex alpha,
                                const QuadraticForm& form);

/// The element (alpha_target, p_by(alpha_target) L_target).
SimpleElement moved_element(const SimpleElement& target, const SimpleElement& by, const QuadraticForm& form);

/// max over lambda of |p_{a, p_B(a)L} p_B - p_{b, p_A(b)M} p_A|.
double permutability_residual(const SimpleElement& a, const SimpleElement& b, const std::vector<Complex>& lambdas,
                              const QuadraticForm& form);

/// Twenty fixed sample parameters away from the poles of both elements.
std::vector<Complex> permutability_samples(const SimpleElement& a, const SimpleElement& b);

/// The two two-step chains (B, A') and (A, B') whose normalised frames agree.
std::pair<std::vector<SimpleElement>, std::vector<SimpleElement>>
bianchi_chains(const SimpleElement& a, const SimpleElement& b, const QuadraticForm& form);

} // namespace cflat
