#pragma once

#include "cflat/linalg.hpp"

namespace cflat {

/// The Lorentzian form I_{2n-1,1} on R^{2n} together with the normal-space
/// form J = I_{n-1,1}, the involution rho = I_{n,n} and the time-like
/// anchor t_0 (last basis vector).
class QuadraticForm {
public:
    explicit QuadraticForm(int n);

    int n() const { return n_; }
    int dim() const { return 2 * n_; }

    /// Sign of the A-th basis vector (0-based), the epsilon_A of the frame.
    double sign(int a) const { return a == 2 * n_ - 1 ? -1.0 : 1.0; }
    /// Sign of the i-th normal basis vector, J_ii.
    double normal_sign(int i) const { return i == n_ - 1 ? -1.0 : 1.0; }
    double rho_sign(int a) const { return a < n_ ? 1.0 : -1.0; }

    const RVec& diag_I() const { return diag_i_; }
    const RVec& diag_J() const { return diag_j_; }
    const RVec& rho() const { return rho_; }

    RMat I() const { return diag_i_.asDiagonal(); }
    RMat J() const { return diag_j_.asDiagonal(); }
    RMat rho_matrix() const { return rho_.asDiagonal(); }

    int t0_index() const { return 2 * n_ - 1; }
    RVec t0() const;

    friend bool operator==(const QuadraticForm& a, const QuadraticForm& b) { return a.n_ == b.n_; }

private:
    int n_;
    RVec diag_i_;
    RVec diag_j_;
    RVec rho_;
};

/// Bilinear pairing x^T I y; no conjugation.
Complex inner(const CVec& x, const CVec& y, const QuadraticForm& form);
double inner(const RVec& x, const RVec& y, const QuadraticForm& form);

/// The J-pairing x^T J y on the normal factor R^{n-1,1}.
Complex normal_inner(const CVec& x, const CVec& y, const QuadraticForm& form);
double normal_inner(const RVec& x, const RVec& y, const QuadraticForm& form);

/// max |M^T I M - I|; zero iff M preserves the form.
double group_residual(const CMat& m, const QuadraticForm& form);
double group_residual(const RMat& m, const QuadraticForm& form);

/// max |X^T I + I X|; zero iff X lies in o(2n-1,1).
double algebra_residual(const RMat& x, const QuadraticForm& form);

/// Relative threshold on |(v, rho v)| / |v|^2 below which a line is treated
/// as coinciding with its rho-image.
inline constexpr double kDegeneracyThreshold = 1e-8;

enum class LineFlavor {
    real,  ///< all entries real (pairs with real alpha)
    split, ///< first n entries real, last n purely imaginary (imaginary alpha)
};

const char* to_string(LineFlavor flavor);

/// A complex isotropic line L with rho L not orthogonal to L. The stored
/// spanning vector is phase-normalised so that its entries follow the
/// declared flavor pattern.
class IsotropicLine {
public:
    /// Validates isotropy, non-degeneracy and the flavor pattern.
    static IsotropicLine make(const CVec& v, LineFlavor flavor, const QuadraticForm& form);

    const CVec& vector() const { return v_; }
    LineFlavor flavor() const { return flavor_; }

    /// The relative pairing |(v, rho v)| / |v|^2.
    double rho_pairing() const { return rho_pairing_; }

private:
    IsotropicLine(CVec v, LineFlavor flavor, double rho_pairing)
        : v_(std::move(v)), flavor_(flavor), rho_pairing_(rho_pairing)
    {
    }

    CVec v_;
    LineFlavor flavor_;
    double rho_pairing_;
};

/// Multiply v by a unit complex scalar so the entries selected by the flavor
/// are as real as possible (anchored on the largest such entry).
CVec normalize_phase(const CVec& v, LineFlavor flavor, int n);

/// Residual of the flavor pattern, relative to |v|.
double flavor_residual(const CVec& v, LineFlavor flavor, int n);

struct LineProjectors {
    CMat onto_line;     ///< pi_L: projection onto L along (rho L)^perp
    CMat onto_rho_line; ///< pi_{rho L} = rho pi_L rho
    CMat complement;    ///< I - pi_L - pi_{rho L}, projection onto (L + rho L)^perp
};

/// Projectors attached to the line spanned by v. Throws DegenerateLine when
/// |(v, rho v)| < kDegeneracyThreshold |v|^2.
LineProjectors line_projector(const CVec& v, const QuadraticForm& form);
inline LineProjectors line_projector(const IsotropicLine& line, const QuadraticForm& form)
{
    return line_projector(line.vector(), form);
}

} // namespace cflat
