#pragma once

#include "cflat/grid.hpp"
#include "cflat/linalg.hpp"
#include "cflat/lorentz.hpp"
#include "cflat/parallel.hpp"

#include <functional>
#include <vector>

namespace cflat {

enum class BasisVariant { semisimple, channel };

/// A maximal abelian subalgebra a = span{a_1..a_n} of the off-diagonal block
/// p of o(2n-1,1), in the semisimple or the channel (nilpotent) variant.
class CartanBasis {
public:
    static CartanBasis semisimple(int n);
    /// First p elements semisimple, the remaining n-p nilpotent.
    static CartanBasis channel(int n, int p);

    BasisVariant variant() const { return variant_; }
    int n() const { return form_.n(); }
    /// Number of semisimple elements (n for the semisimple variant).
    int p() const { return p_; }
    const QuadraticForm& form() const { return form_; }

    const std::vector<RMat>& elements() const { return elements_; }
    const RMat& operator[](int i) const { return elements_[i]; }
    bool nilpotent(int i) const { return i >= p_; }

    /// Projection of X in p onto the gauge complement C along a. C consists of
    /// the Y with tr(Y a_i) = 0 for semisimple a_i and <Y, a_j>_F = 0 for
    /// nilpotent a_j; in the semisimple case this zeroes the diagonal of xi.
    RMat project(const RMat& x) const;

    /// Largest defining pairing of X against the basis (zero on C).
    double constraint_violation(const RMat& x) const;

private:
    CartanBasis(BasisVariant variant, int n, int p);

    double pairing(int i, const RMat& x) const;

    BasisVariant variant_;
    QuadraticForm form_;
    int p_;
    std::vector<RMat> elements_;
    Eigen::PartialPivLU<RMat> gram_lu_;
};

CartanBasis make_basis(BasisVariant variant, int n, int p = 0);

/// Xi = [[0, xi^T], [-J xi, 0]].
RMat embed(const RMat& xi, const QuadraticForm& form);
/// Inverse of embed on p: xi = (top-right block)^T.
RMat extract_xi(const RMat& big_xi, int n);

/// Largest deviation of X from the block-anti-diagonal part p.
double off_p_residual(const RMat& x, int n);

/// A value of the potential: the coordinate xi together with its embedding.
class PPotential {
public:
    /// Validates the gauge constraint to 1e-10 (relative to |xi| + 1).
    static PPotential make(const RMat& xi, const CartanBasis& basis);
    /// Projects an arbitrary xi into the gauge complement first.
    static PPotential projected(const RMat& xi, const CartanBasis& basis);

    const RMat& xi() const { return xi_; }
    const RMat& matrix() const { return big_; }

private:
    PPotential(RMat xi, RMat big) : xi_(std::move(xi)), big_(std::move(big)) {}
    RMat xi_;
    RMat big_;
};

/// theta_lambda(d_i) = lambda a_i + [a_i, Xi].
CMat lax_coefficient(const CartanBasis& basis, const RMat& big_xi, int i, Complex lambda);
std::vector<CMat> lax_pair(const CartanBasis& basis, const RMat& big_xi, Complex lambda);

/// Sign of the quadratic term in [a_i, Xi_j] - [a_j, Xi_i] + s [[a_i,Xi],[a_j,Xi]] = 0.
/// Flatness of the Lax pair above forces s = -1.
inline constexpr double kUkQuadraticSign = -1.0;

/// Sampled potential Xi on a grid. Values are embedded 2n x 2n matrices.
struct SolutionGrid {
    SolutionGrid(CartanBasis basis_, GridGeometry geometry_, std::vector<RMat> values_, PointMask mask_ = {});

    CartanBasis basis;
    GridGeometry geometry;
    std::vector<RMat> values;
    PointMask mask;
};

/// Max-reduced residual field. field[k] is zero at points not evaluated.
struct FieldResidual {
    std::vector<double> field;
    double max = 0.0;
    std::size_t evaluated = 0;
    std::size_t skipped = 0;
};

/// Residual of the U/K-system at one interior point, max over pairs i<j.
double uk_residual_at(const SolutionGrid& grid, std::size_t point);
/// Interior points only; points whose stencil touches a mask are skipped.
FieldResidual uk_residual(const SolutionGrid& grid, Exec exec = Exec::parallel);

using LaxEvaluator = std::function<std::vector<CMat>(const RVec& x, Complex lambda)>;

/// Central-difference check of d_i theta_j - d_j theta_i + [theta_i, theta_j].
FieldResidual flatness_residual(const LaxEvaluator& theta, const GridGeometry& geometry, Complex lambda,
                                Exec exec = Exec::parallel, const PointMask* mask = nullptr);

/// xi_ij = (h_i)_{x_j} / h_j for i != j, from sampled metric coefficients.
std::vector<RMat> xi_from_metric(const std::vector<RVec>& h, const GridGeometry& geometry,
                                 const PointMask* mask = nullptr);

/// The metric oracle fixes xi only up to the sign of the frame columns. With
/// sigma_i = J_ii sign(q_i) the potential of the frame is -sigma_i sigma_j times
/// the metric value.
RMat metric_gauge(const RMat& xi_metric, const RVec& q, const QuadraticForm& form);

} // namespace cflat
