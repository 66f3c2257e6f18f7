#pragma once

#include "cflat/grid.hpp"
#include "cflat/linalg.hpp"
#include "cflat/simple_element.hpp"
#include "cflat/uk_system.hpp"

#include <functional>
#include <mutex>
#include <memory>
#include <utility>
#include <vector>

namespace cflat {

/// exp(lambda sum x_i a_i); closed form for the semisimple basis, matrix
/// exponential otherwise.
CMat vacuum_frame(const CartanBasis& basis, const RVec& x, Complex lambda);

/// Integrates dPhi = Phi theta_lambda from the grid node nearest the origin
/// (where Phi = base) along axis-ordered paths. Each cell is crossed with four
/// classical RK4 substeps; Xi between nodes is cubic-interpolated along the
/// path. axis_order permutes the sweep order (default 0, 1, ..., n-1).
std::vector<CMat> integrate_frame(const SolutionGrid& grid, Complex lambda, const CMat& base,
                                  const std::vector<int>& axis_order = {});

/// Phi_lambda(x) as a vacuum or grid-integrated core composed with a chain of
/// simple elements. Evaluation is normalised: Phi_lambda at the base point is
/// the identity. Copies share the core and its per-lambda cache.
class ExtendedFrame {
public:
    static ExtendedFrame vacuum(const CartanBasis& basis);
    /// Core given by integrating a sampled solution; evaluation is then only
    /// possible at grid nodes.
    static ExtendedFrame from_solution(SolutionGrid grid);

    const CartanBasis& basis() const { return core_->basis; }
    const QuadraticForm& form() const { return core_->basis.form(); }
    bool is_vacuum_core() const { return !core_->grid; }
    const std::vector<SimpleElement>& chain() const { return chain_; }

    CMat evaluate(const RVec& x, Complex lambda) const { return evaluate_level(chain_.size(), x, lambda); }

    /// Phi^{(k)}_{alpha_{k+1}}(x)^{-1} v_{k+1}: the line of chain element k
    /// (0-based) transported by the frame dressed with elements 0..k-1.
    CVec transported_vector(std::size_t k, const RVec& x) const;

    /// Xi(x), in closed form through the chain.
    RMat potential(const RVec& x) const { return potential_level(chain_.size(), x); }
    std::vector<CMat> lax(const RVec& x, Complex lambda) const { return lax_pair(basis(), potential(x), lambda); }

    ExtendedFrame dressed(const SimpleElement& element) const;
    /// The frame dressed by the first k chain elements only.
    ExtendedFrame prefix(std::size_t k) const;

private:
    struct Core {
        CartanBasis basis;
        std::shared_ptr<const SolutionGrid> grid;
        std::size_t base_point = 0;
        mutable std::mutex mutex;
        mutable std::vector<std::pair<Complex, std::shared_ptr<const std::vector<CMat>>>> cache;

        explicit Core(CartanBasis b) : basis(std::move(b)) {}
        CMat evaluate(const RVec& x, Complex lambda) const;
        RMat potential(const RVec& x) const;
    };

    explicit ExtendedFrame(std::shared_ptr<const Core> core) : core_(std::move(core)) {}

    CMat evaluate_level(std::size_t level, const RVec& x, Complex lambda) const;
    RMat potential_level(std::size_t level, const RVec& x) const;

    std::shared_ptr<const Core> core_;
    std::vector<SimpleElement> chain_;
};

using FrameEvaluator = std::function<CMat(const RVec& x, Complex lambda)>;

inline FrameEvaluator evaluator(const ExtendedFrame& frame)
{
    return [frame](const RVec& x, Complex lambda) { return frame.evaluate(x, lambda); };
}

/// (g_1, g_2) from the block-diagonal Phi_0(x). Throws StructureError when the
/// off-diagonal blocks or imaginary parts exceed 1e-9, or when g_1 is not
/// orthogonal / g_2 not J-orthogonal to 1e-9.
std::pair<RMat, RMat> split_at_zero(const CMat& phi0, const QuadraticForm& form);
std::pair<RMat, RMat> split_at_zero(const ExtendedFrame& frame, const RVec& x);

/// Phi^{-1} d_i Phi by central differences with per-axis step.
std::vector<CMat> log_derivative(const FrameEvaluator& frame, const RVec& x, Complex lambda, const RVec& step);

/// max(|conj(Phi_l) - Phi_conj(l)|, |rho Phi_l rho - Phi_{-l}|).
double reality_residual(const FrameEvaluator& frame, const RVec& x, Complex lambda, const QuadraticForm& form);

/// Default certification set {0, +-0.5, +-1, +-2, +-0.7i}.
std::vector<Complex> default_lambda_samples();

} // namespace cflat
