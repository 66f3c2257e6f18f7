#pragma once

#include "cflat/frames.hpp"
#include "cflat/grid.hpp"
#include "cflat/parallel.hpp"
#include "cflat/uk_system.hpp"

#include <string>
#include <vector>

namespace cflat {

/// Default null vector c: J-null with c^T c = 2 and every entry nonzero, so
/// that the vacuum metric coefficients q_i = c_i do not vanish.
RVec default_null_vector(int n);

/// Throws ArgumentError unless c is nonzero and J-null to 1e-12 relative.
void require_null(const RVec& c, const QuadraticForm& form);

struct LiftPoint {
    RMat phi1; ///< real Phi_1(x), columns e_1..e_n, u_1..u_n
    RVec q;    ///< g_2(x)^{-1} c
    RVec F;    ///< Phi_1 (0; q)
};

/// F_c = Phi_1 (0; g_2^{-1} c) at one point.
LiftPoint flat_lift(const ExtendedFrame& frame, const RVec& x, const RVec& c);

struct SpherePoint {
    RVec f;
    double u = 0.0;
    /// +1, or -1 when F had to be flipped to make (F, t_0) positive.
    double orientation = 1.0;
};

/// f = -F/(F,t_0) - t_0 and u = log (F,t_0) after the sign fix.
/// ProjectionSingular when |(F,t_0)| < 1e-12.
SpherePoint project_to_sphere(const RVec& F, const QuadraticForm& form);

/// Curvature normals read from the frame: v_i = -eps_i u_i / q_i, and in the
/// channel case the repeated v = -(u_{n-1} + u_n)/(q_{n-1} - q_n) on the
/// nilpotent directions. CurvatureDegenerate when a denominator vanishes.
std::vector<RVec> frame_curvature_normals(const RMat& phi1, const RVec& q, const CartanBasis& basis);

/// Everything sampled on the grid for one flat lift. Masked points carry NaN
/// in their numeric fields.
struct ImmersionGrid {
    ImmersionGrid(CartanBasis basis_, GridGeometry geometry_);

    CartanBasis basis;
    GridGeometry geometry;
    std::vector<RMat> frame; ///< sign-adjusted Phi_1
    std::vector<RVec> F;
    std::vector<double> orientation; ///< +-1 with F = orientation * (raw flat lift)
    std::vector<RVec> f;
    std::vector<double> u;
    std::vector<RVec> q;
    std::vector<RVec> h; ///< |dF/dx_i| by finite differences of the raw lift
    std::vector<std::vector<RVec>> v; ///< curvature normals read from the frame
    std::vector<RVec> eps;  ///< sign of (v_i, v_i)
    std::vector<RVec> norms; ///< |(v_i, v_i)|^{1/2}
    PointMask mask;

    const QuadraticForm& form() const { return basis.form(); }
    /// The flat lift before the orientation flip; smooth across (F, t_0) = 0.
    std::vector<RVec> raw_lift() const;
};

ImmersionGrid build_immersion(const ExtendedFrame& frame, const GridGeometry& geometry, const RVec& c,
                              Exec exec = Exec::parallel);

/// Residual summary of a pointwise or stencil check.
struct Measure {
    double max = 0.0;
    std::size_t evaluated = 0;
    std::size_t skipped = 0;

    void add(double value)
    {
        max = std::max(max, value);
        ++evaluated;
    }
};

Measure null_lift_residual(const ImmersionGrid& grid);
Measure sphere_residual(const ImmersionGrid& grid);
Measure frame_gram_residual(const ImmersionGrid& grid);

/// Curvature normals recomputed from finite differences of the frame:
/// pi_N(d_i e_i) / (d_i F, e_i), on interior points. Other points hold empty
/// vectors.
std::vector<std::vector<RVec>> fd_curvature_normals(const ImmersionGrid& grid);

struct CurvatureReport {
    Measure route_agreement; ///< |v_fd - v_frame|
    Measure orthogonality;   ///< |(v_i, v_j)|, i != j, finite-difference normals
    Measure reconstruction;  ///< |F + sum v_j/(v_j,v_j)|, finite-difference normals
    std::size_t sign_pattern_failures = 0; ///< points where eps is not (+,...,+,-)
};

/// Semisimple grids only. StructureError when an isotropic normal shows up.
CurvatureReport curvature_identities(const ImmersionGrid& grid, const std::vector<std::vector<RVec>>& fd_normals);

/// max | |dF/dx_i|^2 - target_i | with target q_i^2 (power 2) or |q_i| (power 1).
Measure first_form_residual(const ImmersionGrid& grid, int power);

/// Largest Riemann component of sum h_i^2 dx_i^2 from finite-difference
/// Christoffel symbols, over interior points.
Measure metric_flatness_residual(const std::vector<RVec>& h, const GridGeometry& geometry,
                                 const PointMask* mask = nullptr);

struct CombescureReport {
    Measure parallelism;         ///< part of d_i F_b orthogonal to the line of d_i F_c
    Measure sine;                ///< sine of the angle; ill-conditioned where d_i F_b nearly vanishes
    std::vector<char> christoffel; ///< per point: prod q^c and prod q^b of opposite sign
    std::size_t flagged = 0;
};

CombescureReport combescure_compare(const ImmersionGrid& lift_c, const ImmersionGrid& lift_b);

/// |v^S_i - pi_N(d_i^2 f)/(d_i f, d_i f)| with v^S = -e^u pi_{N_f} v_i.
Measure sphere_normal_residual(const ImmersionGrid& grid);
/// Sine of the angle between d_i f and -e_i + e^{-u}(e_i, t_0) F.
Measure sphere_direction_residual(const ImmersionGrid& grid);

struct ChannelReport {
    Measure isotropy_frame; ///< |(v, v)| of the repeated normal read from the frame
    Measure isotropy_fd;    ///< |(v_j, v_j)| of finite-difference normals, j on the nilpotent axes
    Measure repeated_fd;    ///< |v_j - v_k| between finite-difference normals of the repeated block
    Measure orthogonality;  ///< |(v, v_i)| against the rank-one normals
    Measure leaf_sphere;    ///< |d_j (f + v^R/(v^R, v^R))| along nilpotent axes
    Measure first_form;     ///< | |dF/dx_j|^2 - y_j^2 | on semisimple axes, (y_{n-1}-y_n)^2 otherwise
};

ChannelReport channel_checks(const ImmersionGrid& grid, const std::vector<std::vector<RVec>>& fd_normals);

} // namespace cflat

namespace cflat {

struct RegularityScreen {
    double min_q = 0.0;         ///< min over nodes and axes of |q_i|
    double max_potential = 0.0; ///< max over nodes of max |Xi|
    bool regular = false;
    std::string reason;
};

/// Coarse look at a frame before committing to it: the lift must exist at
/// every node with |q_i| >= min_q and the potential bounded by max_potential.
RegularityScreen screen_regularity(const ExtendedFrame& frame, const GridGeometry& coarse, const RVec& c,
                                   double min_q, double max_potential);

} // namespace cflat
