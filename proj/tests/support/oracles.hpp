#pragma once

// Independent reference implementations used by the tests. None of these
// call the library routine they are compared against.

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

using Complex = std::complex<double>;
using RMat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;

RMat form_I(int n);
RMat form_J(int n);
RMat rho(int n);

/// a_i written out entry by entry.
RMat semisimple_a(int n, int i);
RMat channel_a(int n, int p, int i);
std::vector<RMat> basis(int n, int p); ///< p = n gives the semisimple basis

/// Taylor series with scaling and squaring, summed to machine precision.
CMat taylor_expm(const CMat& a);

CMat vacuum_frame(const std::vector<RMat>& a, const RVec& x, Complex lambda);

/// p(l) = ((l-a)/(l+a)) pi_L + pi_perp + ((l+a)/(l-a)) pi_rhoL, pi_L x = ((x, rho v)/(v, rho v)) v.
CMat simple_factor(Complex alpha, const CVec& v, Complex lambda);

struct Element {
    Complex alpha;
    CVec v;
};

/// Phi~ = p_{a,v} Phi p_{a, Phi(a)^-1 v}^-1 applied element by element.
CMat dressed_frame(const std::vector<RMat>& a, const std::vector<Element>& chain, const RVec& x, Complex lambda);

/// Real isotropic vector for the (+,...,+,-) form.
CVec real_null(int n, std::mt19937_64& rng);
/// Split isotropic vector (real head, imaginary tail).
CVec split_null(int n, std::mt19937_64& rng);

/// Central difference with Richardson extrapolation.
template <typename T>
T derivative(const std::function<T(double)>& f, double t, double h = 1e-3)
{
    const T d1 = (f(t + h) - f(t - h)) / (2.0 * h);
    const T d2 = (f(t + h / 2) - f(t - h / 2)) / h;
    return (4.0 * d2 - d1) / 3.0;
}

/// Largest |R_abcd| (all indices lowered) of sum h_i(x)^2 dx_i^2 from the general Christoffel
/// formulas, derivatives by Richardson extrapolation.
double diagonal_metric_curvature(const std::function<RVec(const RVec&)>& h, const RVec& x);

/// Left side of the U/K system at x for a smooth potential, by extrapolated differences.
double uk_defect(const std::vector<RMat>& a, const std::function<RMat(const RVec&)>& xi, const RVec& x,
                 double sign);

} // namespace oracle
