#pragma once

#include <Eigen/Dense>

#include <complex>

namespace cflat {

using Complex = std::complex<double>;
using RMat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

/// Largest absolute entry; zero for an empty matrix.
template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m)
{
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline RMat commutator(const RMat& a, const RMat& b) { return a * b - b * a; }
inline CMat commutator(const CMat& a, const CMat& b) { return a * b - b * a; }

/// Matrix exponential, backed by Eigen's MatrixFunctions module.
CMat expm(const CMat& a);
RMat expm(const RMat& a);

/// Largest imaginary part in absolute value.
double max_imag(const CMat& m);
double max_imag(const CVec& v);

} // namespace cflat
