#include "cflat/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace cflat {

CMat expm(const CMat& a) { return a.exp(); }
RMat expm(const RMat& a) { return a.exp(); }

double max_imag(const CMat& m) { return m.size() == 0 ? 0.0 : m.imag().cwiseAbs().maxCoeff(); }
double max_imag(const CVec& v) { return v.size() == 0 ? 0.0 : v.imag().cwiseAbs().maxCoeff(); }

} // namespace cflat
