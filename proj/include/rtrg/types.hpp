// types.hpp — shared aliases for the tape-RG library
#pragma once

#include <complex>
#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace rtrg {

using cplx = std::complex<double>;
using VecXc = Eigen::VectorXcd;
using VecXd = Eigen::VectorXd;
using MatXc = Eigen::MatrixXcd;
using MatXd = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<cplx>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr cplx iu{0.0, 1.0};

} // namespace rtrg
