// Shared linear-algebra aliases.

#pragma once

#include <Eigen/Dense>

#include <complex>

namespace oscbath {

using Complex = std::complex<double>;
using Vector  = Eigen::VectorXd;
using Matrix  = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using Index   = Eigen::Index;

inline constexpr Complex kImag{0.0, 1.0};

}  // namespace oscbath
