#ifndef CRIBSE_TYPES_HPP
#define CRIBSE_TYPES_HPP

#include <Eigen/Dense>
#include <complex>

namespace cribse {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

}  // namespace cribse

#endif
