#pragma once

// Reference computations through Eigen, independent of the library's
// Jacobi solver.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "cxorder/matrix.hpp"

namespace cxorder::testing {

inline Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

inline Matrix from_eigen(const Eigen::MatrixXd& e) {
  Matrix m(e.rows(), e.cols());
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j) m(i, j) = e(i, j);
  return m;
}

inline Eigen::MatrixXd oracle_sqrt(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (a + a.transpose()));
  Eigen::VectorXd v = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * v.asDiagonal() * es.eigenvectors().transpose();
}

inline double oracle_min_eig(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (a + a.transpose()),
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline double oracle_bw2(const Matrix& a, const Matrix& b) {
  const Eigen::MatrixXd ea = to_eigen(a), eb = to_eigen(b);
  const Eigen::MatrixXd ra = oracle_sqrt(ea);
  const double cross = oracle_sqrt(ra * eb * ra).trace();
  return std::max(0.0, ea.trace() + eb.trace() - 2.0 * cross);
}

}  // namespace cxorder::testing
