#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "dilateron/random.hpp"

namespace testing_support {

/// Independent p-norm, written without the library's helpers.
inline double pnorm(const Eigen::VectorXcd& v, double p) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += std::pow(std::abs(v[i]), p);
  return std::pow(s, 1.0 / p);
}

inline double spectral_norm(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

inline Eigen::MatrixXd random_nonnegative(dilateron::Rng& rng, int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = dilateron::uniform(rng);
  return m;
}

}  // namespace testing_support
