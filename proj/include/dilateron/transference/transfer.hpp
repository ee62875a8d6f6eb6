#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "dilateron/calculus/calculus.hpp"
#include "dilateron/transference/kernel.hpp"

namespace dilateron::transference {

/// int_0^inf k(t) T_t dt through the spectral symbol x -> sum_j h k_j e^{-x t_j}.
Eigen::MatrixXcd transfer_operator(const TimeKernel& k, const calculus::SpectralDecomposition& s);

struct TransferenceCheck {
  double transferred_lower = 0.0;
  double transferred_upper = 0.0;
  double convolver_upper = 0.0;
  /// max_k |Laplace k(-lambda_k)| against the certified sup |k^|.
  double half_plane_lhs = 0.0;
  double half_plane_rhs = 0.0;
  bool ok = false;
};
TransferenceCheck transference_check(const TimeKernel& k, const calculus::SpectralDecomposition& s,
                                     double p, std::uint64_t seed, int starts = 16);

struct SquareTransferCheck {
  double lhs = 0.0;        // max over samples of |(sum |T_i f|^2)^{1/2}| / |f|
  double m_upper = 0.0;    // rigorous bound on the grid square-function constant
  double m_grid = 0.0;     // ascent lower bound on the Toeplitz model
  double khinchin_factor = 1.0;  // C_p / c_p
  double bound = 0.0;      // m_upper * C_p / c_p
  bool ok = false;
};
SquareTransferCheck square_transfer_check(const std::vector<TimeKernel>& family,
                                          const calculus::SpectralDecomposition& s, double p,
                                          const std::vector<Eigen::VectorXcd>& samples,
                                          std::uint64_t seed, int window = 512, double tol = 1e-9);

/// Mf(x_m) = max over windows of |mean of f|; left-sided windows [m - L + 1, m], or
/// centered windows [m - r, m + r] clipped to the grid.
Eigen::VectorXd hardy_littlewood_max(const Eigen::VectorXcd& f, bool one_sided);

struct MaximalTransferCheck {
  double m_grid = 0.0;       // ascent lower bound for sup_i |k_i * f| on the Toeplitz model
  double m_semigroup = 0.0;  // ascent lower bound for sup_i |T_{k_i} h|
  double m_upper = 0.0;      // (sum_i |k_i|_{p,p}^p)^{1/p} from the convolver upper bounds
  bool ok = false;
};
MaximalTransferCheck maximal_transfer_check(const std::vector<TimeKernel>& family,
                                            const calculus::SpectralDecomposition& s, double p,
                                            std::uint64_t seed, int window = 512, int starts = 8,
                                            double tol = 1e-6);

}  // namespace dilateron::transference
