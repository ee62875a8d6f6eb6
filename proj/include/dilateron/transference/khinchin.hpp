#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace dilateron::transference {

/// r_l(t) by the recursive definition: r_1 = 1 on [0, 1/2], -1 on (1/2, 1];
/// r_{l+1}(t) = r_l(2t) on [0, 1/2] and r_l(2t - 1) on (1/2, 1].
int rademacher(int l, double t);

/// Rademacher values on the dyadic atoms ((i-1)/2^n, i/2^n], evaluated at i/2^n:
/// entry (i - 1, l - 1) = r_l(i / 2^n).
Eigen::MatrixXd rademacher_table(int n);

struct KhinchinEstimate {
  double c_est = 1.0;  // smallest observed |a|_2 / |sum a_l r_l|_p
  double C_est = 1.0;  // largest observed ratio
};
KhinchinEstimate khinchin_empirical(double p, int n, std::uint64_t seed, int trials);

/// Configuration values of c_p and C_p: exact 1 at p = 2, otherwise the empirical
/// estimates on 10 Rademacher functions with a fixed seed.
struct KhinchinConstants {
  double c = 1.0;
  double C = 1.0;
  static KhinchinConstants for_p(double p);
};

/// (2^n)-norm of the column matrix (2^{-n/p} sum_l r_l(i/2^n) K_l)_i on L^p(mu).
double row_matrix_norm(const std::vector<Eigen::MatrixXcd>& ops, double p, const Eigen::VectorXd& mu,
                       std::uint64_t seed, int starts = 16);
/// sup over unit g of |(sum_l |K_l g|^2)^{1/2}|_{L^p(mu)}.
double square_norm(const std::vector<Eigen::MatrixXcd>& ops, double p, const Eigen::VectorXd& mu,
                   std::uint64_t seed, int starts = 16);

struct SymmetricSandwich {
  double norm_mk = 0.0;      // |K'_k| via the 2^n x 2^n block matrix
  double norm_bracket = 0.0; // |k|_[2] on L^p(mu; l^2)
  double d_p = 1.0;
  double D_p = 1.0;
  bool sandwich_ok = false;
};
/// Blocks m_ab = 2^{-n} sum_l r_l(a) r_l(b) K_l (the matrix of K'_k on the dyadic atoms).
Eigen::MatrixXcd symmetric_block_matrix(const std::vector<Eigen::MatrixXcd>& ops);
SymmetricSandwich symmetric_matrix_norm_check(const std::vector<Eigen::MatrixXcd>& ops, double p,
                                              const Eigen::VectorXd& mu, std::uint64_t seed,
                                              int starts = 16, double tol = 1e-8);

struct ProjectionCheck {
  double max_ratio = 0.0;
  double bound = 1.0;  // max{1/c_p, 1/c_q}
  bool ok = false;
};
/// |(P_n (x) id) F| / |F| for random F on the 2^n atoms with values in l^p_dim.
ProjectionCheck rademacher_projection_check(double p, int n, int trials, std::uint64_t seed,
                                            int dim = 3, double tol = 1e-9);
/// (P_n (x) id) F with F given as a 2^n x dim array of atom values.
Eigen::MatrixXcd rademacher_projection(const Eigen::MatrixXcd& f, int n);

}  // namespace dilateron::transference
