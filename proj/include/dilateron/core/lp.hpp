#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "dilateron/random.hpp"

namespace dilateron::lp {

/// Finite-dimensional l^p with strictly positive weights: |v| = (sum |v_i|^p w_i)^{1/p}.
class WeightedLpSpace {
 public:
  WeightedLpSpace(double p, Eigen::VectorXd weights);
  static WeightedLpSpace unit(int n, double p);

  int dim() const { return static_cast<int>(weights_.size()); }
  double p() const { return p_; }
  /// Conjugate exponent q (infinity for p = 1).
  double q() const;
  const Eigen::VectorXd& weights() const { return weights_; }
  bool has_unit_weights() const;

  double norm(const Eigen::VectorXd& v) const;
  double norm(const Eigen::VectorXcd& v) const;

  /// The isometry onto unit-weight l^p: multiplication by w_i^{1/p}.
  Eigen::VectorXd to_unit(const Eigen::VectorXd& v) const;
  Eigen::VectorXd from_unit(const Eigen::VectorXd& v) const;

  bool operator==(const WeightedLpSpace& other) const;

 private:
  double p_;
  Eigen::VectorXd weights_;
};

class LatticeVector {
 public:
  LatticeVector(WeightedLpSpace space, Eigen::VectorXd entries);

  const WeightedLpSpace& space() const { return space_; }
  const Eigen::VectorXd& entries() const { return entries_; }
  int dim() const { return space_.dim(); }
  double operator[](int i) const { return entries_[i]; }

 private:
  WeightedLpSpace space_;
  Eigen::VectorXd entries_;
};

double lp_norm(const LatticeVector& v);

struct LatticeParts {
  LatticeVector sup;
  LatticeVector inf;
  LatticeVector abs;
  LatticeVector pos_part;
  LatticeVector neg_part;
};

LatticeParts lattice_ops(const LatticeVector& f, const LatticeVector& g);

/// alpha^{p-1} componentwise; for p = 1 the indicator of the support.
Eigen::VectorXd star_map(const Eigen::VectorXd& alpha, double p);
LatticeVector star_map(const LatticeVector& alpha);

/// Nonnegative square matrix acting on a weighted l^p space.
class PositiveOperator {
 public:
  PositiveOperator(WeightedLpSpace space, Eigen::MatrixXd entries);

  const WeightedLpSpace& space() const { return space_; }
  const Eigen::MatrixXd& entries() const { return entries_; }
  int dim() const { return space_.dim(); }
  /// m_w T m_w^{-1}: the same operator expressed on unit-weight l^p.
  Eigen::MatrixXd unit_weight_entries() const;
  LatticeVector apply(const LatticeVector& f) const;

 private:
  WeightedLpSpace space_;
  Eigen::MatrixXd entries_;
};

class SignedOperator {
 public:
  SignedOperator(WeightedLpSpace space, Eigen::MatrixXcd entries);

  const WeightedLpSpace& space() const { return space_; }
  const Eigen::MatrixXcd& entries() const { return entries_; }
  int dim() const { return space_.dim(); }
  PositiveOperator modulus() const;

 private:
  WeightedLpSpace space_;
  Eigen::MatrixXcd entries_;
};

struct NormCertificate {
  double value = 0.0;
  /// Nonnegative unit vector of the operator's space with |T witness| = value.
  Eigen::VectorXd witness;
  /// Max-norm defect of M a = value^p a^{p-1}, measured in unit-weight coordinates.
  double residual = 0.0;
  int iterations = 0;
  bool converged = true;
};

struct PowerOptions {
  double tol = 1e-12;
  int max_iterations = 100000;
  std::uint64_t seed = 0;
  int random_starts = 4;
};

/// M a = T^T (T a)^{p-1} for a unit-weight operator.
Eigen::VectorXd M_map(const Eigen::MatrixXd& t, const Eigen::VectorXd& alpha, double p);
LatticeVector M_map(const PositiveOperator& t, const LatticeVector& alpha);

/// Norm of a positive operator by nonlinear power iteration (exact for p = 1).
NormCertificate positive_norm(const PositiveOperator& t, const PowerOptions& opts = {});

/// Same iteration for a rectangular nonnegative matrix between unit-weight l^p spaces.
NormCertificate positive_norm(const Eigen::MatrixXd& t, double p, const PowerOptions& opts = {});

enum class ExtremalRoute { kSupportExtension, kFixedPoint, kConstant };

struct ExtremalVector {
  /// Strictly positive u in unit-weight coordinates with M u <= u^{p-1}.
  Eigen::VectorXd u;
  /// max_i (M u - u^{p-1})_i, may be slightly positive from rounding.
  double defect = 0.0;
  int support_steps = 0;
  ExtremalRoute route = ExtremalRoute::kSupportExtension;
  double operator_norm = 0.0;
};

/// Extremal vector of a positive contraction; throws ContractionError if |T| > 1 + tol.
ExtremalVector extremal_vector(const PositiveOperator& t, double tol = 1e-9,
                               const PowerOptions& opts = {});

struct ComplexificationEstimate {
  double real_norm_estimate = 0.0;
  double complex_norm_estimate = 0.0;
};

/// Multi-start estimates of |T|_{p->p} over real and over complex vectors.
ComplexificationEstimate complexification_check(const Eigen::MatrixXd& t,
                                                const WeightedLpSpace& space,
                                                std::uint64_t seed, int starts = 32);

/// Nonnegative matrix scaled so that every row and column sum is at most 1
/// (a contraction on every unit-weight l^p).  Entries vanish with probability zero_prob.
Eigen::MatrixXd random_substochastic(Rng& rng, int n, double zero_prob = 0.0);
/// Complex matrix whose entrywise modulus is random_substochastic.
Eigen::MatrixXcd random_complex_substochastic(Rng& rng, int n, double zero_prob = 0.0);

}  // namespace dilateron::lp
