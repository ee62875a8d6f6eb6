#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dilateron/random.hpp"

namespace dilateron::calculus {

using cplx = std::complex<double>;

/// Generator A of e^{tA} on the n-point space with measure mu.
struct SubmarkovianGenerator {
  Eigen::VectorXd mu;
  Eigen::MatrixXd A;

  int n() const { return static_cast<int>(A.rows()); }
};

/// Symmetric random walk with killing: A_ij = W_ij / mu_i off the diagonal,
/// rows summing to -kappa_i with kappa_i in [kill_lo, kill_hi].
SubmarkovianGenerator random_generator(Rng& rng, int n, double kill_lo = 0.05,
                                       double kill_hi = 0.5, double edge_prob = 0.7);
/// Negated path-graph Laplacian on n points (unit measure) plus killing on every state.
SubmarkovianGenerator path_generator(int n, double killing);

struct Check {
  std::string name;
  bool passed = true;
  double value = 0.0;  // worst observed quantity for this condition
};

struct ValidationReport {
  std::vector<Check> checks;
  bool valid() const;
  const Check* find(const std::string& name) const;
};

struct ValidateOptions {
  bool allow_conservative = false;
  std::vector<double> t_grid{0.01, 0.1, 1.0, 10.0};
  std::vector<double> p_grid{1.0, 1.25, 1.5, 2.0, 3.0, 6.0};
};

ValidationReport validate(const SubmarkovianGenerator& gen, const ValidateOptions& opts = {});

/// Eigenpairs of a mu-symmetric generator with mu-orthonormal eigenvectors.
class SpectralDecomposition {
 public:
  /// Throws DomainError if gen is not mu-symmetric or, unless allowed, singular.
  explicit SpectralDecomposition(const SubmarkovianGenerator& gen, bool allow_conservative = false);

  int n() const { return static_cast<int>(eigenvalues_.size()); }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  /// Column k is e_k.
  const Eigen::MatrixXd& eigenvectors() const { return eigenvectors_; }
  const Eigen::VectorXd& mu() const { return mu_; }

  /// sum_k m(-lambda_k) e_k e_k^T diag(mu).
  Eigen::MatrixXcd apply_symbol(const std::function<cplx(double)>& m) const;

 private:
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
  Eigen::VectorXd mu_;
  Eigen::MatrixXd q_;  // orthonormal eigenvectors of the symmetrized generator
};

using Symbol = std::function<cplx(double)>;

Eigen::MatrixXcd borel_calculus(const SpectralDecomposition& s, const Symbol& m);
/// T_z = e^{zA} for Re z >= 0.
Eigen::MatrixXcd semigroup_at(const SpectralDecomposition& s, cplx z);
/// (-A)^{i gamma}.
Eigen::MatrixXcd imaginary_power(const SpectralDecomposition& s, double gamma);

struct NormBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Two-sided bounds on |M|_{L^p(mu) -> L^p(mu)}: an achieved ratio from
/// multi-start ascent and the Riesz-Thorin bound through the exact 1, 2, inf norms.
NormBounds pq_norm_estimate(const Eigen::MatrixXcd& m, double p, const Eigen::VectorXd& mu,
                            std::uint64_t seed, int starts = 32);
/// Riesz-Thorin upper bound alone.
double interpolation_upper(const Eigen::MatrixXcd& m, double p, const Eigen::VectorXd& mu);
/// Spectral norm on L^2(mu).
double norm2_mu(const Eigen::MatrixXcd& m, const Eigen::VectorXd& mu);
double lp_mu_norm(const Eigen::VectorXcd& x, double p, const Eigen::VectorXd& mu);

struct CowlingRow {
  double gamma = 0.0, p = 0.0, lower = 0.0, upper = 0.0, reference = 1.0, ratio = 1.0;
};
/// |(-A)^{i gamma}|_p bounds against e^{pi |1/p - 1/2| |gamma|}.
std::vector<CowlingRow> cowling_bound_scan(const SpectralDecomposition& s,
                                           const std::vector<double>& gammas,
                                           const std::vector<double>& ps, std::uint64_t seed,
                                           int starts = 32);

struct ConeRow {
  double psi = 0.0, radius = 0.0, lower = 0.0, upper = 0.0;
};
struct ConeScan {
  std::vector<ConeRow> rows;
  /// Largest sampled angle up to which every lower bound is <= 1 + 1e-8.
  double empirical_angle = 0.0;
  double stein_angle = 0.0;
  double lp_angle = 0.0;
};
double stein_angle(double p);
/// pi/2 - arctan(|p - 2| / (2 sqrt(p - 1))).
double liskevich_perelmuter_angle(double p);
ConeScan cone_contractivity_scan(const SpectralDecomposition& s, double p,
                                 const std::vector<double>& angles,
                                 const std::vector<double>& radii, std::uint64_t seed,
                                 int starts = 16);

/// (1 - e^{-t x}) / (t x), continued by 1 at x = 0.
cplx ergodic_symbol(double t, double x);

struct MaximalResult {
  Eigen::VectorXd max_function;
  double ratio = 0.0;
};
MaximalResult ergodic_maximal(const SpectralDecomposition& s, const Eigen::VectorXcd& f, double p,
                              const std::vector<double>& t_grid);

/// Largest admissible cone half-angle (pi/2)(1 - |2/p - 1|) for the cone maximal bound.
double cone_maximal_limit(double p);
/// sup |T_z f| over z = r e^{i psi}, r in (0,1), |psi| <= theta, sampled at
/// r = k / (radial_samples + 1) for k = 0..radial_samples (k = 0 stands for z -> 0).
MaximalResult cone_maximal(const SpectralDecomposition& s, const Eigen::VectorXcd& f, double theta,
                           double p, int radial_samples = 40, int angular_samples = 21);

struct VonNeumannResult {
  double lhs = 0.0;
  /// max |p(z)| on the 4096-point circle grid, refined around the best points.
  double rhs = 0.0;
  double rhs_grid = 0.0;
  /// Bernstein upper bound for sup |p| derived from the grid maximum.
  double rhs_certified = 0.0;
  bool ok = false;
};
/// Complex Gaussian matrix scaled to spectral norm uniform in [0.3, 1].
Eigen::MatrixXcd random_contraction(Rng& rng, int n);

VonNeumannResult von_neumann_check(const Eigen::MatrixXcd& t, const Eigen::VectorXcd& coeffs,
                                   int grid = 4096);

}  // namespace dilateron::calculus
