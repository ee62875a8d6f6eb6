#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace dilateron::ascent {

/// Unweighted mixed norm l^p(l^r): the vector is split into consecutive groups of
/// `group_size` entries, the inner norm is l^r, the outer norm l^p.  With
/// group_size == 1 this is the plain l^p norm.
struct MixedNorm {
  double p = 2.0;
  double r = 2.0;
  int group_size = 1;

  static MixedNorm plain(double p) { return {p, p, 1}; }
};

double norm(const Eigen::VectorXcd& x, const MixedNorm& n);

/// Hoelder-dual norm l^q(l^{r'}).
MixedNorm dual(const MixedNorm& n);

/// Duality map J with Re<J(y), y> = |y|^p and |J(y)|_dual = |y|^{p-1}.
Eigen::VectorXcd duality_map(const Eigen::VectorXcd& y, const MixedNorm& n);

struct LinearMap {
  int rows = 0;
  int cols = 0;
  std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)> apply;
  std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)> adjoint;
};

LinearMap dense_map(Eigen::MatrixXcd m);

/// diag(w_out^{1/p}) M diag(w_in^{-1/p}): transports a weighted p-norm problem to
/// unit weights.
Eigen::MatrixXcd unit_weight_form(const Eigen::MatrixXcd& m, double p,
                                  const Eigen::VectorXd& w_in,
                                  const Eigen::VectorXd& w_out);

struct Options {
  int starts = 32;
  int max_iterations = 2000;
  double tol = 1e-13;
  std::uint64_t seed = 0;
  bool real_starts = false;
};

struct Result {
  double value = 0.0;
  Eigen::VectorXcd witness;  // unit vector in the input norm achieving `value`
  int iterations = 0;
  bool converged = false;
};

/// Multi-start duality-map ascent (Boyd's iteration) for
/// sup |A x|_out / |x|_in.  Every iterate is feasible, so `value` is an
/// achieved ratio and therefore a certified lower bound.  Requires p, r > 1.
Result maximize_ratio(const LinearMap& a, const MixedNorm& in,
                      const MixedNorm& out, const Options& opts,
                      const std::vector<Eigen::VectorXcd>& extra_starts = {});

/// Same ascent for the sublinear map x -> max_k |A_k x| (pointwise modulus over a
/// family of maps with equal shapes), measured in plain l^p.  Each step fixes
/// the maximizing selection and takes a duality step on the selected rows,
/// which cannot decrease the objective.
Result maximize_maximal_ratio(const std::vector<LinearMap>& family, double p,
                              const Options& opts,
                              const std::vector<Eigen::VectorXcd>& extra_starts = {});

}  // namespace dilateron::ascent
