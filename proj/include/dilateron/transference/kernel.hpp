#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "dilateron/core/norm_ascent.hpp"
#include "dilateron/random.hpp"

namespace dilateron::transference {

using cplx = std::complex<double>;

/// Samples k_j at t_j = t0 + j h, read as the measure sum_j h k_j delta_{t_j}.
/// Every quantity below (L^1 norm, Fourier and Laplace transforms, convolution,
/// Toeplitz model) is exact for that measure.
class TimeKernel {
 public:
  TimeKernel(double h, double t0, Eigen::VectorXcd samples);

  /// Samples f at midpoints t_j = (j + 1/2) h of [0, horizon].
  static TimeKernel sample(const std::function<cplx(double)>& f, double h, double horizon);
  /// Unit point mass at t = 0.
  static TimeKernel delta(double h);

  double h() const { return h_; }
  double t0() const { return t0_; }
  const Eigen::VectorXcd& samples() const { return samples_; }
  int size() const { return static_cast<int>(samples_.size()); }
  double time(int j) const { return t0_ + j * h_; }
  bool causal() const { return t0_ >= 0.0; }

  double l1_norm() const;
  cplx fourier(double nu) const;
  cplx laplace(double x) const;
  /// Drops leading and trailing samples carrying at most rel * |k|_1 of mass in total.
  TimeKernel trimmed(double rel = 1e-12) const;

 private:
  double h_;
  double t0_;
  Eigen::VectorXcd samples_;
};

/// e^{-rate t} on [0, horizon].
TimeKernel exponential_kernel(double rate, double h, double horizon);
/// Normal density with the given center and width, cut at center + 8 width.
TimeKernel gaussian_bump(double center, double width, double h);
/// (1/t) 1_{[0,t]} with t a whole number of steps.
TimeKernel window_average(double t, double h);

/// One of four shapes chosen by `kind` mod 4 with random parameters, step h:
/// Gaussian bump, exponential, modulated bump, or raw complex samples from t = 0.
TimeKernel random_causal_kernel(Rng& rng, double h, int kind);

/// Measure convolution; both kernels must share the step h.
TimeKernel convolve(const TimeKernel& a, const TimeKernel& b);

/// N x N compression of convolution by a kernel on the grid h Z:
/// y_m = sum_l h k_{m-l} x_l for 0 <= m, l < N.
class ToeplitzOperator {
 public:
  ToeplitzOperator(const TimeKernel& k, int window);
  ~ToeplitzOperator();
  ToeplitzOperator(const ToeplitzOperator&) = delete;
  ToeplitzOperator& operator=(const ToeplitzOperator&) = delete;

  int window() const { return n_; }
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;
  Eigen::VectorXcd adjoint(const Eigen::VectorXcd& y) const;
  /// Dense matrix, for tests on small windows.
  Eigen::MatrixXcd dense() const;

 private:
  Eigen::VectorXcd transform(const Eigen::VectorXcd& x, bool conjugate_kernel) const;
  struct Plan;
  int n_;
  int size_;
  Eigen::VectorXcd taps_;
  std::unique_ptr<Plan> plan_;
};

ascent::LinearMap toeplitz_map(const TimeKernel& k, int window);

struct FourierSup {
  double grid_max = 0.0;
  /// Rigorous upper bound for sup |k^| from the grid maximum (Bernstein).
  double certified = 0.0;
  /// Frequency of the grid maximum.
  double argmax = 0.0;
};
FourierSup fourier_sup(const TimeKernel& k);

struct ConvolverLower {
  double value = 0.0;
  Eigen::VectorXcd witness;
};
/// Achieved ratio of the N x N Toeplitz compression: a lower bound for |k|_{p,p}.
ConvolverLower convolver_lower(const TimeKernel& k, double p, int window, std::uint64_t seed,
                               int starts = 4, const Eigen::VectorXcd* warm_start = nullptr);
/// Riesz-Thorin bound between |k|_1 and sup |k^| (p and its conjugate give the same bound).
double convolver_upper(const TimeKernel& k, double p);

}  // namespace dilateron::transference
