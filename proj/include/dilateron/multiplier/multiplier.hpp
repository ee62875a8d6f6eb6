#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "dilateron/transference/kernel.hpp"

namespace dilateron::multiplier {

using cplx = std::complex<double>;

/// Lanczos approximation (g = 607/128, 15 terms) with reflection for Re z < 1/2.
/// Throws DomainError at the poles 0, -1, -2, ...
cplx complex_gamma(cplx z);
/// Principal branch of log Gamma, continuous away from the negative real axis.
cplx log_gamma(cplx z);

/// A bounded holomorphic function on the cone |arg z| < theta.
struct ConeSymbol {
  std::function<cplx(cplx)> m;
  double theta = 0.0;
  double sup_bound = 0.0;
};

/// Largest |m| over a polar grid of the closed cone (radii 10^-6 .. 10^6).
double sampled_sup(const std::function<cplx(cplx)>& m, double theta, int radial = 241, int angular = 61);
/// Symbol with its bound taken from sampled_sup.
ConeSymbol make_symbol(std::function<cplx(cplx)> m, double theta);

ConeSymbol constant_symbol(double theta);
/// z^{i gamma} = exp(i gamma log|z| - gamma arg z), bound e^{|gamma| theta}.
ConeSymbol power_symbol(double gamma, double theta);
/// e^{-z}; bounded by 1 for theta <= pi/2.
ConeSymbol exp_symbol(double theta);
/// z / (1 + z); bounded by 1 for theta <= pi/2.
ConeSymbol resolvent_symbol(double theta);

struct BoundarySamples {
  double psi = 0.0;
  std::vector<double> x;      // ascending, negative half then positive half
  std::vector<cplx> values;   // m(x e^{i psi}) for x > 0, m(|x| e^{-i psi}) for x < 0
};

/// Samples m_psi on +-[x_min, x_max] with `per_decade` log-spaced points.
BoundarySamples boundary_restriction(const ConeSymbol& m, double psi, double x_min = 1e-4,
                                     double x_max = 1e4, int per_decade = 200);

struct MihlinReport {
  double C0 = 0.0;         // max |m_psi|
  double C1 = 0.0;         // max |x d/dx m_psi| by central differences
  double max_ratio = 0.0;  // largest ratio of neighbouring grid points on one side
  int points = 0;
};

/// Throws DomainError if neighbouring points on one side differ by a factor >= 1.1.
MihlinReport mihlin_constants(const BoundarySamples& s);

/// M_theta / sin(theta - psi).
double cauchy_cone_bound(double m_theta, double theta, double psi);

struct MellinResult {
  double residual = 0.0;
  cplx quadrature;
  cplx exact;
  double gamma_cut = 0.0;
  double tail_bound = 0.0;
  /// sup over the grid of |bracket * Gamma(-i gamma)| e^{(pi/2 - |theta|)|gamma|}.
  double majorant_constant = 0.0;
};

/// Smallest cut whose analytic tail bound is below `target`.
double default_gamma_cut(double theta, double target = 1e-11);

/// exp(t e^{i theta} x) - exp(t x) against its Mellin-Barnes integral (Simpson on
/// [-cut, cut] with `steps` panels; cut <= 0 picks default_gamma_cut).
MellinResult mellin_identity_residual(double t, double theta, double x, double gamma_cut = 0.0,
                                      int steps = 4000);
/// exp(t e^{i theta} x) - (1/t) int_0^t e^{s x} ds, same method.
MellinResult mellin_average_residual(double t, double theta, double x, double gamma_cut = 0.0,
                                     int steps = 4000);

/// Kernel x^{-i gamma - 1} / Gamma(-i gamma) on (0, horizon] with step `epsilon`.
/// Cells carry their exact mass; the first cell carries the finite part
/// epsilon^{-i gamma} / Gamma(1 - i gamma).  Its Laplace transform tends to s^{i gamma}.
transference::TimeKernel power_kernel(double gamma, double epsilon, double horizon);

}  // namespace dilateron::multiplier
