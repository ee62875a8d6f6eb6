#include "dilateron/multiplier/multiplier.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "dilateron/error.hpp"

namespace dilateron::multiplier {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kG = 607.0 / 128.0;
constexpr std::array<double, 15> kLanczos{
    0.99999999999999709182,     57.156235665862923517,      -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978,    .33994649984811888699e-4,
    .46523628927048575665e-4,   -.98374475304879564677e-4,  .15808870322491248884e-3,
    -.21026444172410488319e-3,  .21743961811521264320e-3,   -.16431810653676389022e-3,
    .84418223983852743293e-4,   -.26190838401581408670e-4,  .36899182659531622704e-5};

void check_pole(cplx z) {
  if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::nearbyint(z.real())) {
    throw DomainError("Gamma has a pole at a nonpositive integer");
  }
}

// log Gamma for Re z >= 1/2; the shift z -> z - 1 puts the series in the
// form sum c_j / (z + j).
cplx lanczos_log_gamma(cplx z) {
  z -= 1.0;
  cplx ser = kLanczos[0];
  for (std::size_t j = 1; j < kLanczos.size(); ++j) ser += kLanczos[j] / (z + static_cast<double>(j));
  const cplx t = z + kG + 0.5;
  return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(ser);
}

// Bracket / (-i gamma), continuous through gamma = 0.
cplx bracket_identity(double gamma, double theta) {
  if (gamma == 0.0) return cplx(0.0, -theta);
  return std::expm1(-gamma * theta) / cplx(0.0, -gamma);
}

cplx bracket_average(double gamma, double theta) {
  const cplx ig(0.0, gamma);
  if (gamma == 0.0) return cplx(-1.0, -theta);
  return std::expm1(-gamma * theta) / (-ig) - 1.0 / (1.0 + ig);
}

double tail_bound(double theta, double cut) {
  const double a = kPi / 2.0 - std::abs(theta);
  const double gamma_scale = std::sqrt(2.0 * kPi / cut) / std::sqrt(-std::expm1(-2.0 * kPi * cut));
  return gamma_scale / kPi * (std::exp(-a * cut) / a + std::exp(-kPi * cut / 2.0) / (kPi / 2.0));
}

void check_mellin_args(double t, double theta, double x, int steps) {
  if (!(t > 0.0)) throw DomainError("t must be positive");
  if (!(x < 0.0)) throw DomainError("x must be negative");
  if (!(std::abs(theta) < kPi / 2.0)) throw DomainError("|theta| must be below pi/2");
  if (steps < 2 || steps % 2 != 0) throw InputError("Simpson needs an even positive number of panels");
}

template <class Bracket>
MellinResult mellin_quadrature(double t, double theta, double x, double cut, int steps, Bracket bracket,
                               cplx exact) {
  MellinResult out;
  out.gamma_cut = cut > 0.0 ? cut : default_gamma_cut(theta);
  out.tail_bound = tail_bound(theta, out.gamma_cut);
  if (out.tail_bound >= 1e-10) throw ConvergenceError("gamma cut leaves a tail above 1e-10");
  const double log_tx = std::log(-t * x);
  const double a = kPi / 2.0 - std::abs(theta);
  const double step = 2.0 * out.gamma_cut / steps;
  cplx acc = 0.0;
  for (int k = 0; k <= steps; ++k) {
    const double g = -out.gamma_cut + k * step;
    // Gamma(-i g) * bracket = Gamma(1 - i g) * bracket / (-i g).
    const cplx core = bracket(g, theta) * complex_gamma(cplx(1.0, -g));
    out.majorant_constant = std::max(out.majorant_constant, std::abs(core) * std::exp(a * std::abs(g)));
    const cplx f = core * std::polar(1.0, g * log_tx);
    const double w = (k == 0 || k == steps) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    acc += w * f;
  }
  out.quadrature = acc * (step / 3.0) / (2.0 * kPi);
  out.exact = exact;
  out.residual = std::abs(out.quadrature - out.exact);
  return out;
}

}  // namespace

cplx log_gamma(cplx z) {
  check_pole(z);
  if (z.real() < 0.5) {
    // Reflection: Gamma(z) Gamma(1 - z) = pi / sin(pi z).
    return std::log(kPi) - std::log(std::sin(kPi * z)) - lanczos_log_gamma(1.0 - z);
  }
  return lanczos_log_gamma(z);
}

cplx complex_gamma(cplx z) {
  check_pole(z);
  if (z.real() < 0.5) return kPi / (std::sin(kPi * z) * std::exp(lanczos_log_gamma(1.0 - z)));
  return std::exp(lanczos_log_gamma(z));
}

double sampled_sup(const std::function<cplx(cplx)>& m, double theta, int radial, int angular) {
  if (radial < 2 || angular < 1) throw InputError("sampling grid too small");
  double best = 0.0;
  for (int i = 0; i < radial; ++i) {
    const double r = std::pow(10.0, -6.0 + 12.0 * i / (radial - 1));
    for (int k = 0; k < angular; ++k) {
      const double phi = angular == 1 ? 0.0 : -theta + 2.0 * theta * k / (angular - 1);
      best = std::max(best, std::abs(m(std::polar(r, phi))));
    }
  }
  return best;
}

ConeSymbol make_symbol(std::function<cplx(cplx)> m, double theta) {
  if (!(theta > 0.0 && theta < kPi)) throw DomainError("cone angle must lie in (0, pi)");
  const double sup = sampled_sup(m, theta);
  return {std::move(m), theta, sup};
}

ConeSymbol constant_symbol(double theta) { return make_symbol([](cplx) { return cplx(1.0); }, theta); }

ConeSymbol power_symbol(double gamma, double theta) {
  ConeSymbol s = make_symbol(
      [gamma](cplx z) { return std::exp(cplx(-gamma * std::arg(z), gamma * std::log(std::abs(z)))); }, theta);
  s.sup_bound = std::exp(std::abs(gamma) * theta);
  return s;
}

ConeSymbol exp_symbol(double theta) {
  if (theta > kPi / 2.0) throw DomainError("e^{-z} is unbounded beyond the right half-plane");
  ConeSymbol s = make_symbol([](cplx z) { return std::exp(-z); }, theta);
  s.sup_bound = 1.0;
  return s;
}

ConeSymbol resolvent_symbol(double theta) {
  if (theta > kPi / 2.0) throw DomainError("bound 1 for z/(1+z) needs theta <= pi/2");
  ConeSymbol s = make_symbol([](cplx z) { return z / (1.0 + z); }, theta);
  s.sup_bound = 1.0;
  return s;
}

BoundarySamples boundary_restriction(const ConeSymbol& m, double psi, double x_min, double x_max,
                                     int per_decade) {
  if (psi < 0.0 || psi >= m.theta) throw DomainError("boundary angle must lie in [0, theta)");
  if (!(x_min > 0.0 && x_max > x_min) || per_decade < 1) throw InputError("invalid boundary grid");
  const int count = static_cast<int>(std::ceil(std::log10(x_max / x_min) * per_decade)) + 1;
  std::vector<double> pos(count);
  for (int i = 0; i < count; ++i) pos[i] = x_min * std::pow(x_max / x_min, static_cast<double>(i) / (count - 1));
  BoundarySamples s;
  s.psi = psi;
  for (int i = count - 1; i >= 0; --i) {
    s.x.push_back(-pos[i]);
    s.values.push_back(m.m(std::polar(pos[i], -psi)));
  }
  for (int i = 0; i < count; ++i) {
    s.x.push_back(pos[i]);
    s.values.push_back(m.m(std::polar(pos[i], psi)));
  }
  return s;
}

MihlinReport mihlin_constants(const BoundarySamples& s) {
  const int n = static_cast<int>(s.x.size());
  if (n != static_cast<int>(s.values.size()) || n < 3) throw InputError("boundary samples malformed");
  MihlinReport r;
  r.points = n;
  for (int i = 0; i < n; ++i) r.C0 = std::max(r.C0, std::abs(s.values[i]));
  for (int i = 0; i + 1 < n; ++i) {
    if ((s.x[i] > 0.0) != (s.x[i + 1] > 0.0)) continue;
    const double ratio = std::abs(s.x[i + 1] / s.x[i]);
    r.max_ratio = std::max(r.max_ratio, std::max(ratio, 1.0 / ratio));
  }
  if (r.max_ratio >= 1.1) throw DomainError("boundary grid too coarse for central differences");
  for (int i = 1; i + 1 < n; ++i) {
    const bool same_side = (s.x[i - 1] > 0.0) == (s.x[i] > 0.0) && (s.x[i] > 0.0) == (s.x[i + 1] > 0.0);
    if (!same_side) continue;
    const cplx d = (s.values[i + 1] - s.values[i - 1]) / (s.x[i + 1] - s.x[i - 1]);
    r.C1 = std::max(r.C1, std::abs(s.x[i] * d));
  }
  return r;
}

double cauchy_cone_bound(double m_theta, double theta, double psi) {
  if (psi < 0.0 || psi >= theta) throw DomainError("boundary angle must lie in [0, theta)");
  return m_theta / std::sin(theta - psi);
}

double default_gamma_cut(double theta, double target) {
  if (!(std::abs(theta) < kPi / 2.0)) throw DomainError("|theta| must be below pi/2");
  double cut = 1.0;
  while (tail_bound(theta, cut) >= target) {
    cut *= 1.05;
    if (cut > 1e6) throw ConvergenceError("no gamma cut meets the tail target");
  }
  return cut;
}

MellinResult mellin_identity_residual(double t, double theta, double x, double gamma_cut, int steps) {
  check_mellin_args(t, theta, x, steps);
  const cplx exact = std::exp(t * x * std::polar(1.0, theta)) - std::exp(t * x);
  return mellin_quadrature(t, theta, x, gamma_cut, steps, bracket_identity, exact);
}

MellinResult mellin_average_residual(double t, double theta, double x, double gamma_cut, int steps) {
  check_mellin_args(t, theta, x, steps);
  const double tx = t * x;
  const cplx exact = std::exp(tx * std::polar(1.0, theta)) - std::expm1(tx) / tx;
  return mellin_quadrature(t, theta, x, gamma_cut, steps, bracket_average, exact);
}

transference::TimeKernel power_kernel(double gamma, double epsilon, double horizon) {
  if (gamma == 0.0) throw DomainError("gamma = 0 is a pole of the normalization");
  if (!(epsilon > 0.0) || !(horizon > epsilon)) throw InputError("need 0 < epsilon < horizon");
  const long long count = std::llround(horizon / epsilon);
  if (count > (1LL << 26)) throw InputError("power kernel grid too large");
  const cplx a(0.0, -gamma);
  const cplx scale = std::exp(a * std::log(epsilon)) / complex_gamma(1.0 + a);  // h^a / (a Gamma(a))
  Eigen::VectorXcd samples(count);
  cplx prev = 0.0;  // j^a at j = 0 is dropped: finite part
  for (long long j = 0; j < count; ++j) {
    const cplx next = std::exp(a * std::log(static_cast<double>(j + 1)));
    samples(j) = (next - prev) * scale / epsilon;
    prev = next;
  }
  return transference::TimeKernel(epsilon, 0.5 * epsilon, std::move(samples));
}

}  // namespace dilateron::multiplier
