#include "dilateron/calculus/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

#include "dilateron/core/norm_ascent.hpp"
#include "dilateron/error.hpp"

namespace dilateron::calculus {

namespace {

constexpr double kPi = std::numbers::pi;

double scale_of(const Eigen::MatrixXd& a) { return std::max(1.0, a.cwiseAbs().maxCoeff()); }

void check_shape(const SubmarkovianGenerator& g) {
  if (g.A.rows() == 0 || g.A.rows() != g.A.cols()) throw InputError("generator must be a nonempty square matrix");
  if (g.mu.size() != g.A.rows()) throw InputError("measure length differs from generator size");
  if (!g.A.allFinite() || !g.mu.allFinite()) throw InputError("generator entries must be finite");
}

double symmetry_defect(const SubmarkovianGenerator& g) {
  double d = 0.0;
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j) d = std::max(d, std::abs(g.mu[i] * g.A(i, j) - g.mu[j] * g.A(j, i)));
  return d;
}

}  // namespace

SubmarkovianGenerator random_generator(Rng& rng, int n, double kill_lo, double kill_hi,
                                       double edge_prob) {
  if (n < 1) throw InputError("generator size must be positive");
  SubmarkovianGenerator g;
  g.mu.resize(n);
  for (int i = 0; i < n; ++i) g.mu[i] = uniform(rng, 0.5, 2.0);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (uniform(rng) < edge_prob || j == i + 1) w(i, j) = w(j, i) = uniform(rng, 0.1, 2.0);
  g.A = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      g.A(i, j) = w(i, j) / g.mu[i];
      row += g.A(i, j);
    }
    g.A(i, i) = -row - uniform(rng, kill_lo, kill_hi);
  }
  return g;
}

SubmarkovianGenerator path_generator(int n, double killing) {
  if (n < 1) throw InputError("generator size must be positive");
  SubmarkovianGenerator g;
  g.mu = Eigen::VectorXd::Ones(n);
  g.A = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    g.A(i, i + 1) = g.A(i + 1, i) = 1.0;
    g.A(i, i) -= 1.0;
    g.A(i + 1, i + 1) -= 1.0;
  }
  for (int i = 0; i < n; ++i) g.A(i, i) -= killing;
  return g;
}

bool ValidationReport::valid() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const Check* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

ValidationReport validate(const SubmarkovianGenerator& gen, const ValidateOptions& opts) {
  check_shape(gen);
  const int n = gen.n();
  const double scale = scale_of(gen.A);
  ValidationReport r;

  r.checks.push_back({"measure positive", gen.mu.minCoeff() > 0.0, gen.mu.minCoeff()});
  double offdiag = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) offdiag = std::min(offdiag, gen.A(i, j));
  r.checks.push_back({"off-diagonal nonnegative", offdiag >= -1e-14 * scale, offdiag});
  const double rows = gen.A.rowwise().sum().maxCoeff();
  r.checks.push_back({"row sums nonpositive", rows <= 1e-12 * scale, rows});
  const double sym = symmetry_defect(gen);
  r.checks.push_back({"mu-symmetric", sym <= 1e-10 * scale * gen.mu.cwiseAbs().maxCoeff(), sym});
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(gen.A);
  const double smin = svd.singularValues()(n - 1);
  r.checks.push_back({"nonsingular", opts.allow_conservative || smin > 1e-12 * scale, smin});

  double min_entry = 0.0;
  double max_norm = 0.0;
  const bool measure_ok = gen.mu.minCoeff() > 0.0;
  for (double t : opts.t_grid) {
    const Eigen::MatrixXd tt = (t * gen.A).exp();
    min_entry = std::min(min_entry, tt.minCoeff());
    if (!measure_ok) continue;
    for (double p : opts.p_grid)
      max_norm = std::max(max_norm, interpolation_upper(tt.cast<cplx>(), p, gen.mu));
  }
  r.checks.push_back({"semigroup positive", min_entry >= -1e-12, min_entry});
  r.checks.push_back({"p-contractive", measure_ok && max_norm <= 1.0 + 1e-8, max_norm});
  return r;
}

SpectralDecomposition::SpectralDecomposition(const SubmarkovianGenerator& gen, bool allow_conservative) {
  check_shape(gen);
  if (gen.mu.minCoeff() <= 0.0) throw DomainError("measure must be strictly positive");
  const double scale = scale_of(gen.A);
  if (symmetry_defect(gen) > 1e-10 * scale * gen.mu.maxCoeff())
    throw DomainError("generator is not symmetric with respect to mu");
  mu_ = gen.mu;
  const Eigen::VectorXd root = mu_.cwiseSqrt();
  Eigen::MatrixXd b = root.asDiagonal() * gen.A * root.cwiseInverse().asDiagonal();
  b = 0.5 * (b + b.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
  if (es.info() != Eigen::Success) throw ConvergenceError("symmetric eigensolver failed");
  eigenvalues_ = es.eigenvalues();
  q_ = es.eigenvectors();
  const double zero = 1e-12 * scale;
  for (Eigen::Index k = 0; k < eigenvalues_.size(); ++k) {
    if (eigenvalues_[k] > zero) throw DomainError("generator has a positive eigenvalue");
    if (eigenvalues_[k] >= -zero) {
      if (!allow_conservative) throw DomainError("generator is singular");
      eigenvalues_[k] = 0.0;
    }
  }
  eigenvectors_ = root.cwiseInverse().asDiagonal() * q_;
}

Eigen::MatrixXcd SpectralDecomposition::apply_symbol(const std::function<cplx(double)>& m) const {
  Eigen::VectorXcd vals(n());
  for (int k = 0; k < n(); ++k) {
    vals[k] = m(-eigenvalues_[k]);
    if (!std::isfinite(vals[k].real()) || !std::isfinite(vals[k].imag()))
      throw DomainError("symbol is not finite at the spectral point " + std::to_string(-eigenvalues_[k]));
  }
  const Eigen::VectorXd root = mu_.cwiseSqrt();
  const Eigen::MatrixXcd left = root.cwiseInverse().asDiagonal() * q_.cast<cplx>();
  const Eigen::MatrixXcd right = q_.transpose().cast<cplx>() * root.asDiagonal();
  return left * vals.asDiagonal() * right;
}

Eigen::MatrixXcd borel_calculus(const SpectralDecomposition& s, const Symbol& m) {
  return s.apply_symbol(m);
}

Eigen::MatrixXcd semigroup_at(const SpectralDecomposition& s, cplx z) {
  if (z.real() < 0.0) throw DomainError("semigroup is defined for Re z >= 0");
  return s.apply_symbol([z](double x) { return std::exp(-z * x); });
}

Eigen::MatrixXcd imaginary_power(const SpectralDecomposition& s, double gamma) {
  return s.apply_symbol([gamma](double x) {
    return x > 0.0 ? std::exp(cplx(0.0, gamma * std::log(x))) : cplx(std::nan(""), 0.0);
  });
}

double lp_mu_norm(const Eigen::VectorXcd& x, double p, const Eigen::VectorXd& mu) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += mu[i] * std::pow(std::abs(x[i]), p);
  return std::pow(s, 1.0 / p);
}

double norm2_mu(const Eigen::MatrixXcd& m, const Eigen::VectorXd& mu) {
  const Eigen::VectorXd root = mu.cwiseSqrt();
  const Eigen::MatrixXcd b = root.asDiagonal() * m * root.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(b);
  return svd.singularValues()(0);
}

namespace {

double norm1_mu(const Eigen::MatrixXcd& m, const Eigen::VectorXd& mu) {
  double best = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) s += mu[i] * std::abs(m(i, j));
    best = std::max(best, s / mu[j]);
  }
  return best;
}

double norm_inf(const Eigen::MatrixXcd& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

}  // namespace

double interpolation_upper(const Eigen::MatrixXcd& m, double p, const Eigen::VectorXd& mu) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("p must lie in [1, inf)");
  if (m.rows() != m.cols() || mu.size() != m.rows()) throw InputError("matrix and measure sizes differ");
  if (p == 1.0) return norm1_mu(m, mu);
  const double n2 = norm2_mu(m, mu);
  if (p == 2.0) return n2;
  if (p < 2.0) {
    const double theta = 2.0 * (1.0 - 1.0 / p);
    return std::pow(norm1_mu(m, mu), 1.0 - theta) * std::pow(n2, theta);
  }
  const double theta = 2.0 / p;
  return std::pow(norm_inf(m), 1.0 - theta) * std::pow(n2, theta);
}

NormBounds pq_norm_estimate(const Eigen::MatrixXcd& m, double p, const Eigen::VectorXd& mu,
                            std::uint64_t seed, int starts) {
  NormBounds b;
  b.upper = interpolation_upper(m, p, mu);
  if (p == 1.0) {
    b.lower = b.upper;  // attained at a point mass
    return b;
  }
  const int n = static_cast<int>(m.rows());
  const Eigen::MatrixXcd unit = ascent::unit_weight_form(m, p, mu, mu);
  std::vector<Eigen::VectorXcd> extra;
  extra.push_back(Eigen::VectorXcd::Ones(n));
  for (int j = 0; j < n; ++j) extra.push_back(Eigen::VectorXcd::Unit(n, j));
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(unit, Eigen::ComputeFullV);
  extra.push_back(svd.matrixV().col(0));
  ascent::Options opts;
  opts.starts = starts;
  opts.seed = seed;
  const auto norm = ascent::MixedNorm::plain(p);
  b.lower = ascent::maximize_ratio(ascent::dense_map(unit), norm, norm, opts, extra).value;
  return b;
}

std::vector<CowlingRow> cowling_bound_scan(const SpectralDecomposition& s,
                                           const std::vector<double>& gammas,
                                           const std::vector<double>& ps, std::uint64_t seed,
                                           int starts) {
  std::vector<CowlingRow> rows;
  std::uint64_t k = 0;
  for (double gamma : gammas) {
    const Eigen::MatrixXcd m = imaginary_power(s, gamma);
    for (double p : ps) {
      CowlingRow row;
      row.gamma = gamma;
      row.p = p;
      const NormBounds b = pq_norm_estimate(m, p, s.mu(), derive_seed(seed, k++), starts);
      row.lower = b.lower;
      row.upper = b.upper;
      row.reference = std::exp(kPi * std::abs(1.0 / p - 0.5) * std::abs(gamma));
      row.ratio = row.lower / row.reference;
      rows.push_back(row);
    }
  }
  return rows;
}

double stein_angle(double p) { return kPi / 2.0 - kPi * std::abs(1.0 / p - 0.5); }

double liskevich_perelmuter_angle(double p) {
  if (p == 1.0) return 0.0;
  return kPi / 2.0 - std::atan(std::abs(p - 2.0) / (2.0 * std::sqrt(p - 1.0)));
}

ConeScan cone_contractivity_scan(const SpectralDecomposition& s, double p,
                                 const std::vector<double>& angles,
                                 const std::vector<double>& radii, std::uint64_t seed,
                                 int starts) {
  ConeScan scan;
  scan.stein_angle = stein_angle(p);
  scan.lp_angle = liskevich_perelmuter_angle(p);
  std::vector<double> sorted = angles;
  std::sort(sorted.begin(), sorted.end());
  bool contractive_so_far = true;
  std::uint64_t k = 0;
  for (double psi : sorted) {
    if (psi < 0.0 || psi > kPi / 2.0) throw DomainError("cone angles must lie in [0, pi/2]");
    bool all = true;
    for (double r : radii) {
      const NormBounds b = pq_norm_estimate(semigroup_at(s, std::polar(r, psi)), p, s.mu(),
                                            derive_seed(seed, k++), starts);
      scan.rows.push_back({psi, r, b.lower, b.upper});
      all = all && b.lower <= 1.0 + 1e-8;
    }
    if (contractive_so_far && all) scan.empirical_angle = psi;
    contractive_so_far = contractive_so_far && all;
  }
  return scan;
}

cplx ergodic_symbol(double t, double x) {
  const double a = t * x;
  if (a == 0.0) return 1.0;
  return -std::expm1(-a) / a;
}

MaximalResult ergodic_maximal(const SpectralDecomposition& s, const Eigen::VectorXcd& f, double p,
                              const std::vector<double>& t_grid) {
  if (f.size() != s.n()) throw InputError("function length differs from generator size");
  MaximalResult r;
  r.max_function = Eigen::VectorXd::Zero(s.n());
  for (double t : t_grid) {
    if (!(t > 0.0)) throw DomainError("averaging times must be positive");
    const Eigen::VectorXcd avg = s.apply_symbol([t](double x) { return ergodic_symbol(t, x); }) * f;
    r.max_function = r.max_function.cwiseMax(avg.cwiseAbs());
  }
  const double nf = lp_mu_norm(f, p, s.mu());
  r.ratio = nf > 0.0 ? lp_mu_norm(r.max_function.cast<cplx>(), p, s.mu()) / nf : 0.0;
  return r;
}

double cone_maximal_limit(double p) { return kPi / 2.0 * (1.0 - std::abs(2.0 / p - 1.0)); }

MaximalResult cone_maximal(const SpectralDecomposition& s, const Eigen::VectorXcd& f, double theta,
                           double p, int radial_samples, int angular_samples) {
  if (f.size() != s.n()) throw InputError("function length differs from generator size");
  if (theta < 0.0 || (theta > 0.0 && theta >= cone_maximal_limit(p)))
    throw DomainError("cone angle outside [0, (pi/2)(1 - |2/p - 1|))");
  if (radial_samples < 1 || angular_samples < 1) throw InputError("sample counts must be positive");
  MaximalResult r;
  r.max_function = Eigen::VectorXd::Zero(s.n());
  const int angular = theta == 0.0 ? 1 : angular_samples;
  for (int a = 0; a < angular; ++a) {
    const double psi = angular == 1 ? 0.0 : -theta + 2.0 * theta * a / (angular - 1);
    for (int k = 0; k <= radial_samples; ++k) {  // k = 0 is the limit z -> 0
      const double radius = double(k) / (radial_samples + 1);
      const Eigen::VectorXcd tz = semigroup_at(s, std::polar(radius, psi)) * f;
      r.max_function = r.max_function.cwiseMax(tz.cwiseAbs());
    }
  }
  const double nf = lp_mu_norm(f, p, s.mu());
  r.ratio = nf > 0.0 ? lp_mu_norm(r.max_function.cast<cplx>(), p, s.mu()) / nf : 0.0;
  return r;
}

VonNeumannResult von_neumann_check(const Eigen::MatrixXcd& t, const Eigen::VectorXcd& coeffs, int grid) {
  if (t.rows() != t.cols()) throw InputError("matrix must be square");
  if (coeffs.size() == 0) throw InputError("polynomial needs at least one coefficient");
  if (grid < 8) throw InputError("circle grid too coarse");
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(t);
  if (svd.singularValues()(0) > 1.0 + 1e-12) throw DomainError("matrix is not a contraction");

  const Eigen::Index d = coeffs.size() - 1;
  Eigen::MatrixXcd acc = coeffs[d] * Eigen::MatrixXcd::Identity(t.rows(), t.cols());
  for (Eigen::Index k = d - 1; k >= 0; --k)
    acc = (t * acc + coeffs[k] * Eigen::MatrixXcd::Identity(t.rows(), t.cols())).eval();
  VonNeumannResult r;
  r.lhs = Eigen::JacobiSVD<Eigen::MatrixXcd>(acc).singularValues()(0);

  auto poly = [&](double angle) {
    const cplx z = std::polar(1.0, angle);
    cplx v = coeffs[d];
    for (Eigen::Index k = d - 1; k >= 0; --k) v = v * z + coeffs[k];
    return std::abs(v);
  };
  const double h = 2.0 * kPi / grid;
  std::vector<std::pair<double, int>> samples;
  for (int k = 0; k < grid; ++k) samples.emplace_back(poly(k * h), k);
  std::sort(samples.begin(), samples.end(), std::greater<>());
  r.rhs_grid = samples.front().first;
  r.rhs = r.rhs_grid;
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  for (std::size_t s = 0; s < std::min<std::size_t>(8, samples.size()); ++s) {
    double lo = (samples[s].second - 1) * h, hi = (samples[s].second + 1) * h;
    for (int it = 0; it < 80; ++it) {
      const double a = hi - golden * (hi - lo), b = lo + golden * (hi - lo);
      if (poly(a) > poly(b)) hi = b; else lo = a;
    }
    r.rhs = std::max(r.rhs, poly(0.5 * (lo + hi)));
  }
  const double slack = 1.0 - double(d) * kPi / grid;
  r.rhs_certified = slack > 0.0 ? r.rhs_grid / slack : std::numeric_limits<double>::infinity();
  r.ok = r.lhs <= r.rhs + 1e-9;
  return r;
}

Eigen::MatrixXcd random_contraction(Rng& rng, int n) {
  Eigen::MatrixXcd m(n, n);
  for (int c = 0; c < n; ++c) m.col(c) = complex_gaussian_vector(rng, n);
  const double s = Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues()(0);
  return m * (uniform(rng, 0.3, 1.0) / s);
}

}  // namespace dilateron::calculus
