#include "dilateron/transference/khinchin.hpp"

#include <algorithm>
#include <cmath>

#include "dilateron/core/norm_ascent.hpp"
#include "dilateron/error.hpp"
#include "dilateron/random.hpp"

namespace dilateron::transference {

namespace {

using cplx = std::complex<double>;

void check_depth(int n) {
  if (n < 1 || n > 20) throw InputError("Rademacher depth must lie in [1, 20]");
}

void check_ops(const std::vector<Eigen::MatrixXcd>& ops, const Eigen::VectorXd& mu) {
  if (ops.empty()) throw InputError("operator family is empty");
  const auto d = mu.size();
  for (const auto& k : ops) {
    if (k.rows() != d || k.cols() != d) throw InputError("operators must act on L^p(mu)");
  }
  if ((mu.array() <= 0.0).any()) throw InputError("measure must be strictly positive");
}

std::vector<Eigen::MatrixXcd> unit_forms(const std::vector<Eigen::MatrixXcd>& ops, double p,
                                         const Eigen::VectorXd& mu) {
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(ops.size());
  for (const auto& k : ops) out.push_back(ascent::unit_weight_form(k, p, mu, mu));
  return out;
}

// |sum_l a_l r_l|_{L^p[0,1]} using the atom table.
double rademacher_sum_norm(const Eigen::MatrixXd& table, const Eigen::VectorXcd& a, double p) {
  const Eigen::VectorXcd s = table.cast<cplx>() * a;
  const double atoms = static_cast<double>(table.rows());
  return std::pow(s.cwiseAbs().array().pow(p).sum() / atoms, 1.0 / p);
}

ascent::Options ascent_options(std::uint64_t seed, int starts) {
  ascent::Options o;
  o.seed = seed;
  o.starts = starts;
  o.max_iterations = 1000;
  return o;
}

}  // namespace

int rademacher(int l, double t) {
  if (l < 1) throw InputError("Rademacher index starts at 1");
  if (t < 0.0 || t > 1.0) throw InputError("Rademacher argument must lie in [0, 1]");
  while (l > 1) {
    t = t <= 0.5 ? 2.0 * t : 2.0 * t - 1.0;
    --l;
  }
  return t <= 0.5 ? 1 : -1;
}

Eigen::MatrixXd rademacher_table(int n) {
  check_depth(n);
  const int atoms = 1 << n;
  Eigen::MatrixXd r(atoms, n);
  for (int i = 1; i <= atoms; ++i) {
    const double t = static_cast<double>(i) / atoms;  // exact dyadic
    for (int l = 1; l <= n; ++l) r(i - 1, l - 1) = rademacher(l, t);
  }
  return r;
}

KhinchinEstimate khinchin_empirical(double p, int n, std::uint64_t seed, int trials) {
  if (!(p >= 1.0)) throw InputError("p must be at least 1");
  const Eigen::MatrixXd table = rademacher_table(n);
  KhinchinEstimate est;
  est.c_est = std::numeric_limits<double>::infinity();
  est.C_est = 0.0;
  auto consider = [&](const Eigen::VectorXcd& a) {
    const double den = rademacher_sum_norm(table, a, p);
    if (den == 0.0) return;
    const double ratio = a.norm() / den;
    est.c_est = std::min(est.c_est, ratio);
    est.C_est = std::max(est.C_est, ratio);
  };
  for (int k = 1; k <= n; ++k) {
    Eigen::VectorXcd a = Eigen::VectorXcd::Zero(n);
    a.head(k).setOnes();
    consider(a);
  }
  if (n >= 2) {
    Eigen::VectorXcd a = Eigen::VectorXcd::Zero(n);
    a(0) = 1.0;
    a(1) = cplx(0.0, 1.0);
    consider(a);
  }
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    if (t % 2 == 0) {
      consider(gaussian_vector(rng, n).cast<cplx>());
    } else {
      consider(complex_gaussian_vector(rng, n));
    }
  }
  if (p == 2.0) {
    est.c_est = 1.0;  // orthonormality; the sampled ratios agree up to rounding
    est.C_est = 1.0;
  }
  return est;
}

KhinchinConstants KhinchinConstants::for_p(double p) {
  if (p == 2.0) return {1.0, 1.0};
  const KhinchinEstimate e = khinchin_empirical(p, 10, 0x6b68696eULL, 200);
  return {e.c_est, e.C_est};
}

double row_matrix_norm(const std::vector<Eigen::MatrixXcd>& ops, double p, const Eigen::VectorXd& mu,
                       std::uint64_t seed, int starts) {
  check_ops(ops, mu);
  const int m = static_cast<int>(ops.size());
  const int n = m;
  check_depth(n);
  const int d = static_cast<int>(mu.size());
  const std::vector<Eigen::MatrixXcd> unit = unit_forms(ops, p, mu);
  const Eigen::MatrixXd table = rademacher_table(n);
  const int atoms = 1 << n;
  const double scale = std::pow(static_cast<double>(atoms), -1.0 / p);
  Eigen::MatrixXcd stacked = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(atoms) * d, d);
  for (int i = 0; i < atoms; ++i) {
    for (int l = 0; l < m; ++l) stacked.block(i * d, 0, d, d) += (scale * table(i, l)) * unit[l];
  }
  if (p == 1.0) return stacked.cwiseAbs().colwise().sum().maxCoeff();
  if (p == 2.0) return Eigen::JacobiSVD<Eigen::MatrixXcd>(stacked).singularValues()(0);
  std::vector<Eigen::VectorXcd> extra{Eigen::VectorXcd::Ones(d)};
  for (int j = 0; j < d; ++j) extra.push_back(Eigen::VectorXcd::Unit(d, j));
  const auto norm = ascent::MixedNorm::plain(p);
  return ascent::maximize_ratio(ascent::dense_map(stacked), norm, norm, ascent_options(seed, starts), extra)
      .value;
}

double square_norm(const std::vector<Eigen::MatrixXcd>& ops, double p, const Eigen::VectorXd& mu,
                   std::uint64_t seed, int starts) {
  check_ops(ops, mu);
  const int m = static_cast<int>(ops.size());
  const int d = static_cast<int>(mu.size());
  const std::vector<Eigen::MatrixXcd> unit = unit_forms(ops, p, mu);
  // Row w*m + l of the stacked matrix is row w of the l-th operator.
  Eigen::MatrixXcd stacked(static_cast<Eigen::Index>(d) * m, d);
  for (int w = 0; w < d; ++w) {
    for (int l = 0; l < m; ++l) stacked.row(w * m + l) = unit[l].row(w);
  }
  if (p == 2.0) return Eigen::JacobiSVD<Eigen::MatrixXcd>(stacked).singularValues()(0);
  std::vector<Eigen::VectorXcd> extra{Eigen::VectorXcd::Ones(d)};
  for (int j = 0; j < d; ++j) extra.push_back(Eigen::VectorXcd::Unit(d, j));
  if (p == 1.0) {
    // The ascent needs p > 1; at p = 1 the value is attained at a point mass.
    double best = 0.0;
    for (int j = 0; j < d; ++j) {
      best = std::max(best, ascent::norm(stacked.col(j), ascent::MixedNorm{1.0, 2.0, m}));
    }
    return best;
  }
  return ascent::maximize_ratio(ascent::dense_map(stacked), ascent::MixedNorm::plain(p),
                                ascent::MixedNorm{p, 2.0, m}, ascent_options(seed, starts), extra)
      .value;
}

Eigen::MatrixXcd symmetric_block_matrix(const std::vector<Eigen::MatrixXcd>& ops) {
  if (ops.empty()) throw InputError("operator family is empty");
  const int m = static_cast<int>(ops.size());
  const int n = m;
  check_depth(n);
  const int d = static_cast<int>(ops[0].rows());
  const Eigen::MatrixXd table = rademacher_table(n);
  const int atoms = 1 << n;
  Eigen::MatrixXcd big = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(atoms) * d,
                                                static_cast<Eigen::Index>(atoms) * d);
  for (int a = 0; a < atoms; ++a) {
    for (int b = 0; b < atoms; ++b) {
      Eigen::MatrixXcd blk = Eigen::MatrixXcd::Zero(d, d);
      for (int l = 0; l < m; ++l) blk += (table(a, l) * table(b, l)) * ops[l];
      big.block(a * d, b * d, d, d) = blk / static_cast<double>(atoms);
    }
  }
  return big;
}

SymmetricSandwich symmetric_matrix_norm_check(const std::vector<Eigen::MatrixXcd>& ops, double p,
                                              const Eigen::VectorXd& mu, std::uint64_t seed,
                                              int starts, double tol) {
  check_ops(ops, mu);
  if (!(p > 1.0)) throw InputError("p must exceed 1");
  const int m = static_cast<int>(ops.size());
  const int d = static_cast<int>(mu.size());
  const std::vector<Eigen::MatrixXcd> unit = unit_forms(ops, p, mu);
  SymmetricSandwich out;
  const Eigen::MatrixXcd big = symmetric_block_matrix(unit);
  const int atoms = 1 << m;
  // Diagonal action: input and output vectors are laid out as w*m + l.
  ascent::LinearMap diag;
  diag.rows = d * m;
  diag.cols = d * m;
  auto act = [unit, d, m](const Eigen::VectorXcd& x, bool adjoint) {
    Eigen::VectorXcd y(d * m);
    for (int l = 0; l < m; ++l) {
      Eigen::VectorXcd xl(d);
      for (int w = 0; w < d; ++w) xl(w) = x(w * m + l);
      const Eigen::VectorXcd yl = adjoint ? Eigen::VectorXcd(unit[l].adjoint() * xl)
                                          : Eigen::VectorXcd(unit[l] * xl);
      for (int w = 0; w < d; ++w) y(w * m + l) = yl(w);
    }
    return y;
  };
  diag.apply = [act](const Eigen::VectorXcd& x) { return act(x, false); };
  diag.adjoint = [act](const Eigen::VectorXcd& y) { return act(y, true); };

  if (p == 2.0) {
    out.norm_mk = Eigen::JacobiSVD<Eigen::MatrixXcd>(big).singularValues()(0);
    double best = 0.0;
    for (const auto& u : unit) best = std::max(best, Eigen::JacobiSVD<Eigen::MatrixXcd>(u).singularValues()(0));
    out.norm_bracket = best;
  } else {
    const auto plain = ascent::MixedNorm::plain(p);
    std::vector<Eigen::VectorXcd> extra{Eigen::VectorXcd::Ones(static_cast<Eigen::Index>(atoms) * d)};
    out.norm_mk = ascent::maximize_ratio(ascent::dense_map(big), plain, plain,
                                         ascent_options(derive_seed(seed, 1), starts), extra)
                      .value;
    const ascent::MixedNorm mixed{p, 2.0, m};
    std::vector<Eigen::VectorXcd> extra2{Eigen::VectorXcd::Ones(d * m)};
    out.norm_bracket =
        ascent::maximize_ratio(diag, mixed, mixed, ascent_options(derive_seed(seed, 2), starts), extra2)
            .value;
  }
  const KhinchinConstants kp = KhinchinConstants::for_p(p);
  const KhinchinConstants kq = KhinchinConstants::for_p(p / (p - 1.0));
  out.D_p = kp.C / kp.c;
  out.d_p = (kp.c / kp.C) * std::min(kp.c, kq.c);
  out.sandwich_ok = out.d_p * out.norm_mk <= out.norm_bracket + tol &&
                    out.norm_bracket <= out.D_p * out.norm_mk + tol;
  return out;
}

Eigen::MatrixXcd rademacher_projection(const Eigen::MatrixXcd& f, int n) {
  check_depth(n);
  const int atoms = 1 << n;
  if (f.rows() != atoms) throw InputError("function must have one row per dyadic atom");
  const Eigen::MatrixXcd r = rademacher_table(n).cast<cplx>();
  // Coefficients int F r_l are exact atom averages.
  const Eigen::MatrixXcd coeff = r.transpose() * f / static_cast<double>(atoms);
  return r * coeff;
}

ProjectionCheck rademacher_projection_check(double p, int n, int trials, std::uint64_t seed, int dim,
                                            double tol) {
  if (!(p > 1.0)) throw InputError("p must exceed 1");
  check_depth(n);
  const int atoms = 1 << n;
  auto lp = [p, atoms](const Eigen::MatrixXcd& f) {
    return std::pow(f.cwiseAbs().array().pow(p).sum() / atoms, 1.0 / p);
  };
  ProjectionCheck out;
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    Eigen::MatrixXcd f(atoms, dim);
    for (int c = 0; c < dim; ++c) f.col(c) = complex_gaussian_vector(rng, atoms);
    if (t % 3 == 1) {
      // Mostly Rademacher content plus noise.
      const Eigen::MatrixXcd r = rademacher_table(n).cast<cplx>();
      Eigen::MatrixXcd coeff(n, dim);
      for (int c = 0; c < dim; ++c) coeff.col(c) = complex_gaussian_vector(rng, n);
      f = r * coeff + 0.1 * f;
    }
    const double den = lp(f);
    if (den == 0.0) continue;
    out.max_ratio = std::max(out.max_ratio, lp(rademacher_projection(f, n)) / den);
  }
  const KhinchinConstants kp = KhinchinConstants::for_p(p);
  const KhinchinConstants kq = KhinchinConstants::for_p(p / (p - 1.0));
  out.bound = std::max(1.0 / kp.c, 1.0 / kq.c);
  out.ok = out.max_ratio <= out.bound + tol;
  return out;
}

}  // namespace dilateron::transference
