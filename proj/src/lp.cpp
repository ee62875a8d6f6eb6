#include "dilateron/core/lp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <vector>

#include "dilateron/core/norm_ascent.hpp"
#include "dilateron/error.hpp"
#include "dilateron/random.hpp"

namespace dilateron::lp {

WeightedLpSpace::WeightedLpSpace(double p, Eigen::VectorXd weights)
    : p_(p), weights_(std::move(weights)) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("p must lie in [1, inf)");
  if (weights_.size() == 0) throw InputError("space dimension must be positive");
  for (Eigen::Index i = 0; i < weights_.size(); ++i)
    if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i]))
      throw DomainError("weights must be strictly positive and finite");
}

WeightedLpSpace WeightedLpSpace::unit(int n, double p) {
  return WeightedLpSpace(p, Eigen::VectorXd::Ones(n));
}

double WeightedLpSpace::q() const {
  return p_ == 1.0 ? std::numeric_limits<double>::infinity() : p_ / (p_ - 1.0);
}

bool WeightedLpSpace::has_unit_weights() const {
  return (weights_.array() == 1.0).all();
}

double WeightedLpSpace::norm(const Eigen::VectorXd& v) const {
  if (v.size() != weights_.size()) throw InputError("vector length differs from space dimension");
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += std::pow(std::abs(v[i]), p_) * weights_[i];
  return std::pow(s, 1.0 / p_);
}

double WeightedLpSpace::norm(const Eigen::VectorXcd& v) const {
  return norm(Eigen::VectorXd(v.cwiseAbs()));
}

Eigen::VectorXd WeightedLpSpace::to_unit(const Eigen::VectorXd& v) const {
  return v.cwiseProduct(weights_.array().pow(1.0 / p_).matrix());
}

Eigen::VectorXd WeightedLpSpace::from_unit(const Eigen::VectorXd& v) const {
  return v.cwiseQuotient(weights_.array().pow(1.0 / p_).matrix());
}

bool WeightedLpSpace::operator==(const WeightedLpSpace& other) const {
  return p_ == other.p_ && weights_.size() == other.weights_.size() &&
         weights_ == other.weights_;
}

LatticeVector::LatticeVector(WeightedLpSpace space, Eigen::VectorXd entries)
    : space_(std::move(space)), entries_(std::move(entries)) {
  if (entries_.size() != space_.dim()) throw InputError("vector length differs from space dimension");
}

double lp_norm(const LatticeVector& v) { return v.space().norm(v.entries()); }

LatticeParts lattice_ops(const LatticeVector& f, const LatticeVector& g) {
  if (!(f.space() == g.space())) throw InputError("lattice operands live in different spaces");
  const auto& a = f.entries();
  const auto& b = g.entries();
  const auto& s = f.space();
  return {LatticeVector(s, a.cwiseMax(b)), LatticeVector(s, a.cwiseMin(b)),
          LatticeVector(s, a.cwiseAbs()), LatticeVector(s, a.cwiseMax(0.0)),
          LatticeVector(s, (-a).cwiseMax(0.0))};
}

Eigen::VectorXd star_map(const Eigen::VectorXd& alpha, double p) {
  if ((alpha.array() < 0.0).any()) throw DomainError("star map needs a nonnegative vector");
  if (p == 1.0) return (alpha.array() != 0.0).cast<double>().matrix();
  return alpha.array().pow(p - 1.0).matrix();
}

LatticeVector star_map(const LatticeVector& alpha) {
  return LatticeVector(alpha.space(), star_map(alpha.entries(), alpha.space().p()));
}

PositiveOperator::PositiveOperator(WeightedLpSpace space, Eigen::MatrixXd entries)
    : space_(std::move(space)), entries_(std::move(entries)) {
  if (entries_.rows() != space_.dim() || entries_.cols() != space_.dim())
    throw InputError("operator shape differs from space dimension");
  if (!entries_.allFinite()) throw InputError("operator entries must be finite");
  if ((entries_.array() < 0.0).any()) throw DomainError("positive operator has a negative entry");
}

Eigen::MatrixXd PositiveOperator::unit_weight_entries() const {
  const Eigen::VectorXd s = space_.weights().array().pow(1.0 / space_.p());
  return s.asDiagonal() * entries_ * s.cwiseInverse().asDiagonal();
}

LatticeVector PositiveOperator::apply(const LatticeVector& f) const {
  if (!(f.space() == space_)) throw InputError("vector lives in a different space");
  return LatticeVector(space_, entries_ * f.entries());
}

SignedOperator::SignedOperator(WeightedLpSpace space, Eigen::MatrixXcd entries)
    : space_(std::move(space)), entries_(std::move(entries)) {
  if (entries_.rows() != space_.dim() || entries_.cols() != space_.dim())
    throw InputError("operator shape differs from space dimension");
  if (!entries_.allFinite()) throw InputError("operator entries must be finite");
}

PositiveOperator SignedOperator::modulus() const {
  return PositiveOperator(space_, entries_.cwiseAbs());
}

Eigen::VectorXd M_map(const Eigen::MatrixXd& t, const Eigen::VectorXd& alpha, double p) {
  if (alpha.size() != t.cols()) throw InputError("vector length differs from operator shape");
  return t.transpose() * star_map(Eigen::VectorXd(t * star_map(alpha, 2.0)), p);
}

LatticeVector M_map(const PositiveOperator& t, const LatticeVector& alpha) {
  if (!t.space().has_unit_weights())
    throw InputError("M_map expects unit weights; reduce with unit_weight_entries first");
  if (!(alpha.space() == t.space())) throw InputError("vector lives in a different space");
  return LatticeVector(alpha.space(), M_map(t.entries(), alpha.entries(), t.space().p()));
}

namespace {

double p_norm(const Eigen::VectorXd& v, double p) {
  return std::pow(v.cwiseAbs().array().pow(p).sum(), 1.0 / p);
}

NormCertificate power_run(const Eigen::MatrixXd& t, double p, Eigen::VectorXd alpha,
                          const PowerOptions& opts) {
  NormCertificate c;
  alpha /= p_norm(alpha, p);
  double previous = -1.0;
  for (int it = 0;; ++it) {
    const Eigen::VectorXd y = t * alpha;
    const double lambda = p_norm(y, p);
    const Eigen::VectorXd z = t.transpose() * y.array().pow(p - 1.0).matrix();
    const double residual =
        (z - std::pow(lambda, p) * alpha.array().pow(p - 1.0).matrix()).cwiseAbs().maxCoeff();
    c.value = lambda;
    c.witness = alpha;
    c.residual = residual;
    c.iterations = it;
    const double scale = std::max(1.0, std::pow(lambda, p));
    if (lambda == 0.0 ||
        (std::abs(lambda - previous) < opts.tol && residual < opts.tol * scale)) {
      c.converged = true;
      return c;
    }
    if (it >= opts.max_iterations) {
      c.converged = false;
      return c;
    }
    previous = lambda;
    alpha = z.array().pow(1.0 / (p - 1.0)).matrix();
    alpha /= p_norm(alpha, p);
  }
}

bool better(const NormCertificate& a, const NormCertificate& b) {
  if (a.value > b.value + 1e-14 * std::max(1.0, b.value)) return true;
  if (a.value < b.value - 1e-14 * std::max(1.0, b.value)) return false;
  return a.residual < b.residual;
}

}  // namespace

NormCertificate positive_norm(const Eigen::MatrixXd& t, double p, const PowerOptions& opts) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("p must lie in [1, inf)");
  if ((t.array() < 0.0).any()) throw DomainError("positive operator has a negative entry");
  const Eigen::Index cols = t.cols();
  if (p == 1.0) {
    NormCertificate c;
    Eigen::Index j = 0;
    c.value = t.colwise().sum().maxCoeff(&j);
    c.witness = Eigen::VectorXd::Unit(cols, j);
    return c;
  }
  std::vector<Eigen::VectorXd> starts;
  starts.push_back(Eigen::VectorXd::Ones(cols));
  for (Eigen::Index j = 0; j < cols; ++j) starts.push_back(Eigen::VectorXd::Unit(cols, j));
  Rng rng(derive_seed(opts.seed, 0x90e7));
  for (int s = 0; s < opts.random_starts; ++s) {
    Eigen::VectorXd v(cols);
    for (Eigen::Index j = 0; j < cols; ++j) v[j] = uniform(rng, 0.05, 1.0);
    starts.push_back(v);
  }
  NormCertificate best;
  bool have = false;
  for (const auto& s : starts) {
    NormCertificate c = power_run(t, p, s, opts);
    if (!have || better(c, best)) {
      best = std::move(c);
      have = true;
    }
  }
  return best;
}

NormCertificate positive_norm(const PositiveOperator& t, const PowerOptions& opts) {
  NormCertificate c = positive_norm(t.unit_weight_entries(), t.space().p(), opts);
  c.witness = t.space().from_unit(c.witness);
  return c;
}

ExtremalVector extremal_vector(const PositiveOperator& t, double tol, const PowerOptions& opts) {
  const double p = t.space().p();
  const Eigen::MatrixXd tu = t.unit_weight_entries();
  const int n = t.dim();
  const NormCertificate whole = positive_norm(tu, p, opts);
  if (whole.value > 1.0 + tol)
    throw ContractionError("operator norm " + std::to_string(whole.value) + " exceeds 1");

  ExtremalVector out;
  out.operator_norm = whole.value;
  auto finish = [&](Eigen::VectorXd u) {
    const Eigen::VectorXd gap = M_map(tu, u, p) - star_map(u, p);
    out.defect = gap.maxCoeff();
    out.u = std::move(u);
    return out;
  };

  if (p == 1.0) {
    out.route = ExtremalRoute::kConstant;
    return finish(Eigen::VectorXd::Ones(n));
  }
  if ((tu.array() > 0.0).all() && std::abs(whole.value - 1.0) <= tol &&
      (whole.witness.array() > 0.0).all()) {
    out.route = ExtremalRoute::kFixedPoint;
    out.support_steps = 1;
    return finish(whole.witness);
  }

  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  while (true) {
    std::vector<int> zeros;
    for (int i = 0; i < n; ++i)
      if (u[i] == 0.0) zeros.push_back(i);
    if (zeros.empty()) break;
    const int m = static_cast<int>(zeros.size());
    Eigen::MatrixXd sub(n, m);
    for (int c = 0; c < m; ++c) sub.col(c) = tu.col(zeros[c]);
    Eigen::VectorXd beta = Eigen::VectorXd::Ones(m);
    if (sub.maxCoeff() > 0.0) {
      const NormCertificate c = positive_norm(sub, p, opts);
      beta = c.witness;
      const double cut = 1e-9 * beta.maxCoeff();
      for (int k = 0; k < m; ++k)
        if (beta[k] < cut) beta[k] = 0.0;
    }
    for (int c = 0; c < m; ++c) u[zeros[c]] += beta[c];
    ++out.support_steps;
  }
  return finish(u);
}

ComplexificationEstimate complexification_check(const Eigen::MatrixXd& t,
                                                const WeightedLpSpace& space,
                                                std::uint64_t seed, int starts) {
  const double p = space.p();
  if (t.rows() != space.dim() || t.cols() != space.dim())
    throw InputError("operator shape differs from space dimension");
  const Eigen::MatrixXcd unit = ascent::unit_weight_form(t.cast<std::complex<double>>(), p,
                                                        space.weights(), space.weights());
  if (p == 1.0) {
    const double v = unit.cwiseAbs().colwise().sum().maxCoeff();
    return {v, v};
  }
  const int n = space.dim();
  std::vector<Eigen::VectorXcd> extra;
  extra.push_back(Eigen::VectorXcd::Ones(n));
  for (int j = 0; j < n; ++j) extra.push_back(Eigen::VectorXcd::Unit(n, j));
  const auto map = ascent::dense_map(unit);
  const auto norm = ascent::MixedNorm::plain(p);
  ascent::Options real_opts;
  real_opts.starts = starts;
  real_opts.seed = seed;
  real_opts.real_starts = true;
  ascent::Options complex_opts = real_opts;
  complex_opts.seed = derive_seed(seed, 1);
  complex_opts.real_starts = false;
  return {ascent::maximize_ratio(map, norm, norm, real_opts, extra).value,
          ascent::maximize_ratio(map, norm, norm, complex_opts, extra).value};
}

Eigen::MatrixXd random_substochastic(Rng& rng, int n, double zero_prob) {
  if (n < 1) throw InputError("dimension must be positive");
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = uniform(rng) < zero_prob ? 0.0 : uniform(rng);
  const double s = std::max(m.colwise().sum().maxCoeff(), m.rowwise().sum().maxCoeff());
  if (s > 0.0) m /= s;
  return m;
}

Eigen::MatrixXcd random_complex_substochastic(Rng& rng, int n, double zero_prob) {
  const Eigen::MatrixXd mod = random_substochastic(rng, n, zero_prob);
  Eigen::MatrixXcd t(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) t(i, j) = std::polar(mod(i, j), uniform(rng, -std::numbers::pi, std::numbers::pi));
  return t;
}

}  // namespace dilateron::lp
