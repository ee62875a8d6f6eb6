#include "dilateron/core/norm_ascent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "dilateron/error.hpp"
#include "dilateron/random.hpp"

namespace dilateron::ascent {

namespace {

void check_norm(const MixedNorm& n, Eigen::Index size) {
  if (!(n.p > 1.0) || !(n.r > 1.0) || !std::isfinite(n.p) || !std::isfinite(n.r))
    throw DomainError("mixed norm exponents must lie in (1, inf)");
  if (n.group_size < 1 || size % n.group_size != 0)
    throw InputError("vector length is not a multiple of the group size");
}

double conjugate(double p) { return p / (p - 1.0); }

Eigen::VectorXcd normalized(Eigen::VectorXcd x, const MixedNorm& n) {
  const double s = norm(x, n);
  if (s > 0.0) x /= s;
  return x;
}

Eigen::VectorXcd random_start(Rng& rng, int n, bool real) {
  if (real) return gaussian_vector(rng, n).cast<std::complex<double>>();
  return complex_gaussian_vector(rng, n);
}

}  // namespace

double norm(const Eigen::VectorXcd& x, const MixedNorm& n) {
  check_norm(n, x.size());
  const Eigen::Index groups = x.size() / n.group_size;
  double outer = 0.0;
  for (Eigen::Index g = 0; g < groups; ++g) {
    double inner = 0.0;
    if (n.group_size == 1) {
      outer += std::pow(std::abs(x[g]), n.p);
      continue;
    }
    for (int b = 0; b < n.group_size; ++b)
      inner += std::pow(std::abs(x[g * n.group_size + b]), n.r);
    outer += std::pow(inner, n.p / n.r);
  }
  return std::pow(outer, 1.0 / n.p);
}

MixedNorm dual(const MixedNorm& n) {
  return {conjugate(n.p), conjugate(n.r), n.group_size};
}

Eigen::VectorXcd duality_map(const Eigen::VectorXcd& y, const MixedNorm& n) {
  check_norm(n, y.size());
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(y.size());
  const Eigen::Index groups = y.size() / n.group_size;
  for (Eigen::Index g = 0; g < groups; ++g) {
    double inner = 0.0;
    for (int b = 0; b < n.group_size; ++b)
      inner += std::pow(std::abs(y[g * n.group_size + b]), n.r);
    if (inner == 0.0) continue;
    const double gn = std::pow(inner, 1.0 / n.r);
    const double scale = std::pow(gn, n.p - n.r);
    for (int b = 0; b < n.group_size; ++b) {
      const auto v = y[g * n.group_size + b];
      const double a = std::abs(v);
      if (a == 0.0) continue;
      out[g * n.group_size + b] = scale * std::pow(a, n.r - 2.0) * v;
    }
  }
  return out;
}

LinearMap dense_map(Eigen::MatrixXcd m) {
  LinearMap map;
  map.rows = static_cast<int>(m.rows());
  map.cols = static_cast<int>(m.cols());
  auto shared = std::make_shared<const Eigen::MatrixXcd>(std::move(m));
  map.apply = [shared](const Eigen::VectorXcd& x) -> Eigen::VectorXcd { return *shared * x; };
  map.adjoint = [shared](const Eigen::VectorXcd& y) -> Eigen::VectorXcd {
    return shared->adjoint() * y;
  };
  return map;
}

Eigen::MatrixXcd unit_weight_form(const Eigen::MatrixXcd& m, double p,
                                  const Eigen::VectorXd& w_in,
                                  const Eigen::VectorXd& w_out) {
  if (w_in.size() != m.cols() || w_out.size() != m.rows())
    throw InputError("weight vector length does not match the matrix shape");
  Eigen::MatrixXcd out = m;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out(i, j) *= std::pow(w_out[i], 1.0 / p) / std::pow(w_in[j], 1.0 / p);
  return out;
}

namespace {

template <class Objective, class Step>
Result run_starts(int cols, const MixedNorm& in, const Options& opts,
                  const std::vector<Eigen::VectorXcd>& extra, Objective objective,
                  Step step) {
  std::vector<Eigen::VectorXcd> starts = extra;
  Rng rng(derive_seed(opts.seed, 0x5eed));
  for (int s = 0; s < opts.starts; ++s) starts.push_back(random_start(rng, cols, opts.real_starts));

  Result best;
  best.witness = Eigen::VectorXcd::Zero(cols);
  best.value = -1.0;
  for (const auto& s0 : starts) {
    if (s0.size() != cols) throw InputError("start vector has the wrong length");
    Eigen::VectorXcd x = normalized(s0, in);
    if (norm(x, in) == 0.0) continue;
    double value = objective(x);
    bool converged = false;
    int it = 0;
    for (; it < opts.max_iterations; ++it) {
      Eigen::VectorXcd next = step(x);
      if (next.size() == 0) { converged = true; break; }
      next = normalized(std::move(next), in);
      const double next_value = objective(next);
      if (next_value < value) { converged = true; break; }  // rounding-level decrease
      const double gain = next_value - value;
      x = std::move(next);
      value = next_value;
      if (gain <= opts.tol * std::max(value, 1e-300)) { converged = true; break; }
    }
    if (value > best.value) {
      best.value = value;
      best.witness = x;
      best.iterations = it;
      best.converged = converged;
    }
  }
  if (best.value < 0.0) best.value = 0.0;
  return best;
}

}  // namespace

Result maximize_ratio(const LinearMap& a, const MixedNorm& in, const MixedNorm& out,
                      const Options& opts, const std::vector<Eigen::VectorXcd>& extra) {
  const MixedNorm in_dual = dual(in);
  auto objective = [&](const Eigen::VectorXcd& x) { return norm(a.apply(x), out); };
  auto step = [&](const Eigen::VectorXcd& x) -> Eigen::VectorXcd {
    const Eigen::VectorXcd y = a.apply(x);
    const Eigen::VectorXcd z = a.adjoint(duality_map(y, out));
    if (z.cwiseAbs().maxCoeff() == 0.0) return {};
    return duality_map(z, in_dual);
  };
  return run_starts(a.cols, in, opts, extra, objective, step);
}

Result maximize_maximal_ratio(const std::vector<LinearMap>& family, double p,
                              const Options& opts,
                              const std::vector<Eigen::VectorXcd>& extra) {
  if (family.empty()) throw InputError("empty operator family");
  const int rows = family.front().rows;
  const int cols = family.front().cols;
  for (const auto& k : family)
    if (k.rows != rows || k.cols != cols) throw InputError("operator family shapes differ");
  const MixedNorm in = MixedNorm::plain(p);
  const MixedNorm in_dual = dual(in);

  auto envelope = [&](const Eigen::VectorXcd& x, std::vector<int>* select) {
    Eigen::VectorXcd best = Eigen::VectorXcd::Zero(rows);
    Eigen::VectorXd mod = Eigen::VectorXd::Constant(rows, -1.0);
    if (select) select->assign(rows, 0);
    for (std::size_t k = 0; k < family.size(); ++k) {
      const Eigen::VectorXcd y = family[k].apply(x);
      for (int i = 0; i < rows; ++i) {
        const double a = std::abs(y[i]);
        if (a > mod[i]) {
          mod[i] = a;
          best[i] = y[i];
          if (select) (*select)[i] = static_cast<int>(k);
        }
      }
    }
    return best;
  };
  auto objective = [&](const Eigen::VectorXcd& x) { return norm(envelope(x, nullptr), in); };
  auto step = [&](const Eigen::VectorXcd& x) -> Eigen::VectorXcd {
    std::vector<int> select;
    const Eigen::VectorXcd w = envelope(x, &select);
    const Eigen::VectorXcd g = duality_map(w, in);
    Eigen::VectorXcd z = Eigen::VectorXcd::Zero(cols);
    for (std::size_t k = 0; k < family.size(); ++k) {
      Eigen::VectorXcd gk = Eigen::VectorXcd::Zero(rows);
      bool any = false;
      for (int i = 0; i < rows; ++i)
        if (select[i] == static_cast<int>(k)) { gk[i] = g[i]; any = true; }
      if (any) z += family[k].adjoint(gk);
    }
    if (z.cwiseAbs().maxCoeff() == 0.0) return {};
    return duality_map(z, in_dual);
  };
  return run_starts(cols, in, opts, extra, objective, step);
}

}  // namespace dilateron::ascent
