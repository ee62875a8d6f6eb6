#include "dilateron/transference/transfer.hpp"

#include <algorithm>
#include <cmath>

#include "dilateron/core/norm_ascent.hpp"
#include "dilateron/error.hpp"
#include "dilateron/random.hpp"
#include "dilateron/transference/khinchin.hpp"

namespace dilateron::transference {

namespace {

void require_causal(const TimeKernel& k) {
  if (!k.causal()) throw DomainError("kernel must be supported in [0, inf)");
}

void require_family(const std::vector<TimeKernel>& family) {
  if (family.empty()) throw InputError("kernel family is empty");
  for (const auto& k : family) {
    require_causal(k);
    if (std::abs(k.h() - family[0].h()) > 1e-15 * family[0].h()) {
      throw InputError("kernel family must share one grid step");
    }
  }
}

// Kernels of a family placed on one grid: index shift from the common origin.
struct Aligned {
  std::vector<TimeKernel> kernels;
};

Aligned align(const std::vector<TimeKernel>& family) {
  double origin = family[0].t0();
  for (const auto& k : family) origin = std::min(origin, k.t0());
  const double h = family[0].h();
  Aligned a;
  for (const auto& k : family) {
    const double shift = (k.t0() - origin) / h;
    const long long s = std::llround(shift);
    if (std::abs(shift - static_cast<double>(s)) > 1e-9) {
      throw InputError("kernel family origins must differ by whole steps");
    }
    Eigen::VectorXcd samples = Eigen::VectorXcd::Zero(k.size() + s);
    samples.tail(k.size()) = k.samples();
    a.kernels.emplace_back(h, origin, std::move(samples));
  }
  return a;
}

ascent::Options options(std::uint64_t seed, int starts) {
  ascent::Options o;
  o.seed = seed;
  o.starts = starts;
  o.max_iterations = 500;
  o.tol = 1e-12;
  return o;
}

}  // namespace

Eigen::MatrixXcd transfer_operator(const TimeKernel& k, const calculus::SpectralDecomposition& s) {
  require_causal(k);
  return s.apply_symbol([&k](double x) { return k.laplace(x); });
}

TransferenceCheck transference_check(const TimeKernel& k, const calculus::SpectralDecomposition& s,
                                     double p, std::uint64_t seed, int starts) {
  require_causal(k);
  TransferenceCheck out;
  const Eigen::MatrixXcd t = transfer_operator(k, s);
  const calculus::NormBounds b = calculus::pq_norm_estimate(t, p, s.mu(), seed, starts);
  out.transferred_lower = b.lower;
  out.transferred_upper = b.upper;
  out.convolver_upper = convolver_upper(k, p);
  for (int i = 0; i < s.n(); ++i) {
    out.half_plane_lhs = std::max(out.half_plane_lhs, std::abs(k.laplace(-s.eigenvalues()(i))));
  }
  out.half_plane_rhs = fourier_sup(k).certified;
  out.ok = out.transferred_lower <= out.convolver_upper + 1e-8 &&
           out.half_plane_lhs <= out.half_plane_rhs + 1e-12;
  return out;
}

SquareTransferCheck square_transfer_check(const std::vector<TimeKernel>& family,
                                          const calculus::SpectralDecomposition& s, double p,
                                          const std::vector<Eigen::VectorXcd>& samples,
                                          std::uint64_t seed, int window, double tol) {
  require_family(family);
  if (!(p > 1.0)) throw InputError("p must exceed 1");
  const int m = static_cast<int>(family.size());
  const int d = s.n();
  const Eigen::VectorXd& mu = s.mu();
  SquareTransferCheck out;

  std::vector<Eigen::MatrixXcd> ops;
  for (const auto& k : family) ops.push_back(transfer_operator(k, s));
  for (const auto& f : samples) {
    if (f.size() != d) throw InputError("sample has the wrong dimension");
    const double den = calculus::lp_mu_norm(f, p, mu);
    if (den == 0.0) continue;
    Eigen::VectorXd sq = Eigen::VectorXd::Zero(d);
    for (const auto& op : ops) sq += (op * f).cwiseAbs2();
    const Eigen::VectorXcd root = sq.cwiseSqrt().cast<cplx>();
    out.lhs = std::max(out.lhs, calculus::lp_mu_norm(root, p, mu) / den);
  }

  // Triangle inequality in L^{p/2} for p >= 2, and l^2 <= l^p pointwise below.
  double acc = 0.0;
  for (const auto& k : family) {
    const double u = convolver_upper(k, p);
    acc += p >= 2.0 ? u * u : std::pow(u, p);
  }
  out.m_upper = p >= 2.0 ? std::sqrt(acc) : std::pow(acc, 1.0 / p);

  const Aligned al = align(family);
  std::vector<std::shared_ptr<ToeplitzOperator>> grid;
  for (const auto& k : al.kernels) grid.push_back(std::make_shared<ToeplitzOperator>(k, window));
  ascent::LinearMap stacked;
  stacked.rows = window * m;
  stacked.cols = window;
  stacked.apply = [grid, m, window](const Eigen::VectorXcd& x) {
    Eigen::VectorXcd y(window * m);
    for (int l = 0; l < m; ++l) {
      const Eigen::VectorXcd yl = grid[l]->apply(x);
      for (int w = 0; w < window; ++w) y(w * m + l) = yl(w);
    }
    return y;
  };
  stacked.adjoint = [grid, m, window](const Eigen::VectorXcd& y) {
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(window);
    for (int l = 0; l < m; ++l) {
      Eigen::VectorXcd yl(window);
      for (int w = 0; w < window; ++w) yl(w) = y(w * m + l);
      x += grid[l]->adjoint(yl);
    }
    return x;
  };
  std::vector<Eigen::VectorXcd> extra{Eigen::VectorXcd::Ones(window)};
  out.m_grid = ascent::maximize_ratio(stacked, ascent::MixedNorm::plain(p), ascent::MixedNorm{p, 2.0, m},
                                      options(seed, 4), extra)
                   .value;

  const KhinchinConstants kc = KhinchinConstants::for_p(p);
  out.khinchin_factor = kc.C / kc.c;
  out.bound = out.m_upper * out.khinchin_factor;
  out.ok = out.lhs <= out.bound + tol;
  return out;
}

Eigen::VectorXd hardy_littlewood_max(const Eigen::VectorXcd& f, bool one_sided) {
  const int n = static_cast<int>(f.size());
  Eigen::VectorXcd prefix(n + 1);
  prefix(0) = 0.0;
  for (int i = 0; i < n; ++i) prefix(i + 1) = prefix(i) + f(i);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (int x = 0; x < n; ++x) {
    double best = 0.0;
    if (one_sided) {
      for (int len = 1; len <= x + 1; ++len) {
        best = std::max(best, std::abs(prefix(x + 1) - prefix(x + 1 - len)) / len);
      }
    } else {
      const int reach = std::max(x, n - 1 - x);
      for (int r = 0; r <= reach; ++r) {
        const int lo = std::max(0, x - r);
        const int hi = std::min(n - 1, x + r);
        best = std::max(best, std::abs(prefix(hi + 1) - prefix(lo)) / (hi - lo + 1));
      }
    }
    out(x) = best;
  }
  return out;
}

MaximalTransferCheck maximal_transfer_check(const std::vector<TimeKernel>& family,
                                            const calculus::SpectralDecomposition& s, double p,
                                            std::uint64_t seed, int window, int starts, double tol) {
  require_family(family);
  if (!(p > 1.0)) throw InputError("p must exceed 1");
  const int d = s.n();
  MaximalTransferCheck out;

  const Aligned al = align(family);
  std::vector<ascent::LinearMap> grid;
  for (const auto& k : al.kernels) grid.push_back(toeplitz_map(k, window));
  std::vector<Eigen::VectorXcd> extra_grid{Eigen::VectorXcd::Ones(window)};
  out.m_grid = ascent::maximize_maximal_ratio(grid, p, options(derive_seed(seed, 1), starts), extra_grid).value;

  std::vector<ascent::LinearMap> semi;
  for (const auto& k : family) {
    semi.push_back(ascent::dense_map(ascent::unit_weight_form(transfer_operator(k, s), p, s.mu(), s.mu())));
  }
  std::vector<Eigen::VectorXcd> extra_semi{Eigen::VectorXcd::Ones(d)};
  for (int j = 0; j < d; ++j) extra_semi.push_back(Eigen::VectorXcd::Unit(d, j));
  out.m_semigroup =
      ascent::maximize_maximal_ratio(semi, p, options(derive_seed(seed, 2), starts), extra_semi).value;

  double acc = 0.0;
  for (const auto& k : family) acc += std::pow(convolver_upper(k, p), p);
  out.m_upper = std::pow(acc, 1.0 / p);
  out.ok = out.m_semigroup <= out.m_grid + tol;
  return out;
}

}  // namespace dilateron::transference
