#include "dilateron/dilation/dilation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "dilateron/core/norm_ascent.hpp"
#include "dilateron/error.hpp"
#include "dilateron/random.hpp"

namespace dilateron::dilation {

void PartitionFunction::add(const RectangleCell& c, cplx v) {
  if (!(c.width > 0.0) || !(c.y1 - c.y0 > kEndpointTol)) return;
  cells.push_back(c);
  values.push_back(v);
}

double PartitionFunction::norm(double p) const {
  double s = 0.0;
  for (std::size_t k = 0; k < cells.size(); ++k) s += std::pow(std::abs(values[k]), p) * cells[k].area();
  return std::pow(s, 1.0 / p);
}

int PartitionFunction::max_block() const {
  int m = -1;
  for (const auto& c : cells) m = std::max(m, c.block);
  return m;
}

namespace {

double snap(double y, double target) { return std::abs(y - target) <= kEndpointTol ? target : y; }

double vector_norm(const Eigen::VectorXcd& x, double p) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i]), p);
  return std::pow(s, 1.0 / p);
}

}  // namespace

struct GeometryBuilder {
  static DilationGeometry build(const lp::WeightedLpSpace& space, const Eigen::MatrixXcd& entries,
                                bool positive, int depth, double tol) {
    if (depth < 1) throw InputError("dilation depth K must be at least 1");
    const int n = space.dim();
    const double p = space.p();
    DilationGeometry g;
    g.n_ = n;
    g.p_ = p;
    g.depth_ = depth;
    g.positive_ = positive;
    g.weights_ = space.weights();
    g.t_ = ascent::unit_weight_form(entries, p, space.weights(), space.weights());
    const Eigen::MatrixXd modulus = g.t_.cwiseAbs();
    const lp::ExtremalVector ext =
        lp::extremal_vector(lp::PositiveOperator(lp::WeightedLpSpace::unit(n, p), modulus), tol);
    g.u_ = ext.u;
    g.defect_ = ext.defect;
    g.v_ = modulus * g.u_;

    g.xi_ = g.eta_ = g.rho_ = g.rho_root_ = Eigen::MatrixXd::Zero(n, n);
    g.sigma_ = Eigen::MatrixXcd::Ones(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double tji = modulus(j, i);
        if (tji > 0.0) g.sigma_(i, j) = g.t_(j, i) / tji;
        if (!(g.v_[j] > 0.0)) continue;
        const double ratio = g.v_[j] / g.u_[i];
        g.xi_(i, j) = tji / ratio;
        g.eta_(i, j) = tji * std::pow(ratio, p - 1.0);
        g.rho_(i, j) = std::pow(ratio, p);
        g.rho_root_(i, j) = ratio;
      }
    }

    g.x_lo_ = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
      double x = j;
      for (int i = 0; i < n; ++i) {
        g.x_lo_(i, j) = x;
        x += g.xi_(i, j);
      }
    }
    g.height_ = g.eta_;
    g.y_lo_ = Eigen::MatrixXd::Zero(n, n);
    g.r_top_ = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
      const double total = g.eta_.row(i).sum();
      if (total > 1.0) {
        g.height_.row(i) /= total;
        g.height_rescale_ = std::min(g.height_rescale_, 1.0 / total);
      }
      double y = i;
      for (int j = 0; j < n; ++j) {
        g.y_lo_(i, j) = y;
        y += g.height_(i, j);
      }
      g.r_top_[i] = std::min(y, i + 1.0);
    }
    return g;
  }
};

DilationGeometry build_dilation(const lp::PositiveOperator& t, int depth, double tol) {
  return GeometryBuilder::build(t.space(), t.entries().cast<cplx>(), true, depth, tol);
}

DilationGeometry build_dilation(const lp::SignedOperator& t, int depth, double tol) {
  return GeometryBuilder::build(t.space(), t.entries(), false, depth, tol);
}

void DilationGeometry::image(const RectangleCell& cell,
                             std::vector<std::pair<RectangleCell, cplx>>& out) const {
  out.clear();
  if (cell.block >= depth_)
    throw DomainError("cell reaches the last copy Z_K; increase the depth");
  if (cell.block >= 1) {
    RectangleCell next = cell;
    ++next.block;
    out.emplace_back(next, 1.0);
    return;
  }
  const int i = cell.column;
  for (int j = 0; j < n_; ++j) {
    const double h = height_(i, j);
    const double w = xi_(i, j);
    if (!(h > 0.0) || !(w > 0.0)) continue;
    const double lo = y_lo_(i, j);
    const double a = std::max(cell.y0, lo);
    const double b = std::min(cell.y1, lo + h);
    if (b - a <= kEndpointTol) continue;
    RectangleCell img;
    img.block = 0;
    img.column = j;
    img.y0 = snap(j + (a - lo) / h, j);
    img.y1 = snap(j + (b - lo) / h, j + 1.0);
    img.x0 = x_lo_(i, j) + w * (cell.x0 - i);
    img.width = w * cell.width;
    out.emplace_back(img, sigma_(i, j) * rho_root_(i, j));
  }
  const double a = std::max(cell.y0, r_top_[i]);
  if (cell.y1 - a > kEndpointTol) {
    RectangleCell up = cell;
    up.block = 1;
    up.y0 = a;
    out.emplace_back(up, 1.0);
  }
}

double DilationGeometry::xi_column_defect() const {
  double d = 0.0;
  for (int j = 0; j < n_; ++j)
    if (in_J(j)) d = std::max(d, std::abs(xi_.col(j).sum() - 1.0));
  return d;
}

double DilationGeometry::eta_row_excess() const {
  return (eta_.rowwise().sum().array() - 1.0).maxCoeff();
}

double DilationGeometry::rho_identity_defect() const {
  double d = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      if (xi_(i, j) > 0.0)
        d = std::max(d, std::abs(rho_(i, j) * xi_(i, j) - eta_(i, j)) / std::max(1.0, eta_(i, j)));
  return d;
}

PartitionFunction apply_D(const DilationGeometry& g, const Eigen::VectorXcd& alpha) {
  if (alpha.size() != g.n()) throw InputError("vector length differs from dilation dimension");
  PartitionFunction f;
  for (int i = 0; i < g.n(); ++i)
    if (alpha[i] != 0.0) f.add({0, i, double(i), 1.0, double(i), i + 1.0}, alpha[i]);
  return f;
}

PartitionFunction apply_S(const DilationGeometry& g, const PartitionFunction& f) {
  PartitionFunction out;
  std::vector<std::pair<RectangleCell, cplx>> buf;
  for (std::size_t k = 0; k < f.cells.size(); ++k) {
    g.image(f.cells[k], buf);
    for (const auto& [cell, factor] : buf) out.add(cell, f.values[k] * factor);
  }
  return out;
}

Eigen::VectorXcd column_averages(const DilationGeometry& g, const PartitionFunction& f) {
  Eigen::VectorXcd avg = Eigen::VectorXcd::Zero(g.n());
  for (std::size_t k = 0; k < f.cells.size(); ++k) {
    const auto& c = f.cells[k];
    if (c.block != 0) continue;
    if (c.column < 0 || c.column >= g.n()) throw InputError("cell column out of range");
    avg[c.column] += f.values[k] * c.area();
  }
  return avg;
}

PartitionFunction apply_P(const DilationGeometry& g, const PartitionFunction& f) {
  return apply_D(g, column_averages(g, f));
}

bool x_dependence_check(const DilationGeometry& g, const PartitionFunction& f, double tol) {
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < f.cells.size(); ++k)
    if (f.cells[k].block == 0) idx.push_back(k);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const auto& ca = f.cells[a];
    const auto& cb = f.cells[b];
    if (ca.column != cb.column) return ca.column < cb.column;
    if (ca.x0 != cb.x0) return ca.x0 < cb.x0;
    return ca.width < cb.width;
  });
  auto same_x = [&](const RectangleCell& a, const RectangleCell& b) {
    return a.column == b.column && std::abs(a.x0 - b.x0) <= kEndpointTol &&
           std::abs(a.width - b.width) <= kEndpointTol * std::max(1.0, a.width);
  };
  for (std::size_t s = 0; s < idx.size();) {
    std::size_t e = s + 1;
    while (e < idx.size() && same_x(f.cells[idx[s]], f.cells[idx[e]])) ++e;
    double covered = 0.0;
    double scale = 0.0;
    for (std::size_t k = s; k < e; ++k) {
      covered += f.cells[idx[k]].height();
      scale = std::max(scale, std::abs(f.values[idx[k]]));
    }
    const cplx ref = f.values[idx[s]];
    for (std::size_t k = s; k < e; ++k)
      if (std::abs(f.values[idx[k]] - ref) > tol * std::max(1.0, scale)) return false;
    if (std::abs(covered - 1.0) > tol && scale > tol) return false;
    s = e;
  }
  (void)g;
  return true;
}

namespace {

Eigen::VectorXcd random_alpha(const DilationGeometry& g, Rng& rng) {
  if (!g.positive()) return complex_gaussian_vector(rng, g.n());
  Eigen::VectorXcd a(g.n());
  for (int i = 0; i < g.n(); ++i) a[i] = uniform(rng);
  return a;
}

// Total cells of S^k D over all columns if nothing degenerates.
double cell_estimate(int n, int depth) {
  double total = 0.0, level = n;
  for (int k = 0; k <= depth; ++k, level *= n) total += level;
  return total;
}

}  // namespace

VerifyReport verify_dilation(const DilationGeometry& g, const VerifyOptions& opts) {
  const int n = g.n();
  const int depth = g.depth();
  const double p = g.p();
  VerifyReport report;
  report.per_k_errors.assign(depth + 1, 0.0);
  report.block0_cells.assign(depth + 1, 0);
  report.engine = opts.engine;
  if (report.engine == Engine::kAuto)
    report.engine = cell_estimate(n, depth) * opts.trials <= 2e6 ? Engine::kCells : Engine::kOrbit;

  std::vector<Eigen::VectorXcd> alphas;
  for (int t = 0; t < opts.trials; ++t) {
    Rng rng(derive_seed(opts.seed, t));
    alphas.push_back(random_alpha(g, rng));
  }

  auto record = [&](int k, const Eigen::VectorXcd& lhs, const Eigen::VectorXcd& rhs) {
    const double err = vector_norm(lhs - rhs, p);
    report.per_k_errors[k] = std::max(report.per_k_errors[k], err);
    report.max_error = std::max(report.max_error, err);
  };

  if (report.engine == Engine::kCells) {
    for (std::size_t t = 0; t < alphas.size(); ++t) {
      PartitionFunction f = apply_D(g, alphas[t]);
      Eigen::VectorXcd tk = alphas[t];
      for (int k = 0; k <= depth; ++k) {
        if (t == 0) {
          std::size_t c = 0;
          for (const auto& cell : f.cells) c += cell.block == 0;
          report.block0_cells[k] = c;
        }
        record(k, column_averages(g, f), tk);
        if (k < depth) {
          f = apply_S(g, f);
          tk = g.matrix() * tk;
        }
      }
    }
    return report;
  }

  // acc[k](j, i) = integral over X_j of S^k chi_{X_i}
  std::vector<Eigen::MatrixXcd> acc(depth + 1, Eigen::MatrixXcd::Zero(n, n));
  std::vector<std::vector<std::pair<RectangleCell, cplx>>> buffers(depth + 1);
  int origin = 0;
  std::function<void(const RectangleCell&, cplx, int)> visit =
      [&](const RectangleCell& c, cplx coef, int k) {
        acc[k](c.column, origin) += coef * c.area();
        ++report.block0_cells[k];
        if (k == depth) return;
        auto& buf = buffers[k];
        g.image(c, buf);
        for (const auto& [child, factor] : buf)
          if (child.block == 0) visit(child, coef * factor, k + 1);
      };
  for (origin = 0; origin < n; ++origin)
    visit({0, origin, double(origin), 1.0, double(origin), origin + 1.0}, 1.0, 0);

  for (const auto& alpha : alphas) {
    Eigen::VectorXcd tk = alpha;
    for (int k = 0; k <= depth; ++k) {
      record(k, acc[k] * alpha, tk);
      tk = g.matrix() * tk;
    }
  }
  return report;
}

VerifyReport verify_dilation(const lp::PositiveOperator& t, int depth, const VerifyOptions& opts) {
  return verify_dilation(build_dilation(t, depth), opts);
}

VerifyReport verify_subpositive(const lp::SignedOperator& t, int depth, const VerifyOptions& opts) {
  return verify_dilation(build_dilation(t, depth), opts);
}

PartitionFunction random_partition_function(const DilationGeometry& g, Rng& rng, bool nonnegative) {
  auto cuts = [&rng](int pieces) {
    std::vector<double> c{0.0, 1.0};
    for (int k = 1; k < pieces; ++k) c.push_back(uniform(rng));
    std::sort(c.begin(), c.end());
    return c;
  };
  PartitionFunction f;
  for (int m = 0; m < g.depth(); ++m) {
    for (int i = 0; i < g.n(); ++i) {
      const auto xs = cuts(uniform_int(rng, 1, 3));
      const auto ys = cuts(uniform_int(rng, 1, 3));
      for (std::size_t a = 0; a + 1 < xs.size(); ++a) {
        for (std::size_t b = 0; b + 1 < ys.size(); ++b) {
          const cplx v = nonnegative ? cplx(uniform(rng), 0.0) : cplx(gaussian(rng), gaussian(rng));
          f.add({m, i, i + xs[a], xs[a + 1] - xs[a], i + ys[b], i + ys[b + 1]}, v);
        }
      }
    }
  }
  return f;
}

}  // namespace dilateron::dilation
