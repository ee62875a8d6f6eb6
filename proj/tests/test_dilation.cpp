#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "dilateron/dilation/dilation.hpp"
#include "dilateron/error.hpp"
#include "support.hpp"

using namespace dilateron;
using namespace dilateron::dilation;
using lp::PositiveOperator;
using lp::SignedOperator;
using lp::WeightedLpSpace;
using lp::random_complex_substochastic;
using lp::random_substochastic;

namespace {

Eigen::MatrixXd swap2() {
  Eigen::MatrixXd s(2, 2);
  s << 0, 1, 1, 0;
  return s;
}

}  // namespace

TEST_CASE("identity geometry") {
  const auto g = build_dilation(PositiveOperator(WeightedLpSpace::unit(3, 2.0), Eigen::Matrix3d::Identity()), 3);
  CHECK((g.xi() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((g.eta() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() == 0.0);
  for (int i = 0; i < 3; ++i) CHECK(g.rho()(i, i) == 1.0);
  Rng rng(1);
  const PartitionFunction f = random_partition_function(g, rng, false);
  const PartitionFunction sf = apply_S(g, f);
  // blocks shift by one, block-0 cells are fixed pointwise
  REQUIRE(sf.size() == f.size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (f.cells[k].block != 0) continue;
    CHECK(sf.cells[k].x0 == f.cells[k].x0);
    CHECK(sf.cells[k].y0 == f.cells[k].y0);
    CHECK(sf.values[k] == f.values[k]);
  }
  const auto r = verify_dilation(g, {5, 1, Engine::kCells});
  CHECK(r.max_error == 0.0);
}

TEST_CASE("swap geometry") {
  const auto g = build_dilation(PositiveOperator(WeightedLpSpace::unit(2, 3.0), swap2()), 2);
  CHECK(g.u().isApprox(Eigen::Vector2d(1, 1) * g.u()[0]));
  CHECK(std::abs(g.xi()(0, 1) - 1.0) < 1e-15);
  CHECK(std::abs(g.xi()(1, 0) - 1.0) < 1e-15);
  CHECK(std::abs(g.eta()(0, 1) - 1.0) < 1e-12);
  CHECK(std::abs(g.eta()(1, 0) - 1.0) < 1e-12);
  CHECK(std::abs(g.rho()(0, 1) - 1.0) < 1e-12);
  CHECK(g.xi()(0, 0) == 0.0);
  const auto r = verify_dilation(build_dilation(PositiveOperator(WeightedLpSpace::unit(2, 3.0), swap2()), 4),
                                 {20, 3, Engine::kCells});
  CHECK(r.max_error < 1e-12);
}

TEST_CASE("zero row drops j from J") {
  Eigen::Matrix3d t;
  t << 0.3, 0.2, 0.1, 0, 0, 0, 0.4, 0.3, 0.5;
  const auto g = build_dilation(PositiveOperator(WeightedLpSpace::unit(3, 2.0), t), 2);
  CHECK_FALSE(g.in_J(1));
  CHECK(g.xi().col(1).cwiseAbs().maxCoeff() == 0.0);
  std::vector<std::pair<RectangleCell, cplx>> out;
  for (int i = 0; i < 3; ++i) {
    g.image({0, i, double(i), 1.0, double(i), i + 1.0}, out);
    for (const auto& [c, v] : out) CHECK_FALSE((c.block == 0 && c.column == 1));
  }
  CHECK(verify_dilation(g, {10, 2}).max_error < 1e-12);
}

TEST_CASE("apply_D and apply_P") {
  const auto g = build_dilation(PositiveOperator(WeightedLpSpace::unit(2, 2.0), swap2() * 0.5), 2);
  const auto e1 = apply_D(g, Eigen::Vector2cd(1, 0));
  REQUIRE(e1.size() == 1);
  CHECK(e1.cells[0].column == 0);
  CHECK(e1.cells[0].area() == 1.0);
  CHECK(apply_D(g, Eigen::Vector2cd(0, 0)).size() == 0);
  CHECK(apply_D(g, Eigen::Vector2cd(3, 4)).norm(2.0) == doctest::Approx(5.0));
  CHECK_THROWS_AS(apply_D(g, Eigen::Vector3cd(1, 1, 1)), InputError);

  PartitionFunction c;
  c.add({0, 0, 0.0, 1.0, 0.0, 1.0}, 2.5);
  const auto pc = apply_P(g, c);
  REQUIRE(pc.size() == 1);
  CHECK(pc.values[0] == cplx(2.5));

  PartitionFunction upper;
  upper.add({1, 0, 0.0, 1.0, 0.0, 1.0}, 7.0);
  CHECK(apply_P(g, upper).size() == 0);

  PartitionFunction half;
  half.add({0, 0, 0.0, 1.0, 0.5, 1.0}, 1.0);
  const auto ph = apply_P(g, half);
  REQUIRE(ph.size() == 1);
  CHECK(ph.values[0] == cplx(0.5));
  CHECK(ph.cells[0].area() == 1.0);
}

TEST_CASE("S maps R_ij onto S_ij") {
  Rng rng(4);
  const Eigen::MatrixXd t = random_substochastic(rng, 3);
  const double p = 1.5;
  const auto g = build_dilation(PositiveOperator(WeightedLpSpace::unit(3, p), t), 2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      PartitionFunction r;
      r.add({0, i, double(i), 1.0, g.y_lo(i, j), g.y_lo(i, j) + g.height(i, j)}, 1.0);
      const auto s = apply_S(g, r);
      REQUIRE(s.size() == 1);
      CHECK(s.cells[0].column == j);
      CHECK(std::abs(s.cells[0].x0 - g.x_lo(i, j)) < 1e-14);
      CHECK(std::abs(s.cells[0].width - g.xi()(i, j)) < 1e-14);
      CHECK(s.cells[0].y0 == double(j));
      CHECK(s.cells[0].y1 == j + 1.0);
      CHECK(std::abs(s.values[0] - std::pow(g.rho()(i, j), 1.0 / p)) < 1e-12 * std::abs(s.values[0]));
      CHECK(std::abs(s.norm(p) - r.norm(p)) < 1e-12);
    }
}

TEST_CASE("structure invariants on random geometries") {
  Rng rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = uniform_int(rng, 2, 6);
    const double p = std::vector<double>{1.0, 1.5, 2.0, 3.0}[trial % 4];
    const bool signed_case = trial % 3 == 0;
    const DilationGeometry g =
        signed_case ? build_dilation(SignedOperator(WeightedLpSpace::unit(n, p), random_complex_substochastic(rng, n)), 3)
                    : build_dilation(PositiveOperator(WeightedLpSpace::unit(n, p),
                                                      random_substochastic(rng, n, trial % 2 ? 0.4 : 0.0)),
                                     3);
    CHECK(g.xi_column_defect() < 1e-12);
    CHECK(g.eta_row_excess() < 1e-12);
    CHECK(g.rho_identity_defect() < 1e-12);
    for (int k = 0; k < 10; ++k) {
      const auto f = random_partition_function(g, rng, !signed_case);
      const auto sf = apply_S(g, f);
      CHECK(std::abs(sf.norm(p) - f.norm(p)) <= 1e-12 * std::max(1.0, f.norm(p)));
      if (!signed_case)
        for (const auto& v : sf.values) CHECK(v.real() >= -1e-15);
      const auto pf = apply_P(g, f);
      CHECK(pf.norm(p) <= f.norm(p) + 1e-12);
      const auto ppf = apply_P(g, pf);
      CHECK((column_averages(g, ppf) - column_averages(g, pf)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("truncation overflow is reported") {
  const auto g = build_dilation(PositiveOperator(WeightedLpSpace::unit(2, 2.0), swap2() * 0.5), 2);
  PartitionFunction top;
  top.add({2, 0, 0.0, 1.0, 0.0, 1.0}, 1.0);
  CHECK_THROWS_AS(apply_S(g, top), DomainError);
  CHECK_THROWS_AS(build_dilation(PositiveOperator(WeightedLpSpace::unit(2, 2.0), swap2()), 0), InputError);
}

TEST_CASE("main identity, both engines") {
  Rng rng(12);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = uniform_int(rng, 2, 4);
    const double p = std::vector<double>{1.0, 1.5, 2.0, 3.0}[trial % 4];
    const auto g = build_dilation(PositiveOperator(WeightedLpSpace::unit(n, p),
                                                   random_substochastic(rng, n, trial % 2 ? 0.5 : 0.0)),
                                  4);
    const auto a = verify_dilation(g, {6, 9, Engine::kCells});
    const auto b = verify_dilation(g, {6, 9, Engine::kOrbit});
    CHECK(a.max_error < 1e-12);
    CHECK(b.max_error < 1e-12);
    CHECK(a.block0_cells == b.block0_cells);
    // refinement bound
    for (int k = 1; k <= 4; ++k) CHECK(a.block0_cells[k] <= (n + 1) * a.block0_cells[k - 1]);
  }
  const Eigen::MatrixXd t = random_substochastic(rng, 5);
  const auto r = verify_dilation(PositiveOperator(WeightedLpSpace::unit(5, 1.5), t), 8, {20, 7});
  CHECK(r.engine == Engine::kOrbit);
  CHECK(r.max_error < 1e-10);
}

TEST_CASE("weighted input reduces to unit weights") {
  Rng rng(21);
  Eigen::VectorXd w(3);
  w << 0.5, 2.0, 1.3;
  const Eigen::MatrixXd raw = random_substochastic(rng, 3);
  // make the weighted operator a contraction by conjugating a unit-weight one back
  const double p = 2.0;
  const Eigen::VectorXd s = w.array().pow(1.0 / p);
  const Eigen::MatrixXd t = s.cwiseInverse().asDiagonal() * raw * s.asDiagonal();
  const auto g = build_dilation(PositiveOperator(WeightedLpSpace(p, w), t), 3);
  CHECK((g.matrix().real() - raw).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(verify_dilation(g, {10, 1}).max_error < 1e-12);
}

TEST_CASE("sub-positive construction") {
  SUBCASE("minus identity") {
    const auto g = build_dilation(SignedOperator(WeightedLpSpace::unit(3, 2.0), -Eigen::Matrix3cd::Identity()), 4);
    for (int i = 0; i < 3; ++i) CHECK(g.sigma()(i, i) == cplx(-1.0));
    auto f = apply_D(g, Eigen::Vector3cd(1, 2, 3));
    for (int k = 1; k <= 4; ++k) {
      f = apply_S(g, f);
      const Eigen::VectorXcd avg = column_averages(g, f);
      CHECK((avg - std::pow(-1.0, k) * Eigen::Vector3cd(1, 2, 3)).cwiseAbs().maxCoeff() < 1e-15);
    }
  }
  SUBCASE("i times identity") {
    const cplx I(0.0, 1.0);
    const auto g = build_dilation(SignedOperator(WeightedLpSpace::unit(2, 2.0), I * Eigen::Matrix2cd::Identity()), 4);
    const Eigen::Vector2cd a(1.0, cplx(0.5, -2.0));
    auto f = apply_D(g, a);
    for (int k = 1; k <= 4; ++k) {
      f = apply_S(g, f);
      CHECK((column_averages(g, f) - std::pow(I, k) * a).cwiseAbs().maxCoeff() < 1e-15);
    }
  }
  SUBCASE("random complex, p = 2.5, K = 6") {
    Rng rng(31);
    for (int trial = 0; trial < 5; ++trial) {
      const int n = uniform_int(rng, 2, 5);
      const auto r = verify_subpositive(SignedOperator(WeightedLpSpace::unit(n, 2.5), random_complex_substochastic(rng, n)),
                                        6, {10, derive_seed(2, trial)});
      CHECK(r.max_error < 1e-10);
    }
  }
  SUBCASE("modulus above one is rejected") {
    Eigen::Matrix2cd t;
    t << cplx(0.9, 0.3), 0.4, -0.5, cplx(0, 0.8);
    CHECK_THROWS_AS(build_dilation(SignedOperator(WeightedLpSpace::unit(2, 2.0), t), 2), ContractionError);
  }
}

TEST_CASE("x-dependence is preserved") {
  Rng rng(44);
  const int depth = 5;
  const auto g = build_dilation(PositiveOperator(WeightedLpSpace::unit(3, 1.5), random_substochastic(rng, 3)), depth);
  auto f = apply_D(g, Eigen::Vector3cd(0.3, 1.0, 0.7));
  CHECK(x_dependence_check(g, f));
  for (int k = 1; k < depth; ++k) {
    f = apply_S(g, f);
    CHECK(x_dependence_check(g, f));
  }
  PartitionFunction bad;
  bad.add({0, 0, 0.0, 1.0, 0.0, 0.5}, 1.0);
  bad.add({0, 0, 0.0, 1.0, 0.5, 1.0}, 2.0);
  CHECK_FALSE(x_dependence_check(g, bad));
}
