#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dilateron/calculus/calculus.hpp"
#include "dilateron/error.hpp"
#include "dilateron/transference/kernel.hpp"
#include "dilateron/transference/khinchin.hpp"
#include "dilateron/transference/transfer.hpp"
#include "support.hpp"

using namespace dilateron;
using namespace dilateron::transference;
using calculus::SpectralDecomposition;
using calculus::SubmarkovianGenerator;
using std::numbers::pi;

namespace {

SubmarkovianGenerator minus_identity(int n) {
  return {Eigen::VectorXd::Ones(n), -Eigen::MatrixXd::Identity(n, n)};
}

// Weighted L^p(mu) norm written out directly.
double lp_mu(const Eigen::VectorXcd& x, double p, const Eigen::VectorXd& mu) {
  double s = 0.0;
  for (int i = 0; i < x.size(); ++i) s += mu(i) * std::pow(std::abs(x(i)), p);
  return std::pow(s, 1.0 / p);
}

// Operator norm on L^2(mu) through the symmetrized Gram matrix.
double l2_mu_norm(const Eigen::MatrixXcd& m, const Eigen::VectorXd& mu) {
  const Eigen::VectorXd s = mu.cwiseSqrt();
  const Eigen::MatrixXcd b = s.asDiagonal() * m * s.cwiseInverse().asDiagonal();
  return testing_support::spectral_norm(b);
}

TimeKernel random_bump(Rng& rng, double h) {
  return gaussian_bump(uniform(rng, 0.3, 2.0), uniform(rng, 0.1, 0.5), h);
}

}  // namespace

TEST_CASE("time kernel closed forms") {
  const double h = 0.01;
  const TimeKernel e = exponential_kernel(1.0, h, 60.0);
  CHECK(e.t0() == doctest::Approx(h / 2));
  CHECK(std::abs(e.l1_norm() - h / (2 * std::sinh(h / 2))) < 1e-12);
  for (double x : {0.0, 0.5, 1.0, 3.0}) {
    const double exact = h / (2 * std::sinh((1 + x) * h / 2));
    CHECK(std::abs(e.laplace(x) - exact) < 1e-12);
  }
  // Fourier transform of the sampled measure: geometric series.
  for (double nu : {0.0, 0.7, 3.0}) {
    const std::complex<double> z = std::exp(std::complex<double>(-h, -nu * h));
    const std::complex<double> exact = h * std::exp(std::complex<double>(-h / 2, -nu * h / 2)) / (1.0 - z);
    CHECK(std::abs(e.fourier(nu) - exact) < 1e-10);
  }
  CHECK_THROWS_AS(TimeKernel(0.0, 0.0, Eigen::VectorXcd::Ones(2)), InputError);
  CHECK_THROWS_AS(TimeKernel(0.1, 0.0, Eigen::VectorXcd()), InputError);
}

TEST_CASE("trimming and convolution") {
  const TimeKernel g = gaussian_bump(1.0, 0.2, 0.01);
  const TimeKernel full = TimeKernel::sample(
      [](double t) { return std::complex<double>(std::exp(-0.5 * std::pow((t - 1.0) / 0.2, 2)) / (0.2 * std::sqrt(2 * pi))); },
      0.01, 2.6);
  CHECK(g.size() < full.size());
  CHECK(std::abs(g.l1_norm() - full.l1_norm()) < 1e-11);
  CHECK(g.causal());

  const TimeKernel a(0.5, 0.25, Eigen::Vector2cd(1.0, 2.0));
  const TimeKernel b(0.5, 0.0, Eigen::Vector3cd(1.0, 0.0, -1.0));
  const TimeKernel c = convolve(a, b);
  CHECK(c.t0() == doctest::Approx(0.25));
  REQUIRE(c.size() == 4);
  // h * (1, 2, -1, -2)
  CHECK(std::abs(c.samples()(0) - 0.5) < 1e-15);
  CHECK(std::abs(c.samples()(1) - 1.0) < 1e-15);
  CHECK(std::abs(c.samples()(2) + 0.5) < 1e-15);
  CHECK(std::abs(c.samples()(3) + 1.0) < 1e-15);
  CHECK_THROWS_AS(convolve(a, TimeKernel(0.3, 0.0, Eigen::Vector2cd(1.0, 1.0))), InputError);
}

TEST_CASE("toeplitz operator matches its dense matrix") {
  Rng rng(11);
  const TimeKernel k(0.1, 0.0, complex_gaussian_vector(rng, 7));
  for (int window : {1, 5, 13, 40}) {
    const ToeplitzOperator op(k, window);
    Eigen::MatrixXcd dense = Eigen::MatrixXcd::Zero(window, window);
    for (int r = 0; r < window; ++r)
      for (int c = 0; c < window; ++c)
        if (r - c >= 0 && r - c < 7) dense(r, c) = 0.1 * k.samples()(r - c);
    CHECK((op.dense() - dense).cwiseAbs().maxCoeff() < 1e-15);
    const Eigen::VectorXcd x = complex_gaussian_vector(rng, window);
    CHECK((op.apply(x) - dense * x).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((op.adjoint(x) - dense.adjoint() * x).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("certified Fourier supremum") {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const TimeKernel k(0.05, 0.0, complex_gaussian_vector(rng, 3 + trial * 4));
    const FourierSup s = fourier_sup(k);
    double brute = 0.0;
    const int grid = 200000;
    for (int i = 0; i < grid; ++i) brute = std::max(brute, std::abs(k.fourier(2 * pi * i / (grid * 0.05))));
    CHECK(s.grid_max <= brute + 1e-12);
    CHECK(brute <= s.certified + 1e-12);
    CHECK(s.certified - s.grid_max < 1e-4 * s.grid_max);
  }
}

TEST_CASE("convolver bounds") {
  const double h = 0.05;
  const TimeKernel d = TimeKernel::delta(h);
  for (double p : {1.0, 1.5, 2.0, 4.0}) {
    CHECK(convolver_upper(d, p) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(convolver_lower(d, p, 32, 1).value == doctest::Approx(1.0).epsilon(1e-12));
  }
  const TimeKernel e = exponential_kernel(1.0, h, 40.0);
  CHECK(convolver_upper(e, 1.0) == e.l1_norm());
  // Positive kernel: sup |k^| = k^(0) = |k|_1, so every p gives |k|_1.
  for (double p : {1.5, 2.0, 3.0}) CHECK(std::abs(convolver_upper(e, p) - e.l1_norm()) < 1e-4);

  const ConvolverLower big = convolver_lower(e, 2.0, 4096, 3, 1);
  CHECK(big.value > 0.98 * e.l1_norm());
  CHECK(big.value <= convolver_upper(e, 2.0) + 1e-8);

  Rng rng(21);
  for (int trial = 0; trial < 6; ++trial) {
    const TimeKernel k(h, 0.0, complex_gaussian_vector(rng, 12));
    for (double p : {1.3, 2.0, 3.5}) {
      double prev = 0.0;
      Eigen::VectorXcd warm;
      for (int n : {24, 48, 96, 192}) {
        const ConvolverLower lo = convolver_lower(k, p, n, derive_seed(9, trial), 2, &warm);
        warm = lo.witness;
        CHECK(lo.value >= prev - 1e-12);
        CHECK(lo.value <= convolver_upper(k, p) + 1e-8);
        prev = lo.value;
      }
    }
  }
}

TEST_CASE("positive kernels reach the L1 norm on wide windows") {
  const TimeKernel g = gaussian_bump(1.0, 0.3, 0.05);
  for (double p : {1.5, 3.0}) {
    const double lo = convolver_lower(g, p, 2048, 4, 1).value;
    CHECK(lo > 0.98 * g.l1_norm());
    CHECK(lo <= convolver_upper(g, p) + 1e-8);
  }
}

TEST_CASE("transfer operator") {
  const double h = 0.01;
  const SpectralDecomposition id(minus_identity(3));
  const TimeKernel e = exponential_kernel(1.0, h, 60.0);
  const Eigen::MatrixXcd t = transfer_operator(e, id);
  const double exact = h / (2 * std::sinh(h));
  CHECK((t - exact * Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(exact - 0.5) < 1e-4);
  CHECK((transfer_operator(TimeKernel::delta(h), id) - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff() <
        1e-14);
  CHECK_THROWS_AS(transfer_operator(TimeKernel(h, -h, Eigen::Vector2cd(1.0, 1.0)), id), DomainError);

  Rng rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const SpectralDecomposition s(calculus::random_generator(rng, 5));
    const TimeKernel g = random_bump(rng, 0.02);
    // Direct time quadrature of the same measure.
    Eigen::MatrixXcd direct = Eigen::MatrixXcd::Zero(5, 5);
    for (int j = 0; j < g.size(); ++j) direct += g.h() * g.samples()(j) * calculus::semigroup_at(s, g.time(j));
    CHECK((transfer_operator(g, s) - direct).cwiseAbs().maxCoeff() < 1e-8);

    // Homomorphism for convolution.
    const TimeKernel a = random_bump(rng, 0.02);
    const TimeKernel b(0.02, 0.0, complex_gaussian_vector(rng, 30));
    const Eigen::MatrixXcd lhs = transfer_operator(convolve(a, b), s);
    const Eigen::MatrixXcd rhs = transfer_operator(a, s) * transfer_operator(b, s);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("transference inequality") {
  const double h = 0.02;
  const SpectralDecomposition id(minus_identity(1));
  const TransferenceCheck c = transference_check(exponential_kernel(1.0, h, 40.0), id, 2.0, 1);
  CHECK(c.ok);
  CHECK(std::abs(c.transferred_lower - 0.5) < 1e-4);
  CHECK(std::abs(c.convolver_upper - 1.0) < 1e-3);

  const TransferenceCheck dc = transference_check(TimeKernel::delta(h), SpectralDecomposition(minus_identity(4)), 1.5, 2);
  CHECK(dc.ok);
  CHECK(std::abs(dc.transferred_lower - 1.0) < 1e-12);

  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const SpectralDecomposition s(calculus::random_generator(rng, 4));
    TimeKernel k(h, 0.0, complex_gaussian_vector(rng, 40));
    const double p = uniform(rng, 1.1, 4.0);
    const TransferenceCheck r = transference_check(k, s, p, derive_seed(3, trial), 8);
    CHECK(r.ok);
    CHECK(r.half_plane_lhs <= r.half_plane_rhs);
  }
}

TEST_CASE("rademacher system") {
  CHECK(rademacher(1, 0.0) == 1);
  CHECK(rademacher(1, 0.5) == 1);
  CHECK(rademacher(1, 0.75) == -1);
  CHECK(rademacher(2, 0.25) == 1);
  CHECK(rademacher(2, 0.5) == -1);
  CHECK(rademacher(2, 0.75) == 1);
  CHECK(rademacher(2, 1.0) == -1);
  CHECK_THROWS_AS(rademacher(0, 0.5), InputError);
  for (int n : {1, 3, 8}) {
    const Eigen::MatrixXd r = rademacher_table(n);
    const Eigen::MatrixXd gram = r.transpose() * r / std::pow(2.0, n);
    CHECK((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("khinchin estimates") {
  const KhinchinEstimate two = khinchin_empirical(2.0, 8, 1, 50);
  CHECK(two.c_est == 1.0);
  CHECK(two.C_est == 1.0);
  for (double p : {1.0, 1.5}) {
    const KhinchinEstimate e = khinchin_empirical(p, 10, 2, 100);
    CHECK(e.c_est == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(e.C_est > 1.0);
  }
  const KhinchinEstimate four = khinchin_empirical(4.0, 10, 3, 100);
  CHECK(four.c_est < 1.0);
  CHECK(four.C_est == doctest::Approx(1.0).epsilon(1e-14));
  // Exhaustive dyadic value for a = (1, 1): |r_1 + r_2|_4 = (2^4 / 2)^{1/4}.
  const Eigen::MatrixXd r = rademacher_table(2);
  const Eigen::VectorXd s = r.col(0) + r.col(1);
  CHECK(std::pow(s.array().pow(4).sum() / 4.0, 0.25) == doctest::Approx(std::pow(8.0, 0.25)));
  CHECK(four.c_est <= std::sqrt(2.0) / std::pow(8.0, 0.25) + 1e-12);
}

TEST_CASE("row matrix and square function norms") {
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(3);
  const std::vector<Eigen::MatrixXcd> id{Eigen::MatrixXcd::Identity(3, 3)};
  for (double p : {1.5, 2.0, 3.0}) {
    CHECK(square_norm(id, p, ones, 1) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(row_matrix_norm(id, p, ones, 1) == doctest::Approx(1.0).epsilon(1e-10));
  }
  std::vector<Eigen::MatrixXcd> disjoint;
  for (int l = 0; l < 3; ++l) {
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(3, 3);
    e(l, l) = 1.0;
    disjoint.push_back(e);
  }
  CHECK(square_norm(disjoint, 3.0, ones, 2) == doctest::Approx(1.0).epsilon(1e-10));

  Rng rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    const int d = 4;
    Eigen::VectorXd mu(d);
    for (int i = 0; i < d; ++i) mu(i) = uniform(rng, 0.5, 2.0);
    std::vector<Eigen::MatrixXcd> ops;
    Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(d, d);
    const Eigen::VectorXd s = mu.cwiseSqrt();
    for (int l = 0; l < 3; ++l) {
      Eigen::MatrixXcd k(d, d);
      for (int c = 0; c < d; ++c) k.col(c) = complex_gaussian_vector(rng, d);
      ops.push_back(k);
      const Eigen::MatrixXcd b = s.asDiagonal() * k * s.cwiseInverse().asDiagonal();
      gram += b.adjoint() * b;
    }
    // p = 2: both norms are the root of the largest eigenvalue of sum K_l^* K_l.
    const double oracle = std::sqrt(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(gram).eigenvalues().maxCoeff());
    CHECK(std::abs(square_norm(ops, 2.0, mu, 4) - oracle) < 1e-10);
    CHECK(std::abs(row_matrix_norm(ops, 2.0, mu, 4) - oracle) < 1e-10);
    for (double p : {1.5, 3.0}) {
      const KhinchinConstants k = KhinchinConstants::for_p(p);
      const double row = row_matrix_norm(ops, p, mu, derive_seed(5, trial), 24);
      const double sq = square_norm(ops, p, mu, derive_seed(6, trial), 24);
      CHECK(k.c * row <= sq + 1e-6);
      CHECK(sq <= k.C * row + 1e-6);
    }
  }
}

TEST_CASE("symmetric matrix sandwich") {
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(2);
  const std::vector<Eigen::MatrixXcd> ids(3, Eigen::MatrixXcd::Identity(2, 2));
  const SymmetricSandwich s = symmetric_matrix_norm_check(ids, 2.0, ones, 1);
  CHECK(s.norm_mk == doctest::Approx(1.0));
  CHECK(s.norm_bracket == doctest::Approx(1.0));
  CHECK(s.sandwich_ok);

  Rng rng(41);
  for (int trial = 0; trial < 4; ++trial) {
    std::vector<Eigen::MatrixXcd> ops;
    double max_single = 0.0;
    for (int l = 0; l < 3; ++l) {
      Eigen::MatrixXcd k(3, 3);
      for (int c = 0; c < 3; ++c) k.col(c) = complex_gaussian_vector(rng, 3);
      ops.push_back(k);
      max_single = std::max(max_single, testing_support::spectral_norm(k));
    }
    const SymmetricSandwich two = symmetric_matrix_norm_check(ops, 2.0, Eigen::VectorXd::Ones(3), 1);
    CHECK(std::abs(two.norm_mk - max_single) < 1e-10);
    CHECK(std::abs(two.norm_bracket - max_single) < 1e-10);
    CHECK(two.d_p == 1.0);
    CHECK(two.D_p == 1.0);
    CHECK(two.sandwich_ok);

    std::vector<Eigen::MatrixXcd> diag;
    for (int l = 0; l < 3; ++l) diag.push_back(complex_gaussian_vector(rng, 3).asDiagonal());
    const SymmetricSandwich three = symmetric_matrix_norm_check(diag, 3.0, Eigen::VectorXd::Ones(3), 7);
    CHECK(three.sandwich_ok);
  }
}

TEST_CASE("rademacher projection") {
  const int n = 4;
  Rng rng(2);
  const Eigen::MatrixXcd r = rademacher_table(n).cast<std::complex<double>>();
  Eigen::MatrixXcd coeff(n, 2);
  coeff.col(0) = complex_gaussian_vector(rng, n);
  coeff.col(1) = complex_gaussian_vector(rng, n);
  const Eigen::MatrixXcd f = r * coeff;
  CHECK((rademacher_projection(f, n) - f).cwiseAbs().maxCoeff() < 1e-13);
  // Idempotent.
  const Eigen::MatrixXcd g = Eigen::MatrixXcd::Random(1 << n, 2);
  const Eigen::MatrixXcd pg = rademacher_projection(g, n);
  CHECK((rademacher_projection(pg, n) - pg).cwiseAbs().maxCoeff() < 1e-13);

  const ProjectionCheck two = rademacher_projection_check(2.0, 5, 100, 3);
  CHECK(two.max_ratio <= 1.0 + 1e-12);
  const ProjectionCheck four = rademacher_projection_check(4.0, 6, 500, 4);
  CHECK(four.ok);
  CHECK(four.bound >= 1.0);
}

TEST_CASE("hardy littlewood maximal function") {
  const Eigen::VectorXcd c = Eigen::VectorXcd::Constant(20, 2.5);
  CHECK((hardy_littlewood_max(c, true).array() - 2.5).abs().maxCoeff() < 1e-14);
  CHECK((hardy_littlewood_max(c, false).array() - 2.5).abs().maxCoeff() < 1e-14);

  Eigen::VectorXcd spike = Eigen::VectorXcd::Zero(30);
  spike(7) = 1.0;
  const Eigen::VectorXd m = hardy_littlewood_max(spike, true);
  for (int j = 0; j < 23; ++j) CHECK(std::abs(m(7 + j) - 1.0 / (j + 1)) < 1e-15);
  for (int j = 0; j < 7; ++j) CHECK(m(j) == 0.0);

  Rng rng(6);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXcd f = complex_gaussian_vector(rng, 200);
    worst = std::max(worst, hardy_littlewood_max(f, true).norm() / f.norm());
  }
  CHECK(worst < 4.0);
  CHECK(worst >= 1.0);
}

TEST_CASE("maximal transference") {
  const double h = 0.05;
  const SpectralDecomposition s(calculus::path_generator(4, 0.2));
  const MaximalTransferCheck d = maximal_transfer_check({TimeKernel::delta(h)}, s, 1.5, 1, 64);
  CHECK(std::abs(d.m_grid - 1.0) < 1e-9);
  CHECK(std::abs(d.m_semigroup - 1.0) < 1e-9);
  CHECK(d.ok);

  // Window averages reproduce the ergodic averages up to the midpoint rule.
  Rng rng(12);
  const SpectralDecomposition g(calculus::random_generator(rng, 5));
  const double hh = 1e-3;
  for (double t : {0.1, 0.5, 2.0}) {
    const Eigen::MatrixXcd a = transfer_operator(window_average(t, hh), g);
    const Eigen::MatrixXcd b = calculus::borel_calculus(g, [t](double x) { return calculus::ergodic_symbol(t, x); });
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-5);
  }

  for (int trial = 0; trial < 3; ++trial) {
    const SpectralDecomposition s6(calculus::random_generator(rng, 6));
    std::vector<TimeKernel> family;
    for (int i = 0; i < 4; ++i) family.push_back(random_bump(rng, h));
    const MaximalTransferCheck r = maximal_transfer_check(family, s6, 1.5, derive_seed(2, trial), 256);
    CHECK(r.ok);
    CHECK(r.m_grid <= r.m_upper + 1e-8);
    CHECK(r.m_semigroup <= r.m_upper + 1e-8);
  }
}

TEST_CASE("square function transference") {
  const double h = 0.05;
  Rng rng(13);
  const SpectralDecomposition s(calculus::random_generator(rng, 5));
  std::vector<Eigen::VectorXcd> samples;
  for (int i = 0; i < 50; ++i) samples.push_back(complex_gaussian_vector(rng, 5));

  // One kernel: the square function is the transferred operator itself.
  const TimeKernel k = random_bump(rng, h);
  const SquareTransferCheck one = square_transfer_check({k}, s, 1.5, samples, 1, 256);
  double direct = 0.0;
  const Eigen::MatrixXcd t = transfer_operator(k, s);
  for (const auto& f : samples) direct = std::max(direct, lp_mu(t * f, 1.5, s.mu()) / lp_mu(f, 1.5, s.mu()));
  CHECK(std::abs(one.lhs - direct) < 1e-12);
  CHECK(one.m_upper == doctest::Approx(convolver_upper(k, 1.5)));
  CHECK(one.ok);

  std::vector<TimeKernel> family;
  for (int i = 0; i < 3; ++i) family.push_back(random_bump(rng, h));
  for (double p : {1.5, 3.0}) {
    const SquareTransferCheck r = square_transfer_check(family, s, p, samples, 2, 256);
    CHECK(r.ok);
    CHECK(r.m_grid <= r.m_upper + 1e-8);
    CHECK(r.lhs <= r.bound);
  }
  // p = 2 lhs against the L^2(mu) Gram bound.
  const SquareTransferCheck r2 = square_transfer_check(family, s, 2.0, samples, 3, 128);
  Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(5, 5);
  const Eigen::VectorXd sq = s.mu().cwiseSqrt();
  for (const auto& kk : family) {
    const Eigen::MatrixXcd b = sq.asDiagonal() * transfer_operator(kk, s) * sq.cwiseInverse().asDiagonal();
    gram += b.adjoint() * b;
  }
  CHECK(r2.lhs <= std::sqrt(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(gram).eigenvalues().maxCoeff()) + 1e-12);
  (void)l2_mu_norm;
}
