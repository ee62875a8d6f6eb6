// Runs every acceptance criterion at its stated tolerance and prints one line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dilateron/core/lp.hpp"
#include "dilateron/io/suites.hpp"
#include "dilateron/random.hpp"

namespace {

using namespace dilateron;
using io::json;
using io::Report;

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Selection {
  std::size_t count = 0;
  std::size_t failures = 0;
  double worst_lhs = -std::numeric_limits<double>::infinity();
  double worst_slack = std::numeric_limits<double>::infinity();  // min of rhs + tol - lhs
};

Selection select(const Report& r, const std::string& needle) {
  Selection s;
  for (const auto& rec : r.records) {
    if (rec.name.find(needle) == std::string::npos || rec.verdict == "info") continue;
    ++s.count;
    if (rec.verdict != "pass") ++s.failures;
    s.worst_lhs = std::max(s.worst_lhs, rec.lhs);
    const double slack =
        rec.relation == "==" ? rec.tolerance - std::abs(rec.lhs - rec.rhs) : rec.rhs + rec.tolerance - rec.lhs;
    s.worst_slack = std::min(s.worst_slack, slack);
  }
  return s;
}

std::string describe(const std::string& what, const Selection& s) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s: %zu checks, %zu failed, min slack %.3e", what.c_str(), s.count,
                s.failures, s.worst_slack);
  return buf;
}

bool ok(const Selection& s, std::size_t expected) { return s.count == expected && s.failures == 0; }

Report run(const std::string& suite, json cfg, std::uint64_t seed) {
  io::RunOptions o;
  o.seed = seed;
  return io::run_suite(suite, cfg, o);
}

json numeric_content(const Report& r) {
  json j = r.to_json();
  j.erase("timing");
  return j;
}

constexpr std::uint64_t kSeed = 20240601;

json dilation_config(bool signed_case) {
  return {{"depth", 8},
          {"trials", 20},
          {"functions", 100},
          {"random", {{"count", 50}, {"n_min", 2}, {"n_max", 8}, {"ps", {1.0, 1.5, 2.0, 3.0}}, {"signed", signed_case}}}};
}

Outcome dilation_identity(const Report& r, double limit_seconds) {
  const Selection s = select(r, "max |P S^k D a - D T^k a|");
  char buf[128];
  std::snprintf(buf, sizeof buf, ", max error %.3e, %.1f s", s.worst_lhs, r.seconds);
  return {ok(s, 200) && s.worst_lhs < 1e-10 && r.seconds < limit_seconds, describe("identity", s) + buf};
}

Outcome criterion_structure(const Report& pos, const Report& sgn) {
  Selection all;
  std::size_t expected = 0;
  for (const Report* r : {&pos, &sgn}) {
    for (const char* key : {"column sums of xi", "row sums of eta", "S isometry", "S positivity"}) {
      const Selection s = select(*r, key);
      all.count += s.count;
      all.failures += s.failures;
      all.worst_slack = std::min(all.worst_slack, s.worst_slack);
    }
    expected += 200 * 3;
  }
  // S positivity applies to the positive geometries only.
  expected += 200;
  return {ok(all, expected), describe("structure", all)};
}

Outcome criterion_norm_oracle() {
  Rng rng(derive_seed(kSeed, 4));
  double svd_err = 0.0;
  double l1_err = 0.0;
  double linf_err = 0.0;
  double residual = 0.0;
  for (int t = 0; t < 200; ++t) {
    const int rows = uniform_int(rng, 1, 8);
    const int cols = uniform_int(rng, 1, 8);
    Eigen::MatrixXd a(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) a(i, j) = uniform(rng) < 0.25 ? 0.0 : uniform(rng, 0.0, 2.0);
    lp::PowerOptions po;
    po.seed = derive_seed(kSeed, 1000 + t);
    const double sv = Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues()(0);
    svd_err = std::max(svd_err, std::abs(lp::positive_norm(a, 2.0, po).value - sv) / std::max(1.0, sv));
    const double col = a.colwise().sum().maxCoeff();
    l1_err = std::max(l1_err, std::abs(lp::positive_norm(a, 1.0, po).value - col) / std::max(1.0, col));
    const double row = a.rowwise().sum().maxCoeff();
    const Eigen::MatrixXd at = a.transpose();
    linf_err = std::max(linf_err, std::abs(lp::positive_norm(at, 1.0, po).value - row) / std::max(1.0, row));

    const int n = uniform_int(rng, 1, 8);
    const double p = std::vector<double>{1.25, 1.5, 2.0, 3.0, 5.0}[t % 5];
    const Eigen::MatrixXd s = lp::random_substochastic(rng, n, t % 2 ? 0.5 : 0.0);
    const lp::ExtremalVector e = lp::extremal_vector(lp::PositiveOperator(lp::WeightedLpSpace::unit(n, p), s));
    residual = std::max(residual, (lp::M_map(s, e.u, p) - lp::star_map(e.u, p)).maxCoeff());
  }
  char buf[256];
  std::snprintf(buf, sizeof buf, "p=2 vs SVD %.2e, p=1 %.2e, p=inf dual %.2e, extremal residual %.2e", svd_err,
                l1_err, linf_err, residual);
  return {svd_err <= 1e-8 && l1_err <= 1e-12 && linf_err <= 1e-12 && residual <= 1e-8, buf};
}

Outcome criterion_complexification() {
  Rng rng(derive_seed(kSeed, 5));
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const int n = uniform_int(rng, 2, 5);
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = gaussian(rng);
    for (double p : {1.5, 3.0}) {
      const auto r = lp::complexification_check(a, lp::WeightedLpSpace::unit(n, p), derive_seed(kSeed, 2000 + t));
      worst = std::max(worst, std::abs(r.real_norm_estimate - r.complex_norm_estimate));
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "max |real - complex| = %.2e over 40 estimates", worst);
  return {worst <= 1e-6, buf};
}

Outcome criterion_spectral() {
  Selection norms;
  Selection group;
  for (int g = 0; g < 10; ++g) {
    const Report r = run("powers", {{"ps", {2.0}}}, derive_seed(kSeed, 600 + g));
    for (auto [target, key] : {std::pair{&norms, "L2(mu) norm"}, std::pair{&group, "group law"}}) {
      const Selection s = select(r, key);
      target->count += s.count;
      target->failures += s.failures;
      target->worst_slack = std::min(target->worst_slack, s.worst_slack);
    }
  }
  return {ok(norms, 130) && ok(group, 120), describe("norms", norms) + "; " + describe("group law", group)};
}

}  // namespace

int main() {
  struct Line {
    int id;
    std::string title;
    Outcome outcome;
  };
  std::vector<Line> lines;
  std::vector<std::pair<std::string, std::pair<json, Report>>> reruns;
  auto record = [&](int id, const std::string& title, const std::function<Outcome()>& f) {
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s [%2d] %s: %s\n", o.passed ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str());
    std::fflush(stdout);
    lines.push_back({id, title, o});
  };
  auto suite = [&](const std::string& name, const json& cfg) {
    Report r = run(name, cfg, kSeed);
    reruns.push_back({name, {cfg, r}});
    return r;
  };

  Report positive;
  Report signed_rep;
  record(1, "positive dilation identity", [&] {
    positive = suite("dilation-verify", dilation_config(false));
    return dilation_identity(positive, 60.0);
  });
  record(2, "sub-positive dilation identity", [&] {
    signed_rep = suite("dilation-verify", dilation_config(true));
    return dilation_identity(signed_rep, std::numeric_limits<double>::infinity());
  });
  record(3, "dilation structure invariants", [&] { return criterion_structure(positive, signed_rep); });
  record(4, "norm oracle", criterion_norm_oracle);
  record(5, "complexification", criterion_complexification);
  record(6, "spectral exactness of imaginary powers", criterion_spectral);

  Report transfer;
  record(7, "transference", [&] {
    transfer = suite("transfer", {{"trials", 100}, {"pairs", 50}});
    const Selection a = select(transfer, "transferred <= convolver");
    const Selection b = select(transfer, "half-plane");
    return Outcome{ok(a, 100) && ok(b, 100), describe("bound", a) + "; " + describe("half-plane", b)};
  });
  record(8, "convolution homomorphism", [&] {
    const Selection s = select(transfer, "homomorphism");
    return Outcome{ok(s, 50), describe("pairs", s)};
  });

  Report khin;
  record(9, "Khinchin machinery", [&] {
    khin = suite("khinchin", {{"projection_trials", 500}, {"projection_ps", {1.5, 4.0}}});
    const Selection c2 = select(khin, "_2 p=2");
    const Selection row = select(khin, "row matrix = square function at p=2");
    const Selection proj = select(khin, "projection ratio");
    return Outcome{ok(c2, 2) && row.count > 0 && row.failures == 0 && ok(proj, 2),
                   describe("c2/C2", c2) + "; " + describe("row sandwich", row) + "; " + describe("projection", proj)};
  });
  record(10, "symmetric sandwich at p=2", [&] {
    const Selection s = select(khin, "diagonal family");
    return Outcome{s.count > 0 && s.failures == 0, describe("families", s)};
  });
  record(11, "maximal transference", [&] {
    const Report r = suite("maximal", {{"trials", 100}});
    const Selection a = select(r, "semigroup constant <= grid constant");
    const Selection b = select(r, "conservative constant function");
    return Outcome{ok(a, 100) && b.count > 0 && b.failures == 0,
                   describe("maximal", a) + "; " + describe("constant f", b)};
  });
  record(12, "Mellin identities", [&] {
    const Report r = suite("mellin", json::object());
    const Selection a = select(r, "difference");
    const Selection b = select(r, "refinement");
    return Outcome{ok(a, 54) && b.count > 0 && b.failures == 0,
                   describe("residuals", a) + "; " + describe("refinement", b)};
  });
  record(13, "complex Gamma", [&] {
    const Report r = suite("gamma", json::object());
    const Selection a = select(r, "relative error");
    const Selection b = select(r, "|Gamma(i)|");
    return Outcome{ok(a, 2) && ok(b, 1), describe("invariants", a) + "; " + describe("|Gamma(i)|", b)};
  });
  record(14, "von Neumann inequality", [&] {
    const Report r = suite("vn", {{"trials", 200}});
    const Selection s = select(r, "trial");
    return Outcome{ok(s, 200), describe("pairs", s)};
  });
  record(15, "Mihlin constants under the Cauchy bound", [&] {
    const Report r = suite("mihlin", json::object());
    const Selection s = select(r, "<= M / sin(theta - psi)");
    return Outcome{ok(s, 14), describe("constants", s)};
  });
  record(16, "determinism", [&] {
    for (const std::string& name : io::suite_names()) {
      const bool seen = std::any_of(reruns.begin(), reruns.end(), [&](const auto& r) { return r.first == name; });
      if (!seen) suite(name, json::object());
    }
    std::string mismatched;
    for (const auto& [name, run_pair] : reruns) {
      const Report again = run(name, run_pair.first, kSeed);
      if (numeric_content(again) != numeric_content(run_pair.second)) mismatched += " " + name;
    }
    const std::string count = std::to_string(reruns.size()) + " suite runs replayed";
    return Outcome{mismatched.empty(), mismatched.empty() ? count : count + ", differing:" + mismatched};
  });

  const auto failed = std::count_if(lines.begin(), lines.end(), [](const Line& l) { return !l.outcome.passed; });
  std::printf("%zu/%zu criteria passed\n", lines.size() - static_cast<std::size_t>(failed), lines.size());
  return failed == 0 ? 0 : 1;
}
