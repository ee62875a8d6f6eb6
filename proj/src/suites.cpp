#include "dilateron/io/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "dilateron/calculus/calculus.hpp"
#include "dilateron/core/lp.hpp"
#include "dilateron/dilation/dilation.hpp"
#include "dilateron/error.hpp"
#include "dilateron/multiplier/multiplier.hpp"
#include "dilateron/random.hpp"
#include "dilateron/transference/khinchin.hpp"
#include "dilateron/transference/transfer.hpp"

namespace dilateron::io {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr const char* kLibrary = "dilateron 0.1.0";

using calculus::SpectralDecomposition;
using calculus::SubmarkovianGenerator;
using transference::TimeKernel;

struct Context {
  json config;
  std::uint64_t seed = 0;
  std::optional<double> tol;
  std::string base_dir;

  double tolerance(double fallback) const { return tol.value_or(fallback); }

  template <class T>
  T get(const char* key, T fallback) const {
    return config.contains(key) ? config.at(key).get<T>() : fallback;
  }

  std::vector<double> list(const char* key, std::vector<double> fallback) const {
    if (!config.contains(key)) return fallback;
    const json& v = config.at(key);
    if (v.is_number()) return {v.get<double>()};
    return v.get<std::vector<double>>();
  }

  bool has(const char* key) const { return config.contains(key); }

  std::string path(const std::string& p) const {
    std::filesystem::path fp(p);
    if (fp.is_relative() && !base_dir.empty()) fp = std::filesystem::path(base_dir) / fp;
    return fp.string();
  }

  // Inline document under `key` or a file under `key_file`.
  std::optional<json> document(const std::string& key) const {
    if (config.contains(key)) return config.at(key);
    const std::string file = key + "_file";
    if (config.contains(file)) return read_json_file(path(config.at(file).get<std::string>()));
    return std::nullopt;
  }

  std::vector<json> documents(const std::string& key) const {
    std::vector<json> out;
    if (config.contains(key)) {
      for (const auto& d : config.at(key)) out.push_back(d);
    }
    const std::string files = key + "_files";
    if (config.contains(files)) {
      for (const auto& f : config.at(files)) out.push_back(read_json_file(path(f.get<std::string>())));
    }
    return out;
  }
};

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

void require_valid(const SubmarkovianGenerator& g, bool allow_conservative) {
  calculus::ValidateOptions vo;
  vo.allow_conservative = allow_conservative;
  const calculus::ValidationReport r = calculus::validate(g, vo);
  if (r.valid()) return;
  std::string failed;
  for (const auto& c : r.checks) {
    if (!c.passed) failed += (failed.empty() ? "" : ", ") + c.name;
  }
  throw DomainError("generator failed validation: " + failed);
}

SubmarkovianGenerator make_conservative(SubmarkovianGenerator g) {
  for (int i = 0; i < g.n(); ++i) g.A(i, i) -= g.A.row(i).sum();
  return g;
}

// Generator from the config, or a random one drawn from `rng`.
SubmarkovianGenerator generator_from(const Context& ctx, Rng& rng, int default_n, bool conservative) {
  if (auto doc = ctx.document("generator")) return parse_generator(*doc);
  const int n = ctx.get("n", default_n);
  SubmarkovianGenerator g = calculus::random_generator(rng, n);
  return conservative ? make_conservative(g) : g;
}

json geometry_summary(const dilation::DilationGeometry& g, const dilation::VerifyReport& r) {
  json cells = json::array();
  for (auto c : r.block0_cells) cells.push_back(c);
  return {{"n", g.n()},
          {"p", g.p()},
          {"depth", g.depth()},
          {"u", vector_json(g.u())},
          {"v", vector_json(g.v())},
          {"xi", matrix_json(g.xi())},
          {"eta", matrix_json(g.eta())},
          {"rho", matrix_json(g.rho())},
          {"height_rescale", g.height_rescale()},
          {"block0_cells", cells},
          {"per_k_errors", r.per_k_errors},
          {"engine", r.engine == dilation::Engine::kCells ? "cells" : "orbit"}};
}

dilation::Engine parse_engine(const std::string& e) {
  if (e == "auto") return dilation::Engine::kAuto;
  if (e == "cells") return dilation::Engine::kCells;
  if (e == "orbit") return dilation::Engine::kOrbit;
  throw InputError("engine must be auto, cells or orbit");
}

// Structure invariants plus the identity for one geometry.
void verify_geometry(Report& rep, const std::string& tag, const dilation::DilationGeometry& g,
                     const dilation::VerifyOptions& vo, int functions, double tol, Rng& rng) {
  const dilation::VerifyReport r = dilation::verify_dilation(g, vo);
  rep.check_le(tag + " max |P S^k D a - D T^k a|", r.max_error, 0.0, tol);
  rep.check_le(tag + " column sums of xi", g.xi_column_defect(), 0.0, 1e-12);
  rep.check_le(tag + " row sums of eta", g.eta_row_excess(), 0.0, 1e-12);
  rep.check_le(tag + " rho root identity", g.rho_identity_defect(), 0.0, 1e-12);
  double iso = 0.0;
  double neg = 0.0;
  for (int k = 0; k < functions; ++k) {
    const auto f = dilation::random_partition_function(g, rng, g.positive());
    const auto sf = dilation::apply_S(g, f);
    const double nf = f.norm(g.p());
    iso = std::max(iso, std::abs(sf.norm(g.p()) - nf) / std::max(1.0, nf));
    if (g.positive()) {
      for (const auto& v : sf.values) neg = std::max(neg, std::max(-v.real(), std::abs(v.imag())));
    }
  }
  if (functions > 0) {
    rep.check_le(tag + " S isometry", iso, 0.0, 1e-12);
    if (g.positive()) rep.check_le(tag + " S positivity", neg, 0.0, 1e-12);
  }
}

Report suite_dilation(const Context& ctx) {
  Report rep;
  const int depth = ctx.get("depth", 8);
  const int functions = ctx.get("functions", 100);
  const double tol = ctx.tolerance(1e-10);
  dilation::VerifyOptions vo;
  vo.trials = ctx.get("trials", 20);
  vo.engine = parse_engine(ctx.get<std::string>("engine", "auto"));

  if (auto doc = ctx.document("matrix")) {
    const MatrixDocument m = parse_matrix(*doc);
    const double p = ctx.get("p", m.p);
    const lp::WeightedLpSpace space(p, m.weights);
    vo.seed = derive_seed(ctx.seed, 0);
    const dilation::DilationGeometry g =
        m.is_signed() ? dilation::build_dilation(lp::SignedOperator(space, m.entries), depth)
                      : dilation::build_dilation(lp::PositiveOperator(space, m.entries.real()), depth);
    Rng rng(derive_seed(ctx.seed, 1));
    verify_geometry(rep, "input", g, vo, functions, tol, rng);
    rep.tables["geometry"] = geometry_summary(g, dilation::verify_dilation(g, vo));
    return rep;
  }

  const json rnd = ctx.config.value("random", json::object());
  const int count = rnd.value("count", 50);
  const int n_min = rnd.value("n_min", 2);
  const int n_max = rnd.value("n_max", 8);
  const bool signed_case = rnd.value("signed", false);
  const double zero_prob = rnd.value("zero_prob", 0.3);
  const std::vector<double> ps = rnd.value("ps", std::vector<double>{1.0, 1.5, 2.0, 3.0});
  if (n_min < 1 || n_max < n_min) throw InputError("need 1 <= n_min <= n_max");
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    Rng rng(derive_seed(ctx.seed, static_cast<std::uint64_t>(i)));
    const int n = uniform_int(rng, n_min, n_max);
    const Eigen::MatrixXcd t = signed_case ? lp::random_complex_substochastic(rng, n, zero_prob)
                                           : Eigen::MatrixXcd(lp::random_substochastic(rng, n, zero_prob).cast<cplx>());
    for (double p : ps) {
      const lp::WeightedLpSpace space = lp::WeightedLpSpace::unit(n, p);
      const dilation::DilationGeometry g =
          signed_case ? dilation::build_dilation(lp::SignedOperator(space, t), depth)
                      : dilation::build_dilation(lp::PositiveOperator(space, t.real()), depth);
      vo.seed = derive_seed(rng(), 2);
      const std::size_t before = rep.records.size();
      verify_geometry(rep, "matrix " + std::to_string(i) + " n=" + std::to_string(n) + " p=" + fmt(p), g, vo,
                      functions, tol, rng);
      worst = std::max(worst, rep.records[before].lhs);
    }
  }
  rep.tables["summary"] = {{"matrices", count}, {"ps", ps}, {"worst_identity_error", worst}};
  return rep;
}

Report suite_powers(const Context& ctx) {
  Report rep;
  Rng rng(derive_seed(ctx.seed, 0));
  const SubmarkovianGenerator gen = generator_from(ctx, rng, 5, false);
  require_valid(gen, false);
  const SpectralDecomposition s(gen);
  std::vector<double> gammas;
  if (ctx.has("gammas")) {
    gammas = ctx.list("gammas", {});
  } else {
    const int gmax = static_cast<int>(ctx.get("gamma_max", 6.0));
    for (int g = -gmax; g <= gmax; ++g) gammas.push_back(g);
  }
  const std::vector<double> ps = ctx.list("ps", {1.25, 1.5, 2.0, 3.0, 4.0});
  const int starts = ctx.get("starts", 16);
  const double tol = ctx.tolerance(1e-10);

  for (double g : gammas) {
    const Eigen::MatrixXcd m = calculus::imaginary_power(s, g);
    rep.check_eq("L2(mu) norm of (-A)^{i" + fmt(g) + "}", calculus::norm2_mu(m, s.mu()), 1.0, tol);
  }
  for (std::size_t k = 0; k + 1 < gammas.size(); ++k) {
    const double a = gammas[k];
    const double b = gammas[k + 1];
    const Eigen::MatrixXcd lhs = calculus::imaginary_power(s, a) * calculus::imaginary_power(s, b);
    const double diff = (lhs - calculus::imaginary_power(s, a + b)).cwiseAbs().maxCoeff();
    rep.check_le("group law " + fmt(a) + " + " + fmt(b), diff, 0.0, tol);
  }
  json rows = json::array();
  for (const auto& r : calculus::cowling_bound_scan(s, gammas, ps, derive_seed(ctx.seed, 1), starts)) {
    const std::string tag = "gamma=" + fmt(r.gamma) + " p=" + fmt(r.p);
    rep.check_le("lower <= upper " + tag, r.lower, r.upper, 1e-8);
    if (r.gamma == 0.0) rep.check_eq("identity norm " + tag, r.lower, 1.0, 1e-8);
    rows.push_back({{"gamma", r.gamma}, {"p", r.p}, {"lower", r.lower}, {"upper", r.upper},
                    {"reference", r.reference}, {"ratio", r.ratio}});
  }
  rep.tables["norms"] = rows;
  rep.tables["generator"] = to_json(gen);
  return rep;
}

Report suite_cone(const Context& ctx) {
  Report rep;
  Rng rng(derive_seed(ctx.seed, 0));
  const SubmarkovianGenerator gen = generator_from(ctx, rng, 5, false);
  require_valid(gen, false);
  const SpectralDecomposition s(gen);
  const double p = ctx.get("p", 1.5);
  std::vector<double> angles = ctx.list("angles", {});
  if (angles.empty()) {
    for (int k = 0; k <= 12; ++k) angles.push_back(kPi / 2.0 * k / 12.0);
  }
  const std::vector<double> radii = ctx.list("radii", {0.25, 1.0, 4.0});
  const calculus::ConeScan scan =
      calculus::cone_contractivity_scan(s, p, angles, radii, derive_seed(ctx.seed, 1), ctx.get("starts", 16));
  const double tol = ctx.tolerance(1e-8);
  std::map<double, double> worst;
  json rows = json::array();
  for (const auto& r : scan.rows) {
    worst[r.psi] = std::max(worst[r.psi], r.lower);
    rows.push_back({{"psi", r.psi}, {"radius", r.radius}, {"lower", r.lower}, {"upper", r.upper}});
  }
  for (const auto& [psi, lower] : worst) {
    const std::string name = "max_r |T_{r e^{i psi}}|_p at psi=" + fmt(psi);
    if (psi <= scan.stein_angle + 1e-12) {
      rep.check_le(name, lower, 1.0, tol);
    } else {
      rep.info(name, lower, 1.0);
    }
  }
  rep.tables["scan"] = rows;
  rep.tables["angles"] = {{"empirical", scan.empirical_angle}, {"stein", scan.stein_angle}, {"lp", scan.lp_angle}};
  return rep;
}

std::vector<double> default_times() {
  std::vector<double> t;
  for (int k = 0; k <= 30; ++k) t.push_back(std::pow(10.0, -3.0 + 6.0 * k / 30.0));
  return t;
}

Report suite_ergodic(const Context& ctx) {
  Report rep;
  Rng rng(derive_seed(ctx.seed, 0));
  const bool conservative = ctx.get("conservative", false);
  const SubmarkovianGenerator gen = generator_from(ctx, rng, 5, conservative);
  require_valid(gen, conservative);
  const SpectralDecomposition s(gen, conservative);
  const double p = ctx.get("p", 1.5);
  const std::vector<double> times = ctx.list("t_grid", default_times());
  const int trials = ctx.get("trials", 20);
  for (int k = 0; k < trials; ++k) {
    Rng r(derive_seed(ctx.seed, 10 + static_cast<std::uint64_t>(k)));
    const Eigen::VectorXcd f = complex_gaussian_vector(r, s.n());
    rep.info("maximal ratio sample " + std::to_string(k), calculus::ergodic_maximal(s, f, p, times).ratio, 1.0,
             ">=");
  }
  if (conservative) {
    const Eigen::VectorXcd one = Eigen::VectorXcd::Constant(s.n(), 2.0);
    rep.check_eq("constant function ratio", calculus::ergodic_maximal(s, one, p, times).ratio, 1.0,
                 ctx.tolerance(1e-12));
  }
  return rep;
}

Report suite_vn(const Context& ctx) {
  Report rep;
  const double tol = ctx.tolerance(1e-9);
  if (auto doc = ctx.document("matrix")) {
    const MatrixDocument m = parse_matrix(*doc);
    Eigen::VectorXcd coeffs;
    if (ctx.has("coeffs")) {
      const json& c = ctx.config.at("coeffs");
      coeffs.resize(static_cast<Eigen::Index>(c.size()));
      for (std::size_t i = 0; i < c.size(); ++i) coeffs(static_cast<Eigen::Index>(i)) = parse_scalar(c[i]);
    } else {
      coeffs = Eigen::Vector2cd(0.0, 1.0);
    }
    const calculus::VonNeumannResult r = calculus::von_neumann_check(m.entries, coeffs);
    rep.check_le("|p(T)| <= sup |p|", r.lhs, r.rhs, tol);
    rep.info("grid maximum <= certified supremum", r.rhs_grid, r.rhs_certified);
    return rep;
  }
  const int trials = ctx.get("trials", 200);
  const int n_max = ctx.get("n_max", 6);
  const int degree_max = ctx.get("degree_max", 8);
  for (int k = 0; k < trials; ++k) {
    Rng rng(derive_seed(ctx.seed, static_cast<std::uint64_t>(k)));
    const int n = uniform_int(rng, 1, n_max);
    const Eigen::MatrixXcd t = calculus::random_contraction(rng, n);
    const Eigen::VectorXcd c = complex_gaussian_vector(rng, uniform_int(rng, 1, degree_max) + 1);
    const calculus::VonNeumannResult r = calculus::von_neumann_check(t, c);
    rep.check_le("trial " + std::to_string(k), r.lhs, r.rhs, tol);
  }
  return rep;
}

Report suite_transfer(const Context& ctx) {
  Report rep;
  const double tol = ctx.tolerance(1e-8);
  const int window = ctx.get("window", 0);
  const int starts = ctx.get("starts", 16);
  auto one = [&](const std::string& tag, const TimeKernel& k, const SpectralDecomposition& s, double p,
                 std::uint64_t seed) {
    const transference::TransferenceCheck c = transference::transference_check(k, s, p, seed, starts);
    rep.check_le(tag + " transferred <= convolver", c.transferred_lower, c.convolver_upper, tol);
    rep.check_le(tag + " half-plane |Lk(-lambda)| <= sup |k^|", c.half_plane_lhs, c.half_plane_rhs, 1e-12);
    if (window > 0) {
      const double lower = transference::convolver_lower(k, p, window, seed, 4).value;
      rep.check_le(tag + " convolver lower <= upper", lower, c.convolver_upper, 1e-8);
    }
  };

  if (auto kdoc = ctx.document("kernel")) {
    Rng rng(derive_seed(ctx.seed, 0));
    const SubmarkovianGenerator gen = generator_from(ctx, rng, 5, false);
    require_valid(gen, false);
    const SpectralDecomposition s(gen);
    const TimeKernel k = parse_kernel(*kdoc);
    for (double p : ctx.list("ps", {ctx.get("p", 1.5)})) one("p=" + fmt(p), k, s, p, derive_seed(ctx.seed, 1));
    return rep;
  }

  const int trials = ctx.get("trials", 100);
  const double h = ctx.get("h", 0.05);
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(ctx.seed, static_cast<std::uint64_t>(t)));
    const SpectralDecomposition s(calculus::random_generator(rng, uniform_int(rng, 2, 6)));
    const TimeKernel k = transference::random_causal_kernel(rng, h, t);
    const double p = uniform(rng, 1.1, 4.0);
    one("trial " + std::to_string(t) + " p=" + fmt(p), k, s, p, derive_seed(rng(), 1));
  }
  const int pairs = ctx.get("pairs", 50);
  for (int t = 0; t < pairs; ++t) {
    Rng rng(derive_seed(ctx.seed, 100000 + static_cast<std::uint64_t>(t)));
    const SpectralDecomposition s(calculus::random_generator(rng, uniform_int(rng, 2, 6)));
    const TimeKernel a = transference::random_causal_kernel(rng, h, t);
    const TimeKernel b = transference::random_causal_kernel(rng, h, t + 1);
    const Eigen::MatrixXcd lhs = transference::transfer_operator(transference::convolve(a, b), s);
    const Eigen::MatrixXcd rhs = transference::transfer_operator(a, s) * transference::transfer_operator(b, s);
    rep.check_le("homomorphism pair " + std::to_string(t), (lhs - rhs).cwiseAbs().maxCoeff(), 0.0, 1e-6);
  }
  return rep;
}

std::vector<TimeKernel> kernel_family(const Context& ctx, Rng& rng, int default_count, double h) {
  std::vector<TimeKernel> family;
  for (const auto& d : ctx.documents("kernels")) family.push_back(parse_kernel(d));
  if (auto d = ctx.document("kernel")) family.push_back(parse_kernel(*d));
  if (!family.empty()) return family;
  const int count = ctx.get("kernels", default_count);
  for (int i = 0; i < count; ++i) family.push_back(transference::gaussian_bump(uniform(rng, 0.2, 2.0), uniform(rng, 0.1, 0.5), h));
  return family;
}

Report suite_square(const Context& ctx) {
  Report rep;
  const int trials = ctx.get("trials", 1);
  const double p = ctx.get("p", 1.5);
  const int samples = ctx.get("samples", 50);
  const int window = ctx.get("window", 256);
  const double h = ctx.get("h", 0.05);
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(ctx.seed, static_cast<std::uint64_t>(t)));
    const SubmarkovianGenerator gen = generator_from(ctx, rng, 5, false);
    require_valid(gen, false);
    const SpectralDecomposition s(gen);
    const std::vector<TimeKernel> family = kernel_family(ctx, rng, 3, h);
    std::vector<Eigen::VectorXcd> fs;
    for (int i = 0; i < samples; ++i) fs.push_back(complex_gaussian_vector(rng, s.n()));
    const transference::SquareTransferCheck c =
        transference::square_transfer_check(family, s, p, fs, derive_seed(rng(), 1), window);
    const std::string tag = "trial " + std::to_string(t);
    rep.check_le(tag + " square function <= M C_p / c_p", c.lhs, c.bound, ctx.tolerance(1e-9));
    rep.check_le(tag + " grid constant <= rigorous upper", c.m_grid, c.m_upper, 1e-8);
    rep.info(tag + " square function vs grid constant", c.lhs, c.m_grid * c.khinchin_factor);
  }
  return rep;
}

Report suite_maximal(const Context& ctx) {
  Report rep;
  const int trials = ctx.get("trials", 100);
  const double p = ctx.get("p", 1.5);
  const int window = ctx.get("window", 128);
  const int starts = ctx.get("starts", 2);
  const double h = ctx.get("h", 0.05);
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(ctx.seed, static_cast<std::uint64_t>(t)));
    const SubmarkovianGenerator gen = generator_from(ctx, rng, 6, false);
    require_valid(gen, false);
    const SpectralDecomposition s(gen);
    const std::vector<TimeKernel> family = kernel_family(ctx, rng, 4, h);
    const transference::MaximalTransferCheck c =
        transference::maximal_transfer_check(family, s, p, derive_seed(rng(), 1), window, starts);
    const std::string tag = "trial " + std::to_string(t);
    rep.check_le(tag + " semigroup constant <= grid constant", c.m_semigroup, c.m_grid, ctx.tolerance(1e-6));
    rep.check_le(tag + " grid constant <= rigorous upper", c.m_grid, c.m_upper, 1e-8);
  }
  const int ergodic = ctx.get("ergodic_checks", 5);
  for (int t = 0; t < ergodic; ++t) {
    Rng rng(derive_seed(ctx.seed, 500000 + static_cast<std::uint64_t>(t)));
    const SubmarkovianGenerator gen = make_conservative(calculus::random_generator(rng, uniform_int(rng, 2, 6)));
    const SpectralDecomposition s(gen, true);
    const Eigen::VectorXcd f = Eigen::VectorXcd::Constant(s.n(), uniform(rng, 0.1, 3.0));
    rep.check_eq("conservative constant function " + std::to_string(t),
                 calculus::ergodic_maximal(s, f, p, default_times()).ratio, 1.0, 1e-12);
  }
  return rep;
}

Report suite_mellin(const Context& ctx) {
  Report rep;
  const double tol = ctx.tolerance(1e-6);
  const int steps = ctx.get("steps", 4000);
  for (double t : ctx.list("ts", {0.5, 1.0, 2.0})) {
    for (double th : ctx.list("thetas", {kPi / 6, kPi / 4, kPi / 3})) {
      for (double x : ctx.list("xs", {-0.5, -1.0, -2.0})) {
        const std::string tag = "t=" + fmt(t) + " theta=" + fmt(th) + " x=" + fmt(x);
        const auto a = multiplier::mellin_identity_residual(t, th, x, 0.0, steps);
        const auto b = multiplier::mellin_average_residual(t, th, x, 0.0, steps);
        rep.check_le("semigroup difference " + tag, a.residual, 0.0, tol);
        rep.check_le("ergodic average difference " + tag, b.residual, 0.0, tol);
        rep.info("majorant constant " + tag, a.majorant_constant, b.majorant_constant);
      }
    }
  }
  // Refinement: each halving gains a factor 3 until the residual reaches the floor.
  const double floor = ctx.get("floor", 1e-10);
  for (int which = 0; which < 2; ++which) {
    double prev = -1.0;
    for (int s = 50; s <= 3200; s *= 2) {
      const double r = which == 0 ? multiplier::mellin_identity_residual(1.0, kPi / 4, -1.0, 0.0, s).residual
                                  : multiplier::mellin_average_residual(2.0, kPi / 3, -0.5, 0.0, s).residual;
      if (prev > floor) {
        rep.check_le(std::string(which == 0 ? "semigroup" : "average") + " refinement to " + std::to_string(s) +
                         " panels",
                     3.0 * r, prev, 0.0);
      }
      prev = r;
    }
  }
  return rep;
}

Report suite_gamma(const Context& ctx) {
  Report rep;
  using multiplier::complex_gamma;
  const double tol = ctx.tolerance(1e-11);
  const int points = ctx.get("points", 1000);
  double rec = 0.0;
  double refl = 0.0;
  Rng rng(derive_seed(ctx.seed, 0));
  for (int k = 0; k < points; ++k) {
    const cplx z(uniform(rng, -10.0, 10.0), uniform(rng, -30.0, 30.0));
    const cplx g = complex_gamma(z);
    rec = std::max(rec, std::abs(complex_gamma(z + 1.0) - z * g) / std::abs(z * g));
    const cplx r = kPi / std::sin(kPi * z);
    refl = std::max(refl, std::abs(g * complex_gamma(1.0 - z) - r) / std::abs(r));
  }
  rep.check_le("recurrence relative error", rec, 0.0, tol);
  rep.check_le("reflection relative error", refl, 0.0, tol);
  rep.check_eq("|Gamma(i)|", std::abs(complex_gamma(cplx(0.0, 1.0))), std::sqrt(kPi / std::sinh(kPi)), 1e-10);
  rep.check_eq("Gamma(1)", complex_gamma(1.0).real(), 1.0, 1e-13);
  rep.check_eq("Gamma(5)", complex_gamma(5.0).real(), 24.0, 1e-12);
  rep.check_eq("Gamma(1/2)", complex_gamma(0.5).real(), std::sqrt(kPi), 1e-13);
  return rep;
}

multiplier::ConeSymbol symbol_from(const json& d) {
  const std::string kind = d.at("kind").get<std::string>();
  const double theta = d.value("theta", kPi / 2);
  if (kind == "constant") return multiplier::constant_symbol(theta);
  if (kind == "power") return multiplier::power_symbol(d.at("gamma").get<double>(), theta);
  if (kind == "exp") return multiplier::exp_symbol(theta);
  if (kind == "resolvent") return multiplier::resolvent_symbol(theta);
  throw InputError("unknown symbol kind '" + kind + "'");
}

Report suite_mihlin(const Context& ctx) {
  Report rep;
  json symbols = ctx.config.value("symbols", json::array());
  if (symbols.empty()) {
    symbols.push_back({{"kind", "constant"}, {"theta", kPi / 2}});
    for (double g : {-3.0, -1.0, 1.0, 3.0}) symbols.push_back({{"kind", "power"}, {"gamma", g}, {"theta", kPi / 2}});
    symbols.push_back({{"kind", "exp"}, {"theta", kPi / 3}});
    symbols.push_back({{"kind", "resolvent"}, {"theta", kPi / 2}});
  }
  const double frac = ctx.get("psi_fraction", 0.5);
  const double tol = ctx.tolerance(1e-6);
  json rows = json::array();
  for (const auto& d : symbols) {
    const multiplier::ConeSymbol m = symbol_from(d);
    const double psi = d.value("psi", frac * m.theta);
    const multiplier::MihlinReport r = multiplier::mihlin_constants(multiplier::boundary_restriction(m, psi));
    const double bound = multiplier::cauchy_cone_bound(m.sup_bound, m.theta, psi);
    const std::string tag = d.dump();
    rep.check_le("sampled sup <= M " + tag, multiplier::sampled_sup(m.m, m.theta), m.sup_bound, 1e-9);
    rep.check_le("C0 <= M / sin(theta - psi) " + tag, r.C0, bound, tol);
    rep.check_le("C1 <= M / sin(theta - psi) " + tag, r.C1, bound, tol);
    rows.push_back({{"symbol", d}, {"psi", psi}, {"C0", r.C0}, {"C1", r.C1}, {"bound", bound}, {"M", m.sup_bound}});
  }
  rep.tables["constants"] = rows;
  return rep;
}

Report suite_khinchin(const Context& ctx) {
  Report rep;
  const int n = ctx.get("n", 10);
  const int trials = ctx.get("trials", 200);
  for (double p : ctx.list("ps", {1.5, 2.0, 3.0, 4.0})) {
    const transference::KhinchinEstimate e = transference::khinchin_empirical(p, n, derive_seed(ctx.seed, 1), trials);
    const std::string tag = "p=" + fmt(p);
    if (p == 2.0) {
      rep.check_eq("c_2 " + tag, e.c_est, 1.0, 0.0);
      rep.check_eq("C_2 " + tag, e.C_est, 1.0, 0.0);
    } else {
      rep.check_le("c_est <= 1 " + tag, e.c_est, 1.0, 1e-14);
      rep.check_le("1 <= C_est " + tag, 1.0, e.C_est, 1e-14);
    }
  }

  const int families = ctx.get("families", 10);
  for (int f = 0; f < families; ++f) {
    Rng rng(derive_seed(ctx.seed, 100 + static_cast<std::uint64_t>(f)));
    const int d = uniform_int(rng, 2, 4);
    const int m = uniform_int(rng, 1, 4);
    Eigen::VectorXd mu(d);
    for (int i = 0; i < d; ++i) mu(i) = uniform(rng, 0.5, 2.0);
    std::vector<Eigen::MatrixXcd> ops;
    for (int l = 0; l < m; ++l) {
      Eigen::MatrixXcd k(d, d);
      for (int c = 0; c < d; ++c) k.col(c) = complex_gaussian_vector(rng, d);
      ops.push_back(k);
    }
    const std::string tag = "family " + std::to_string(f);
    const double row2 = transference::row_matrix_norm(ops, 2.0, mu, 1);
    const double sq2 = transference::square_norm(ops, 2.0, mu, 1);
    rep.check_eq(tag + " row matrix = square function at p=2", row2, sq2, 1e-9 * std::max(1.0, sq2));
    for (double p : ctx.list("sandwich_ps", {1.5, 3.0})) {
      const transference::KhinchinConstants kc = transference::KhinchinConstants::for_p(p);
      const double row = transference::row_matrix_norm(ops, p, mu, derive_seed(rng(), 2), 16);
      const double sq = transference::square_norm(ops, p, mu, derive_seed(rng(), 3), 16);
      rep.check_le(tag + " c_p row <= square p=" + fmt(p), kc.c * row, sq, 1e-6);
      rep.check_le(tag + " square <= C_p row p=" + fmt(p), sq, kc.C * row, 1e-6);
    }
  }

  const int diag = ctx.get("diagonal_families", 10);
  for (int f = 0; f < diag; ++f) {
    Rng rng(derive_seed(ctx.seed, 200 + static_cast<std::uint64_t>(f)));
    const int d = uniform_int(rng, 2, 3);
    const int m = uniform_int(rng, 1, 6);
    std::vector<Eigen::MatrixXcd> ops;
    for (int l = 0; l < m; ++l) ops.push_back(complex_gaussian_vector(rng, d).asDiagonal());
    const transference::SymmetricSandwich s =
        transference::symmetric_matrix_norm_check(ops, 2.0, Eigen::VectorXd::Ones(d), 1);
    rep.check_eq("diagonal family " + std::to_string(f) + " |K'| = |k|_[2] at p=2", s.norm_mk, s.norm_bracket,
                 1e-8);
  }

  const int proj_trials = ctx.get("projection_trials", 500);
  const int depth = ctx.get("projection_depth", 6);
  for (double p : ctx.list("projection_ps", {1.5, 4.0})) {
    const transference::ProjectionCheck c =
        transference::rademacher_projection_check(p, depth, proj_trials, derive_seed(ctx.seed, 300));
    rep.check_le("projection ratio p=" + fmt(p), c.max_ratio, c.bound, ctx.tolerance(1e-9));
  }
  return rep;
}

using SuiteFn = std::function<Report(const Context&)>;

const std::map<std::string, std::pair<SuiteFn, bool>>& registry() {
  static const std::map<std::string, std::pair<SuiteFn, bool>> r{
      {"dilation-verify", {suite_dilation, true}},
      {"powers", {suite_powers, true}},
      {"cone", {suite_cone, true}},
      {"ergodic", {suite_ergodic, true}},
      {"vn", {suite_vn, true}},
      {"transfer", {suite_transfer, true}},
      {"square", {suite_square, true}},
      {"maximal", {suite_maximal, true}},
      {"mellin", {suite_mellin, false}},
      {"gamma", {suite_gamma, true}},
      {"mihlin", {suite_mihlin, false}},
      {"khinchin", {suite_khinchin, true}},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : registry()) v.push_back(k);
    return v;
  }();
  return names;
}

bool suite_is_randomized(const std::string& suite) {
  const auto it = registry().find(suite);
  if (it == registry().end()) throw InputError("unknown suite '" + suite + "'");
  return it->second.second;
}

Report run_suite(const std::string& suite, const json& config, const RunOptions& opts) {
  const auto it = registry().find(suite);
  if (it == registry().end()) throw InputError("unknown suite '" + suite + "'");
  if (!config.is_object()) throw InputError("config must be a JSON object");
  Context ctx;
  ctx.config = config;
  ctx.tol = opts.tol;
  ctx.base_dir = opts.base_dir;
  if (opts.seed) {
    ctx.seed = *opts.seed;
  } else if (config.contains("seed")) {
    if (!config.at("seed").is_number_unsigned()) throw InputError("seed must be a nonnegative integer");
    ctx.seed = config.at("seed").get<std::uint64_t>();
  } else if (it->second.second) {
    throw InputError("suite '" + suite + "' is randomized and needs a seed");
  }
  ctx.config["seed"] = ctx.seed;
  if (opts.tol) ctx.config["tol"] = *opts.tol;

  const auto start = std::chrono::steady_clock::now();
  Report rep;
  try {
    rep = it->second.first(ctx);
  } catch (const json::exception& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rep.suite = suite;
  rep.environment = {{"parameters", ctx.config}, {"seed", ctx.seed}, {"library", kLibrary}};
  return rep;
}

int exit_code(const Report& r) { return r.passed() ? 0 : 2; }

}  // namespace dilateron::io
