#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dilateron/calculus/calculus.hpp"
#include "dilateron/core/lp.hpp"
#include "dilateron/dilation/dilation.hpp"
#include "dilateron/error.hpp"
#include "dilateron/io/suites.hpp"
#include "dilateron/multiplier/multiplier.hpp"
#include "dilateron/transference/kernel.hpp"
#include "dilateron/transference/khinchin.hpp"
#include "dilateron/transference/transfer.hpp"

namespace py = pybind11;
using namespace dilateron;

namespace {

Eigen::VectorXd weights_or_ones(const std::optional<Eigen::VectorXd>& w, Eigen::Index n) {
  return w ? *w : Eigen::VectorXd::Ones(n);
}

calculus::SubmarkovianGenerator generator(const Eigen::MatrixXd& a, const std::optional<Eigen::VectorXd>& mu) {
  return {weights_or_ones(mu, a.rows()), a};
}

transference::TimeKernel kernel(const Eigen::VectorXcd& samples, double h, std::optional<double> t0) {
  return transference::TimeKernel(h, t0.value_or(0.0), samples);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Dilations, spectral calculus and transference checks on finite Lp spaces";

  // Translators run newest first, so the base class is registered before its subclasses.
  auto& base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InputError>(m, "InputError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ContractionError>(m, "ContractionError", base.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());

  m.def("suite_names", &io::suite_names);
  m.def(
      "run_suite_json",
      [](const std::string& suite, const std::string& config, std::optional<std::uint64_t> seed,
         std::optional<double> tol, const std::string& base_dir) {
        io::json cfg;
        try {
          cfg = io::json::parse(config);
        } catch (const io::json::exception& e) {
          throw InputError(std::string("config: ") + e.what());
        }
        io::RunOptions o{seed, tol, base_dir};
        io::Report r;
        {
          py::gil_scoped_release release;
          r = io::run_suite(suite, cfg, o);
        }
        return r.to_json().dump();
      },
      py::arg("suite"), py::arg("config") = "{}", py::arg("seed") = py::none(), py::arg("tol") = py::none(),
      py::arg("base_dir") = "");

  m.def(
      "positive_norm",
      [](const Eigen::MatrixXd& t, double p, std::uint64_t seed) {
        lp::PowerOptions o;
        o.seed = seed;
        const lp::NormCertificate c = lp::positive_norm(t, p, o);
        return py::make_tuple(c.value, c.witness);
      },
      py::arg("matrix"), py::arg("p"), py::arg("seed") = 0,
      "Norm of a nonnegative matrix on unit-weight l^p and a nonnegative extremal witness.");

  m.def(
      "extremal_vector",
      [](const Eigen::MatrixXd& t, double p, const std::optional<Eigen::VectorXd>& w) {
        const lp::ExtremalVector e =
            lp::extremal_vector(lp::PositiveOperator(lp::WeightedLpSpace(p, weights_or_ones(w, t.rows())), t));
        return py::make_tuple(e.u, e.defect);
      },
      py::arg("matrix"), py::arg("p"), py::arg("weights") = py::none());

  m.def(
      "verify_dilation",
      [](const Eigen::MatrixXcd& t, double p, int depth, const std::optional<Eigen::VectorXd>& w, int trials,
         std::uint64_t seed) {
        const lp::WeightedLpSpace space(p, weights_or_ones(w, t.rows()));
        dilation::VerifyOptions o;
        o.trials = trials;
        o.seed = seed;
        const bool positive = (t.imag().array() == 0.0).all() && (t.real().array() >= 0.0).all();
        const dilation::VerifyReport r =
            positive ? dilation::verify_dilation(lp::PositiveOperator(space, t.real()), depth, o)
                     : dilation::verify_subpositive(lp::SignedOperator(space, t), depth, o);
        return py::make_tuple(r.max_error, r.per_k_errors);
      },
      py::arg("matrix"), py::arg("p"), py::arg("depth") = 8, py::arg("weights") = py::none(),
      py::arg("trials") = 20, py::arg("seed") = 0,
      "Max over k and random vectors of |P S^k D a - D T^k a|_p, and the per-k maxima.");

  m.def(
      "imaginary_power",
      [](const Eigen::MatrixXd& a, double gamma, const std::optional<Eigen::VectorXd>& mu) {
        return calculus::imaginary_power(calculus::SpectralDecomposition(generator(a, mu)), gamma);
      },
      py::arg("A"), py::arg("gamma"), py::arg("mu") = py::none());
  m.def(
      "semigroup",
      [](const Eigen::MatrixXd& a, std::complex<double> z, const std::optional<Eigen::VectorXd>& mu) {
        return calculus::semigroup_at(calculus::SpectralDecomposition(generator(a, mu)), z);
      },
      py::arg("A"), py::arg("z"), py::arg("mu") = py::none());
  m.def("norm2_mu", &calculus::norm2_mu, py::arg("matrix"), py::arg("mu"));
  m.def(
      "von_neumann",
      [](const Eigen::MatrixXcd& t, const Eigen::VectorXcd& coeffs) {
        const calculus::VonNeumannResult r = calculus::von_neumann_check(t, coeffs);
        return py::make_tuple(r.lhs, r.rhs);
      },
      py::arg("matrix"), py::arg("coeffs"));

  m.def(
      "transfer_operator",
      [](const Eigen::VectorXcd& samples, double h, const Eigen::MatrixXd& a, std::optional<double> t0,
         const std::optional<Eigen::VectorXd>& mu) {
        return transference::transfer_operator(kernel(samples, h, t0),
                                               calculus::SpectralDecomposition(generator(a, mu)));
      },
      py::arg("samples"), py::arg("h"), py::arg("A"), py::arg("t0") = py::none(), py::arg("mu") = py::none());
  m.def(
      "convolver_upper",
      [](const Eigen::VectorXcd& samples, double h, double p, std::optional<double> t0) {
        return transference::convolver_upper(kernel(samples, h, t0), p);
      },
      py::arg("samples"), py::arg("h"), py::arg("p"), py::arg("t0") = py::none());
  m.def(
      "khinchin_constants",
      [](double p, int n, std::uint64_t seed, int trials) {
        const transference::KhinchinEstimate e = transference::khinchin_empirical(p, n, seed, trials);
        return py::make_tuple(e.c_est, e.C_est);
      },
      py::arg("p"), py::arg("n") = 10, py::arg("seed") = 0, py::arg("trials") = 200);

  m.def("complex_gamma", &multiplier::complex_gamma, py::arg("z"));
  m.def(
      "mellin_residual",
      [](double t, double theta, double x, bool average) {
        return average ? multiplier::mellin_average_residual(t, theta, x).residual
                       : multiplier::mellin_identity_residual(t, theta, x).residual;
      },
      py::arg("t"), py::arg("theta"), py::arg("x"), py::arg("average") = false);
}
