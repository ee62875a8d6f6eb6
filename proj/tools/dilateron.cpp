#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dilateron/error.hpp"
#include "dilateron/io/io.hpp"
#include "dilateron/io/suites.hpp"

namespace {

using dilateron::io::json;

constexpr int kExitOther = 1;
constexpr int kExitInput = 3;
constexpr int kExitConvergence = 4;
constexpr int kExitDomain = 5;
constexpr int kExitContraction = 6;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::string report;
  std::string csv;
};

// What the parsed command line resolved to.
struct Invocation {
  std::string suite;
  json config = json::object();
  std::string config_path;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw dilateron::InputError("cannot write '" + path + "'");
  out << text;
  if (!out) throw dilateron::InputError("failed writing '" + path + "'");
}

int execute(const Invocation& inv, const Globals& g) {
  json config = inv.config;
  dilateron::io::RunOptions opts;
  opts.seed = g.seed;
  opts.tol = g.tol;
  if (!inv.config_path.empty()) {
    config = dilateron::io::read_json_file(inv.config_path);
    opts.base_dir = std::filesystem::path(inv.config_path).parent_path().string();
  }
  const dilateron::io::Report rep = dilateron::io::run_suite(inv.suite, config, opts);
  const std::string text = rep.to_json().dump(2) + "\n";
  if (g.report.empty()) {
    std::cout << text;
  } else {
    write_text(g.report, text);
  }
  if (!g.csv.empty()) write_text(g.csv, rep.to_csv());
  if (!rep.passed()) std::cerr << rep.failures() << " check(s) failed\n";
  return dilateron::io::exit_code(rep);
}

// Copies an option into the config only when it was given.
template <class T>
void put(json& cfg, const char* key, const std::optional<T>& v) {
  if (v) cfg[key] = *v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dilations, spectral calculus and transference checks on finite Lp spaces"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Master seed for randomized suites");
  app.add_option("--tol", g.tol, "Override the primary tolerance of the suite");
  app.add_option("--report", g.report, "Write the JSON report here instead of stdout");
  app.add_option("--csv", g.csv, "Also write a CSV flattening of the records");

  Invocation inv;
  bool list = false;

  // run <suite> --config cfg.json
  auto* run = app.add_subcommand("run", "Run a named suite from a config document");
  run->add_option("suite", inv.suite, "Suite name")->required();
  run->add_option("--config", inv.config_path, "Config document")->check(CLI::ExistingFile);

  app.add_subcommand("list", "List suite names")->callback([&] { list = true; });

  // <suite> --config cfg.json for suites without a flag form of their own.
  for (const std::string& name : dilateron::io::suite_names()) {
    if (name == "transfer") continue;
    auto* sub = app.add_subcommand(name, "Run the " + name + " suite");
    sub->add_option("--config", inv.config_path, "Config document")->check(CLI::ExistingFile);
    sub->callback([&inv, name] { inv.suite = name; });
  }

  // dilate --input matrix.json --p 1.5 --depth 8 --trials 100
  std::string input;
  std::optional<double> p;
  std::optional<int> depth, trials, window, starts;
  std::optional<std::string> engine;
  auto* dilate = app.add_subcommand("dilate", "Build and verify the dilation of one matrix");
  dilate->add_option("--input", input, "Matrix document {n, p, weights, entries}")
      ->required()
      ->check(CLI::ExistingFile);
  dilate->add_option("--p", p, "Exponent (defaults to the document's p)");
  dilate->add_option("--depth", depth, "Number of powers K");
  dilate->add_option("--trials", trials, "Random vectors per power");
  dilate->add_option("--engine", engine, "auto, cells or orbit");
  dilate->callback([&] {
    inv.suite = "dilation-verify";
    inv.config["matrix_file"] = input;
    put(inv.config, "p", p);
    put(inv.config, "depth", depth);
    put(inv.config, "trials", trials);
    put(inv.config, "engine", engine);
  });

  // calculus powers|cone|ergodic|vn --input gen.json --p 1.5 --gamma-max 6
  std::optional<double> gamma_max;
  bool conservative = false;
  auto* calc = app.add_subcommand("calculus", "Spectral calculus suites");
  calc->require_subcommand(1);
  for (const char* name : {"powers", "cone", "ergodic", "vn"}) {
    auto* sub = calc->add_subcommand(name);
    sub->add_option("--input", input, "Generator document {n, mu, A} (or a matrix for vn)")
        ->check(CLI::ExistingFile);
    sub->add_option("--p", p, "Exponent");
    sub->add_option("--gamma-max", gamma_max, "Largest |gamma| on the integer grid");
    sub->add_option("--trials", trials, "Number of random trials");
    sub->add_flag("--conservative", conservative, "Make the generator conservative (ergodic)");
    sub->callback([&, s = std::string(name)] {
      inv.suite = s;
      if (!input.empty()) inv.config[s == "vn" ? "matrix_file" : "generator_file"] = input;
      put(inv.config, "p", p);
      put(inv.config, "gamma_max", gamma_max);
      put(inv.config, "trials", trials);
      if (conservative) inv.config["conservative"] = true;
    });
  }

  // transfer [--config cfg] | transfer check|square|maximal --kernel k.json --gen gen.json ...
  std::vector<std::string> kernels;
  std::string gen;
  auto* transfer = app.add_subcommand("transfer", "Transference suites");
  transfer->add_option("--config", inv.config_path, "Config document for the transfer suite")
      ->check(CLI::ExistingFile);
  transfer->callback([&] {
    if (inv.suite.empty()) inv.suite = "transfer";
  });
  for (const char* name : {"check", "square", "maximal"}) {
    auto* sub = transfer->add_subcommand(name);
    sub->add_option("--kernel", kernels, "Kernel document {h, t0, samples}; repeat for families")
        ->check(CLI::ExistingFile);
    sub->add_option("--gen", gen, "Generator document {n, mu, A}")->check(CLI::ExistingFile);
    sub->add_option("--p", p, "Exponent");
    sub->add_option("--window", window, "Toeplitz window length");
    sub->add_option("--trials", trials, "Number of random trials");
    sub->add_option("--starts", starts, "Ascent starts");
    sub->callback([&, s = std::string(name)] {
      inv.suite = s == "check" ? "transfer" : s;
      if (s == "check") {
        if (kernels.size() > 1) throw CLI::ValidationError("--kernel", "check takes one kernel");
        if (!kernels.empty()) inv.config["kernel_file"] = kernels.front();
      } else if (!kernels.empty()) {
        inv.config["kernels_files"] = kernels;
      }
      if (!gen.empty()) inv.config["generator_file"] = gen;
      put(inv.config, "p", p);
      put(inv.config, "window", window);
      put(inv.config, "trials", trials);
      put(inv.config, "starts", starts);
    });
  }

  // multiplier mihlin|mellin|gamma --params params.json
  std::string params;
  auto* mult = app.add_subcommand("multiplier", "Multiplier suites");
  mult->require_subcommand(1);
  for (const char* name : {"mihlin", "mellin", "gamma"}) {
    auto* sub = mult->add_subcommand(name);
    sub->add_option("--params", params, "Parameter document")->check(CLI::ExistingFile);
    sub->callback([&, s = std::string(name)] {
      inv.suite = s;
      inv.config_path = params;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  if (list) {
    for (const auto& s : dilateron::io::suite_names()) std::cout << s << "\n";
    return 0;
  }

  try {
    return execute(inv, g);
  } catch (const dilateron::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const dilateron::ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << "\n";
    return kExitConvergence;
  } catch (const dilateron::DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const dilateron::ContractionError& e) {
    std::cerr << "not a contraction: " << e.what() << "\n";
    return kExitContraction;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
}
