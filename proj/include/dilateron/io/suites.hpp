#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dilateron/io/io.hpp"

namespace dilateron::io {

struct RunOptions {
  /// Overrides the config's "seed".
  std::optional<std::uint64_t> seed;
  /// Overrides the suite's primary tolerance.
  std::optional<double> tol;
  /// Directory against which relative *_file paths in the config are resolved.
  std::string base_dir;
};

/// dilation-verify, powers, cone, ergodic, vn, transfer, square, maximal,
/// mellin, gamma, mihlin, khinchin.
const std::vector<std::string>& suite_names();
bool suite_is_randomized(const std::string& suite);

/// Runs one suite.  Randomized suites need a seed from the config or the options.
/// Throws InputError on unknown suites and malformed configs; module errors propagate.
Report run_suite(const std::string& suite, const json& config, const RunOptions& opts = {});

/// 0 pass, 2 check failure.
int exit_code(const Report& r);

}  // namespace dilateron::io
