#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "dilateron/calculus/calculus.hpp"
#include "dilateron/transference/kernel.hpp"

namespace dilateron::io {

using json = nlohmann::json;

/// {n, p, weights, entries}; entries are numbers or [re, im] pairs, row-major.
struct MatrixDocument {
  int n = 0;
  double p = 2.0;
  Eigen::VectorXd weights;
  Eigen::MatrixXcd entries;
  /// True if any entry has a nonzero imaginary part or a negative real part.
  bool is_signed() const;
};

MatrixDocument parse_matrix(const json& doc);
json to_json(const MatrixDocument& m);

/// {n, mu, A}
calculus::SubmarkovianGenerator parse_generator(const json& doc);
json to_json(const calculus::SubmarkovianGenerator& g);

/// {h, t0, samples}
transference::TimeKernel parse_kernel(const json& doc);
json to_json(const transference::TimeKernel& k);

/// Reads a JSON file; throws InputError on I/O or syntax errors.
json read_json_file(const std::string& path);

/// Complex scalars as numbers when real, [re, im] otherwise.
std::complex<double> parse_scalar(const json& v);
json scalar_json(std::complex<double> z);
json vector_json(const Eigen::VectorXd& v);
json vector_json(const Eigen::VectorXcd& v);
json matrix_json(const Eigen::MatrixXd& m);

struct Record {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double tolerance = 0.0;
  std::string relation;  // "<=" or "=="
  std::string verdict;   // "pass", "fail" or "info"
};

struct Report {
  std::string suite;
  std::vector<Record> records;
  json tables = json::object();
  json environment = json::object();
  double seconds = 0.0;

  /// lhs <= rhs + tol.
  bool check_le(const std::string& name, double lhs, double rhs, double tol);
  /// |lhs - rhs| <= tol.
  bool check_eq(const std::string& name, double lhs, double rhs, double tol);
  /// Recorded without a verdict on the outcome.
  void info(const std::string& name, double lhs, double rhs, const std::string& relation = "<=");

  bool passed() const;
  std::size_t failures() const;
  json to_json() const;
  std::string to_csv() const;
};

}  // namespace dilateron::io
