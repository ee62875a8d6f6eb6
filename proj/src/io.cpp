#include "dilateron/io/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "dilateron/error.hpp"

namespace dilateron::io {

namespace {

const json& field(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  return doc.at(key);
}

double number(const json& v, const char* what) {
  if (!v.is_number()) throw InputError(std::string(what) + " must be a number");
  return v.get<double>();
}

Eigen::VectorXd real_vector(const json& v, const char* what) {
  if (!v.is_array()) throw InputError(std::string(what) + " must be an array");
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = number(v[i], what);
  return out;
}

Eigen::MatrixXcd complex_rows(const json& v, const char* what) {
  if (!v.is_array() || v.empty()) throw InputError(std::string(what) + " must be a nonempty array of rows");
  const std::size_t rows = v.size();
  if (!v[0].is_array()) throw InputError(std::string(what) + " rows must be arrays");
  const std::size_t cols = v[0].size();
  Eigen::MatrixXcd m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!v[i].is_array() || v[i].size() != cols) throw InputError(std::string(what) + " is ragged");
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = parse_scalar(v[i][j]);
  }
  return m;
}

std::string format_number(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

}  // namespace

std::complex<double> parse_scalar(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw InputError("scalar must be a number or an [re, im] pair");
}

json scalar_json(std::complex<double> z) {
  if (z.imag() == 0.0) return z.real();
  return json::array({z.real(), z.imag()});
}

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json vector_json(const Eigen::VectorXcd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(scalar_json(v(i)));
  return out;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector_json(Eigen::VectorXd(m.row(i).transpose())));
  return out;
}

bool MatrixDocument::is_signed() const {
  return (entries.imag().array() != 0.0).any() || (entries.real().array() < 0.0).any();
}

MatrixDocument parse_matrix(const json& doc) {
  MatrixDocument m;
  m.entries = complex_rows(field(doc, "entries"), "entries");
  m.n = doc.contains("n") ? field(doc, "n").get<int>() : static_cast<int>(m.entries.rows());
  if (m.entries.rows() != m.n || m.entries.cols() != m.n) throw InputError("entries must be n x n");
  m.p = doc.contains("p") ? number(doc.at("p"), "p") : 2.0;
  if (!(m.p >= 1.0)) throw InputError("p must be at least 1");
  m.weights = doc.contains("weights") ? real_vector(doc.at("weights"), "weights") : Eigen::VectorXd::Ones(m.n);
  if (m.weights.size() != m.n || (m.weights.array() <= 0.0).any()) {
    throw InputError("weights must be n positive numbers");
  }
  return m;
}

json to_json(const MatrixDocument& m) {
  json rows = json::array();
  for (int i = 0; i < m.n; ++i) rows.push_back(vector_json(Eigen::VectorXcd(m.entries.row(i).transpose())));
  return {{"n", m.n}, {"p", m.p}, {"weights", vector_json(m.weights)}, {"entries", rows}};
}

calculus::SubmarkovianGenerator parse_generator(const json& doc) {
  calculus::SubmarkovianGenerator g;
  const Eigen::MatrixXcd a = complex_rows(field(doc, "A"), "A");
  if ((a.imag().array() != 0.0).any()) throw InputError("generator must be real");
  g.A = a.real();
  const int n = doc.contains("n") ? field(doc, "n").get<int>() : static_cast<int>(g.A.rows());
  if (g.A.rows() != n || g.A.cols() != n) throw InputError("A must be n x n");
  g.mu = doc.contains("mu") ? real_vector(doc.at("mu"), "mu") : Eigen::VectorXd::Ones(n);
  if (g.mu.size() != n) throw InputError("mu must have n entries");
  return g;
}

json to_json(const calculus::SubmarkovianGenerator& g) {
  return {{"n", g.n()}, {"mu", vector_json(g.mu)}, {"A", matrix_json(g.A)}};
}

transference::TimeKernel parse_kernel(const json& doc) {
  const double h = number(field(doc, "h"), "h");
  const double t0 = doc.contains("t0") ? number(doc.at("t0"), "t0") : 0.0;
  const json& s = field(doc, "samples");
  if (!s.is_array()) throw InputError("samples must be an array");
  Eigen::VectorXcd samples(static_cast<Eigen::Index>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) samples(static_cast<Eigen::Index>(i)) = parse_scalar(s[i]);
  return transference::TimeKernel(h, t0, std::move(samples));
}

json to_json(const transference::TimeKernel& k) {
  return {{"h", k.h()}, {"t0", k.t0()}, {"samples", vector_json(k.samples())}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

bool Report::check_le(const std::string& name, double lhs, double rhs, double tol) {
  const bool ok = lhs <= rhs + tol;
  records.push_back({name, lhs, rhs, tol, "<=", ok ? "pass" : "fail"});
  return ok;
}

bool Report::check_eq(const std::string& name, double lhs, double rhs, double tol) {
  const bool ok = std::abs(lhs - rhs) <= tol;
  records.push_back({name, lhs, rhs, tol, "==", ok ? "pass" : "fail"});
  return ok;
}

void Report::info(const std::string& name, double lhs, double rhs, const std::string& relation) {
  records.push_back({name, lhs, rhs, 0.0, relation, "info"});
}

std::size_t Report::failures() const {
  std::size_t n = 0;
  for (const auto& r : records) n += r.verdict == "fail";
  return n;
}

bool Report::passed() const { return failures() == 0; }

json Report::to_json() const {
  json recs = json::array();
  for (const auto& r : records) {
    recs.push_back({{"name", r.name},
                    {"lhs", r.lhs},
                    {"rhs", r.rhs},
                    {"relation", r.relation},
                    {"tolerance", r.tolerance},
                    {"verdict", r.verdict}});
  }
  json out = {{"suite", suite},
              {"passed", passed()},
              {"failures", failures()},
              {"records", recs},
              {"environment", environment},
              {"timing", {{"seconds", seconds}}}};
  if (!tables.empty()) out["tables"] = tables;
  return out;
}

std::string Report::to_csv() const {
  std::ostringstream os;
  os << "name,lhs,rhs,relation,tolerance,verdict\n";
  for (const auto& r : records) {
    std::string name;
    for (char c : r.name) name += c == '"' ? std::string("\"\"") : std::string(1, c);
    os << '"' << name << "\"," << format_number(r.lhs) << ',' << format_number(r.rhs) << ','
       << r.relation << ',' << format_number(r.tolerance) << ',' << r.verdict << '\n';
  }
  return os.str();
}

}  // namespace dilateron::io
