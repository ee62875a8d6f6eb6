#include <doctest.h>

#include <cmath>

#include "dilateron/error.hpp"
#include "dilateron/io/io.hpp"
#include "dilateron/io/suites.hpp"

using namespace dilateron;
using namespace dilateron::io;

TEST_CASE("matrix documents") {
  const json doc = json::parse(R"({"n": 2, "p": 3, "weights": [1, 2], "entries": [[0.5, [0, 0.25]], [0, 0.5]]})");
  const MatrixDocument m = parse_matrix(doc);
  CHECK(m.n == 2);
  CHECK(m.p == 3.0);
  CHECK(m.weights(1) == 2.0);
  CHECK(m.entries(0, 1) == std::complex<double>(0.0, 0.25));
  CHECK(m.is_signed());
  const MatrixDocument back = parse_matrix(to_json(m));
  CHECK(back.entries == m.entries);
  CHECK(back.weights == m.weights);

  CHECK_FALSE(parse_matrix(json::parse(R"({"entries": [[1, 0], [0, 1]]})")).is_signed());
  CHECK_THROWS_AS(parse_matrix(json::parse(R"({"n": 3, "entries": [[1, 0], [0, 1]]})")), InputError);
  CHECK_THROWS_AS(parse_matrix(json::parse(R"({"entries": [[1, 0], [0]]})")), InputError);
  CHECK_THROWS_AS(parse_matrix(json::parse(R"({"p": 0.5, "entries": [[1]]})")), InputError);
  CHECK_THROWS_AS(parse_matrix(json::parse(R"({"weights": [-1], "entries": [[1]]})")), InputError);
  CHECK_THROWS_AS(parse_matrix(json::parse(R"({"entries": [["x"]]})")), InputError);
}

TEST_CASE("generator and kernel documents") {
  const json g = json::parse(R"({"n": 2, "mu": [1, 1], "A": [[-1, 0.5], [0.5, -1]]})");
  const auto gen = parse_generator(g);
  CHECK(gen.A(0, 1) == 0.5);
  CHECK(parse_generator(to_json(gen)).A == gen.A);
  CHECK_THROWS_AS(parse_generator(json::parse(R"({"A": [[[0, 1]]]})")), InputError);

  const auto k = parse_kernel(json::parse(R"({"h": 0.5, "t0": 0.25, "samples": [1, [0, 2]]})"));
  CHECK(k.h() == 0.5);
  CHECK(k.t0() == 0.25);
  CHECK(k.samples()(1) == std::complex<double>(0.0, 2.0));
  CHECK(parse_kernel(to_json(k)).samples() == k.samples());
  CHECK_THROWS_AS(parse_kernel(json::parse(R"({"samples": [1]})")), InputError);
  CHECK_THROWS_AS(read_json_file("/nonexistent/file.json"), InputError);
}

TEST_CASE("report records keep both sides") {
  Report r;
  CHECK(r.check_le("a", 1.0, 1.0, 0.0));
  CHECK_FALSE(r.check_le("b", 1.0 + 1e-9, 1.0, 1e-10));
  CHECK(r.check_eq("c", 2.0, 2.0 + 1e-12, 1e-11));
  r.info("d \"quoted\"", 5.0, 1.0);
  CHECK(r.failures() == 1);
  CHECK_FALSE(r.passed());
  const json j = r.to_json();
  CHECK(j["records"].size() == 4);
  CHECK(j["records"][1]["lhs"].get<double>() == 1.0 + 1e-9);
  CHECK(j["records"][1]["rhs"].get<double>() == 1.0);
  CHECK(j["records"][1]["verdict"] == "fail");
  CHECK(j["records"][3]["verdict"] == "info");
  CHECK(r.to_csv().find("\"d \"\"quoted\"\"\"") != std::string::npos);
  CHECK(exit_code(r) == 2);
}

TEST_CASE("suite runner") {
  CHECK(suite_names().size() == 12);
  CHECK_THROWS_AS(run_suite("nope", json::object()), InputError);
  CHECK_THROWS_AS(run_suite("vn", json::object()), InputError);
  CHECK_THROWS_AS(run_suite("vn", json::array()), InputError);
  CHECK_THROWS_AS(run_suite("vn", json::parse(R"({"seed": -1})")), InputError);
  CHECK_THROWS_AS(run_suite("vn", json::parse(R"({"seed": 1, "trials": "many"})")), InputError);
  CHECK_NOTHROW(run_suite("mihlin", json::object()));

  RunOptions o;
  o.seed = 3;
  const Report a = run_suite("vn", json::parse(R"({"trials": 10, "seed": 99})"), o);
  CHECK(a.passed());
  CHECK(a.records.size() == 10);
  CHECK(a.environment["seed"] == 3);
  json ja = a.to_json();
  json jb = run_suite("vn", json::parse(R"({"trials": 10})"), o).to_json();
  ja.erase("timing");
  jb.erase("timing");
  ja["environment"]["parameters"].erase("seed");
  jb["environment"]["parameters"].erase("seed");
  CHECK(ja == jb);

  // The identity matrix dilates with zero error.
  const Report id = run_suite(
      "dilation-verify", json::parse(R"({"seed": 1, "matrix": {"n": 2, "p": 1.5, "entries": [[1, 0], [0, 1]]}})"));
  CHECK(id.passed());
  for (const auto& rec : id.records) CHECK(rec.lhs == 0.0);

  // Suite-level tolerance override turns passing checks into failures.
  o.tol = -1.0;
  CHECK_FALSE(run_suite("gamma", json::parse(R"({"points": 5})"), o).passed());
}
