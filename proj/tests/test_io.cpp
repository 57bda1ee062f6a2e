#include <catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <string>

#include "krein/family.hpp"
#include "krein/io.hpp"

using namespace krein;
using io::Json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("complex and matrix JSON round-trips are exact") {
  Complex z(0.1, -2.5e-17);
  REQUIRE(io::complex_from_json(io::to_json(z)) == z);

  detail::Rng rng(12);
  Matrix m = rng.complex_matrix(3, 5);
  Matrix back = io::matrix_from_json(io::to_json(m), 3, 5, "m");
  REQUIRE(back == m);  // bit-exact: doubles survive the JSON layer

  SECTION("malformed complex values") {
    REQUIRE_THROWS_AS(io::complex_from_json(Json::array({1.0})), KreinError);
    REQUIRE_THROWS_AS(io::complex_from_json(Json("x")), KreinError);
    REQUIRE_THROWS_AS(io::complex_from_json(Json::array({1.0, "y"})), KreinError);
  }

  SECTION("matrix shape is validated") {
    Json j = io::to_json(m);
    REQUIRE_THROWS_AS(io::matrix_from_json(j, 4, 5, "m"), KreinError);
    REQUIRE_THROWS_AS(io::matrix_from_json(j, 3, 4, "m"), KreinError);
  }
}

TEST_CASE("problem files round-trip") {
  GeneratorParams p;
  p.n_plus = 2;
  p.n_minus = 3;
  p.seed = 4;
  BlockOperator a = generate_one(GeneratorKind::random_strict, p);

  const std::string path = "io_roundtrip.json";
  io::write_problem(path, a, Json{{"label", "roundtrip"}});
  BlockOperator b = io::read_problem(path);

  REQUIRE(b.structure.n_plus == 2);
  REQUIRE(b.structure.n_minus == 3);
  REQUIRE(b.assemble() == a.assemble());

  Json j = io::read_json(path);
  REQUIRE(j["schema"] == "krein-problem/1");
  REQUIRE(j["metadata"]["label"] == "roundtrip");
  std::remove(path.c_str());
}

TEST_CASE("problem parsing rejects malformed input") {
  GeneratorParams p;
  BlockOperator a = generate_one(GeneratorKind::random_strict, p);
  Json good = io::problem_to_json(a);

  auto expect_parse_error = [](const Json& j) {
    try {
      io::problem_from_json(j);
      FAIL("expected parse_error");
    } catch (const KreinError& e) {
      REQUIRE(e.code() == ErrorCode::parse_error);
    }
  };

  SECTION("wrong schema") {
    Json j = good;
    j["schema"] = "krein-problem/0";
    expect_parse_error(j);
  }

  SECTION("missing block") {
    Json j = good;
    j.erase("A21");
    expect_parse_error(j);
  }

  SECTION("dimension mismatch") {
    Json j = good;
    j["n_plus"] = 3;
    expect_parse_error(j);
  }

  SECTION("not an object") { expect_parse_error(Json::array()); }

  SECTION("fractional dimensions") {
    Json j = good;
    j["n_minus"] = 1.5;
    expect_parse_error(j);
  }

  SECTION("negative dimensions") {
    Json j = good;
    j["n_plus"] = -1;
    expect_parse_error(j);
  }

  SECTION("malformed JSON text") {
    const std::string path = "io_malformed.json";
    io::write_text(path, "{ not json");
    try {
      io::read_json(path);
      FAIL("expected parse_error");
    } catch (const KreinError& e) {
      REQUIRE(e.code() == ErrorCode::parse_error);
    }
    std::remove(path.c_str());
  }

  SECTION("missing file is an io_error") {
    try {
      io::read_problem("io_no_such_file.json");
      FAIL("expected io_error");
    } catch (const KreinError& e) {
      REQUIRE(e.code() == ErrorCode::io_error);
    }
  }
}

TEST_CASE("infinity flags") {
  REQUIRE(io::finite_or_flag(1.5) == Json(1.5));
  REQUIRE(io::finite_or_flag(kInf) == Json("infinity"));
  REQUIRE(io::finite_or_flag(-kInf) == Json("-infinity"));

  std::vector<std::pair<double, double>> table{{0.1, 2.0}, {0.5, kInf}};
  Json j = io::to_json(table);
  REQUIRE(j[0][1] == Json(2.0));
  REQUIRE(j[1][1] == Json("infinity"));
}

TEST_CASE("report serialization carries the verdict") {
  SemigroupReport rep = classify(-2.0 * Matrix::Identity(2, 2));
  Json j = io::to_json(rep);
  REQUIRE(j["classification"] == "exponentially_stable");
  REQUIRE(j["exp_type_spectral"].get<double>() == Catch::Approx(-2.0).margin(1e-12));
  REQUIRE(j["gearhart"].is_array());
  REQUIRE(j["quasi_holomorphic"].is_array());
}

TEST_CASE("CSV output uses round-trip precision") {
  const std::string path = "io_table.csv";
  io::write_csv(path, {"t", "value"}, {{0.1, 1.0}, {2.0, kInf}});
  std::string text = slurp(path);
  REQUIRE(text.rfind("t,value\n", 0) == 0);
  REQUIRE(text.find("0.10000000000000001") != std::string::npos);  // %.17g
  REQUIRE(text.find("inf") != std::string::npos);
  REQUIRE(text.back() == '\n');
  std::remove(path.c_str());

  SECTION("number formatting") {
    REQUIRE(io::csv_number(0.1) == "0.10000000000000001");
    REQUIRE(io::csv_number(1.0) == "1");
    REQUIRE(io::csv_number(-0.5) == "-0.5");
  }
}

TEST_CASE("JSON files end with a newline and are deterministic") {
  GeneratorParams p;
  BlockOperator a = generate_one(GeneratorKind::random_strict, p);
  const std::string p1 = "io_det1.json", p2 = "io_det2.json";
  io::write_problem(p1, a);
  io::write_problem(p2, a);
  std::string t1 = slurp(p1), t2 = slurp(p2);
  REQUIRE(t1 == t2);
  REQUIRE(t1.back() == '\n');
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}
