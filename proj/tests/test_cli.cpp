#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include "krein/family.hpp"
#include "krein/io.hpp"

using namespace krein;
using io::Json;

namespace {

// Tests run serially inside this binary, so shared capture files are fine.
int run_cli(const std::string& args) {
  const char* cli = std::getenv("KREIN_CLI_PATH");
  REQUIRE(cli != nullptr);
  std::string cmd = std::string("\"") + cli + "\" " + args + " > cli_stdout.txt 2> cli_stderr.txt";
  int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  REQUIRE(WIFEXITED(rc));
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

int line_count(const std::string& text) {
  int n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

BlockOperator reference_problem() {
  // 1+1 instance with angle entry (3 - sqrt 13)/2
  Matrix a11(1, 1), a12(1, 1), a21(1, 1), a22(1, 1);
  a11 << -1.0;
  a12 << 1.0;
  a21 << 1.0;
  a22 << 2.0;
  return BlockOperator(KreinStructure{1, 1}, a11, a12, a21, a22);
}

Complex k_entry(const Json& report) { return io::complex_from_json(report["angle"]["K"][0][0]); }

}  // namespace

TEST_CASE("cli: usage surface") {
  REQUIRE(run_cli("--help") == 0);
  REQUIRE(run_cli("") == 1);              // a subcommand is required
  REQUIRE(run_cli("frobnicate") == 1);    // unknown verb
  REQUIRE(run_cli("solve") == 1);         // --input is required
  REQUIRE(run_cli("solve --input x.json --solver bogus") == 1);
}

TEST_CASE("cli: gen writes a readable problem") {
  REQUIRE(run_cli("gen --kind random_strict --n-plus 2 --n-minus 3 --epsilon 0.5 --seed 7 "
                  "--output cli_gen.json") == 0);
  BlockOperator a = io::read_problem("cli_gen.json");
  REQUIRE(a.structure.n_plus == 2);
  REQUIRE(a.structure.n_minus == 3);
  REQUIRE(check_dissipativity(a).uniform_margin == Catch::Approx(0.5).margin(1e-10));

  Json j = io::read_json("cli_gen.json");
  REQUIRE(j["metadata"]["kind"] == "random_strict");
  REQUIRE(j["metadata"]["seed"] == 7);

  SECTION("structured kind stores the largest member") {
    REQUIRE(run_cli("gen --kind structured_family --sizes 3,6 --output cli_gen_s.json") == 0);
    BlockOperator s = io::read_problem("cli_gen_s.json");
    REQUIRE(s.structure.n_plus == 6);
    REQUIRE(s.structure.n_minus == 6);
    std::remove("cli_gen_s.json");
  }
  std::remove("cli_gen.json");
}

TEST_CASE("cli: solve reports the reference angle operator") {
  io::write_problem("cli_ref.json", reference_problem());
  REQUIRE(run_cli("solve --input cli_ref.json --output cli_ref_report.json") == 0);

  Json rep = io::read_json("cli_ref_report.json");
  REQUIRE(rep["status"] == "ok");
  REQUIRE(rep["solver"] == "spectral");
  REQUIRE(rep["mu_policy"] == "auto");
  REQUIRE(rep["dissipativity"]["j_dissipative"] == true);

  double k_expect = 0.5 * (3.0 - std::sqrt(13.0));
  REQUIRE(std::abs(k_entry(rep) - Complex(k_expect)) < 1e-8);
  REQUIRE(rep["angle"]["norm"].get<double>() == Catch::Approx(-k_expect).epsilon(1e-10));

  REQUIRE(rep["residuals"]["classical"].get<double>() < 1e-10);
  REQUIRE(rep["residuals"]["invariance_defect"].get<double>() < 1e-10);
  REQUIRE(rep["restriction"]["location_check"] == true);
  double x = rep["restriction"]["X"][0][0][0].get<double>();
  REQUIRE(x == Catch::Approx(0.5 * (1.0 - std::sqrt(13.0))).margin(1e-8));
  REQUIRE(rep["semigroup"]["X"]["classification"] == "exponentially_stable");

  SECTION("all solvers agree") {
    REQUIRE(run_cli("solve --input cli_ref.json --solver fixed-point --mu -2 "
                    "--output cli_ref_fp.json") == 0);
    REQUIRE(run_cli("solve --input cli_ref.json --solver continuation "
                    "--output cli_ref_ct.json") == 0);
    Json fp = io::read_json("cli_ref_fp.json");
    Json ct = io::read_json("cli_ref_ct.json");
    REQUIRE(std::abs(k_entry(fp) - Complex(k_expect)) < 1e-7);
    REQUIRE(std::abs(k_entry(ct) - Complex(k_expect)) < 1e-7);
    REQUIRE(fp["diagnostics"]["iterations"].get<int>() > 0);
    REQUIRE(ct["diagnostics"]["trace"].is_array());
    std::remove("cli_ref_fp.json");
    std::remove("cli_ref_ct.json");
  }

  SECTION("repeated runs are byte-identical") {
    REQUIRE(run_cli("solve --input cli_ref.json --output cli_ref_rep1.json") == 0);
    REQUIRE(run_cli("solve --input cli_ref.json --output cli_ref_rep2.json") == 0);
    REQUIRE(slurp("cli_ref_rep1.json") == slurp("cli_ref_rep2.json"));
    std::remove("cli_ref_rep1.json");
    std::remove("cli_ref_rep2.json");
  }

  SECTION("impossible tolerance fails validation with exit 2") {
    REQUIRE(run_cli("solve --input cli_ref.json --tol 0 --output cli_ref_tol.json") == 2);
    Json t = io::read_json("cli_ref_tol.json");
    REQUIRE(t["status"] == "validation failed: residuals above tolerance");
    std::remove("cli_ref_tol.json");
  }

  SECTION("mu inside the minus spectrum is a solver failure") {
    REQUIRE(run_cli("solve --input cli_ref.json --mu 2 --output cli_ref_mu.json") == 3);
  }

  SECTION("malformed mu is a usage error") {
    REQUIRE(run_cli("solve --input cli_ref.json --mu zzz --output cli_ref_mu2.json") == 1);
  }

  std::remove("cli_ref.json");
  std::remove("cli_ref_report.json");
}

TEST_CASE("cli: dissipativity gate") {
  Matrix a11(1, 1), a12(1, 1), a21(1, 1), a22(1, 1);
  a11 << 0.1;
  a12 << 0.0;
  a21 << 0.0;
  a22 << 1.0;
  io::write_problem("cli_gate.json", BlockOperator(KreinStructure{1, 1}, a11, a12, a21, a22));

  SECTION("rejected without --force") {
    REQUIRE(run_cli("solve --input cli_gate.json --output cli_gate_r.json") == 2);
    Json rep = io::read_json("cli_gate_r.json");
    REQUIRE(rep["status"] == "rejected: input is not J-dissipative (use --force to override)");
    REQUIRE(rep["dissipativity"]["j_dissipative"] == false);
    REQUIRE_FALSE(rep.contains("angle"));
    std::remove("cli_gate_r.json");
  }

  SECTION("solved with --force") {
    REQUIRE(run_cli("solve --input cli_gate.json --force --output cli_gate_f.json") == 0);
    Json rep = io::read_json("cli_gate_f.json");
    REQUIRE(rep["status"] == "ok");
    REQUIRE(std::abs(k_entry(rep)) < 1e-12);  // uncoupled: K = 0
    std::remove("cli_gate_f.json");
  }

  std::remove("cli_gate.json");
}

TEST_CASE("cli: io failures") {
  REQUIRE(run_cli("solve --input cli_missing.json") == 1);

  io::write_text("cli_bad.json", "{ this is not json\n");
  REQUIRE(run_cli("solve --input cli_bad.json") == 1);
  std::remove("cli_bad.json");

  io::write_text("cli_bad2.json", "{\"schema\": \"other/9\"}\n");
  REQUIRE(run_cli("solve --input cli_bad2.json") == 1);
  std::remove("cli_bad2.json");
}

TEST_CASE("cli: diagnose writes report and curves") {
  io::write_problem("cli_diag.json", reference_problem());
  REQUIRE(run_cli("diagnose --input cli_diag.json --target X --output cli_diag_out") == 0);

  Json j = io::read_json("cli_diag_out.json");
  REQUIRE(j["target"] == "X");
  REQUIRE(j["semigroup"]["classification"] == "exponentially_stable");
  double type = j["semigroup"]["exp_type_spectral"].get<double>();
  REQUIRE(type == Catch::Approx(0.5 * (1.0 - std::sqrt(13.0))).margin(1e-8));

  std::string gear = slurp("cli_diag_out_gearhart.csv");
  REQUIRE(gear.rfind("beta,sup_resolvent\n", 0) == 0);
  REQUIRE(line_count(gear) == 6);  // header + default beta grid

  std::string expm = slurp("cli_diag_out_expm.csv");
  REQUIRE(expm.rfind("t,log_norm\n", 0) == 0);
  REQUIRE(line_count(expm) == 25);  // header + 24 grid points

  SECTION("other targets") {
    REQUIRE(run_cli("diagnose --input cli_diag.json --target A22neg --output cli_diag2") == 0);
    Json j2 = io::read_json("cli_diag2.json");
    REQUIRE(j2["semigroup"]["classification"] == "exponentially_stable");
    REQUIRE(j2["semigroup"]["exp_type_spectral"].get<double>() == Catch::Approx(-2.0).margin(1e-10));
    std::remove("cli_diag2.json");
    std::remove("cli_diag2_gearhart.csv");
    std::remove("cli_diag2_expm.csv");
  }

  SECTION("empty target block") {
    Matrix a22 = Matrix::Zero(2, 2);
    a22(0, 0) = 1.0;
    a22(1, 1) = 2.0;
    BlockOperator m(KreinStructure{0, 2}, Matrix(0, 0), Matrix(0, 2), Matrix(2, 0), a22);
    io::write_problem("cli_diag_empty.json", m);
    REQUIRE(run_cli("diagnose --input cli_diag_empty.json --target A11 --output cli_diag3") == 2);
    std::remove("cli_diag_empty.json");
  }

  std::remove("cli_diag.json");
  std::remove("cli_diag_out.json");
  std::remove("cli_diag_out_gearhart.csv");
  std::remove("cli_diag_out_expm.csv");
}

TEST_CASE("cli: family trends") {
  REQUIRE(run_cli("family --kind structured_family --sizes 4,8 --output cli_fam") == 0);

  std::string csv = slurp("cli_fam.csv");
  REQUIRE(csv.rfind("size,k_diff,surrogate,g_norm,pair_left,pair_right,r_sup\n", 0) == 0);
  REQUIRE(line_count(csv) == 3);

  Json j = io::read_json("cli_fam.json");
  REQUIRE(j["kind"] == "structured_family");
  REQUIRE(j["galerkin"]["rows"].size() == 2);
  REQUIRE(j["thm31"]["pass"] == true);

  REQUIRE(run_cli("family --kind structured_family --sizes 8,4 --output cli_fam_bad") == 1);

  std::remove("cli_fam.csv");
  std::remove("cli_fam.json");
}
