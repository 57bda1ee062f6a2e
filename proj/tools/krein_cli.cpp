// krein: maximal nonnegative invariant subspaces of dissipative block
// operator matrices on finite-dimensional indefinite inner-product spaces,
// plus resolvent-based semigroup diagnostics.
//
// Verbs: solve, diagnose, family, gen. Exit codes: 0 success, 1 I/O or parse
// or usage errors, 2 validation failures (non-dissipative input without
// --force, residuals above tolerance), 3 solver failures.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "krein/krein.hpp"

namespace {

using krein::BlockOperator;
using krein::Complex;
using krein::ErrorCode;
using krein::KreinError;
using krein::Matrix;
using Json = krein::io::Json;

int g_verbosity = 0;

void logv(int level, const std::string& msg) {
  if (g_verbosity >= level) std::fprintf(stderr, "krein: %s\n", msg.c_str());
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::io_error:
    case ErrorCode::parse_error:
    case ErrorCode::invalid_params:
      return 1;
    case ErrorCode::dimension_mismatch:
    case ErrorCode::nonfinite_entry:
    case ErrorCode::not_dissipative:
    case ErrorCode::residual_too_large:
      return 2;
    default:
      return 3;  // solver / numerical failures
  }
}

// --mu accepts "auto", a real number, or "re,im".
std::optional<Complex> parse_mu(const std::string& text) {
  if (text == "auto") return std::nullopt;
  std::size_t comma = text.find(',');
  try {
    std::size_t used = 0;
    if (comma == std::string::npos) {
      double re = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return Complex(re, 0.0);
    }
    std::string re_s = text.substr(0, comma), im_s = text.substr(comma + 1);
    double re = std::stod(re_s, &used);
    if (used != re_s.size()) throw std::invalid_argument(text);
    double im = std::stod(im_s, &used);
    if (used != im_s.size()) throw std::invalid_argument(text);
    return Complex(re, im);
  } catch (const std::exception&) {
    throw KreinError(ErrorCode::invalid_params,
                     "--mu expects 'auto', a real, or 're,im' (got '" + text + "')");
  }
}

Json semigroup_section(const BlockOperator& a, const Matrix& k, Complex mu) {
  Json j;
  logv(1, "classifying restriction X");
  krein::RestrictionReport rest = krein::restriction(a, k, mu);
  j["X"] = krein::io::to_json(krein::classify(rest.X));
  logv(1, "classifying A11");
  j["A11"] = a.structure.n_plus > 0 ? krein::io::to_json(krein::classify(a.A11)) : Json(nullptr);
  logv(1, "classifying -A22");
  j["A22neg"] =
      a.structure.n_minus > 0 ? krein::io::to_json(krein::classify(Matrix(-a.A22))) : Json(nullptr);
  logv(1, "classifying S(mu)");
  j["S"] = a.structure.n_plus > 0 ? krein::io::to_json(krein::classify(krein::eval_transfer(a, mu).S))
                                  : Json(nullptr);
  return j;
}

Json tolerances_section(double residual_tol) {
  Json j;
  j["residual"] = residual_tol;
  j["dissipativity_factor"] = 1e-10;
  j["gap"] = 1e-9;
  j["angle_norm_slack"] = 1e-10;
  return j;
}

int cmd_solve(const std::string& input, const std::string& output, const std::string& solver,
              const std::string& mu_text, double tol, bool force) {
  BlockOperator a = krein::io::read_problem(input);
  logv(1, "parsed problem " + std::to_string(a.structure.n_plus) + "+" +
              std::to_string(a.structure.n_minus));

  Json report;
  report["schema"] = krein::report_schema;
  report["version"] = krein::version;
  report["tolerances"] = tolerances_section(tol);
  report["n_plus"] = a.structure.n_plus;
  report["n_minus"] = a.structure.n_minus;

  krein::DissipativityVerdict verdict = krein::check_dissipativity(a);
  report["dissipativity"] = krein::io::to_json(verdict);
  if (!verdict.j_dissipative && !force) {
    report["status"] = "rejected: input is not J-dissipative (use --force to override)";
    krein::io::write_json(output, report);
    std::fprintf(stderr, "krein: input is not J-dissipative (margin %g); pass --force to solve anyway\n",
                 verdict.uniform_margin);
    return 2;
  }

  std::optional<Complex> mu_opt = parse_mu(mu_text);
  Complex mu = mu_opt ? *mu_opt : krein::default_mu(a);
  report["mu"] = krein::io::to_json(mu);
  report["mu_policy"] = mu_opt ? "explicit" : "auto";
  report["g_norm_at_mu"] = krein::eval_transfer(a, mu).g_norm;
  report["solver"] = solver;

  krein::AngleOperator angle;
  Json diag = Json::object();
  if (solver == "spectral") {
    krein::SolveOptions opts;
    opts.force = force;
    krein::SpectralSolution sol = krein::solve_angle_spectral(a, opts);
    angle = sol.angle;
    diag["spectral_gap"] = sol.diagnostics.spectral_gap;
    diag["gram_min"] = sol.diagnostics.gram_min;
    diag["cond_xplus"] = sol.diagnostics.cond_xplus;
    diag["tie_break_combinations"] = sol.diagnostics.tie_break_combinations;
    Json sel = Json::array();
    for (Complex z : sol.diagnostics.selected) sel.push_back(krein::io::to_json(z));
    diag["selected"] = std::move(sel);
  } else if (solver == "fixed-point") {
    krein::FixedPointOptions opts;
    opts.force = force;
    krein::FixedPointResult res = krein::solve_angle_fixed_point(a, mu_opt, opts);
    angle = res.angle;
    mu = res.mu;
    report["mu"] = krein::io::to_json(mu);
    diag["iterations"] = res.iterations;
    diag["step_norm"] = res.step_norm;
    diag["ric2_residual"] = res.ric2_residual;
    diag["g_norm"] = res.g_norm;
  } else if (solver == "continuation") {
    krein::ContinuationResult res = krein::solve_angle_continuation(a);
    angle = res.angle;
    Json trace = Json::array();
    for (const krein::ContinuationStep& s : res.trace)
      trace.push_back(Json{{"epsilon", s.epsilon}, {"k_norm", s.k_norm}, {"step", s.step}});
    diag["trace"] = std::move(trace);
    diag["ric1_residual"] = res.ric1_residual;
  } else {
    throw KreinError(ErrorCode::invalid_params, "unknown solver: " + solver);
  }
  report["diagnostics"] = std::move(diag);
  report["angle"] = Json{{"K", krein::io::to_json(angle.K)}, {"norm", angle.norm}};

  krein::RiccatiResiduals res = krein::riccati_residuals(a, angle.K, mu);
  report["residuals"] = krein::io::to_json(res);

  krein::GraphSubspace subspace{krein::detail::orthonormalize(krein::graph_stack(angle.K))};
  report["subspace"] =
      Json{{"basis", krein::io::to_json(subspace.basis)},
           {"gram_min", krein::detail::gram_min_of(a.structure, subspace.basis)}};

  bool valid = res.max() <= tol;
  if (valid) {
    krein::RestrictionReport rest = krein::restriction(a, angle.K, mu);
    Json rj;
    rj["X"] = krein::io::to_json(rest.X);
    Json spec = Json::array();
    for (Complex z : rest.spectrum) spec.push_back(krein::io::to_json(z));
    rj["spectrum"] = std::move(spec);
    rj["spectral_abscissa"] = krein::io::finite_or_flag(rest.spectral_abscissa);
    rj["agreement"] = rest.agreement;
    rj["location_check"] = krein::spectral_location_check(rest);
    report["restriction"] = std::move(rj);
    report["semigroup"] = semigroup_section(a, angle.K, mu);

    Json thms;
    try {
      thms["thm31"] = krein::io::to_json(krein::check_thm31_hypotheses(a, 0.5, mu));
    } catch (const KreinError& e) {
      thms["thm31"] = Json{{"error", to_string(e.code())}};
    }
    try {
      thms["thm32"] = krein::io::to_json(krein::check_thm32_hypotheses(a, mu, Complex(1.0, 0.0)));
    } catch (const KreinError& e) {
      thms["thm32"] = Json{{"error", to_string(e.code())}};
    }
    report["theorems"] = std::move(thms);
    report["status"] = "ok";
  } else {
    report["status"] = "validation failed: residuals above tolerance";
  }

  krein::io::write_json(output, report);
  logv(1, "report written to " + output);
  if (!valid) {
    std::fprintf(stderr, "krein: residuals %g exceed tolerance %g\n", res.max(), tol);
    return 2;
  }
  return 0;
}

int cmd_diagnose(const std::string& input, const std::string& output, const std::string& target,
                 const std::string& solver, const std::string& mu_text,
                 const std::vector<double>& betas, bool force) {
  BlockOperator a = krein::io::read_problem(input);
  std::optional<Complex> mu_opt = parse_mu(mu_text);
  Complex mu = mu_opt ? *mu_opt : krein::default_mu(a);

  Matrix t;
  if (target == "X") {
    krein::SolveOptions opts;
    opts.force = force;
    krein::AngleOperator angle;
    if (solver == "continuation")
      angle = krein::solve_angle_continuation(a).angle;
    else if (solver == "fixed-point")
      angle = krein::solve_angle_fixed_point(a, mu_opt).angle;
    else
      angle = krein::solve_angle_spectral(a, opts).angle;
    t = krein::restriction(a, angle.K, mu).X;
  } else if (target == "A11") {
    t = a.A11;
  } else if (target == "A22neg") {
    t = -a.A22;
  } else if (target == "S") {
    t = krein::eval_transfer(a, mu).S;
  } else {
    throw KreinError(ErrorCode::invalid_params, "unknown target: " + target);
  }
  if (t.rows() == 0)
    throw KreinError(ErrorCode::dimension_mismatch, "target block is empty for this problem");

  logv(1, "classifying target " + target);
  krein::SemigroupReport rep = krein::classify(t);
  Json j;
  j["schema"] = krein::report_schema;
  j["version"] = krein::version;
  j["target"] = target;
  j["mu"] = krein::io::to_json(mu);
  j["semigroup"] = krein::io::to_json(rep);
  krein::io::write_json(output + ".json", j);

  // (beta, sup ||R||) curve
  krein::ResolventOracle oracle(t);
  std::vector<std::vector<double>> gear_rows;
  for (double beta : betas)
    gear_rows.push_back({beta, krein::gearhart_sup(oracle, beta, 1e12)});
  krein::io::write_csv(output + "_gearhart.csv", {"beta", "sup_resolvent"}, gear_rows);

  // (t, log ||e^{tT}||) curve
  std::vector<std::vector<double>> expm_rows;
  for (auto& [time, logn] : krein::expm_curve(t)) expm_rows.push_back({time, logn});
  krein::io::write_csv(output + "_expm.csv", {"t", "log_norm"}, expm_rows);

  logv(1, "wrote " + output + ".json and curve CSVs");
  return 0;
}

krein::GeneratorParams params_from_flags(const std::vector<int>& sizes, int n_plus, int n_minus,
                                         double epsilon, std::uint64_t seed, double q,
                                         double f_decay, double g_decay, double coupling,
                                         const std::string& mu0_text, double margin,
                                         bool sectorial, double r_growth) {
  krein::GeneratorParams p;
  p.n_plus = n_plus;
  p.n_minus = n_minus;
  p.epsilon = epsilon;
  p.seed = seed;
  if (!sizes.empty()) p.sizes = sizes;
  p.q = q;
  p.f_decay = f_decay;
  p.g_decay = g_decay;
  p.coupling = coupling;
  std::optional<Complex> mu0 = parse_mu(mu0_text);
  if (mu0) p.mu0 = *mu0;
  p.margin = margin;
  p.sectorial = sectorial;
  p.r_growth = r_growth;
  return p;
}

int cmd_family(const krein::GeneratorParams& p, const std::string& kind,
               const std::string& output) {
  krein::OperatorFamily fam = krein::generate(krein::generator_kind_from(kind), p);
  logv(1, "generated " + kind + " with " + std::to_string(fam.members.size()) + " members");
  krein::GalerkinReport rep = krein::galerkin_convergence(fam);

  std::vector<std::vector<double>> rows;
  for (const krein::GalerkinRow& r : rep.rows)
    rows.push_back({double(r.m), r.k_diff, r.surrogate, r.g_norm, r.pair_left, r.pair_right,
                    r.r_sup});
  krein::io::write_csv(output + ".csv",
                       {"size", "k_diff", "surrogate", "g_norm", "pair_left", "pair_right",
                        "r_sup"},
                       rows);

  Json j;
  j["schema"] = krein::report_schema;
  j["version"] = krein::version;
  j["kind"] = kind;
  j["galerkin"] = krein::io::to_json(rep);
  try {
    j["thm31"] = krein::io::to_json(krein::check_thm31_hypotheses(fam));
  } catch (const KreinError& e) {
    j["thm31"] = Json{{"error", to_string(e.code())}};
  }
  krein::io::write_json(output + ".json", j);
  logv(1, "wrote " + output + ".csv and " + output + ".json");
  return 0;
}

int cmd_gen(const krein::GeneratorParams& p, const std::string& kind, const std::string& output) {
  krein::GeneratorKind k = krein::generator_kind_from(kind);
  krein::OperatorFamily fam = krein::generate(k, p);
  const BlockOperator& a = fam.members.back();  // largest member for families
  Json meta;
  meta["kind"] = kind;
  meta["seed"] = p.seed;
  if (k == krein::GeneratorKind::structured_family) {
    Json sizes = Json::array();
    for (int s : p.sizes) sizes.push_back(s);
    meta["sizes"] = std::move(sizes);
    meta["mu0"] = krein::io::to_json(p.mu0);
  }
  krein::io::write_problem(output, a, meta);
  logv(1, "wrote problem file " + output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* lv = std::getenv("KREIN_LOG")) g_verbosity = std::atoi(lv);

  CLI::App app{"dissipative block operator matrices: invariant subspaces and semigroup diagnostics"};
  app.require_subcommand(1);

  std::string input, output = "report.json", solver = "spectral", mu_text = "auto";
  std::string target = "X", kind = "structured_family";
  double tol = 1e-8;
  bool force = false;
  std::vector<double> betas = {0.0, 0.1, 0.5, 1.0, 2.0};
  std::vector<int> sizes;
  int n_plus = 2, n_minus = 2;
  double epsilon = 1.0, q = 1.0, f_decay = 2.5, g_decay = 2.0, coupling = 1.0;
  double margin = 0.5, r_growth = 0.0;
  bool sectorial = false;
  std::uint64_t seed = 1;
  std::string mu0_text = "-2";

  CLI::App* solve = app.add_subcommand("solve", "solve for the angle operator K and report");
  solve->add_option("--input", input, "problem JSON path")->required();
  solve->add_option("--output", output, "report JSON path");
  solve->add_option("--solver", solver, "spectral|fixed-point|continuation")
      ->check(CLI::IsMember({"spectral", "fixed-point", "continuation"}));
  solve->add_option("--mu", mu_text, "auto, real, or re,im");
  solve->add_option("--tol", tol, "residual acceptance tolerance");
  solve->add_flag("--force", force, "proceed on non-dissipative input");

  CLI::App* diagnose = app.add_subcommand("diagnose", "semigroup diagnostics for a target block");
  diagnose->add_option("--input", input, "problem JSON path")->required();
  diagnose->add_option("--output", output, "output prefix (writes .json and CSVs)");
  diagnose->add_option("--target", target, "X|A11|A22neg|S")
      ->check(CLI::IsMember({"X", "A11", "A22neg", "S"}));
  diagnose->add_option("--solver", solver, "solver used when target is X")
      ->check(CLI::IsMember({"spectral", "fixed-point", "continuation"}));
  diagnose->add_option("--mu", mu_text, "auto, real, or re,im");
  diagnose->add_option("--betas", betas, "beta grid for the Gearhart curve")->delimiter(',');
  diagnose->add_flag("--force", force, "proceed on non-dissipative input");

  CLI::App* family = app.add_subcommand("family", "generate a family and run Galerkin trends");
  family->add_option("--kind", kind, "random_strict|neutral|structured_family");
  family->add_option("--output", output, "output prefix (writes .csv and .json)");
  family->add_option("--sizes", sizes, "n_plus schedule")->delimiter(',');
  family->add_option("--seed", seed, "generator seed");
  family->add_option("--q", q, "A22 growth exponent");
  family->add_option("--f-decay", f_decay, "F0 decay exponent");
  family->add_option("--g-decay", g_decay, "G0 singular-value decay exponent");
  family->add_option("--coupling", coupling, "coupling amplitude");
  family->add_option("--mu0", mu0_text, "construction point (real or re,im)");
  family->add_option("--margin", margin, "target uniform margin (0 embeds an i*omega mode)");
  family->add_flag("--sectorial", sectorial, "sectorial S0 diagonal");
  family->add_option("--r-growth", r_growth, "per-member A21 growth exponent (negative test)");

  CLI::App* gen = app.add_subcommand("gen", "generate a problem file");
  gen->add_option("--kind", kind, "random_strict|neutral|structured_family");
  gen->add_option("--output", output, "problem JSON path");
  gen->add_option("--n-plus", n_plus, "plus dimension");
  gen->add_option("--n-minus", n_minus, "minus dimension");
  gen->add_option("--epsilon", epsilon, "dissipativity margin (random_strict)");
  gen->add_option("--seed", seed, "generator seed");
  gen->add_option("--sizes", sizes, "n_plus schedule (structured_family)")->delimiter(',');
  gen->add_option("--q", q, "A22 growth exponent");
  gen->add_option("--f-decay", f_decay, "F0 decay exponent");
  gen->add_option("--g-decay", g_decay, "G0 singular-value decay exponent");
  gen->add_option("--coupling", coupling, "coupling amplitude");
  gen->add_option("--mu0", mu0_text, "construction point (real or re,im)");
  gen->add_option("--margin", margin, "target uniform margin");
  gen->add_flag("--sectorial", sectorial, "sectorial S0 diagonal");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;  // usage errors -> exit 1
  }

  try {
    if (solve->parsed()) return cmd_solve(input, output, solver, mu_text, tol, force);
    if (diagnose->parsed())
      return cmd_diagnose(input, output, target, solver, mu_text, betas, force);
    krein::GeneratorParams p = params_from_flags(sizes, n_plus, n_minus, epsilon, seed, q, f_decay,
                                                 g_decay, coupling, mu0_text, margin, sectorial,
                                                 r_growth);
    if (family->parsed()) return cmd_family(p, kind, output);
    if (gen->parsed()) return cmd_gen(p, kind, output);
  } catch (const KreinError& e) {
    std::fprintf(stderr, "krein: error [%s]: %s\n", to_string(e.code()), e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "krein: unexpected error: %s\n", e.what());
    return 3;
  }
  return 1;
}
