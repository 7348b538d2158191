// Command-line front end: generate curvature data and geometric models,
// evaluate index expressions against them, check identities, and run the
// full verification suite.
//
// Exit codes: 0 = success / all checks passed, 1 = a check failed,
// 2 = usage or input error.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spinr/clifford.hpp"
#include "spinr/curvature.hpp"
#include "spinr/exprlang.hpp"
#include "spinr/json_io.hpp"
#include "spinr/models.hpp"
#include "spinr/spinlab.hpp"
#include "spinr/suite.hpp"
#include "spinr/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

double default_tol() {
  if (const char* env = std::getenv("SPINR_TOL")) {
    char* end = nullptr;
    double v = std::strtod(env, &end);
    if (end != env && v > 0) return v;
  }
  return 1e-9;
}

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// A datum file may hold either a full geometric datum or a bare curvature
// tensor; dispatch on which fields are present.
struct LoadedDatum {
  std::optional<spinr::GeometricDatum> datum;
  std::optional<spinr::CurvatureTensor> curvature;
};

LoadedDatum load_datum_file(const std::string& path) {
  spinr::Json j = spinr::load_json(path);
  LoadedDatum out;
  if (j.contains("psi"))
    out.datum = spinr::datum_from_json(j);
  else if (j.contains("R"))
    out.curvature = spinr::curvature_from_json(j);
  else
    throw std::invalid_argument(path + ": neither a geometric datum nor a curvature tensor");
  return out;
}

spinr::expr::Environment make_env(const LoadedDatum& ld) {
  if (ld.datum) return spinr::expr::make_environment(*ld.datum);
  auto rep = std::make_shared<const spinr::CliffordRep>(
      spinr::build_twisted_rep(ld.curvature->n, 0, 1));
  return spinr::expr::make_environment(rep, *ld.curvature);
}

void print_value(const spinr::expr::Value& v) {
  if (v.indices.empty() && !v.matrix) {
    std::printf("%s\n", num(v.re.at(0)).c_str());
    return;
  }
  spinr::Json j;
  j["indices"] = v.indices;
  j["dims"] = v.dims;
  if (v.matrix) {
    spinr::Json vals = spinr::Json::array();
    for (const auto& m : v.mats) {
      spinr::Json rows = spinr::Json::array();
      for (Eigen::Index a = 0; a < m.rows(); ++a) {
        spinr::Json row = spinr::Json::array();
        for (Eigen::Index b = 0; b < m.cols(); ++b)
          row.push_back({m(a, b).real(), m(a, b).imag()});
        rows.push_back(std::move(row));
      }
      vals.push_back(std::move(rows));
    }
    j["values"] = std::move(vals);
  } else {
    j["values"] = v.re;
  }
  std::printf("%s\n", j.dump(2).c_str());
}

int cmd_gen(const std::string& kind, int n, double kappa, int m, int sign,
            std::uint64_t seed, bool tracefree, const std::string& out_path) {
  spinr::Json j;
  std::string summary;
  if (kind == "random") {
    spinr::CurvatureTensor R = spinr::random_curvature(n, seed);
    summary = "n = " + std::to_string(n) + ", scal = " + num(spinr::scal(R));
    j = spinr::curvature_to_json(R);
  } else if (kind == "constant") {
    spinr::CurvatureTensor R = spinr::constant_curvature(n, kappa);
    summary = "n = " + std::to_string(n) + ", scal = " + num(spinr::scal(R));
    j = spinr::curvature_to_json(R);
  } else if (kind == "qk") {
    spinr::QkModel model = spinr::qk_model(m, sign);
    summary = "n = " + std::to_string(model.R.n) + ", scal = " + num(spinr::scal(model.R));
    j = spinr::curvature_to_json(model.R);
  } else if (kind == "sym") {
    spinr::Rng rng = spinr::seeded_rng(seed);
    spinr::RMat h = tracefree ? spinr::random_symmetric_tracefree(n, rng)
                              : spinr::random_symmetric(n, rng);
    summary = "n = " + std::to_string(n) + ", |h| = " + num(spinr::frob(h));
    j = spinr::sym_to_json(h);
  } else {
    throw std::invalid_argument("gen: unknown --kind '" + kind + "'");
  }
  if (out_path.empty()) {
    std::printf("%s\n", j.dump(2).c_str());
  } else {
    spinr::save_json(out_path, j);
    std::printf("wrote %s (%s)\n", out_path.c_str(), summary.c_str());
  }
  return kExitOk;
}

int cmd_model(const std::string& label, int n, int r, int k, int m, int sign,
              std::uint64_t seed, const std::string& curv_path,
              const std::string& out_path) {
  spinr::GeometricDatum d;
  if (label == "flat") {
    d = spinr::flat_datum(n, r, seed);
  } else if (label == "kaehler-flat") {
    d = spinr::kaehler_pure_flat(k);
  } else if (label == "taut-spin-n") {
    spinr::CurvatureTensor R =
        curv_path.empty() ? spinr::random_curvature(n, seed)
                          : spinr::curvature_from_json(spinr::load_json(curv_path));
    d = spinr::tautological_spin_n(n, R);
  } else if (label == "qk") {
    d = spinr::qk_spinor(m, sign);
  } else {
    throw std::invalid_argument("model: unknown --label '" + label + "'");
  }
  double constraint = spinr::parallel_constraint_check(d);
  std::string summary = "label = " + d.label + ", n = " + std::to_string(d.rep->n) +
                        ", r = " + std::to_string(d.rep->r) +
                        ", dim = " + std::to_string(d.rep->dim) +
                        ", kernel_dim = " + std::to_string(d.kernel_dim) +
                        ", constraint_residual = " + num(constraint);
  spinr::Json j = spinr::datum_to_json(d);
  if (out_path.empty()) {
    std::printf("%s\n", j.dump(2).c_str());
  } else {
    spinr::save_json(out_path, j);
    std::printf("wrote %s (%s)\n", out_path.c_str(), summary.c_str());
  }
  return kExitOk;
}

int cmd_eval(const std::string& expr_text, const std::string& datum_path,
             const std::string& h_path) {
  LoadedDatum ld = load_datum_file(datum_path);
  spinr::expr::Environment env = make_env(ld);
  if (!h_path.empty())
    spinr::expr::bind_h(env, spinr::sym_from_json(spinr::load_json(h_path)));
  spinr::expr::Value v = spinr::expr::evaluate(spinr::expr::parse(expr_text), env);
  print_value(v);
  return kExitOk;
}

int cmd_check(const std::string& lhs, const std::string& rhs, double tol,
              const std::string& datum_path, const std::string& h_path,
              const std::string& file_path) {
  LoadedDatum ld = load_datum_file(datum_path);
  spinr::expr::Environment env = make_env(ld);
  if (!h_path.empty())
    spinr::expr::bind_h(env, spinr::sym_from_json(spinr::load_json(h_path)));

  std::vector<spinr::VerificationReport> reports;
  if (!file_path.empty()) {
    spinr::Json batch = spinr::load_json(file_path);
    if (!batch.is_array())
      throw std::invalid_argument(file_path + ": expected an array of checks");
    for (const auto& item : batch) {
      spinr::VerificationReport r = spinr::expr::check_identity(
          item.at("lhs").get<std::string>(), item.at("rhs").get<std::string>(), env,
          item.value("tol", tol));
      if (item.contains("name")) r.check = item.at("name").get<std::string>();
      reports.push_back(std::move(r));
    }
  } else {
    if (lhs.empty() || rhs.empty())
      throw std::invalid_argument("check: provide --lhs and --rhs, or --file");
    reports.push_back(spinr::expr::check_identity(lhs, rhs, env, tol));
  }
  std::printf("%s\n", spinr::reports_to_json(reports).dump(2).c_str());
  return spinr::all_pass(reports) ? kExitOk : kExitCheckFailed;
}

spinr::SuiteConfig parse_suite_config(const std::string& path) {
  spinr::SuiteConfig cfg;
  if (path.empty()) return cfg;
  spinr::Json j = spinr::load_json(path);
  cfg.clifford_n = j.value("clifford_n", cfg.clifford_n);
  cfg.clifford_r = j.value("clifford_r", cfg.clifford_r);
  cfg.identity_n = j.value("identity_n", cfg.identity_n);
  cfg.identity_trials = j.value("identity_trials", cfg.identity_trials);
  cfg.bochner_samples = j.value("bochner_samples", cfg.bochner_samples);
  cfg.isometry_trials = j.value("isometry_trials", cfg.isometry_trials);
  cfg.pairing_samples = j.value("pairing_samples", cfg.pairing_samples);
  cfg.koiso_samples = j.value("koiso_samples", cfg.koiso_samples);
  cfg.semistab_trials = j.value("semistab_trials", cfg.semistab_trials);
  cfg.expr_trials = j.value("expr_trials", cfg.expr_trials);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.tol_identity = j.value("tol_identity", cfg.tol_identity);
  cfg.tol_model = j.value("tol_model", cfg.tol_model);
  cfg.output_path = j.value("output", cfg.output_path);
  return cfg;
}

int cmd_suite(const std::string& config_path, const std::string& out_path) {
  spinr::SuiteConfig cfg = parse_suite_config(config_path);
  if (!out_path.empty()) cfg.output_path = out_path;
  std::vector<spinr::VerificationReport> reports = spinr::run_acceptance_suite(cfg);
  spinr::Json j = spinr::reports_to_json(reports);
  if (!cfg.output_path.empty()) spinr::save_json(cfg.output_path, j);
  for (const auto& r : reports)
    std::printf("%s %s\n", r.pass ? "PASS" : "FAIL", r.check.c_str());
  int failed = 0;
  for (const auto& r : reports)
    if (!r.pass) ++failed;
  std::printf("%zu checks, %d failed\n", reports.size(), failed);
  if (cfg.output_path.empty()) std::printf("%s\n", j.dump(2).c_str());
  return failed == 0 ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spin^r spinor algebra workbench"};
  app.require_subcommand(1);

  // gen
  std::string gen_kind = "random", gen_out;
  int gen_n = 4, gen_m = 1, gen_sign = -1;
  double gen_kappa = 1.0;
  std::uint64_t gen_seed = 1;
  bool gen_tracefree = false;
  CLI::App* gen = app.add_subcommand("gen", "generate curvature or symmetric-tensor data");
  gen->add_option("--kind", gen_kind, "random | constant | qk | sym")->required();
  gen->add_option("--n", gen_n, "dimension");
  gen->add_option("--kappa", gen_kappa, "sectional curvature (kind = constant)");
  gen->add_option("--m", gen_m, "quaternionic dimension (kind = qk)");
  gen->add_option("--sign", gen_sign, "+1 or -1 (kind = qk)");
  gen->add_option("--seed", gen_seed, "random seed");
  gen->add_flag("--tracefree", gen_tracefree, "trace-free sample (kind = sym)");
  gen->add_option("--out", gen_out, "output path (stdout when omitted)");

  // model
  std::string model_label, model_curv, model_out;
  int model_n = 4, model_r = 2, model_k = 2, model_m = 3, model_sign = -1;
  std::uint64_t model_seed = 1;
  CLI::App* model = app.add_subcommand("model", "construct a geometric datum");
  model->add_option("--label", model_label, "flat | kaehler-flat | taut-spin-n | qk")
      ->required();
  model->add_option("--n", model_n, "base dimension");
  model->add_option("--r", model_r, "auxiliary rank (label = flat)");
  model->add_option("--k", model_k, "complex dimension (label = kaehler-flat)");
  model->add_option("--m", model_m, "quaternionic dimension (label = qk)");
  model->add_option("--sign", model_sign, "+1 or -1 (label = qk)");
  model->add_option("--seed", model_seed, "random seed");
  model->add_option("--curv", model_curv, "curvature JSON (label = taut-spin-n)");
  model->add_option("--out", model_out, "output path (stdout when omitted)");

  // eval
  std::string eval_expr, eval_datum, eval_h;
  CLI::App* eval = app.add_subcommand("eval", "evaluate an index expression");
  eval->add_option("--expr", eval_expr, "expression text")->required();
  eval->add_option("--datum", eval_datum, "geometric datum or curvature JSON")->required();
  eval->add_option("--hmat", eval_h, "symmetric tensor JSON to bind as h");

  // check
  std::string check_lhs, check_rhs, check_datum, check_h, check_file;
  double check_tol = default_tol();
  CLI::App* check = app.add_subcommand("check", "check an identity between expressions");
  check->add_option("--lhs", check_lhs, "left-hand side");
  check->add_option("--rhs", check_rhs, "right-hand side");
  check->add_option("--tol", check_tol, "tolerance (default from SPINR_TOL or 1e-9)");
  check->add_option("--datum", check_datum, "geometric datum or curvature JSON")->required();
  check->add_option("--hmat", check_h, "symmetric tensor JSON to bind as h");
  check->add_option("--file", check_file, "batch file: [{name, lhs, rhs, tol}]");

  // suite
  std::string suite_config, suite_out;
  CLI::App* suite = app.add_subcommand("suite", "run the full verification suite");
  suite->add_option("--config", suite_config, "suite configuration JSON");
  suite->add_option("--out", suite_out, "report output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed())
      return cmd_gen(gen_kind, gen_n, gen_kappa, gen_m, gen_sign, gen_seed, gen_tracefree,
                     gen_out);
    if (model->parsed())
      return cmd_model(model_label, model_n, model_r, model_k, model_m, model_sign,
                       model_seed, model_curv, model_out);
    if (eval->parsed()) return cmd_eval(eval_expr, eval_datum, eval_h);
    if (check->parsed())
      return cmd_check(check_lhs, check_rhs, check_tol, check_datum, check_h, check_file);
    if (suite->parsed()) return cmd_suite(suite_config, suite_out);
  } catch (const spinr::expr::ExprError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
