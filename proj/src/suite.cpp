#include "spinr/suite.hpp"

#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "spinr/clifford.hpp"
#include "spinr/curvature.hpp"
#include "spinr/exprlang.hpp"
#include "spinr/models.hpp"
#include "spinr/spinlab.hpp"

namespace spinr {

namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

VerificationReport simple_report(std::string name, std::string residual_name,
                                 double residual, double tol) {
  VerificationReport r;
  r.check = std::move(name);
  r.residuals[std::move(residual_name)] = residual;
  r.tol = tol;
  r.pass = residual < tol;
  return r;
}

// The generators are Kronecker chains of Pauli factors (one entry per row),
// so sparse products keep the large representations cheap.
using SpCMat = Eigen::SparseMatrix<cx>;

double anticommutator_residual(const CliffordRep& rep) {
  std::vector<SpCMat> gens;
  for (const auto& g : rep.base) gens.push_back(g.sparseView());
  for (const auto& g : rep.aux) gens.push_back(g.sparseView());
  SpCMat id(rep.dim, rep.dim);
  id.setIdentity();
  double worst = 0.0;
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (std::size_t j = i; j < gens.size(); ++j) {
      SpCMat p1 = gens[i] * gens[j];
      SpCMat p2 = gens[j] * gens[i];
      SpCMat ac = p1 + p2;
      if (i == j) ac = SpCMat(ac + 2.0 * id);
      for (int o = 0; o < ac.outerSize(); ++o)
        for (SpCMat::InnerIterator it(ac, o); it; ++it)
          worst = std::max(worst, std::abs(it.value()));
    }
  return worst;
}

}  // namespace

void validate(const SuiteConfig& cfg) {
  for (int n : cfg.clifford_n)
    if (n < 1 || n > 12)
      throw std::invalid_argument("suite: twisted representations support n <= 12");
  for (int r : cfg.clifford_r)
    if (r < 0 || r > 6) throw std::invalid_argument("suite: auxiliary rank out of range");
  for (int n : cfg.identity_n)
    if (n < 2 || n > 8)
      throw std::invalid_argument("suite: identity dimensions must lie in [2, 8]");
  if (cfg.identity_trials <= 0 || cfg.bochner_samples <= 0 || cfg.isometry_trials <= 0 ||
      cfg.pairing_samples <= 0 || cfg.koiso_samples <= 0 || cfg.semistab_trials <= 0 ||
      cfg.expr_trials <= 0)
    throw std::invalid_argument("suite: trial counts must be positive");
}

std::vector<VerificationReport> run_acceptance_suite(const SuiteConfig& cfg) {
  validate(cfg);
  std::vector<VerificationReport> out;

  // --- Clifford anticommutator relations over the configured grid. ---
  {
    double worst = 0.0;
    std::string worst_case = "-";
    for (int n : cfg.clifford_n)
      for (int r : cfg.clifford_r) {
        if (n % 2 == 1 && r > 0) continue;  // unsupported with m = 1
        CliffordRep rep = build_twisted_rep(n, r, 1);
        double res = anticommutator_residual(rep);
        if (res >= worst) {
          worst = res;
          worst_case = "n=" + std::to_string(n) + ",r=" + std::to_string(r);
        }
      }
    VerificationReport r =
        simple_report("clifford_relations", "max_anticommutator_residual", worst, 1e-12);
    r.inputs["worst_case"] = worst_case;
    out.push_back(std::move(r));
  }

  // --- Curvature-Clifford identities + Bianchi-projection mutation test. ---
  {
    double worst = 0.0;
    int mutated_failures = 0, mutated_total = 0;
    for (int n : cfg.identity_n) {
      CliffordRep rep = build_twisted_rep(n, 0, 1);
      for (int t = 0; t < cfg.identity_trials; ++t) {
        CurvatureTensor R = random_curvature(n, cfg.seed + 1000 * n + t);
        worst = std::max(worst, clifford_identity_one(R, rep));
        worst = std::max(worst, clifford_identity_two(R, rep));
      }
      for (int t = 0; t < cfg.identity_trials; ++t) {
        CurvatureTensor Rm = random_pair_symmetric(n, cfg.seed + 500000 + 1000 * n + t);
        double res = std::max(clifford_identity_one(Rm, rep), clifford_identity_two(Rm, rep));
        if (res > 1e-6) ++mutated_failures;
        ++mutated_total;
      }
    }
    out.push_back(simple_report("curvature_clifford_identities", "max_relative_residual",
                                worst, cfg.tol_identity));
    double fail_fraction = static_cast<double>(mutated_failures) / mutated_total;
    VerificationReport r =
        simple_report("curvature_clifford_identities_mutation", "fail_fraction_deficit",
                      std::max(0.0, 0.95 - fail_fraction), 1e-12);
    r.inputs["fail_fraction"] = fmt(fail_fraction);
    r.inputs["instances"] = std::to_string(mutated_total);
    out.push_back(std::move(r));
  }

  // --- Model data, shared across the remaining checks. ---
  GeometricDatum flat6 = flat_datum(6, 2, cfg.seed + 11);
  CurvatureTensor R4 = random_curvature(4, cfg.seed + 12);
  GeometricDatum taut4 = tautological_spin_n(4, R4);
  GeometricDatum qk = qk_spinor(3, -1);

  // --- Isometry of the spinor-valued embedding of symmetric tensors. ---
  {
    Rng rng = seeded_rng(cfg.seed + 3);
    double worst = 0.0;
    for (const GeometricDatum* d : {&flat6, &taut4, &qk})
      for (int t = 0; t < cfg.isometry_trials; ++t)
        worst = std::max(worst, phi_isometry_residual(*d, random_symmetric(d->rep->n, rng)));
    out.push_back(simple_report("phi_isometry", "max_relative_deviation", worst, 1e-12));
  }

  // --- Bochner formula on flat / tautological / quaternion-Kahler data. ---
  {
    Rng rng = seeded_rng(cfg.seed + 4);
    double reseed_worst = 0.0;
    const struct {
      const GeometricDatum* d;
      const char* name;
    } cases[] = {{&flat6, "bochner_formula_flat"},
                 {&taut4, "bochner_formula_tautological"},
                 {&qk, "bochner_formula_qk"}};
    for (const auto& c : cases) {
      BochnerContext ctx = make_bochner_context(*c.d);
      const int n = c.d->rep->n;
      double worst = 0.0;
      for (int t = 0; t < cfg.bochner_samples; ++t) {
        RMat h = random_symmetric(n, rng);
        std::uint64_t tseed = cfg.seed + 40000 + t;
        SecondDerivSymbol T = ricci_identity_symbol(c.d->R, h, tseed);
        VerificationReport rep = bochner_formula_check(ctx, h, T, cfg.tol_model);
        worst = std::max(worst, rep.residuals.at("relative_residual"));
        if (t == 0) {
          SecondDerivSymbol T2 = ricci_identity_symbol(c.d->R, h, tseed + 777);
          VerificationReport rep2 = bochner_formula_check(ctx, h, T2, cfg.tol_model);
          reseed_worst = std::max(reseed_worst,
                                  std::abs(rep.residuals.at("relative_residual") -
                                           rep2.residuals.at("relative_residual")));
        }
      }
      VerificationReport r = simple_report(c.name, "max_relative_residual", worst,
                                           cfg.tol_model);
      r.inputs["label"] = c.d->label;
      r.inputs["samples"] = std::to_string(cfg.bochner_samples);
      out.push_back(std::move(r));
    }
    out.push_back(simple_report("bochner_symmetric_reseed", "max_residual_change",
                                reseed_worst, 1e-12));
  }

  // --- Curvature pairing bookkeeping. ---
  {
    Rng rng = seeded_rng(cfg.seed + 5);
    double worst = 0.0;
    for (const GeometricDatum* d : {&taut4, &qk})
      for (int t = 0; t < cfg.pairing_samples; ++t) {
        VerificationReport r =
            curvature_pairing_check(*d, random_symmetric(d->rep->n, rng), 1e-10);
        worst = std::max(worst, r.residuals.at("pairing_difference"));
      }
    out.push_back(simple_report("curvature_pairing", "max_pairing_difference", worst, 1e-10));
  }

  // --- Reduction to the classical curvature term on tautological data. ---
  {
    Rng rng = seeded_rng(cfg.seed + 6);
    double rmin = 0.0, rmax = 0.0, rdev = 0.0;
    bool first = true;
    for (int t = 0; t < cfg.koiso_samples; ++t) {
      CurvatureTensor R = random_curvature(4, cfg.seed + 60000 + t);
      GeometricDatum d = tautological_spin_n(4, R);
      RMat h = random_symmetric(4, rng);
      VerificationReport kr = koiso_reduction_check(d, h, 1e-8);
      if (!kr.inputs.count("ratio")) continue;  // degenerate sample (both terms ~ 0)
      double ratio = std::strtod(kr.inputs.at("ratio").c_str(), nullptr);
      double dev = kr.residuals.at("ratio_deviation");
      if (first) {
        rmin = rmax = ratio;
        first = false;
      } else {
        rmin = std::min(rmin, ratio);
        rmax = std::max(rmax, ratio);
      }
      rdev = std::max(rdev, dev);
    }
    VerificationReport r =
        simple_report("koiso_reduction", "ratio_spread", first ? 0.0 : rmax - rmin, 1e-8);
    r.inputs["ratio_min"] = fmt(rmin);
    r.inputs["ratio_max"] = fmt(rmax);
    r.inputs["max_deviation_from_one"] = fmt(rdev);
    r.inputs["samples"] = std::to_string(cfg.koiso_samples);
    out.push_back(std::move(r));
  }

  // --- Quaternion-Kahler chain. ---
  {
    PurityReport purity = twisted_pure_check(*qk.rep, *qk.psi_prime, cfg.tol_model);
    VerificationReport r =
        simple_report("twisted_purity_qk", "worst_pair_residual", purity.worst, cfg.tol_model);
    r.inputs["label"] = qk.label;
    out.push_back(std::move(r));

    VerificationReport prop = proportionality_check(qk, 1e-8);
    prop.check = "theta_eta_proportionality";
    out.push_back(prop);

    VerificationReport norm = norm_formula_check(qk, cfg.tol_model);
    out.push_back(norm);

    EhRicciReport ricci_rep = eh_ricci_identity_check(qk, cfg.tol_model);
    VerificationReport r2 = simple_report("ricci_from_eta_theta", "relative_deviation",
                                          ricci_rep.deviation, cfg.tol_model);
    r2.inputs["label"] = qk.label;
    out.push_back(std::move(r2));
  }

  // --- Pointwise semi-stability bound. ---
  {
    VerificationReport r =
        semistability_pointwise_check(qk, cfg.semistab_trials, cfg.seed + 8, 1e-10);
    r.check = "semistability_pointwise_qk";
    out.push_back(std::move(r));
    VerificationReport rf = semistability_pointwise_check(
        flat6, std::min(cfg.semistab_trials, 100), cfg.seed + 9, 1e-10);
    rf.check = "semistability_pointwise_flat";
    out.push_back(std::move(rf));
  }

  // --- Expression-engine corpus. ---
  {
    const char* corpus[][2] = {
        // first Bianchi identity (zero right-hand side)
        {"R[i,j,k,l] + R[j,k,i,l] + R[k,i,j,l]", "0 R[i,j,k,l]"},
        // Ricci contraction
        {"Ric[i,j]", "R[i,k,k,j]"},
        // scalar contraction
        {"R[i,k,k,i]", "scal"},
        // curvature-Clifford identity (vector form)
        {"R[l,k,i,p] e[k] e[l] e[i]", "2 Ric[p,l] e[l]"},
        // curvature-Clifford identity (three-index form)
        {"R[l,k,j,p] e[k] e[l] e[i]", "- R[j,p,k,l] e[i] e[k] e[l] - 4 R[j,p,i,k] e[k]"},
    };
    auto rep4 = std::make_shared<const CliffordRep>(build_twisted_rep(4, 0, 1));
    double worst = 0.0;
    double plan_diff = 0.0;
    bool roundtrip_ok = true;
    for (int t = 0; t < cfg.expr_trials; ++t) {
      CurvatureTensor R = random_curvature(4, cfg.seed + 90000 + t);
      expr::Environment env = expr::make_environment(rep4, R);
      for (const auto& pair : corpus) {
        VerificationReport r = expr::check_identity(pair[0], pair[1], env, 1e-12);
        worst = std::max(worst, r.residuals.at("max_difference"));
        for (const char* text : {pair[0], pair[1]}) {
          expr::NodePtr ast = expr::parse(text);
          if (!expr::equal(ast, expr::parse(expr::print(ast)))) roundtrip_ok = false;
          expr::Value vg = expr::evaluate(ast, env, expr::PlanOrder::Greedy);
          expr::Value vs = expr::evaluate(ast, env, expr::PlanOrder::Sequential);
          // plan-order agreement, entrywise
          if (vg.matrix) {
            for (std::size_t i2 = 0; i2 < vg.mats.size(); ++i2)
              plan_diff = std::max(plan_diff,
                                   (vg.mats[i2] - vs.mats[i2]).cwiseAbs().maxCoeff());
          } else {
            for (std::size_t i2 = 0; i2 < vg.re.size(); ++i2)
              plan_diff = std::max(plan_diff, std::abs(vg.re[i2] - vs.re[i2]));
          }
        }
      }
      // cross-check against the hand-coded Ricci contraction
      expr::Value ric_val = expr::evaluate(expr::parse("R[i,k,k,j]"), env);
      RMat ric = ricci(R);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          worst = std::max(worst,
                           std::abs(ric_val.re[static_cast<std::size_t>(i) * 4 + j] -
                                    ric(i, j)));
    }
    out.push_back(simple_report("expression_corpus", "max_difference", worst, 1e-12));
    out.push_back(simple_report("expression_plan_agreement", "max_plan_difference",
                                plan_diff, 1e-12));
    out.push_back(simple_report("expression_roundtrip", "failed", roundtrip_ok ? 0.0 : 1.0,
                                0.5));
  }

  std::sort(out.begin(), out.end(),
            [](const VerificationReport& a, const VerificationReport& b) {
              return a.check < b.check;
            });
  return out;
}

bool all_pass(const std::vector<VerificationReport>& reports) {
  for (const auto& r : reports)
    if (!r.pass) return false;
  return true;
}

}  // namespace spinr
