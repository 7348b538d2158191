// End-to-end acceptance battery: runs the verification suite and condenses
// its reports into one pass/fail line per acceptance criterion, then re-runs
// the suite to confirm byte-identical reports.  Exits nonzero when any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "spinr/json_io.hpp"
#include "spinr/suite.hpp"

namespace {

struct Criterion {
  std::string description;
  std::vector<std::string> checks;  // report names that must all pass
};

}  // namespace

int main() {
  using clock = std::chrono::steady_clock;
  spinr::SuiteConfig cfg;

  const auto t0 = clock::now();
  std::vector<spinr::VerificationReport> first = spinr::run_acceptance_suite(cfg);
  const auto t1 = clock::now();
  std::vector<spinr::VerificationReport> second = spinr::run_acceptance_suite(cfg);
  const auto t2 = clock::now();

  std::map<std::string, const spinr::VerificationReport*> by_name;
  for (const auto& r : first) by_name[r.check] = &r;

  const std::vector<Criterion> criteria = {
      {"Clifford anticommutation relations across the dimension grid",
       {"clifford_relations"}},
      {"curvature-Clifford contraction identities with Bianchi falsification",
       {"curvature_clifford_identities", "curvature_clifford_identities_mutation"}},
      {"isometric embedding of symmetric tensors into spinor-valued forms",
       {"phi_isometry"}},
      {"Bochner-type formula on flat, tautological, and quaternionic data",
       {"bochner_formula_flat", "bochner_formula_tautological", "bochner_formula_qk",
        "bochner_symmetric_reseed"}},
      {"curvature pairing sign and composition conventions",
       {"curvature_pairing"}},
      {"reduction to the classical curvature term on the tautological structure",
       {"koiso_reduction"}},
      {"quaternionic chain: purity, proportionality, norm, Ricci recovery",
       {"twisted_purity_qk", "theta_eta_proportionality", "norm_formula",
        "ricci_from_eta_theta"}},
      {"pointwise semi-stability of the second-variation lower bound",
       {"semistability_pointwise_qk", "semistability_pointwise_flat"}},
      {"expression-language corpus against hand-coded contractions",
       {"expression_corpus", "expression_plan_agreement", "expression_roundtrip"}},
  };

  int failed = 0;
  int index = 1;
  for (const auto& c : criteria) {
    bool ok = true;
    std::string missing;
    for (const auto& name : c.checks) {
      auto it = by_name.find(name);
      if (it == by_name.end()) {
        ok = false;
        missing = name;
      } else if (!it->second->pass) {
        ok = false;
      }
    }
    if (!ok) ++failed;
    std::printf("criterion %2d: %s -- %s%s\n", index++, ok ? "PASS" : "FAIL",
                c.description.c_str(),
                missing.empty() ? "" : (" [missing report: " + missing + "]").c_str());
  }

  const std::string dump1 = spinr::reports_to_json(first).dump();
  const std::string dump2 = spinr::reports_to_json(second).dump();
  const bool deterministic = dump1 == dump2;
  if (!deterministic) ++failed;
  std::printf("criterion %2d: %s -- byte-identical reports across repeated runs\n",
              index++, deterministic ? "PASS" : "FAIL");

  // condensed numeric context for the log
  auto info = [&](const char* check, const char* key) -> std::string {
    auto it = by_name.find(check);
    if (it == by_name.end()) return "?";
    auto jt = it->second->inputs.find(key);
    return jt == it->second->inputs.end() ? "?" : jt->second;
  };
  std::printf("info: koiso ratio in [%s, %s], lambda = %s (expected %s), "
              "effective c in [%s, %s], eta-bound factor max = %s\n",
              info("koiso_reduction", "ratio_min").c_str(),
              info("koiso_reduction", "ratio_max").c_str(),
              info("theta_eta_proportionality", "lambda").c_str(),
              info("theta_eta_proportionality", "lambda_expected").c_str(),
              info("semistability_pointwise_qk", "effective_c_min").c_str(),
              info("semistability_pointwise_qk", "effective_c_max").c_str(),
              info("semistability_pointwise_qk", "eta_h_eta_over_pair_bound_max").c_str());

  const double run1 = std::chrono::duration<double>(t1 - t0).count();
  const double run2 = std::chrono::duration<double>(t2 - t1).count();
  std::printf("suite wall time: %.1fs first run, %.1fs second run\n", run1, run2);
  std::printf("%d of %zu criteria failed\n", failed, criteria.size() + 1);
  return failed == 0 ? 0 : 1;
}
