#pragma once

// The full verification battery: Clifford relations, curvature-Clifford
// identities (with a Bianchi-projection mutation test), the isometric
// embedding, the Bochner formula on flat / tautological / quaternion-Kahler
// data, the curvature pairing, the classical reduction on the tautological
// structure, the quaternion-Kahler proportionality chain, the pointwise
// semi-stability bound, and the expression-engine corpus.

#include <cstdint>
#include <string>
#include <vector>

#include "spinr/verify.hpp"

namespace spinr {

struct SuiteConfig {
  std::vector<int> clifford_n = {2, 4, 6, 12};
  std::vector<int> clifford_r = {0, 2, 3};
  std::vector<int> identity_n = {4, 5, 6};
  int identity_trials = 100;   // random curvature tensors per dimension
  int bochner_samples = 20;    // (h, T) pairs per datum
  int isometry_trials = 100;   // random h for the isometry check
  int pairing_samples = 5;     // random h per datum for the pairing check
  int koiso_samples = 20;      // random (R, h) pairs
  int semistab_trials = 1000;  // random h for the pointwise bound
  int expr_trials = 10;        // random curvatures for the expression corpus
  std::uint64_t seed = 20250815;
  double tol_identity = 1e-11;  // pure Clifford / curvature identities
  double tol_model = 1e-9;      // model-datum checks (kernel extraction noise)
  std::string output_path;      // optional report destination
};

// Dims must be within supported ranges (n <= 12 for twisted representations,
// n <= 8 for the tautological construction); throws std::invalid_argument.
void validate(const SuiteConfig& cfg);

// Runs every check and returns the reports sorted by check name.
std::vector<VerificationReport> run_acceptance_suite(const SuiteConfig& cfg);

bool all_pass(const std::vector<VerificationReport>& reports);

}  // namespace spinr
