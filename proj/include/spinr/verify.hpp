#pragma once

// Residual checks for the algebraic identity chain behind linear
// semi-stability of Einstein metrics admitting parallel twisted spinors:
// the Bochner-type formula for D*D on spinor-valued 1-forms, its curvature
// pairing, the reduction to <R°h, h> for the tautological structure, the
// proportionality Theta = lambda * eta on the quaternion-Kahler model, and
// the pointwise nonnegativity of the resulting lower bound.
//
// Every check is a pure function returning a VerificationReport whose
// `residuals` map contains exactly the quantities compared against `tol`;
// informational values (ratios, fitted coefficients, empirical constants)
// are recorded as strings in `inputs`.  pass <=> all residuals < tol.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "spinr/curvature.hpp"
#include "spinr/spinlab.hpp"
#include "spinr/types.hpp"

namespace spinr {

// Surrogate for the second covariant derivative (nabla_k nabla_l h)(e_i, e_j):
// a real array T_{klij}, symmetric in (i,j), whose antisymmetric part in
// (k,l) is pinned by the Ricci identity
//   T_{klij} - T_{lkij} = R_{lkip} h_{pj} + R_{lkjp} h_{ip}.
// The rough Laplacian enters downstream as (nabla*nabla h)_{ij} = -T_{kkij}.
struct SecondDerivSymbol {
  int n = 0;
  std::vector<double> t;  // row-major T_{klij}

  double operator()(int k, int l, int i, int j) const {
    return t[((static_cast<std::size_t>(k) * n + l) * n + i) * n + j];
  }
  double& at(int k, int l, int i, int j) {
    return t[((static_cast<std::size_t>(k) * n + l) * n + i) * n + j];
  }
};

struct VerificationReport {
  std::string check;
  std::map<std::string, std::string> inputs;   // labels, dims, seeds, info values
  std::map<std::string, double> residuals;     // everything here must be < tol
  bool pass = false;
  double tol = 0.0;
};

// Draws the (k,l)-symmetric part of T randomly (seeded) and sets the
// antisymmetric part exactly from R and h via the Ricci identity.
SecondDerivSymbol ricci_identity_symbol(const CurvatureTensor& R, const RMat& h,
                                        std::uint64_t seed);

// Max deviation of T from symmetry in its last index pair.
double symbol_pair_symmetry_residual(const SecondDerivSymbol& T);
// Max deviation of the (k,l)-antisymmetric part of T from the Ricci identity.
double symbol_ricci_residual(const SecondDerivSymbol& T, const CurvatureTensor& R,
                             const RMat& h);

// For each p: sum_{k,l,i} R_{lkip} e_k e_l e_i  ==  2 sum_l Ric_{pl} e_l.
// Holds for every algebraic curvature tensor; returns max relative deviation.
double clifford_identity_one(const CurvatureTensor& R, const CliffordRep& rep);

// For each (i,j,p):
//   sum_{kl} R_{lkjp} e_k e_l e_i  ==  - sum_{kl} R_{jpkl} e_i e_k e_l
//                                      - 4 sum_k R_{jpik} e_k.
double clifford_identity_two(const CurvatureTensor& R, const CliffordRep& rep);

// Cached spinor tables for repeated Bochner-formula checks on one datum.
struct BochnerContext {
  const GeometricDatum* datum = nullptr;
  std::vector<Spinor> w1;  // e_i psi
  std::vector<Spinor> w3;  // e_k e_l e_i psi, index ((k*n)+l)*n + i
  std::vector<Spinor> u;   // e_i (f_k f_l psi), k != l, index ((k*r)+l)*n + i
  RMat ric;                // Ricci tensor of datum->R
};

// Requires the datum to satisfy the parallel-spinor curvature constraint;
// throws std::runtime_error with a diagnostic otherwise.
BochnerContext make_bochner_context(const GeometricDatum& datum);

// Bochner-formula identity on spinor-valued 1-forms.  Compares
//   LHS_j := sum_{kl} e_k e_l Phi(T_{kl..})_j
// with
//   RHS_j := Phi(-T_{kk..} - 2 R°h + Ric h)_j
//            - 1/2 sum_{kl} h_{ip} (Theta_{kl})_{pj} e_i f_k f_l psi,
// and reports |LHS - RHS| / |LHS|.  T must be built from the datum's R
// and the given h (its invariants are re-validated).
VerificationReport bochner_formula_check(const BochnerContext& ctx, const RMat& h,
                                         const SecondDerivSymbol& T, double tol);
VerificationReport bochner_formula_check(const GeometricDatum& datum, const RMat& h,
                                         const SecondDerivSymbol& T, double tol);

// Pins the sign and composition-order conventions of the curvature pairing:
//   P1 := 1/2 h_{ip} (Theta_{kl})_{pj} Re< e_i f_k f_l psi (x) e^j, Phi(h) >
//   P2 := -1/2 < eta_{kl} h Theta_{kl}, h >
// and reports their (normalized) difference.
VerificationReport curvature_pairing_check(const GeometricDatum& datum, const RMat& h,
                                           double tol);

// On the tautological structure the curvature pairing collapses to the
// classical curvature term of the linearised Einstein operator:
//   K1 := 1/2 <eta_{kl} h Theta_{kl}, h>   vs   K2 := <R°h, h>,
// ratio expected 1.  Both ~ 0 (e.g. R = 0) => check skipped, pass.
VerificationReport koiso_reduction_check(const GeometricDatum& datum, const RMat& h,
                                         double tol);

// Recovers Theta from the parallel constraint by least squares (not from the
// datum) and fits Theta_{kl} = lambda * eta'_{kl}; compares lambda with
// -scal / (n (n/4 + 2r - 4)) and reports the fit residual.
VerificationReport proportionality_check(const GeometricDatum& datum, double tol);

// |psi'|^2 against r(r-1) / (n/4 + 2r - 4).
VerificationReport norm_formula_check(const GeometricDatum& datum, double tol);

// The lower-bound functional of the second-variation estimate:
//   -<Ric h, h> - 1/2 sum_{kl} <eta_{kl} h Theta_{kl}, h>
// with eta built from the unit spinor psi and (k,l) fully summed.
double second_variation_bound(const GeometricDatum& datum, const RMat& h);

// Pointwise semi-stability: for `trials` random symmetric h (every other one
// trace-free) asserts second_variation_bound >= -tol |h|^2.  Also records the
// proof-chain intermediates: extremes of sum_{kl} <eta_{kl} h eta_{kl}, h>,
// its ratio to the bound r(r-1)|h|^2, and the effective constant c in
//   bound = -E |h|^2 + c E sum_{kl} <eta_{kl} h eta_{kl}, h>.
// Requires an Einstein datum with E <= 0.
VerificationReport semistability_pointwise_check(const GeometricDatum& datum,
                                                 int trials, std::uint64_t seed,
                                                 double tol);

// | |Phi(h)|^2 - |h|^2 | / |h|^2 for the unit-spinor embedding Phi.
double phi_isometry_residual(const GeometricDatum& datum, const RMat& h);

}  // namespace spinr
