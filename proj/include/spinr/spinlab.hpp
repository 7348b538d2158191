#pragma once

// Spinor-valued geometry on top of a twisted Clifford representation:
// the 2-form family eta attached to a spinor, twisted purity, the isometric
// embedding Phi of symmetric 2-tensors into spinor-valued 1-forms, the
// pointwise parallelism constraint linking curvature to the auxiliary
// curvature family Theta, and least-squares recovery of Theta.
//
// Summation conventions mirror the component formulas: repeated auxiliary
// pair indices (k, l) always run over ALL ordered pairs (both orders).

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spinr/clifford.hpp"
#include "spinr/curvature.hpp"

namespace spinr {

// Family of real antisymmetric n x n forms indexed by auxiliary pairs (k, l),
// antisymmetric under k <-> l.
struct TwoFormFamily {
  int n = 0;
  int r = 0;
  std::vector<RMat> forms;  // r*r entries, row-major (k, l)

  TwoFormFamily() = default;
  TwoFormFamily(int n_, int r_) : n(n_), r(r_), forms(static_cast<size_t>(r_) * r_, RMat::Zero(n_, n_)) {}

  const RMat& form(int k, int l) const { return forms.at(static_cast<size_t>(k) * r + l); }
  RMat& form(int k, int l) { return forms.at(static_cast<size_t>(k) * r + l); }
};

// A pointwise geometric configuration: representation, curvature, auxiliary
// curvature family, unit spinor, and (when applicable) the purity-normalized
// spinor.
struct GeometricDatum {
  std::shared_ptr<const CliffordRep> rep;
  CurvatureTensor R;
  TwoFormFamily theta;
  Spinor psi;
  std::optional<Spinor> psi_prime;
  std::string label;
  std::uint64_t seed = 0;
  int kernel_dim = -1;  // dimension of the defining kernel, when one was solved
};

// Endomorphism associated to a 2-form in an orthonormal frame:
// g(hat(w) e_i, e_j) = w(e_i, e_j).  Componentwise the identity map.
inline RMat hat(const RMat& w) { return w; }

// eta^psi_kl(e_i, e_j) = 1/2 Re < (e_i ^ e_j) f_k f_l psi, psi >.
// The 1/2 is the two-form component normalization under full ordered-index
// summation conventions (see eta_forms in spinlab.cpp).
TwoFormFamily eta_forms(const CliffordRep& rep, const Spinor& psi);

struct PurityPairReport {
  int k = 0, l = 0;
  double square_residual = 0;  // | hat(eta) hat(eta) + Id |_inf
  double kernel_residual = 0;  // | (eta_kl + 2 f_k f_l) psi | (r > 2 only)
};

struct PurityReport {
  std::vector<PurityPairReport> pairs;
  bool pass = false;
  double tol = 0;
  double worst = 0;
};

// Twisted purity: hat(eta) o hat(eta) = -Id for every pair, and for r > 2
// additionally (eta_kl + 2 f_k f_l) psi = 0.  Requires r >= 2.
PurityReport twisted_pure_check(const CliffordRep& rep, const Spinor& psi, double tol);

// Spinor-valued 1-form: component j of phi_map(A) is sum_i A_ij e_i psi.
using SpinorForm = std::vector<Spinor>;
SpinorForm phi_map(const CliffordRep& rep, const Spinor& psi, const RMat& a);

// Real L2 pairing on spinor-valued 1-forms: sum_j Re <u_j, v_j>.
double form_inner(const SpinorForm& u, const SpinorForm& v);

// Max over (p, j) of | sum_{k,l} R_pjkl e_k e_l psi
//                      + sum_{k,l} (theta_kl)_pj f_k f_l psi |.
double parallel_constraint_check(const GeometricDatum& datum);

struct ThetaSolve {
  TwoFormFamily theta;
  double residual = 0;   // worst least-squares residual over (p, j)
  bool degenerate = false;  // rank-deficient column system (minimal-norm answer)
};

// Least-squares recovery of the auxiliary curvature family from the
// parallelism constraint, given curvature and spinor.
ThetaSolve solve_theta(const CliffordRep& rep, const CurvatureTensor& R, const Spinor& psi);

// Relative deviation of |psi'|^2 Ric from sum_{k,l} hat(eta^psi')_kl o hat(theta)_kl.
struct EhRicciReport {
  double deviation = 0;
  bool pass = false;
};
EhRicciReport eh_ricci_identity_check(const GeometricDatum& datum, double tol);

struct NormalizeResult {
  Spinor psi_prime;
  double scale = 1.0;   // mean over pairs of sqrt(tr(-hat(eta)^2)/n); quadratic in |psi|
  double spread = 0.0;  // relative spread of that quantity across pairs
};

// Rescales psi0 so that hat(eta)^2 = -Id for every pair (divides by
// sqrt(scale)).  Throws std::runtime_error("not purifiable...") when some
// hat(eta)^2 is not a negative multiple of Id within tolerance, or the
// per-pair multiples disagree.
NormalizeResult normalize_pure(const CliffordRep& rep, const Spinor& psi0);

}  // namespace spinr
