#pragma once

// Explicit matrix realizations of Clifford algebras and of the twisted spinor
// module Sigma(n, r, m) = Sigma_n (x) (Sigma_r)^(x m).
//
// Conventions (fixed throughout the library):
//   * generators square to -1:  e_i . e_i = -1,  f_k . f_k = -1,
//     and distinct generators anticommute,
//   * X ^ Y acts as  X.Y + g(X,Y)  on spinors,
//   * a 2-form  w  acts as  sum_{i<j} w_ij e_i e_j,
//   * the Hermitian inner product is conjugate-linear in its SECOND slot,
//     all generator matrices are skew-Hermitian and unitary.
//
// The mixed base/auxiliary anticommutation for m = 1 is realized with a
// volume twist: e_i = gamma_i (x) Id and f_k = omega_n (x) delta_k, where
// omega_n is the base volume element with its phase chosen so that
// omega_n^2 = Id and omega_n is Hermitian.  This requires n even; requesting
// auxiliary generators over an odd-dimensional base with m = 1 is an
// unsupported configuration and throws.
//
// For m > 1 only the degree-2 auxiliary actions f_k f_l are available; they
// act as derivations (slot sums) on the tensor power, i.e. through the
// Lie-algebra action of so(r).

#include <vector>

#include "spinr/types.hpp"

namespace spinr {

struct CliffordRep {
  int n = 0;  // base dimension
  int r = 0;  // auxiliary rank
  int m = 1;  // tensor power of the auxiliary spinor factor
  Eigen::Index dim = 0;

  // Action of e_i on the twisted module (n matrices, dim x dim).
  std::vector<CMat> base;
  // Action of f_k (m == 1 only; empty for m > 1 or r == 0).
  std::vector<CMat> aux;
  // Action of f_k f_l, stored as an r x r grid (row-major k*r + l).
  std::vector<CMat> aux_pair;

  bool has_single_aux() const { return !aux.empty(); }
  const CMat& e(int i) const { return base.at(i); }
  const CMat& f(int k) const { return aux.at(k); }
  const CMat& pair(int k, int l) const { return aux_pair.at(static_cast<size_t>(k) * r + l); }
};

// Skew-Hermitian unitary generators of Cl(n) with gamma_i^2 = -Id on a module
// of dimension 2^floor(n/2).  Throws std::invalid_argument for n < 1.
std::vector<CMat> build_gamma(int n);

// Volume element of a generator family, phased to be Hermitian with square
// +Id (requires an even number of generators).
CMat volume_element(const std::vector<CMat>& gamma);

// Builds the twisted representation described above.
// Throws std::invalid_argument for out-of-range parameters and
// std::runtime_error("unsupported configuration...") for odd n with r > 0,
// m = 1.
CliffordRep build_twisted_rep(int n, int r, int m);

// Clifford action of a vector v in R^(n+r): sum_i v_i e_i + sum_k v_{n+k} f_k.
// The auxiliary block requires m == 1.
Spinor act_vector(const CliffordRep& rep, const RVec& v, const Spinor& s);

// (X ^ Y) . s = X.Y.s + g(X,Y) s for base vectors X, Y in R^n.
Spinor act_wedge(const CliffordRep& rep, const RVec& x, const RVec& y, const Spinor& s);

// Action of an antisymmetric 2-form: sum_{i<j} w_ij e_i e_j . s.
// Throws std::invalid_argument if w is not antisymmetric.
Spinor act_two_form(const CliffordRep& rep, const RMat& w, const Spinor& s);

// Same action assembled as a dim x dim matrix (used for kernel problems).
CMat two_form_matrix(const CliffordRep& rep, const RMat& w);

// Hermitian inner product, conjugate-linear in the second slot.
inline cx herm_inner(const Spinor& a, const Spinor& b) { return b.dot(a); }

}  // namespace spinr
