#pragma once

// Concrete pointwise geometric data:
//   * flat_datum          - zero curvature, random unit spinor,
//   * kaehler_pure_flat   - flat Kaehler-type datum (r = 2) whose spinor is
//                           the joint kernel of the annihilation operators,
//   * tautological_spin_n - auxiliary bundle a copy of the tangent module
//                           (r = n) with theta_kl = R_..kl; the spinor is the
//                           canonical element of the diagonal joint kernel,
//   * qk_spinor           - quaternionic model space (n = 4m, r = 3) with the
//                           parallel twisted pure spinor and theta derived
//                           from the scalar curvature.
//
// All constructions are deterministic; kernel extraction uses a singular
// value threshold of 1e-8 relative to the largest singular value.

#include <cstdint>

#include "spinr/spinlab.hpp"

namespace spinr {

GeometricDatum flat_datum(int n, int r, std::uint64_t seed);

// n = 2k, r = 2.  The spinor is (joint kernel of e_{2j-1} + i e_{2j} on the
// base factor) tensored with an f_1 f_2 eigenvector; its eta form is exactly
// a +-1 symplectic pairing.
GeometricDatum kaehler_pure_flat(int k);

// Even n <= 8.  Attaches the given curvature; theta_kl = R_..kl.  The spinor
// is chosen inside the joint kernel of {e_k e_l + f_k f_l : k < l} by the
// additional base/auxiliary intertwining conditions, which pin the canonical
// element (the joint kernel itself is 2-dimensional; its dimension is
// recorded on the datum).
GeometricDatum tautological_spin_n(int n, const CurvatureTensor& R);

// n = 4m, r = 3, sign = +-1.  Kernel search over quaternionic form
// assignments and per-form signs; theta_kl = -scal / (n (n/4 + 2r - 4)) *
// hat(eta^psi')_kl.
GeometricDatum qk_spinor(int m, int sign);

}  // namespace spinr
