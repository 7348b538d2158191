#pragma once

// Algebraic curvature tensors in an orthonormal frame and the standard
// contractions used by the verification checks.
//
// Index conventions: R_ijkl = g(R(e_i, e_j) e_k, e_l), with
//   R_ijkl = -R_jikl = -R_ijlk = R_klij
// and the first Bianchi identity R_ijkl + R_jkil + R_kijl = 0.
// Ricci is the contraction Ric_ij = R_ikkj and scal = R_ikki.

#include <cstdint>
#include <vector>

#include "spinr/types.hpp"

namespace spinr {

struct CurvatureTensor {
  int n = 0;
  std::vector<double> a;  // n^4 entries, row-major (i, j, k, l)

  CurvatureTensor() = default;
  explicit CurvatureTensor(int dim) : n(dim), a(static_cast<size_t>(dim) * dim * dim * dim, 0.0) {}

  double operator()(int i, int j, int k, int l) const {
    return a[((static_cast<size_t>(i) * n + j) * n + k) * n + l];
  }
  double& at(int i, int j, int k, int l) {
    return a[((static_cast<size_t>(i) * n + j) * n + k) * n + l];
  }
};

// Quaternionic structure triple J_1 J_2 = J_3 returned with the model tensor.
struct QkModel {
  CurvatureTensor R;
  RMat J1, J2, J3;
};

// Random tensor with the pair symmetries but WITHOUT the first Bianchi
// identity (antisymmetrized in both index pairs, then pair-symmetrized).
// Exposed for falsification tests of Bianchi-dependent identities.
CurvatureTensor random_pair_symmetric(int n, std::uint64_t seed);

// Random algebraic curvature tensor: the pair-symmetric draw followed by
// subtraction of its cyclic part b(R)_ijkl = (R_ijkl + R_jkil + R_kijl) / 3.
CurvatureTensor random_curvature(int n, std::uint64_t seed);

// Constant curvature kappa: R_ijkl = kappa (d_il d_jk - d_ik d_jl),
// with Ric = kappa (n-1) Id.
CurvatureTensor constant_curvature(int n, double kappa);

// Curvature of the quaternionic model space on R^(4m) (sign = +1 for the
// positively curved model, -1 for its negative dual):
//   R(X,Y)Z = sign/4 [ g(Y,Z)X - g(X,Z)Y
//                      + sum_c ( g(J_c Y, Z) J_c X - g(J_c X, Z) J_c Y
//                                + 2 g(X, J_c Y) J_c Z ) ].
// The returned metric is Einstein with constant sign * (n + 8) / 4.
QkModel qk_model(int m, int sign);

RMat ricci(const CurvatureTensor& R);
double scal(const CurvatureTensor& R);

// Curvature action on symmetric 2-tensors: (Rdot h)_kj = h_ip R_ikjp.
RMat ring_action(const CurvatureTensor& R, const RMat& h);

// (Ric o h)_lj = Ric_lp h_pj.
RMat ric_compose(const CurvatureTensor& R, const RMat& h);

// Max-norm residuals of the defining symmetries (used by tests).
double pair_symmetry_residual(const CurvatureTensor& R);
double first_bianchi_residual(const CurvatureTensor& R);

}  // namespace spinr
