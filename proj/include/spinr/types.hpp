#pragma once

// Shared scalar/matrix aliases and the seeded RNG used across the library.
// Every random quantity in the library is drawn through these helpers from an
// explicit 64-bit seed, so all constructions are reproducible.

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>

namespace spinr {

using cx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

// A spinor is a coefficient vector in a fixed orthonormal basis of the
// (twisted) spinor module.
using Spinor = Eigen::VectorXcd;

using Rng = std::mt19937_64;

inline Rng seeded_rng(std::uint64_t seed) { return Rng(seed); }

// Uniform draw from [-1, 1].
inline double unif(Rng& g) {
  return std::uniform_real_distribution<double>(-1.0, 1.0)(g);
}

// Random symmetric n x n matrix with entries in [-1, 1].
inline RMat random_symmetric(int n, Rng& g) {
  RMat h(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double v = unif(g);
      h(i, j) = v;
      h(j, i) = v;
    }
  return h;
}

inline RMat random_symmetric(int n, std::uint64_t seed) {
  Rng g = seeded_rng(seed);
  return random_symmetric(n, g);
}

// Random symmetric trace-free matrix.
inline RMat random_symmetric_tracefree(int n, Rng& g) {
  RMat h = random_symmetric(n, g);
  const double t = h.trace() / n;
  for (int i = 0; i < n; ++i) h(i, i) -= t;
  return h;
}

// Random unit-norm spinor of the given dimension.
inline Spinor random_unit_spinor(Eigen::Index dim, Rng& g) {
  Spinor s(dim);
  for (Eigen::Index i = 0; i < dim; ++i) s[i] = cx(unif(g), unif(g));
  const double nrm = s.norm();
  return nrm > 0 ? Spinor(s / nrm) : s;
}

inline double frob(const RMat& a) { return a.norm(); }

// <A, B> = sum_ij A_ij B_ij, the Euclidean pairing on 2-tensors.
inline double tensor_dot(const RMat& a, const RMat& b) {
  return (a.array() * b.array()).sum();
}

}  // namespace spinr
