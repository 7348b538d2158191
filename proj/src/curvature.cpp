#include "spinr/curvature.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spinr {

namespace {

void require_n(int n) {
  if (n < 2 || n > 24) throw std::invalid_argument("curvature: dimension out of range: " + std::to_string(n));
}

}  // namespace

CurvatureTensor random_pair_symmetric(int n, std::uint64_t seed) {
  require_n(n);
  Rng g = seeded_rng(seed);
  CurvatureTensor raw(n);
  for (double& v : raw.a) v = unif(g);

  CurvatureTensor t(n);
  // Antisymmetrize in (i,j) and (k,l), then symmetrize under pair exchange.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double anti = 0.25 * (raw(i, j, k, l) - raw(j, i, k, l) - raw(i, j, l, k) + raw(j, i, l, k));
          t.at(i, j, k, l) = anti;
        }
  CurvatureTensor out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          out.at(i, j, k, l) = 0.5 * (t(i, j, k, l) + t(k, l, i, j));
  return out;
}

CurvatureTensor random_curvature(int n, std::uint64_t seed) {
  CurvatureTensor t = random_pair_symmetric(n, seed);
  // Subtract the cyclic projection; what remains satisfies first Bianchi and
  // keeps all pair symmetries.
  CurvatureTensor out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double b = (t(i, j, k, l) + t(j, k, i, l) + t(k, i, j, l)) / 3.0;
          out.at(i, j, k, l) = t(i, j, k, l) - b;
        }
  return out;
}

CurvatureTensor constant_curvature(int n, double kappa) {
  require_n(n);
  CurvatureTensor out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      out.at(i, j, j, i) = kappa;
      out.at(i, j, i, j) = -kappa;
    }
  return out;
}

QkModel qk_model(int m, int sign) {
  if (m < 1 || m > 6) throw std::invalid_argument("qk_model: m out of range");
  if (sign != 1 && sign != -1) throw std::invalid_argument("qk_model: sign must be +1 or -1");
  const int n = 4 * m;

  // Left multiplication by i, j, k on H^m in the (1, i, j, k) coordinate
  // blocks; these satisfy J_c^2 = -Id and J1 J2 = J3.
  QkModel out;
  out.J1 = RMat::Zero(n, n);
  out.J2 = RMat::Zero(n, n);
  out.J3 = RMat::Zero(n, n);
  for (int b = 0; b < m; ++b) {
    const int o = 4 * b;
    // i . (a + b i + c j + d k) = -b + a i - d j + c k
    out.J1(o + 0, o + 1) = -1; out.J1(o + 1, o + 0) = 1;
    out.J1(o + 2, o + 3) = -1; out.J1(o + 3, o + 2) = 1;
    // j . (a + b i + c j + d k) = -c + d i + a j - b k
    out.J2(o + 0, o + 2) = -1; out.J2(o + 1, o + 3) = 1;
    out.J2(o + 2, o + 0) = 1;  out.J2(o + 3, o + 1) = -1;
    // k . (a + b i + c j + d k) = -d - c i + b j + a k
    out.J3(o + 0, o + 3) = -1; out.J3(o + 1, o + 2) = -1;
    out.J3(o + 2, o + 1) = 1;  out.J3(o + 3, o + 0) = 1;
  }

  const RMat* J[3] = {&out.J1, &out.J2, &out.J3};
  out.R = CurvatureTensor(n);
  const double s4 = sign / 4.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double v = (j == k && i == l ? 1.0 : 0.0) - (i == k && j == l ? 1.0 : 0.0);
          for (int c = 0; c < 3; ++c) {
            const RMat& Jc = *J[c];
            v += Jc(k, j) * Jc(l, i) - Jc(k, i) * Jc(l, j) + 2.0 * Jc(i, j) * Jc(l, k);
          }
          out.R.at(i, j, k, l) = s4 * v;
        }
  return out;
}

RMat ricci(const CurvatureTensor& R) {
  const int n = R.n;
  RMat ric = RMat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0;
      for (int k = 0; k < n; ++k) s += R(i, k, k, j);
      ric(i, j) = s;
    }
  return ric;
}

double scal(const CurvatureTensor& R) { return ricci(R).trace(); }

RMat ring_action(const CurvatureTensor& R, const RMat& h) {
  const int n = R.n;
  if (h.rows() != n || h.cols() != n) throw std::invalid_argument("ring_action: dimension mismatch");
  RMat out = RMat::Zero(n, n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      double s = 0;
      for (int i = 0; i < n; ++i)
        for (int p = 0; p < n; ++p) s += h(i, p) * R(i, k, j, p);
      out(k, j) = s;
    }
  return out;
}

RMat ric_compose(const CurvatureTensor& R, const RMat& h) {
  const int n = R.n;
  if (h.rows() != n || h.cols() != n) throw std::invalid_argument("ric_compose: dimension mismatch");
  return ricci(R) * h;
}

double pair_symmetry_residual(const CurvatureTensor& R) {
  const int n = R.n;
  double worst = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double v = R(i, j, k, l);
          worst = std::max(worst, std::abs(v + R(j, i, k, l)));
          worst = std::max(worst, std::abs(v + R(i, j, l, k)));
          worst = std::max(worst, std::abs(v - R(k, l, i, j)));
        }
  return worst;
}

double first_bianchi_residual(const CurvatureTensor& R) {
  const int n = R.n;
  double worst = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          worst = std::max(worst, std::abs(R(i, j, k, l) + R(j, k, i, l) + R(k, i, j, l)));
  return worst;
}

}  // namespace spinr
