#include "spinr/models.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unsupported/Eigen/KroneckerProduct>

namespace spinr {

namespace {

constexpr double kKernelRelTol = 1e-8;

// Basis of the antisymmetric matrices commuting with two almost-complex
// structures (hence with the whole quaternionic triple): the isotropy algebra
// of the quaternionic frame, solved as the nullspace of the commutator map on
// elementary antisymmetric matrices.
std::vector<RMat> commuting_antisymmetric_basis(const RMat& J1, const RMat& J2) {
  const int n = static_cast<int>(J1.rows());
  std::vector<std::pair<int, int>> idx;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) idx.emplace_back(i, j);
  const int na = static_cast<int>(idx.size());
  Eigen::MatrixXd C(2 * n * n, na);
  for (int b = 0; b < na; ++b) {
    RMat A = RMat::Zero(n, n);
    A(idx[b].first, idx[b].second) = 1.0;
    A(idx[b].second, idx[b].first) = -1.0;
    RMat c1 = A * J1 - J1 * A;
    RMat c2 = A * J2 - J2 * A;
    C.col(b).head(n * n) = Eigen::Map<Eigen::VectorXd>(c1.data(), n * n);
    C.col(b).tail(n * n) = Eigen::Map<Eigen::VectorXd>(c2.data(), n * n);
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  std::vector<RMat> out;
  for (Eigen::Index i = sv.size() - 1; i >= 0; --i) {
    if (sv[i] > 1e-8 * std::max(sv[0], 1e-300)) break;
    Eigen::VectorXd v = svd.matrixV().col(i);
    RMat A = RMat::Zero(n, n);
    for (int b = 0; b < na; ++b) {
      A(idx[b].first, idx[b].second) = v[b];
      A(idx[b].second, idx[b].first) = -v[b];
    }
    out.push_back(A);
  }
  return out;
}

// Make the largest-magnitude component real and positive (deterministic
// representative of the kernel ray).
Spinor fix_phase(Spinor v) {
  Eigen::Index imax = 0;
  double best = -1;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) > best) {
      best = std::abs(v[i]);
      imax = i;
    }
  if (best > 0) v *= std::conj(v[imax]) / std::abs(v[imax]);
  return v;
}

struct KernelResult {
  std::vector<Spinor> basis;  // unit vectors, ordered by increasing singular value... last first
  double smax = 0;
};

KernelResult joint_kernel(const std::vector<CMat>& blocks) {
  if (blocks.empty()) throw std::invalid_argument("joint_kernel: no conditions");
  const Eigen::Index dim = blocks[0].cols();
  CMat stack(static_cast<Eigen::Index>(blocks.size()) * dim, dim);
  for (size_t b = 0; b < blocks.size(); ++b) stack.middleRows(static_cast<Eigen::Index>(b) * dim, dim) = blocks[b];
  Eigen::BDCSVD<CMat> svd(stack, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  KernelResult out;
  out.smax = sv.size() ? sv[0] : 0.0;
  const double cut = kKernelRelTol * std::max(out.smax, 1e-300);
  for (Eigen::Index i = sv.size() - 1; i >= 0; --i) {
    if (sv[i] > cut) break;
    out.basis.push_back(fix_phase(svd.matrixV().col(i)));
  }
  return out;
}

}  // namespace

GeometricDatum flat_datum(int n, int r, std::uint64_t seed) {
  GeometricDatum d;
  d.rep = std::make_shared<CliffordRep>(build_twisted_rep(n, r, 1));
  d.R = CurvatureTensor(n);
  d.theta = TwoFormFamily(n, r);
  Rng g = seeded_rng(seed);
  d.psi = random_unit_spinor(d.rep->dim, g);
  d.label = "flat";
  d.seed = seed;
  return d;
}

GeometricDatum kaehler_pure_flat(int k) {
  if (k < 1) throw std::invalid_argument("kaehler_pure_flat: need k >= 1");
  const int n = 2 * k;
  GeometricDatum d;
  d.rep = std::make_shared<CliffordRep>(build_twisted_rep(n, 2, 1));
  d.R = CurvatureTensor(n);
  d.theta = TwoFormFamily(n, 2);
  d.label = "kaehler-pure-flat";

  // Joint kernel of the annihilation operators on the base spinor factor.
  const std::vector<CMat> gb = build_gamma(n);
  std::vector<CMat> ann;
  for (int j = 0; j < k; ++j) ann.push_back(gb[2 * j] + cx(0, 1) * gb[2 * j + 1]);
  KernelResult ker = joint_kernel(ann);
  if (ker.basis.empty()) throw std::runtime_error("kaehler_pure_flat: empty annihilation kernel");
  d.kernel_dim = static_cast<int>(ker.basis.size());
  const Spinor phi = ker.basis.front();

  // f_1 f_2 eigenvector in the auxiliary factor (eigenvalues +-i); take +i.
  const std::vector<CMat> ga = build_gamma(2);
  const CMat g12 = ga[0] * ga[1];
  Eigen::ComplexEigenSolver<CMat> es(g12);
  int pick = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()[i].imag() > 0) pick = i;
  const CVec chi = es.eigenvectors().col(pick);

  Spinor psi = Eigen::kroneckerProduct(phi, chi).eval();
  psi /= psi.norm();
  d.psi = fix_phase(psi);
  d.psi_prime = normalize_pure(*d.rep, d.psi).psi_prime;
  return d;
}

GeometricDatum tautological_spin_n(int n, const CurvatureTensor& R) {
  if (n < 2 || n % 2 != 0 || n > 8)
    throw std::invalid_argument("tautological_spin_n: supported for even n <= 8");
  if (R.n != n) throw std::invalid_argument("tautological_spin_n: curvature dimension mismatch");

  GeometricDatum d;
  d.rep = std::make_shared<CliffordRep>(build_twisted_rep(n, n, 1));
  const CliffordRep& rep = *d.rep;
  d.R = R;
  d.label = "tautological-spin-n";

  // Dimension of the diagonal joint kernel (reported; it is 2 for even n).
  std::vector<CMat> pair_conditions;
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l)
      pair_conditions.push_back(rep.e(k) * rep.e(l) + rep.pair(k, l));
  KernelResult pair_ker = joint_kernel(pair_conditions);
  if (pair_ker.basis.empty()) throw std::runtime_error("tautological_spin_n: empty diagonal joint kernel");
  d.kernel_dim = static_cast<int>(pair_ker.basis.size());

  // Canonical element: the base/auxiliary intertwiner inside that kernel,
  // cut out by e_k psi = tau * (Id (x) delta_k) psi for all k.  Generic
  // kernel mixtures acquire volume-induced eta components; the intertwiner
  // does not.
  const std::vector<CMat> ga = build_gamma(n);
  const Eigen::Index dim_b = build_gamma(n)[0].rows();
  const CMat id_b = CMat::Identity(dim_b, dim_b);
  Spinor psi;
  bool found = false;
  for (int tau : {+1, -1}) {
    std::vector<CMat> conds;
    for (int k = 0; k < n; ++k)
      conds.push_back(rep.e(k) - double(tau) * Eigen::kroneckerProduct(id_b, ga[k]).eval());
    KernelResult ker = joint_kernel(conds);
    if (!ker.basis.empty()) {
      psi = ker.basis.front();
      found = true;
      break;
    }
  }
  if (!found) throw std::runtime_error("tautological_spin_n: no intertwining spinor found");
  d.psi = psi;

  d.theta = TwoFormFamily(n, n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      for (int p = 0; p < n; ++p)
        for (int j = 0; j < n; ++j) d.theta.form(k, l)(p, j) = R(p, j, k, l);
  return d;
}

GeometricDatum qk_spinor(int m, int sign) {
  const int n = 4 * m;
  const int r = 3;
  QkModel model = qk_model(m, sign);

  GeometricDatum d;
  // The twisted module carries the auxiliary spinor factor to the power m:
  // the diagonal invariant pairing the quaternionic structures with the
  // auxiliary rotations first appears at that tensor power.
  d.rep = std::make_shared<CliffordRep>(build_twisted_rep(n, r, m));
  const CliffordRep& rep = *d.rep;
  d.R = model.R;
  d.label = "qk-spinor";

  const RMat* J[3] = {&model.J1, &model.J2, &model.J3};
  CMat M[3];  // Clifford images of the three 2-forms, computed once
  for (int c = 0; c < 3; ++c) M[c] = two_form_matrix(rep, *J[c]);
  const double sc = scal(model.R);
  const double theta_coef = -sc / (n * (n / 4.0 + 2.0 * r - 4.0));

  // A parallel spinor is annihilated by the lifted isotropy algebra of the
  // quaternionic frame.  Imposing that first removes the directions on which
  // every candidate condition vanishes separately (their eta family is
  // identically zero, so they are not twisted pure) and shrinks the search to
  // a small invariant subspace.  Three generic integer combinations of the
  // algebra basis cut exactly the invariant subspace.
  const std::vector<RMat> iso = commuting_antisymmetric_basis(model.J1, model.J2);
  std::vector<CMat> iso_lifts;
  for (int t = 0; t < 3; ++t) {
    RMat A = RMat::Zero(n, n);
    for (size_t b = 0; b < iso.size(); ++b)
      A += static_cast<double>(((t + 1) * (static_cast<int>(b) + 3)) % 7 - 3) * iso[b];
    iso_lifts.push_back(two_form_matrix(rep, A));
  }
  KernelResult inv = joint_kernel(iso_lifts);
  if (inv.basis.empty())
    throw std::runtime_error("qk_spinor: no isotropy-invariant spinors in the twisted module");
  const int k0 = static_cast<int>(inv.basis.size());
  CMat K0(rep.dim, k0);
  for (int b = 0; b < k0; ++b) K0.col(b) = inv.basis[b];

  // Candidate eta families: assign the three quaternionic 2-forms to the
  // auxiliary pairs (0,1), (1,2), (2,0) with per-form signs.  The three
  // cyclic assignments are tried first, then the odd ones (an odd assignment
  // corresponds to relabeling the auxiliary frame).
  const int perms[6][3] = {{2, 0, 1}, {0, 1, 2}, {1, 2, 0}, {2, 1, 0}, {0, 2, 1}, {1, 0, 2}};
  const int pair_idx[3][2] = {{0, 1}, {1, 2}, {2, 0}};
  CMat MK[3], PK[3];  // condition blocks restricted to the invariant subspace
  for (int c = 0; c < 3; ++c) MK[c] = M[c] * K0;
  for (int t = 0; t < 3; ++t) PK[t] = rep.pair(pair_idx[t][0], pair_idx[t][1]) * K0;

  GeometricDatum best;
  double best_residual = -1;

  for (int a = 0; a < 6; ++a)
    for (int smask = 0; smask < 8; ++smask) {
      CMat stack(3 * rep.dim, k0);
      for (int t = 0; t < 3; ++t) {
        const double sgn = (smask >> t) & 1 ? -1.0 : 1.0;
        stack.middleRows(t * rep.dim, rep.dim) = sgn * MK[perms[a][t]] + 2.0 * PK[t];
      }
      Eigen::BDCSVD<CMat> svd(stack, Eigen::ComputeThinV);
      const auto& sv = svd.singularValues();
      int kdim = 0;
      for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] < kKernelRelTol * std::max(sv[0], 1e-300)) ++kdim;
      if (kdim != 1) continue;

      GeometricDatum c = d;
      c.kernel_dim = kdim;
      c.psi = fix_phase(K0 * svd.matrixV().col(sv.size() - 1));
      c.psi /= c.psi.norm();
      NormalizeResult norm;
      try {
        norm = normalize_pure(rep, c.psi);
      } catch (const std::runtime_error&) {
        continue;
      }
      c.psi_prime = norm.psi_prime;

      const TwoFormFamily eta_p = eta_forms(rep, norm.psi_prime);
      c.theta = TwoFormFamily(n, r);
      for (int k = 0; k < r; ++k)
        for (int l = 0; l < r; ++l)
          if (k != l) c.theta.form(k, l) = theta_coef * eta_p.form(k, l);

      const double res = parallel_constraint_check(c);
      if (best_residual < 0 || res < best_residual) {
        best_residual = res;
        best = c;
      }
      if (best_residual >= 0 && best_residual < 1e-10) goto done;
    }
done:
  if (best_residual < 0)
    throw std::runtime_error("qk_spinor: no twisted pure spinor found in any form assignment");
  return best;
}

}  // namespace spinr
