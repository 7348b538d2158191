#include "spinr/spinlab.hpp"

#include <cmath>
#include <stdexcept>

namespace spinr {

namespace {

// e_k e_l psi for all ordered base pairs (n*n spinors).
std::vector<Spinor> base_pair_table(const CliffordRep& rep, const Spinor& psi) {
  const int n = rep.n;
  std::vector<Spinor> u(static_cast<size_t>(n) * n);
  for (int l = 0; l < n; ++l) {
    const Spinor t = rep.e(l) * psi;
    for (int k = 0; k < n; ++k) u[static_cast<size_t>(k) * n + l] = rep.e(k) * t;
  }
  return u;
}

}  // namespace

TwoFormFamily eta_forms(const CliffordRep& rep, const Spinor& psi) {
  const int n = rep.n, r = rep.r;
  if (psi.size() != rep.dim) throw std::invalid_argument("eta_forms: spinor dimension mismatch");
  TwoFormFamily fam(n, r);

  std::vector<Spinor> w(n);  // w_i = e_i psi
  for (int i = 0; i < n; ++i) w[i] = rep.e(i) * psi;

  for (int k = 0; k < r; ++k)
    for (int l = k + 1; l < r; ++l) {
      const Spinor t = rep.pair(k, l) * psi;
      RMat& form = fam.form(k, l);
      for (int j = 0; j < n; ++j) {
        const Spinor uj = rep.e(j) * t;
        for (int i = 0; i < j; ++i) {
          // 1/2 Re <e_i e_j f_k f_l psi, psi> = -1/2 Re <e_j f_k f_l psi, e_i psi>.
          // The 1/2 is the component normalization under full ordered-index
          // sums; it is pinned jointly by the quaternionic datum invariants
          // (unit proportionality coefficient between the auxiliary curvature
          // and the normalized eta family, the purity-normalized squared norm
          // 6/(n/4 + 2), and the Ricci reconstruction identity).
          const double v = -0.5 * herm_inner(uj, w[i]).real();
          form(i, j) = v;
          form(j, i) = -v;
        }
      }
      fam.form(l, k) = -form;
    }
  return fam;
}

PurityReport twisted_pure_check(const CliffordRep& rep, const Spinor& psi, double tol) {
  if (rep.r < 2) throw std::invalid_argument("twisted_pure_check: requires auxiliary rank >= 2");
  const TwoFormFamily fam = eta_forms(rep, psi);
  PurityReport rep_out;
  rep_out.tol = tol;
  const RMat id = RMat::Identity(rep.n, rep.n);
  double worst = 0;
  for (int k = 0; k < rep.r; ++k)
    for (int l = k + 1; l < rep.r; ++l) {
      PurityPairReport p;
      p.k = k;
      p.l = l;
      const RMat hk = hat(fam.form(k, l));
      p.square_residual = (hk * hk + id).cwiseAbs().maxCoeff();
      worst = std::max(worst, p.square_residual);
      if (rep.r > 2) {
        const Spinor v = act_two_form(rep, fam.form(k, l), psi) + 2.0 * (rep.pair(k, l) * psi);
        p.kernel_residual = v.norm();
        worst = std::max(worst, p.kernel_residual);
      }
      rep_out.pairs.push_back(p);
    }
  rep_out.worst = worst;
  rep_out.pass = worst < tol;
  return rep_out;
}

SpinorForm phi_map(const CliffordRep& rep, const Spinor& psi, const RMat& a) {
  if (a.rows() != rep.n || a.cols() != rep.n) throw std::invalid_argument("phi_map: coefficient array must be n x n");
  if (psi.size() != rep.dim) throw std::invalid_argument("phi_map: spinor dimension mismatch");
  std::vector<Spinor> w(rep.n);
  for (int i = 0; i < rep.n; ++i) w[i] = rep.e(i) * psi;
  SpinorForm out(rep.n, Spinor::Zero(rep.dim));
  for (int j = 0; j < rep.n; ++j)
    for (int i = 0; i < rep.n; ++i)
      if (a(i, j) != 0.0) out[j] += a(i, j) * w[i];
  return out;
}

double form_inner(const SpinorForm& u, const SpinorForm& v) {
  if (u.size() != v.size()) throw std::invalid_argument("form_inner: component count mismatch");
  double s = 0;
  for (size_t j = 0; j < u.size(); ++j) s += herm_inner(u[j], v[j]).real();
  return s;
}

double parallel_constraint_check(const GeometricDatum& datum) {
  const CliffordRep& rep = *datum.rep;
  const int n = rep.n, r = rep.r;
  if (datum.R.n != n) throw std::invalid_argument("parallel_constraint_check: curvature dimension mismatch");
  const std::vector<Spinor> u = base_pair_table(rep, datum.psi);
  std::vector<Spinor> fp(static_cast<size_t>(r) * r);
  for (int k = 0; k < r; ++k)
    for (int l = 0; l < r; ++l)
      if (k != l) fp[static_cast<size_t>(k) * r + l] = rep.pair(k, l) * datum.psi;

  double worst = 0;
  for (int p = 0; p < n; ++p)
    for (int j = 0; j < n; ++j) {
      Spinor v = Spinor::Zero(rep.dim);
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double c = datum.R(p, j, k, l);
          if (c != 0.0) v += c * u[static_cast<size_t>(k) * n + l];
        }
      for (int k = 0; k < r; ++k)
        for (int l = 0; l < r; ++l) {
          if (k == l) continue;
          const double c = datum.theta.form(k, l)(p, j);
          if (c != 0.0) v += c * fp[static_cast<size_t>(k) * r + l];
        }
      worst = std::max(worst, v.norm());
    }
  return worst;
}

ThetaSolve solve_theta(const CliffordRep& rep, const CurvatureTensor& R, const Spinor& psi) {
  const int n = rep.n, r = rep.r;
  if (R.n != n) throw std::invalid_argument("solve_theta: curvature dimension mismatch");
  if (psi.size() != rep.dim) throw std::invalid_argument("solve_theta: spinor dimension mismatch");

  ThetaSolve out;
  out.theta = TwoFormFamily(n, r);

  const std::vector<Spinor> u = base_pair_table(rep, psi);
  const int np = r * (r - 1) / 2;

  // Real-stacked column system: the (k, l) column is 2 f_k f_l psi, so that
  // x_kl multiplies the full ordered-pair sum.
  RMat a(2 * rep.dim, np);
  {
    int c = 0;
    for (int k = 0; k < r; ++k)
      for (int l = k + 1; l < r; ++l, ++c) {
        const Spinor col = 2.0 * (rep.pair(k, l) * psi);
        a.col(c).head(rep.dim) = col.real();
        a.col(c).tail(rep.dim) = col.imag();
      }
  }

  Eigen::JacobiSVD<RMat> svd;
  double smax = 0;
  if (np > 0) {
    svd.compute(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    smax = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()[i] > 1e-10 * std::max(smax, 1e-300)) ++rank;
    out.degenerate = rank < np;
  } else {
    out.degenerate = false;
  }

  RVec br(2 * rep.dim);
  for (int p = 0; p < n; ++p)
    for (int j = p + 1; j < n; ++j) {
      Spinor b = Spinor::Zero(rep.dim);
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double c = R(p, j, k, l);
          if (c != 0.0) b -= c * u[static_cast<size_t>(k) * n + l];
        }
      br.head(rep.dim) = b.real();
      br.tail(rep.dim) = b.imag();
      if (np == 0) {
        out.residual = std::max(out.residual, br.norm());
        continue;
      }
      RVec x;
      if (out.degenerate) {
        // Minimal-norm solution through the pseudo-inverse.
        RVec y = svd.matrixU().transpose() * br;
        for (int i = 0; i < y.size(); ++i) {
          const double s = svd.singularValues()[i];
          y[i] = (s > 1e-10 * std::max(smax, 1e-300)) ? y[i] / s : 0.0;
        }
        x = svd.matrixV() * y;
      } else {
        x = svd.solve(br);
      }
      out.residual = std::max(out.residual, (a * x - br).norm());
      int c = 0;
      for (int k = 0; k < r; ++k)
        for (int l = k + 1; l < r; ++l, ++c) {
          out.theta.form(k, l)(p, j) = x[c];
          out.theta.form(k, l)(j, p) = -x[c];
          out.theta.form(l, k)(p, j) = -x[c];
          out.theta.form(l, k)(j, p) = x[c];
        }
    }
  return out;
}

EhRicciReport eh_ricci_identity_check(const GeometricDatum& datum, double tol) {
  if (!datum.psi_prime)
    throw std::invalid_argument("eh_ricci_identity_check: datum has no purity-normalized spinor");
  const CliffordRep& rep = *datum.rep;
  const Spinor& pp = *datum.psi_prime;
  const TwoFormFamily eta = eta_forms(rep, pp);
  const int n = rep.n, r = rep.r;

  const RMat lhs = pp.squaredNorm() * ricci(datum.R);
  RMat rhs = RMat::Zero(n, n);
  for (int k = 0; k < r; ++k)
    for (int l = 0; l < r; ++l) {
      if (k == l) continue;
      rhs += hat(eta.form(k, l)) * hat(datum.theta.form(k, l));
    }
  const double denom = std::max(lhs.cwiseAbs().maxCoeff(), rhs.cwiseAbs().maxCoeff());
  EhRicciReport out;
  out.deviation = denom > 0 ? (lhs - rhs).cwiseAbs().maxCoeff() / denom : (lhs - rhs).cwiseAbs().maxCoeff();
  out.pass = out.deviation < tol;
  return out;
}

NormalizeResult normalize_pure(const CliffordRep& rep, const Spinor& psi0) {
  if (rep.r < 2) throw std::invalid_argument("normalize_pure: requires auxiliary rank >= 2");
  const TwoFormFamily fam = eta_forms(rep, psi0);
  const RMat id = RMat::Identity(rep.n, rep.n);

  double sum = 0, lo = 0, hi = 0;
  int count = 0;
  for (int k = 0; k < rep.r; ++k)
    for (int l = k + 1; l < rep.r; ++l) {
      const RMat hk = hat(fam.form(k, l));
      const RMat s = -(hk * hk);
      const double c = s.trace() / rep.n;
      if (!(c > 0))
        throw std::runtime_error("not purifiable: hat(eta)^2 is not a negative multiple of Id for pair (" +
                                 std::to_string(k) + "," + std::to_string(l) + ")");
      if ((s - c * id).cwiseAbs().maxCoeff() > 1e-6 * c)
        throw std::runtime_error("not purifiable: hat(eta)^2 deviates from a multiple of Id for pair (" +
                                 std::to_string(k) + "," + std::to_string(l) + ")");
      const double root = std::sqrt(c);
      sum += root;
      lo = count == 0 ? root : std::min(lo, root);
      hi = count == 0 ? root : std::max(hi, root);
      ++count;
    }
  NormalizeResult out;
  out.scale = sum / count;
  out.spread = (hi - lo) / out.scale;
  if (out.spread > 1e-6)
    throw std::runtime_error("not purifiable: per-pair eta scales disagree (spread " + std::to_string(out.spread) + ")");
  out.psi_prime = psi0 / std::sqrt(out.scale);
  return out;
}

}  // namespace spinr
