#include "spinr/clifford.hpp"

#include <stdexcept>
#include <string>
#include <unsupported/Eigen/KroneckerProduct>

namespace spinr {

namespace {

constexpr Eigen::Index kMaxDim = 1 << 14;

CMat pauli(int which) {
  CMat s(2, 2);
  const cx I(0, 1);
  switch (which) {
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, -I, I, 0; break;
    default: s << 1, 0, 0, -1; break;
  }
  return s;
}

CMat kron(const CMat& a, const CMat& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

}  // namespace

std::vector<CMat> build_gamma(int n) {
  if (n < 1) throw std::invalid_argument("build_gamma: need n >= 1, got " + std::to_string(n));
  const int k = n / 2;
  const Eigen::Index dim = Eigen::Index(1) << k;
  if (dim > kMaxDim) throw std::invalid_argument("build_gamma: dimension 2^" + std::to_string(k) + " exceeds supported range");

  const CMat s1 = pauli(1), s2 = pauli(2), s3 = pauli(3);
  const cx I(0, 1);

  // Hermitian family h_i with h_i h_j + h_j h_i = 2 delta_ij via the usual
  // sigma3-chain construction; gamma_i = i h_i then squares to -Id.
  std::vector<CMat> gamma;
  gamma.reserve(n);
  auto chain = [&](int j, const CMat& mid) {
    CMat acc = CMat::Identity(1, 1);
    for (int t = 0; t < j; ++t) acc = kron(acc, s3);
    acc = kron(acc, mid);
    for (int t = j + 1; t < k; ++t) acc = kron(acc, CMat::Identity(2, 2));
    return acc;
  };
  for (int j = 0; j < k; ++j) {
    gamma.push_back(I * chain(j, s1));
    gamma.push_back(I * chain(j, s2));
  }
  if (n % 2 == 1) {
    CMat acc = CMat::Identity(dim, dim);
    const CMat s3big = [&] {
      CMat t = CMat::Identity(1, 1);
      for (int j = 0; j < k; ++j) t = kron(t, s3);
      return t;
    }();
    gamma.push_back(I * s3big);
  }
  return gamma;
}

CMat volume_element(const std::vector<CMat>& gamma) {
  if (gamma.empty()) throw std::invalid_argument("volume_element: empty generator family");
  if (gamma.size() % 2 != 0)
    throw std::runtime_error("volume_element: odd generator count has no Hermitian involutive volume");
  CMat p = gamma[0];
  for (size_t i = 1; i < gamma.size(); ++i) p = (p * gamma[i]).eval();
  // For n = 2k the raw product squares to (-1)^k; an extra i makes the k-odd
  // case Hermitian with square +Id.
  if ((gamma.size() / 2) % 2 == 1) p *= cx(0, 1);
  return p;
}

CliffordRep build_twisted_rep(int n, int r, int m) {
  if (n < 1) throw std::invalid_argument("build_twisted_rep: need n >= 1");
  if (r < 0) throw std::invalid_argument("build_twisted_rep: need r >= 0");
  if (m < 1) throw std::invalid_argument("build_twisted_rep: need m >= 1");
  if (r > 0 && m == 1 && n % 2 != 0)
    throw std::runtime_error(
        "unsupported configuration: odd base dimension with auxiliary generators (m = 1) "
        "cannot realize mixed anticommutation under the volume-twist construction");

  CliffordRep rep;
  rep.n = n;
  rep.r = r;
  rep.m = (r == 0) ? 1 : m;

  const std::vector<CMat> gb = build_gamma(n);
  const Eigen::Index dim_b = gb[0].rows();

  if (r == 0) {
    rep.dim = dim_b;
    rep.base = gb;
    return rep;
  }

  const std::vector<CMat> ga = build_gamma(r);
  const Eigen::Index dim_a = ga[0].rows();

  Eigen::Index dim = dim_b;
  for (int s = 0; s < rep.m; ++s) {
    dim *= dim_a;
    if (dim > kMaxDim) throw std::invalid_argument("build_twisted_rep: module dimension exceeds supported range");
  }
  rep.dim = dim;

  const Eigen::Index dim_aux_total = dim / dim_b;
  rep.base.reserve(n);
  for (int i = 0; i < n; ++i)
    rep.base.push_back(kron(gb[i], CMat::Identity(dim_aux_total, dim_aux_total)));

  if (rep.m == 1) {
    const CMat omega = volume_element(gb);
    rep.aux.reserve(r);
    for (int k = 0; k < r; ++k) rep.aux.push_back(kron(omega, ga[k]));
    rep.aux_pair.resize(static_cast<size_t>(r) * r);
    for (int k = 0; k < r; ++k)
      for (int l = 0; l < r; ++l)
        rep.aux_pair[static_cast<size_t>(k) * r + l] = rep.aux[k] * rep.aux[l];
    return rep;
  }

  // m > 1: degree-2 action only, as the derivation (slot-sum) action of so(r)
  // on the tensor power of the auxiliary factor.
  rep.aux_pair.resize(static_cast<size_t>(r) * r);
  const CMat id_b = CMat::Identity(dim_b, dim_b);
  const CMat id_a = CMat::Identity(dim_a, dim_a);
  for (int k = 0; k < r; ++k)
    for (int l = 0; l < r; ++l) {
      const CMat gkl = ga[k] * ga[l];
      CMat total = CMat::Zero(dim, dim);
      for (int s = 0; s < rep.m; ++s) {
        CMat slot = id_b;
        for (int t = 0; t < rep.m; ++t) slot = kron(slot, t == s ? gkl : id_a);
        total += slot;
      }
      rep.aux_pair[static_cast<size_t>(k) * r + l] = std::move(total);
    }
  return rep;
}

Spinor act_vector(const CliffordRep& rep, const RVec& v, const Spinor& s) {
  if (v.size() != rep.n + rep.r)
    throw std::invalid_argument("act_vector: vector length must be n + r");
  if (s.size() != rep.dim) throw std::invalid_argument("act_vector: spinor dimension mismatch");
  bool aux_used = false;
  for (int k = 0; k < rep.r; ++k) aux_used = aux_used || v[rep.n + k] != 0.0;
  if (aux_used && !rep.has_single_aux())
    throw std::invalid_argument("act_vector: single auxiliary generators are only defined for m = 1");
  Spinor out = Spinor::Zero(rep.dim);
  for (int i = 0; i < rep.n; ++i)
    if (v[i] != 0.0) out += v[i] * (rep.e(i) * s);
  if (aux_used)
    for (int k = 0; k < rep.r; ++k)
      if (v[rep.n + k] != 0.0) out += v[rep.n + k] * (rep.f(k) * s);
  return out;
}

Spinor act_wedge(const CliffordRep& rep, const RVec& x, const RVec& y, const Spinor& s) {
  if (x.size() != rep.n || y.size() != rep.n)
    throw std::invalid_argument("act_wedge: base vectors must have length n");
  if (s.size() != rep.dim) throw std::invalid_argument("act_wedge: spinor dimension mismatch");
  Spinor ys = Spinor::Zero(rep.dim);
  for (int j = 0; j < rep.n; ++j)
    if (y[j] != 0.0) ys += y[j] * (rep.e(j) * s);
  Spinor out = x.dot(y) * s;
  for (int i = 0; i < rep.n; ++i)
    if (x[i] != 0.0) out += x[i] * (rep.e(i) * ys);
  return out;
}

namespace {

void require_antisymmetric(const RMat& w, int n) {
  if (w.rows() != n || w.cols() != n)
    throw std::invalid_argument("two-form: expected an n x n array");
  const double scale = 1.0 + w.cwiseAbs().maxCoeff();
  if ((w + w.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument("two-form: input is not antisymmetric");
}

}  // namespace

Spinor act_two_form(const CliffordRep& rep, const RMat& w, const Spinor& s) {
  require_antisymmetric(w, rep.n);
  if (s.size() != rep.dim) throw std::invalid_argument("act_two_form: spinor dimension mismatch");
  // sum_{i<j} w_ij e_i e_j . s, computed with matrix-vector products only.
  Spinor out = Spinor::Zero(rep.dim);
  for (int j = 1; j < rep.n; ++j) {
    Spinor ejs = rep.e(j) * s;
    Spinor coef = Spinor::Zero(rep.dim);
    bool any = false;
    for (int i = 0; i < j; ++i)
      if (w(i, j) != 0.0) {
        coef += w(i, j) * (rep.e(i) * ejs);
        any = true;
      }
    if (any) out += coef;
  }
  return out;
}

CMat two_form_matrix(const CliffordRep& rep, const RMat& w) {
  require_antisymmetric(w, rep.n);
  CMat out = CMat::Zero(rep.dim, rep.dim);
  int nnz = 0;
  for (int i = 0; i < rep.n; ++i)
    for (int j = i + 1; j < rep.n; ++j)
      if (w(i, j) != 0.0) ++nnz;
  if (nnz <= rep.n) {
    for (int i = 0; i < rep.n; ++i)
      for (int j = i + 1; j < rep.n; ++j)
        if (w(i, j) != 0.0) out.noalias() += w(i, j) * (rep.e(i) * rep.e(j));
    return out;
  }
  // Dense coefficients: factor the sum row-wise so the number of matrix
  // products is n instead of one per nonzero entry.
  for (int i = 0; i < rep.n; ++i) {
    CMat acc;
    bool any = false;
    for (int j = i + 1; j < rep.n; ++j)
      if (w(i, j) != 0.0) {
        if (!any) {
          acc = w(i, j) * rep.e(j);
          any = true;
        } else {
          acc += w(i, j) * rep.e(j);
        }
      }
    if (any) out.noalias() += rep.e(i) * acc;
  }
  return out;
}

}  // namespace spinr
