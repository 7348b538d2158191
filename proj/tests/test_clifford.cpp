#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "spinr/clifford.hpp"
#include "spinr/types.hpp"

using namespace spinr;

namespace {

double anticommutator_residual(const CliffordRep& rep) {
  std::vector<const CMat*> gens;
  for (const auto& g : rep.base) gens.push_back(&g);
  for (const auto& g : rep.aux) gens.push_back(&g);
  const CMat id = CMat::Identity(rep.dim, rep.dim);
  double worst = 0;
  for (size_t i = 0; i < gens.size(); ++i)
    for (size_t j = i; j < gens.size(); ++j) {
      CMat ac = (*gens[i]) * (*gens[j]) + (*gens[j]) * (*gens[i]);
      if (i == j) ac += 2.0 * id;
      worst = std::max(worst, ac.cwiseAbs().maxCoeff());
    }
  return worst;
}

}  // namespace

TEST_CASE("base gamma matrices anticommute to -2 delta") {
  for (int n : {1, 2, 3, 4, 5, 6}) {
    auto g = build_gamma(n);
    REQUIRE(g.size() == static_cast<size_t>(n));
    const Eigen::Index dim = Eigen::Index(1) << (n / 2);
    CHECK(g[0].rows() == dim);
    const CMat id = CMat::Identity(dim, dim);
    for (int i = 0; i < n; ++i) {
      CHECK((g[i] + g[i].adjoint()).cwiseAbs().maxCoeff() == doctest::Approx(0).epsilon(1e-14));
      CHECK((g[i] * g[i].adjoint() - id).cwiseAbs().maxCoeff() ==
            doctest::Approx(0).epsilon(1e-14));
      for (int j = 0; j < n; ++j) {
        CMat ac = g[i] * g[j] + g[j] * g[i];
        if (i == j) ac += 2.0 * id;
        CHECK(ac.cwiseAbs().maxCoeff() < 1e-14);
      }
    }
  }
}

TEST_CASE("twisted representation satisfies the full anticommutation relations") {
  for (int n : {2, 4, 5, 6}) {
    for (int r : {0, 2, 3}) {
      if (n % 2 == 1 && r > 0) continue;
      CliffordRep rep = build_twisted_rep(n, r, 1);
      CHECK(rep.n == n);
      CHECK(rep.r == r);
      CHECK(anticommutator_residual(rep) < 1e-12);
    }
  }
}

TEST_CASE("odd base dimension with auxiliary directions is rejected for m = 1") {
  CHECK_THROWS_AS(build_twisted_rep(3, 2, 1), std::runtime_error);
  CHECK_NOTHROW(build_twisted_rep(3, 0, 1));
}

TEST_CASE("higher multiplicity provides pair actions but no single generators") {
  CliffordRep rep = build_twisted_rep(4, 2, 2);
  CHECK(!rep.has_single_aux());
  const CMat& p01 = rep.pair(0, 1);
  const CMat& p10 = rep.pair(1, 0);
  CHECK((p01 + p10).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((p01 + p01.adjoint()).cwiseAbs().maxCoeff() < 1e-13);  // skew-Hermitian
  for (int i = 0; i < 4; ++i)
    CHECK((rep.e(i) * p01 - p01 * rep.e(i)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("pair action matches the product of single generators when m = 1") {
  CliffordRep rep = build_twisted_rep(4, 3, 1);
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l) {
      if (k == l) continue;
      CHECK((rep.pair(k, l) - rep.f(k) * rep.f(l)).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("vector action is linear in the vector") {
  CliffordRep rep = build_twisted_rep(4, 2, 1);
  Rng rng = seeded_rng(7);
  Spinor s = random_unit_spinor(rep.dim, rng);
  RVec x = RVec::Zero(6);
  x[1] = 2.0;
  x[4] = -0.5;  // auxiliary direction f_0
  Spinor direct = 2.0 * (rep.e(1) * s) - 0.5 * (rep.f(0) * s);
  CHECK((act_vector(rep, x, s) - direct).norm() < 1e-13);
}

TEST_CASE("wedge action: e_i ^ e_j acts as the product for i != j and as zero for i == j") {
  CliffordRep rep = build_twisted_rep(4, 0, 1);
  Rng rng = seeded_rng(9);
  Spinor s = random_unit_spinor(rep.dim, rng);
  RVec ei = RVec::Zero(4), ej = RVec::Zero(4);
  ei[0] = 1;
  ej[2] = 1;
  CHECK((act_wedge(rep, ei, ej, s) - rep.e(0) * (rep.e(2) * s)).norm() < 1e-13);
  CHECK(act_wedge(rep, ei, ei, s).norm() < 1e-13);
}

TEST_CASE("two-form action sums over ordered index pairs below the diagonal") {
  CliffordRep rep = build_twisted_rep(4, 0, 1);
  Rng rng = seeded_rng(11);
  Spinor s = random_unit_spinor(rep.dim, rng);
  RMat w = RMat::Zero(4, 4);
  w(0, 1) = 1.5;
  w(1, 0) = -1.5;
  w(2, 3) = -0.25;
  w(3, 2) = 0.25;
  Spinor direct = 1.5 * (rep.e(0) * (rep.e(1) * s)) - 0.25 * (rep.e(2) * (rep.e(3) * s));
  CHECK((act_two_form(rep, w, s) - direct).norm() < 1e-13);
  CHECK((two_form_matrix(rep, w) * s - direct).norm() < 1e-13);
}

TEST_CASE("volume element squares to a sign for even generator counts") {
  for (int n : {2, 4, 6}) {
    auto g = build_gamma(n);
    CMat vol = volume_element(g);
    CMat sq = vol * vol;
    const Eigen::Index dim = g[0].rows();
    const CMat id = CMat::Identity(dim, dim);
    double dplus = (sq - id).cwiseAbs().maxCoeff();
    double dminus = (sq + id).cwiseAbs().maxCoeff();
    CHECK(std::min(dplus, dminus) < 1e-13);
  }
  CHECK_THROWS_AS(volume_element(build_gamma(3)), std::runtime_error);
}

TEST_CASE("hermitian inner product is conjugate-linear in the second slot") {
  Spinor a(2), b(2);
  a << cx(1, 2), cx(0, -1);
  b << cx(3, 0), cx(1, 1);
  cx direct = a[0] * std::conj(b[0]) + a[1] * std::conj(b[1]);
  CHECK(std::abs(herm_inner(a, b) - direct) < 1e-15);
}
