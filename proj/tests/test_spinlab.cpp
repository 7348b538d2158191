#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "spinr/models.hpp"
#include "spinr/spinlab.hpp"

using namespace spinr;

TEST_CASE("eta forms are antisymmetric in both the frame and auxiliary slots") {
  CliffordRep rep = build_twisted_rep(4, 3, 1);
  Rng rng = seeded_rng(31);
  Spinor psi = random_unit_spinor(rep.dim, rng);
  TwoFormFamily eta = eta_forms(rep, psi);
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l) {
      CHECK((eta.form(k, l) + eta.form(k, l).transpose()).cwiseAbs().maxCoeff() < 1e-13);
      CHECK((eta.form(k, l) + eta.form(l, k)).cwiseAbs().maxCoeff() < 1e-13);
    }
  CHECK(eta.form(1, 1).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("eta forms match the defining inner products") {
  CliffordRep rep = build_twisted_rep(4, 2, 1);
  Rng rng = seeded_rng(33);
  Spinor psi = random_unit_spinor(rep.dim, rng);
  TwoFormFamily eta = eta_forms(rep, psi);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (i == j) continue;
      Spinor wedge = rep.e(i) * (rep.e(j) * (rep.pair(0, 1) * psi));
      double direct = 0.5 * herm_inner(wedge, psi).real();
      CHECK(eta.form(0, 1)(i, j) == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("the flat Kaehler spinor is twisted pure after normalization") {
  for (int k : {1, 2, 3}) {
    GeometricDatum d = kaehler_pure_flat(k);
    REQUIRE(d.psi_prime.has_value());
    PurityReport p = twisted_pure_check(*d.rep, *d.psi_prime, 1e-10);
    CHECK(p.pass);
    CHECK(p.worst < 1e-10);
    // The unit-norm representative is pure only up to scale.
    PurityReport q = twisted_pure_check(*d.rep, d.psi, 1e-10);
    CHECK(!q.pass);
  }
}

TEST_CASE("a generic spinor is not twisted pure") {
  CliffordRep rep = build_twisted_rep(4, 2, 1);
  Rng rng = seeded_rng(35);
  Spinor psi = random_unit_spinor(rep.dim, rng);
  PurityReport p = twisted_pure_check(rep, psi, 1e-10);
  CHECK(!p.pass);
}

TEST_CASE("phi embeds symmetric tensors isometrically") {
  GeometricDatum d = kaehler_pure_flat(2);
  Rng rng = seeded_rng(37);
  for (int t = 0; t < 10; ++t) {
    RMat h = random_symmetric(4, rng);
    SpinorForm u = phi_map(*d.rep, d.psi, h);
    CHECK(form_inner(u, u) == doctest::Approx(tensor_dot(h, h)).epsilon(1e-12));
  }
}

TEST_CASE("form inner product is the real part of the slotwise pairing") {
  CliffordRep rep = build_twisted_rep(2, 0, 1);
  Rng rng = seeded_rng(39);
  SpinorForm u(2), v(2);
  for (int j = 0; j < 2; ++j) {
    u[j] = random_unit_spinor(rep.dim, rng);
    v[j] = random_unit_spinor(rep.dim, rng);
  }
  double direct = herm_inner(u[0], v[0]).real() + herm_inner(u[1], v[1]).real();
  CHECK(form_inner(u, v) == doctest::Approx(direct).epsilon(1e-13));
}

TEST_CASE("flat data satisfy the parallelism constraint trivially") {
  GeometricDatum d = flat_datum(4, 2, 41);
  CHECK(parallel_constraint_check(d) < 1e-14);
}

TEST_CASE("theta recovery reproduces the stored family on tautological data") {
  CurvatureTensor R = random_curvature(4, 43);
  GeometricDatum d = tautological_spin_n(4, R);
  CHECK(parallel_constraint_check(d) < 1e-10);
  ThetaSolve s = solve_theta(*d.rep, d.R, d.psi);
  CHECK(s.residual < 1e-10);
  for (int k = 0; k < 4; ++k)
    for (int l = 0; l < 4; ++l)
      CHECK((s.theta.form(k, l) - d.theta.form(k, l)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("ricci identity check handles the flat degenerate case") {
  GeometricDatum d = kaehler_pure_flat(2);  // zero curvature, zero theta
  EhRicciReport rep = eh_ricci_identity_check(d, 1e-9);
  CHECK(rep.pass);
  CHECK(rep.deviation == 0.0);
}

TEST_CASE("ricci identity check requires the purity-normalized spinor") {
  CurvatureTensor R = random_curvature(4, 45);
  GeometricDatum d = tautological_spin_n(4, R);  // psi is not twisted pure
  CHECK_THROWS_AS(eh_ricci_identity_check(d, 1e-9), std::invalid_argument);
}

TEST_CASE("normalization rescales a stretched pure spinor back to purity") {
  GeometricDatum d = kaehler_pure_flat(2);
  const double stretch = 1.7;
  NormalizeResult res = normalize_pure(*d.rep, stretch * d.psi);
  // eta is quadratic in psi and carries the 1/2 component normalization, so
  // the detected scale for a stretched unit spinor is stretch^2 / 2.
  CHECK(res.scale == doctest::Approx(0.5 * stretch * stretch).epsilon(1e-10));
  CHECK(res.spread < 1e-10);
  REQUIRE(d.psi_prime.has_value());
  CHECK((res.psi_prime - *d.psi_prime).norm() < 1e-10);
  PurityReport p = twisted_pure_check(*d.rep, res.psi_prime, 1e-10);
  CHECK(p.pass);
}

TEST_CASE("normalization rejects a spinor that is not pure up to scale") {
  CliffordRep rep = build_twisted_rep(4, 2, 1);
  Rng rng = seeded_rng(47);
  Spinor psi = random_unit_spinor(rep.dim, rng);
  CHECK_THROWS_AS(normalize_pure(rep, psi), std::runtime_error);
}
