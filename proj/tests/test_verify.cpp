#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "spinr/models.hpp"
#include "spinr/verify.hpp"

using namespace spinr;

TEST_CASE("second-derivative symbol invariants") {
  CurvatureTensor R = random_curvature(4, 3);
  RMat h = random_symmetric(4, 4);
  SecondDerivSymbol T = ricci_identity_symbol(R, h, 5);
  CHECK(symbol_pair_symmetry_residual(T) < 1e-14);
  CHECK(symbol_ricci_residual(T, R, h) < 1e-14);
  // symmetric-in-(k,l) part actually varies with the seed
  SecondDerivSymbol T2 = ricci_identity_symbol(R, h, 6);
  double diff = 0, anti_diff = 0;
  for (int k = 0; k < 4; ++k)
    for (int l = 0; l < 4; ++l)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          diff = std::max(diff, std::abs(T(k, l, i, j) - T2(k, l, i, j)));
          double a1 = T(k, l, i, j) - T(l, k, i, j);
          double a2 = T2(k, l, i, j) - T2(l, k, i, j);
          anti_diff = std::max(anti_diff, std::abs(a1 - a2));
        }
  CHECK(diff > 1e-3);          // the random part moved
  CHECK(anti_diff < 1e-14);    // the pinned part did not
}

TEST_CASE("first curvature-Clifford identity on constant curvature") {
  // both sides reduce to 2 kappa (n-1) e_p
  for (int n : {4, 6}) {
    CliffordRep rep = build_twisted_rep(n, 0, 1);
    CurvatureTensor R = constant_curvature(n, 1.25);
    CHECK(clifford_identity_one(R, rep) < 1e-13);
    CHECK(clifford_identity_two(R, rep) < 1e-13);
  }
}

TEST_CASE("curvature-Clifford identities on random curvature") {
  for (int n : {4, 5}) {
    CliffordRep rep = build_twisted_rep(n, 0, 1);
    for (int t = 0; t < 5; ++t) {
      CurvatureTensor R = random_curvature(n, 100 + t);
      CHECK(clifford_identity_one(R, rep) < 1e-11);
      CHECK(clifford_identity_two(R, rep) < 1e-11);
    }
  }
}

TEST_CASE("identities fail without the first Bianchi identity") {
  CliffordRep rep = build_twisted_rep(4, 0, 1);
  int failures = 0;
  for (int t = 0; t < 20; ++t) {
    CurvatureTensor R = random_pair_symmetric(4, 200 + t);
    if (std::max(clifford_identity_one(R, rep), clifford_identity_two(R, rep)) > 1e-6)
      ++failures;
  }
  CHECK(failures >= 19);
}

TEST_CASE("Bochner formula on flat and tautological data") {
  GeometricDatum flat = flat_datum(4, 2, 7);
  CurvatureTensor R = random_curvature(4, 8);
  GeometricDatum taut = tautological_spin_n(4, R);
  Rng rng = seeded_rng(9);
  for (const GeometricDatum* d : {&flat, &taut}) {
    BochnerContext ctx = make_bochner_context(*d);
    for (int t = 0; t < 3; ++t) {
      RMat h = random_symmetric(4, rng);
      SecondDerivSymbol T = ricci_identity_symbol(d->R, h, 300 + t);
      VerificationReport rep = bochner_formula_check(ctx, h, T, 1e-9);
      CHECK(rep.pass);
      CHECK(rep.residuals.at("relative_residual") < 1e-9);
    }
  }
}

TEST_CASE("Bochner context rejects inconsistent data") {
  CurvatureTensor R = random_curvature(4, 10);
  GeometricDatum d = tautological_spin_n(4, R);
  for (RMat& f : d.theta.forms) f *= 2.0;  // break the parallel constraint
  CHECK_THROWS_AS(make_bochner_context(d), std::runtime_error);
}

TEST_CASE("Bochner check validates the symbol against the datum") {
  CurvatureTensor Ra = random_curvature(4, 11);
  CurvatureTensor Rb = random_curvature(4, 12);
  GeometricDatum d = tautological_spin_n(4, Ra);
  BochnerContext ctx = make_bochner_context(d);
  RMat h = random_symmetric(4, 13);
  SecondDerivSymbol T = ricci_identity_symbol(Rb, h, 14);  // wrong curvature
  CHECK_THROWS_AS(bochner_formula_check(ctx, h, T, 1e-9), std::invalid_argument);
}

TEST_CASE("curvature pairing conventions agree on tautological data") {
  CurvatureTensor R = random_curvature(4, 15);
  GeometricDatum d = tautological_spin_n(4, R);
  Rng rng = seeded_rng(16);
  for (int t = 0; t < 3; ++t) {
    VerificationReport rep = curvature_pairing_check(d, random_symmetric(4, rng), 1e-10);
    CHECK(rep.pass);
  }
}

TEST_CASE("reduction to the classical curvature term has ratio one") {
  Rng rng = seeded_rng(17);
  for (int t = 0; t < 5; ++t) {
    CurvatureTensor R = random_curvature(4, 400 + t);
    GeometricDatum d = tautological_spin_n(4, R);
    RMat h = random_symmetric(4, rng);
    VerificationReport rep = koiso_reduction_check(d, h, 1e-8);
    CHECK(rep.pass);
    CHECK(rep.residuals.at("ratio_deviation") < 1e-8);
    double ratio = std::strtod(rep.inputs.at("ratio").c_str(), nullptr);
    CHECK(ratio == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("reduction check skips cleanly when the curvature vanishes") {
  CurvatureTensor zero(4);
  GeometricDatum d = tautological_spin_n(4, zero);
  VerificationReport rep = koiso_reduction_check(d, random_symmetric(4, 18), 1e-8);
  CHECK(rep.pass);
  CHECK(!rep.inputs.count("ratio"));
}

TEST_CASE("proportionality and norm formula in the smallest quaternionic case") {
  GeometricDatum d = qk_spinor(1, -1);
  VerificationReport prop = proportionality_check(d, 1e-8);
  CHECK(prop.pass);
  // lambda = -scal / (n (n/4 + 2r - 4)) = 12 / (4 * 3) = 1 for sign = -1
  CHECK(std::abs(std::strtod(prop.inputs.at("lambda").c_str(), nullptr) - 1.0) < 1e-8);
  VerificationReport norm = norm_formula_check(d, 1e-9);
  CHECK(norm.pass);

  GeometricDatum dp = qk_spinor(1, +1);
  VerificationReport prop_p = proportionality_check(dp, 1e-8);
  CHECK(prop_p.pass);
  double lp = std::strtod(prop_p.inputs.at("lambda").c_str(), nullptr);
  CHECK(std::abs(lp + 1.0) < 1e-8);  // sign flip flips lambda
}

TEST_CASE("semistability bound is nonnegative in the smallest quaternionic case") {
  GeometricDatum d = qk_spinor(1, -1);
  VerificationReport rep = semistability_pointwise_check(d, 200, 19, 1e-10);
  CHECK(rep.pass);
  CHECK(rep.residuals.at("violation_excess") == 0.0);
}

TEST_CASE("semistability bound vanishes identically on flat data") {
  GeometricDatum d = flat_datum(4, 2, 20);
  Rng rng = seeded_rng(21);
  for (int t = 0; t < 5; ++t)
    CHECK(second_variation_bound(d, random_symmetric(4, rng)) == 0.0);
  VerificationReport rep = semistability_pointwise_check(d, 50, 22, 1e-10);
  CHECK(rep.pass);
}

TEST_CASE("semistability check rejects non-Einstein data") {
  CurvatureTensor R = random_curvature(4, 23);
  GeometricDatum d = tautological_spin_n(4, R);
  CHECK_THROWS_AS(semistability_pointwise_check(d, 10, 24, 1e-10), std::invalid_argument);
}

TEST_CASE("isometry residual of the embedding is tiny") {
  GeometricDatum d = flat_datum(6, 2, 25);
  Rng rng = seeded_rng(26);
  for (int t = 0; t < 5; ++t)
    CHECK(phi_isometry_residual(d, random_symmetric(6, rng)) < 1e-13);
}
