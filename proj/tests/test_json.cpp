#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <stdexcept>
#include <string>

#include "spinr/json_io.hpp"
#include "spinr/models.hpp"
#include "spinr/verify.hpp"

using namespace spinr;

TEST_CASE("curvature tensors round-trip through JSON") {
  CurvatureTensor R = random_curvature(4, 51);
  CurvatureTensor back = curvature_from_json(curvature_to_json(R));
  CHECK(back.n == 4);
  CHECK(back.a == R.a);
}

TEST_CASE("symmetric tensors round-trip through JSON") {
  RMat h = random_symmetric(5, 52);
  RMat back = sym_from_json(sym_to_json(h));
  CHECK((back - h).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("second-derivative symbols round-trip through JSON") {
  CurvatureTensor R = random_curvature(3, 53);
  RMat h = random_symmetric(3, 54);
  SecondDerivSymbol T = ricci_identity_symbol(R, h, 55);
  SecondDerivSymbol back = symbol_from_json(symbol_to_json(T));
  CHECK(back.n == 3);
  CHECK(back.t == T.t);
}

TEST_CASE("spinors round-trip exactly as [re, im] pairs") {
  Rng rng = seeded_rng(56);
  Spinor psi = random_unit_spinor(8, rng);
  Spinor back = spinor_from_json(spinor_to_json(psi));
  CHECK((back - psi).norm() == 0.0);
}

TEST_CASE("geometric data round-trip with the representation rebuilt") {
  CurvatureTensor R = random_curvature(4, 57);
  GeometricDatum d = tautological_spin_n(4, R);
  GeometricDatum back = datum_from_json(datum_to_json(d));
  CHECK(back.rep->n == d.rep->n);
  CHECK(back.rep->r == d.rep->r);
  CHECK(back.rep->dim == d.rep->dim);
  CHECK((back.psi - d.psi).norm() == 0.0);
  CHECK(back.label == d.label);
  CHECK(back.R.a == d.R.a);
  for (int k = 0; k < 4; ++k)
    for (int l = 0; l < 4; ++l)
      CHECK((back.theta.form(k, l) - d.theta.form(k, l)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.psi_prime.has_value() == d.psi_prime.has_value());
}

TEST_CASE("reports serialize with sorted keys") {
  VerificationReport r;
  r.check = "example";
  r.inputs["label"] = "x";
  r.residuals["dev"] = 1e-13;
  r.tol = 1e-9;
  r.pass = true;
  Json j = report_to_json(r);
  CHECK(j.at("check") == "example");
  CHECK(j.at("pass") == true);
  CHECK(j.at("tol") == 1e-9);
  CHECK(j.at("residuals").at("dev") == 1e-13);
  CHECK(j.at("inputs").at("label") == "x");
}

TEST_CASE("file save and load round-trip") {
  std::string path = "/tmp/spinr_test_json_roundtrip.json";
  CurvatureTensor R = constant_curvature(3, 2.0);
  save_json(path, curvature_to_json(R));
  CurvatureTensor back = curvature_from_json(load_json(path));
  CHECK(back.a == R.a);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_json(path), std::runtime_error);
}

TEST_CASE("malformed payloads are rejected") {
  Json j = curvature_to_json(random_curvature(3, 58));
  j["R"].erase(0);  // wrong element count
  CHECK_THROWS_AS(curvature_from_json(j), std::invalid_argument);
  Json d = Json::object();
  CHECK_THROWS(datum_from_json(d));
}
