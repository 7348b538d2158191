#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "spinr/curvature.hpp"
#include "spinr/exprlang.hpp"
#include "spinr/models.hpp"
#include "spinr/verify.hpp"

using namespace spinr;
namespace ex = spinr::expr;

namespace {

ex::Environment env4(double kappa = 1.0) {
  auto rep = std::make_shared<const CliffordRep>(build_twisted_rep(4, 0, 1));
  return ex::make_environment(rep, constant_curvature(4, kappa));
}

ex::Environment env_random(std::uint64_t seed) {
  auto rep = std::make_shared<const CliffordRep>(build_twisted_rep(4, 0, 1));
  return ex::make_environment(rep, random_curvature(4, seed));
}

}  // namespace

TEST_CASE("parse and print round-trip structurally") {
  for (const char* text : {
           "R[i,j,k,l] + R[j,k,i,l] + R[k,i,j,l]",
           "- R[j,p,k,l] e[i] e[k] e[l] - 4 R[j,p,i,k] e[k]",
           "2 Ric[p,l] e[l]",
           "scal",
           "(R[i,j,k,l] + R[j,k,i,l]) h[i,j]",
           "0.5 delta[i,j]",
           "1e-10 R[i,j,k,l]",
       }) {
    ex::NodePtr ast = ex::parse(text);
    ex::NodePtr again = ex::parse(ex::print(ast));
    CHECK(ex::equal(ast, again));
  }
}

TEST_CASE("parser rejects malformed input") {
  CHECK_THROWS_AS(ex::parse(""), ex::ExprError);
  CHECK_THROWS_AS(ex::parse("R[i,j"), ex::ExprError);
  CHECK_THROWS_AS(ex::parse("R[]"), ex::ExprError);
  CHECK_THROWS_AS(ex::parse("+"), ex::ExprError);
  CHECK_THROWS_AS(ex::parse("(R[i,j,k,l]"), ex::ExprError);
  CHECK_THROWS_AS(ex::parse("R[i,j,k,l] +"), ex::ExprError);
}

TEST_CASE("an index may occur at most twice in a term") {
  CHECK_THROWS_AS(ex::parse("R[i,i,i,j]"), ex::ExprError);
  CHECK_THROWS_AS(ex::parse("R[i,j,k,l] h[i,j] delta[i,k]"), ex::ExprError);
  CHECK_NOTHROW(ex::parse("R[i,j,i,j]"));
}

TEST_CASE("terms of a sum must share their free indices") {
  CHECK_THROWS_AS(ex::parse("R[i,j,k,l] + Ric[i,j]"), ex::ExprError);
  CHECK_NOTHROW(ex::parse("Ric[i,j] + 2 delta[i,j]"));
}

TEST_CASE("clifford square: e[i] e[i] is -n times the identity") {
  ex::Environment env = env4();
  ex::Value v = ex::evaluate(ex::parse("e[i] e[i]"), env);
  CHECK(v.matrix);
  CHECK(v.indices.empty());
  REQUIRE(v.mats.size() == 1);
  const CMat id = CMat::Identity(env.rep->dim, env.rep->dim);
  CHECK((v.mats[0] + 4.0 * id).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("ricci contraction of constant curvature is (n-1) kappa delta") {
  ex::Environment env = env4(1.0);
  ex::Value v = ex::evaluate(ex::parse("R[i,k,k,j]"), env);
  CHECK(!v.matrix);
  REQUIRE(v.indices.size() == 2);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(v.re[static_cast<size_t>(i) * 4 + j] ==
            doctest::Approx(i == j ? 3.0 : 0.0).epsilon(1e-13));
}

TEST_CASE("scal evaluates to the scalar curvature") {
  ex::Environment env = env4(1.0);
  ex::Value v = ex::evaluate(ex::parse("scal"), env);
  CHECK(!v.matrix);
  CHECK(v.indices.empty());
  CHECK(v.re.at(0) == doctest::Approx(12.0).epsilon(1e-14));
}

TEST_CASE("delta contractions") {
  ex::Environment env = env4();
  CHECK(ex::evaluate(ex::parse("delta[i,i]"), env).re.at(0) == doctest::Approx(4.0));
  CHECK(ex::evaluate(ex::parse("delta[i,j] delta[i,j]"), env).re.at(0) ==
        doctest::Approx(4.0));
  ex::Value v = ex::evaluate(ex::parse("delta[i,j] Ric[j,k]"), env);
  CHECK(v.re[0 * 4 + 0] == doctest::Approx(3.0));
  CHECK(v.re[0 * 4 + 1] == doctest::Approx(0.0));
}

TEST_CASE("bound symmetric tensors contract correctly") {
  ex::Environment env = env_random(31);
  RMat h = random_symmetric(4, 32);
  ex::bind_h(env, h);
  CHECK(ex::evaluate(ex::parse("h[i,j] h[i,j]"), env).re.at(0) ==
        doctest::Approx(tensor_dot(h, h)).epsilon(1e-13));
  ex::Value v = ex::evaluate(ex::parse("R[k,i,j,p] h[k,p]"), env);
  RMat expect = ring_action(random_curvature(4, 31), h);  // (R h)_ij = h_kp R_kijp
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(v.re[static_cast<size_t>(i) * 4 + j] ==
            doctest::Approx(expect(i, j)).epsilon(1e-12));
}

TEST_CASE("second-derivative symbol binding and trace") {
  ex::Environment env = env_random(33);
  RMat h = random_symmetric(4, 34);
  SecondDerivSymbol T = ricci_identity_symbol(random_curvature(4, 33), h, 35);
  ex::bind_T(env, T);
  ex::Value v = ex::evaluate(ex::parse("T[k,k,i,j]"), env);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double direct = 0;
      for (int k = 0; k < 4; ++k) direct += T(k, k, i, j);
      CHECK(v.re[static_cast<size_t>(i) * 4 + j] == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("psi atom yields spinor columns and must sit rightmost") {
  CurvatureTensor R = random_curvature(4, 36);
  GeometricDatum d = tautological_spin_n(4, R);
  ex::Environment env = ex::make_environment(d);
  ex::Value v = ex::evaluate(ex::parse("e[i] psi"), env);
  CHECK(v.matrix);
  REQUIRE(v.indices.size() == 1);
  REQUIRE(v.mats.size() == 4);
  for (int i = 0; i < 4; ++i)
    CHECK((v.mats[i] - d.rep->e(i) * d.psi).cwiseAbs().maxCoeff() < 1e-13);
  CHECK_THROWS_AS(ex::evaluate(ex::parse("psi e[i]"), env), ex::ExprError);
  CHECK_THROWS_AS(ex::evaluate(ex::parse("psi psi"), env), ex::ExprError);
}

TEST_CASE("unbound and reserved names are rejected") {
  ex::Environment env = env4();
  CHECK_THROWS_AS(ex::evaluate(ex::parse("q[i,j]"), env), ex::ExprError);
  CHECK_THROWS_AS(ex::evaluate(ex::parse("h[i,j]"), env), ex::ExprError);  // not bound here
  CHECK_THROWS_AS(ex::evaluate(ex::parse("f[k]"), env), ex::ExprError);   // aux rank 0
  CHECK(ex::is_reserved_name("psi"));
  CHECK(ex::is_reserved_name("Theta"));
  CHECK(!ex::is_reserved_name("q"));
  CHECK_THROWS_AS(ex::bind_tensor(env, "scal", {4}, std::vector<double>(4, 0.0)),
                  std::invalid_argument);
}

TEST_CASE("identity check: first Bianchi identity against a zero side") {
  ex::Environment env = env_random(37);
  VerificationReport r = ex::check_identity("R[i,j,k,l] + R[j,k,i,l] + R[k,i,j,l]",
                                            "0 delta[i,l]", env, 1e-12);
  CHECK(r.pass);
  VerificationReport r2 = ex::check_identity("R[i,j,k,l] + R[j,k,i,l] + R[k,i,j,l]",
                                             "0 R[i,j,k,l]", env, 1e-12);
  CHECK(r2.pass);
}

TEST_CASE("identity check: mismatched free sets with nonzero sides throw") {
  ex::Environment env = env_random(38);
  CHECK_THROWS_AS(ex::check_identity("R[i,j,k,l]", "Ric[i,j]", env, 1e-12),
                  std::invalid_argument);
}

TEST_CASE("identity check: failing identity reports a residual") {
  ex::Environment env = env_random(39);
  VerificationReport r = ex::check_identity("Ric[i,j]", "2 Ric[i,j]", env, 1e-12);
  CHECK(!r.pass);
  CHECK(r.residuals.at("max_difference") > 1e-3);
}

TEST_CASE("identity check: scalar against matrix side promotes to a multiple of Id") {
  ex::Environment env = env4(1.0);
  // e[i] e[i] = -4 when n = 4, as a multiple of the identity
  VerificationReport r = ex::check_identity("e[i] e[i]", "- 4", env, 1e-12);
  CHECK(r.pass);
}

TEST_CASE("contraction plans agree") {
  ex::Environment env = env_random(40);
  RMat h = random_symmetric(4, 41);
  ex::bind_h(env, h);
  for (const char* text : {
           "R[i,j,k,l] R[i,j,k,l]",
           "R[i,k,j,p] h[k,p] h[i,j]",
           "Ric[i,k] Ric[k,j] h[i,j]",
       }) {
    ex::NodePtr ast = ex::parse(text);
    ex::Value a = ex::evaluate(ast, env, ex::PlanOrder::Greedy);
    ex::Value b = ex::evaluate(ast, env, ex::PlanOrder::Sequential);
    REQUIRE(a.flat_size() == b.flat_size());
    for (size_t i = 0; i < a.re.size(); ++i)
      CHECK(a.re[i] == doctest::Approx(b.re[i]).epsilon(1e-12));
  }
}

TEST_CASE("printing uses explicit signs and numbers round-trip") {
  ex::NodePtr ast = ex::parse("-R[i,j,k,l] + 2 R[j,i,k,l]");
  std::string text = ex::print(ast);
  CHECK(ex::equal(ast, ex::parse(text)));
  ex::Environment env = env_random(42);
  ex::Value va = ex::evaluate(ast, env);
  ex::Value vb = ex::evaluate(ex::parse(text), env);
  for (size_t i = 0; i < va.re.size(); ++i)
    CHECK(va.re[i] == doctest::Approx(vb.re[i]).epsilon(1e-14));
}
