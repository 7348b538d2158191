#pragma once

// Index-notation expression language with Einstein-summation semantics.
//
// Grammar:
//   expr   := ['+'|'-'] term (('+'|'-') term)*
//   term   := factor+                          (juxtaposition is product)
//   factor := NAME '[' idx (',' idx)* ']' | NUMBER | NAME | '(' expr ')'
//
// In a well-formed term every index symbol occurs once (free) or twice
// (summed); three or more occurrences is a static error.  All terms of a sum
// must share the same free-index set.  Summed indices are contracted over
// their full range; the range of an index is inferred from the slots it
// occupies (binding arities, e -> base dimension, f -> auxiliary rank;
// delta adapts to its neighbours and defaults to the base dimension).
//
// The atoms e[i], f[k] and psi are matrix-valued; matrix factors multiply in
// left-to-right textual order, so psi (a column vector) must come last.
// A term mixing matrix atoms and plain tensors is matrix-valued over its
// free indices.

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "spinr/clifford.hpp"
#include "spinr/types.hpp"
#include "spinr/verify.hpp"

namespace spinr::expr {

// Parse or static-analysis failure; `pos` is a 0-based offset into the
// source text (size_t(-1) when no position applies).
struct ExprError : std::runtime_error {
  std::size_t pos;
  ExprError(const std::string& msg, std::size_t p = static_cast<std::size_t>(-1))
      : std::runtime_error(msg), pos(p) {}
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct TensorRef {
  std::string name;
  std::vector<std::string> indices;
};
struct Number {
  double value = 0.0;  // lexer yields nonnegative literals; '-' lives in Sum
};
struct ScalarName {
  std::string name;  // scalar binding, or the reserved spinor atom `psi`
};
struct Product {
  std::vector<NodePtr> factors;
};
struct Sum {
  std::vector<std::pair<int, NodePtr>> terms;  // sign (+1/-1), term
};
struct Group {
  NodePtr inner;
};

struct Node {
  std::variant<Sum, Product, TensorRef, Number, ScalarName, Group> v;
  std::size_t pos = 0;  // start offset in the source text
};

NodePtr parse(const std::string& text);
std::string print(const NodePtr& ast);
bool equal(const NodePtr& a, const NodePtr& b);  // structural equality

// Evaluation result: a real array over the free indices, or a matrix-valued
// one when the term involves Clifford atoms.  No indices => scalar.
struct Value {
  std::vector<std::string> indices;  // free indices, first-appearance order
  std::vector<int> dims;
  bool matrix = false;
  std::vector<double> re;    // row-major, when !matrix
  std::vector<CMat> mats;    // row-major, when matrix

  std::size_t flat_size() const;
  double max_abs() const;
};

struct Binding {
  std::vector<int> dims;
  std::vector<double> data;  // row-major
};

struct Environment {
  std::shared_ptr<const CliffordRep> rep;  // provides e[.], f[.] and dims
  std::optional<Spinor> psi;
  std::map<std::string, Binding> tensors;
  std::map<std::string, double> scalars;
  int base_dim = 0;
  int aux_rank = 0;
};

// Reserved names pre-bound from library objects; user bindings must not
// collide with: e, f, psi, delta, R, Ric, scal, h, eta, Theta, T.
bool is_reserved_name(const std::string& name);

// Environment with R, Ric, scal and the Clifford atoms bound.
Environment make_environment(std::shared_ptr<const CliffordRep> rep,
                             const CurvatureTensor& R);
// Additionally binds psi, eta (from the datum spinor) and Theta, both with
// index layout [base, base, aux, aux].
Environment make_environment(const GeometricDatum& datum);
// Binds a plain tensor; throws on reserved-name collision (the reserved
// names themselves may be rebound only through the make_environment family
// or the dedicated h/T setters below).
void bind_tensor(Environment& env, const std::string& name, std::vector<int> dims,
                 std::vector<double> data);
void bind_h(Environment& env, const RMat& h);
void bind_T(Environment& env, const SecondDerivSymbol& T);

// Two fixed contraction orders over the plain-tensor part of a term; results
// agree to rounding, only cost differs.
enum class PlanOrder { Greedy, Sequential };

Value evaluate(const NodePtr& ast, const Environment& env,
               PlanOrder order = PlanOrder::Greedy);

// Max-norm comparison over all free-index values (and matrix entries);
// pass iff max|lhs - rhs| < tol * (1 + max norms).  If the free-index sets
// differ, the comparison is allowed only against an identically-zero side;
// otherwise throws std::invalid_argument.
VerificationReport check_identity(const NodePtr& lhs, const NodePtr& rhs,
                                  const Environment& env, double tol);
VerificationReport check_identity(const std::string& lhs, const std::string& rhs,
                                  const Environment& env, double tol);

}  // namespace spinr::expr
