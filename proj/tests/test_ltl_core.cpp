#include <doctest.h>

#include "gen.hpp"
#include "oracles.hpp"
#include "plancheck/ltl_core.hpp"

using namespace plancheck;

namespace {

LtlFormula ap(const char* name) { return LtlFormula::atom(Expr::var(name)); }

const char* kTwoVars = "MODULE main VAR p : boolean; q : boolean;";

Trace lasso(std::vector<std::vector<std::uint32_t>> rows, std::size_t loop) {
  Trace t;
  for (auto& r : rows) t.states.push_back(State{std::move(r)});
  t.loop_back = loop;
  return t;
}

}  // namespace

TEST_CASE("nnf duality examples") {
  const auto p = ap("p"), q = ap("q");
  const auto not_p = NnfFormula::literal(Expr::var("p"), false);
  const auto not_q = NnfFormula::literal(Expr::var("q"), false);
  CHECK(to_nnf(LtlFormula::finally(p), true) == NnfFormula::release(NnfFormula::constant(false), not_p));
  CHECK(to_nnf(LtlFormula::until(p, q), true) == NnfFormula::release(not_p, not_q));
  CHECK(to_string(to_nnf(LtlFormula::finally(p), true)) == "(FALSE R !p)");
}

TEST_CASE("lasso evaluation basics") {
  const auto k = compile(parse_model(kTwoVars));
  const auto all_p = lasso({{1, 0}, {1, 1}, {1, 0}}, 1);
  const auto no_p = lasso({{0, 0}, {0, 1}}, 0);
  CHECK(eval_on_lasso(LtlFormula::globally(ap("p")), all_p, k));
  CHECK_FALSE(eval_on_lasso(LtlFormula::finally(ap("p")), no_p, k));
  CHECK(eval_on_lasso(LtlFormula::globally(LtlFormula::finally(ap("q"))), all_p, k));
  // q holds only at position 0, which the loop never revisits.
  const auto once_q = lasso({{0, 1}, {0, 0}}, 1);
  CHECK_FALSE(eval_on_lasso(LtlFormula::globally(LtlFormula::finally(ap("q"))), once_q, k));
  CHECK(eval_on_lasso(LtlFormula::finally(ap("q")), once_q, k));
  Trace open;
  open.states = all_p.states;
  CHECK_THROWS_AS(eval_on_lasso(ap("p"), open, k), std::invalid_argument);
}

TEST_CASE("prefix evaluation is strong") {
  const auto k = compile(parse_model(kTwoVars));
  Trace t;
  t.states = {State{{0, 0}}, State{{1, 0}}};
  CHECK(eval_on_prefix(to_nnf(LtlFormula::finally(ap("p"))), t, k));
  CHECK_FALSE(eval_on_prefix(to_nnf(LtlFormula::finally(ap("q"))), t, k));
  CHECK(eval_on_prefix(to_nnf(LtlFormula::globally(ap("q")), true), t, k));
  CHECK_FALSE(eval_on_prefix(to_nnf(LtlFormula::next(LtlFormula::next(ap("p")))), t, k));
  CHECK_FALSE(eval_on_prefix(to_nnf(LtlFormula::globally(LtlFormula::atom(Expr::boolean(true)))), t, k));
}

TEST_CASE("subformulas") {
  const auto p = ap("p"), q = ap("q"), r = ap("r");
  CHECK(subformulas(LtlFormula::finally(p)) == std::vector<LtlFormula>{p, LtlFormula::finally(p)});
  const auto qr = LtlFormula::conj(q, r);
  const auto u = LtlFormula::until(p, qr);
  CHECK(subformulas(u) == std::vector<LtlFormula>{p, q, r, qr, u});
  const auto dup = LtlFormula::conj(LtlFormula::finally(ap("p")), LtlFormula::finally(ap("p")));
  CHECK(subformulas(dup).size() == 3);
}

TEST_CASE("random formulas against reference evaluators") {
  testgen::Rng rng(31);
  testgen::ModelShape shape;
  shape.max_enums = 1;
  shape.max_bools = 3;
  for (int iter = 0; iter < 400; ++iter) {
    const auto m = testgen::random_model(rng, shape);
    if (has_errors(check_semantics(m))) continue;
    const auto k = compile(m);
    const auto f = testgen::random_ltl(rng, m, 4);
    const auto nnf = to_nnf(f);
    const auto neg = to_nnf(f, true);
    INFO(to_string(f));
    CHECK(nnf.size() <= 2 * f.size());
    CHECK(neg.size() <= 2 * f.size());
    CHECK(subformulas(f).size() <= f.size());

    for (int j = 0; j < 5; ++j) {
      const auto t = testgen::random_lasso(rng, k, static_cast<std::size_t>(rng.uniform(1, 5)));
      const bool truth = oracle::lasso_holds(m, f, t);
      CHECK(eval_on_lasso(f, t, k) == truth);
      CHECK(eval_on_lasso(nnf, t, k) == truth);
      CHECK(eval_on_lasso(neg, t, k) == !truth);

      const auto g = LtlFormula::globally(f);
      const auto not_f_not = LtlFormula::negate(LtlFormula::finally(LtlFormula::negate(f)));
      CHECK(eval_on_lasso(g, t, k) == eval_on_lasso(not_f_not, t, k));

      Trace prefix = t;
      prefix.loop_back.reset();
      const bool strong = eval_on_prefix(nnf, prefix, k);
      CHECK(strong == oracle::prefix_forces(m, f, prefix));
      if (strong) CHECK(truth);
    }
  }
}

TEST_CASE("until expansion holds at every position") {
  testgen::Rng rng(37);
  testgen::ModelShape shape;
  shape.max_bools = 3;
  for (int iter = 0; iter < 200; ++iter) {
    const auto m = testgen::random_model(rng, shape);
    if (has_errors(check_semantics(m))) continue;
    const auto k = compile(m);
    const auto a = testgen::random_ltl(rng, m, 2), b = testgen::random_ltl(rng, m, 2);
    const auto u = LtlFormula::until(a, b);
    const auto t = testgen::random_lasso(rng, k, static_cast<std::size_t>(rng.uniform(1, 6)));
    for (std::size_t i = 0; i < t.states.size(); ++i) {
      const std::size_t succ = i + 1 < t.states.size() ? i + 1 : *t.loop_back;
      const bool lhs = oracle::lasso_holds(m, u, t, i);
      const bool rhs = oracle::lasso_holds(m, b, t, i) ||
                       (oracle::lasso_holds(m, a, t, i) && oracle::lasso_holds(m, u, t, succ));
      CHECK(lhs == rhs);
      // The library agrees with the reference at every starting position.
      Trace shifted;
      for (std::size_t j = i; j < t.states.size(); ++j) shifted.states.push_back(t.states[j]);
      if (*t.loop_back <= i) {
        // i sits inside the loop: rotate it so the loop starts at i.
        for (std::size_t j = *t.loop_back; j < i; ++j) shifted.states.push_back(t.states[j]);
        shifted.loop_back = 0;
      } else {
        shifted.loop_back = *t.loop_back - i;
      }
      CHECK(eval_on_lasso(u, shifted, k) == lhs);
    }
  }
}
