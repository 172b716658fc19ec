#include <doctest.h>

#include <algorithm>

#include <json.hpp>

#include "gen.hpp"
#include "oracles.hpp"
#include "plancheck/kripke.hpp"

using namespace plancheck;

namespace {

KripkeStructure build(const char* text) { return compile(parse_model(text)); }

std::size_t count_init_models(const KripkeStructure& k) {
  std::size_t n = 0;
  const std::size_t bits = k.bit_count();
  std::vector<bool> in(2 * bits, false);
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << bits); ++v) {
    for (std::size_t b = 0; b < bits; ++b) in[b] = (v >> b) & 1U;
    if (k.circuit().evaluate(k.init_pred(), in)) ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("boolean init") {
  const auto k = build("MODULE main VAR p : boolean; ASSIGN init(p) := TRUE;");
  CHECK(k.bit_count() == 1);
  CHECK(count_init_models(k) == 1);
  const auto inits = initial_states(k);
  REQUIRE(inits.size() == 1);
  CHECK(inits[0].values == std::vector<std::uint32_t>{1});
}

TEST_CASE("enum encoding excludes unused codes") {
  const auto k = build("MODULE main VAR stage : {s0, s1, s2}; ASSIGN next(stage) := stage;");
  REQUIRE(k.vars().size() == 1);
  CHECK(k.vars()[0].width == 2);
  // Code 3 is excluded in init and on both sides of trans.
  const std::vector<bool> code3{true, true, false, false};
  CHECK_FALSE(k.circuit().evaluate(k.init_pred(), code3));
  CHECK(count_init_models(k) == 3);
  for (std::uint32_t a = 0; a < 4; ++a) {
    for (std::uint32_t b = 0; b < 4; ++b) {
      const std::vector<bool> in{bool(a & 1), bool(a & 2), bool(b & 1), bool(b & 2)};
      CHECK(k.circuit().evaluate(k.trans_pred(), in) == (a == b && a < 3));
    }
  }
  const bool raw[] = {true, true};
  CHECK_THROWS_AS(k.decode(raw), DecodeError);
  const bool two[] = {false, true};
  CHECK(k.decode(two).values == std::vector<std::uint32_t>{2});
}

TEST_CASE("compile rejects out-of-domain literal in spec") {
  auto m = parse_model("MODULE main VAR s : {a, b}; t : {c, d}; ASSIGN init(s) := a;");
  m.ltlspecs.push_back(LtlFormula::atom(Expr::equals(Expr::var("s"), Expr::enum_literal("c"))));
  CHECK_THROWS_AS(compile(m), CompileError);
}

TEST_CASE("compile rejects error diagnostics") {
  CHECK_THROWS_AS(build("MODULE main VAR p : boolean; ASSIGN next(p) := case p : FALSE; esac;"), CompileError);
}

TEST_CASE("successors") {
  SUBCASE("deterministic") {
    const auto k = build("MODULE main VAR p : boolean; ASSIGN init(p) := TRUE; next(p) := !p;");
    CHECK(successors(k, State{{1}}) == std::vector<State>{State{{0}}});
  }
  SUBCASE("unconstrained var") {
    const auto k = build("MODULE main VAR p : boolean; q : boolean; ASSIGN init(p) := TRUE; next(p) := p;");
    const auto next = successors(k, State{{1, 0}});
    REQUIRE(next.size() == 2);
    CHECK(next[0].values[0] == 1);
    CHECK(next[1].values[0] == 1);
    CHECK(next[0].values[1] != next[1].values[1]);
  }
  SUBCASE("invalid state") {
    const auto k = build("MODULE main VAR s : {a, b, c}; ASSIGN next(s) := s;");
    CHECK_THROWS_AS(successors(k, State{{3}}), InvalidState);
  }
}

TEST_CASE("enumerate_reachable") {
  const auto k = build(
      "MODULE main VAR stage : {s0, s1}; f : boolean;"
      " ASSIGN init(stage) := s0; next(stage) := s1; init(f) := FALSE; next(f) := f;");
  CHECK(enumerate_reachable(k, 100).size() == 2);
  CHECK_THROWS_AS(enumerate_reachable(k, 1), CapExceeded);

  const auto free_s = build(
      "MODULE main VAR s : {a, b}; p : boolean; ASSIGN init(s) := a; init(p) := case s = b : TRUE; TRUE : p; esac;"
      " next(p) := p;");
  CHECK(initial_states(free_s).size() == 2);
  CHECK(enumerate_reachable(free_s, 10).size() == 4);

  const auto vacuous = build(
      "MODULE main VAR s : {a, b}; p : boolean; ASSIGN init(s) := a; init(p) := s = b; next(p) := !p; next(s) := s;"
      " LTLSPEC G p");
  CHECK(enumerate_reachable(vacuous, 10).size() == 2);
  const auto none = build("MODULE main VAR p : boolean; ASSIGN init(p) := !p;");
  CHECK(initial_states(none).empty());
  CHECK(enumerate_reachable(none, 10).empty());
}

TEST_CASE("run_deterministic") {
  const auto k = build("MODULE main VAR stage : {s0, s1}; ASSIGN init(stage) := s0; next(stage) := s1;");
  const auto t = run_deterministic(k, 3);
  CHECK(t.states == std::vector<State>{State{{0}}, State{{1}}, State{{1}}, State{{1}}});
  CHECK(t.loop_back == 1);

  const auto nd = build("MODULE main VAR p : boolean; q : boolean; ASSIGN init(p) := TRUE; init(q) := TRUE;"
                        " next(p) := p;");
  try {
    run_deterministic(nd, 2);
    FAIL("expected NondeterminismError");
  } catch (const NondeterminismError& e) {
    CHECK(std::string(e.what()).find("q") != std::string::npos);
  }
}

TEST_CASE("trace json round trip") {
  const auto k = build("MODULE main VAR p : boolean; s : {a, b}; ASSIGN init(p) := TRUE; init(s) := a;"
                       " next(p) := !p; next(s) := case p : b; TRUE : a; esac;");
  const auto t = run_deterministic(k, 3);
  const std::string json = trace_to_json(k, t);
  CHECK(nlohmann::json::parse(json) ==
        nlohmann::json::parse(
            R"({"states":[{"p":true,"s":"a"},{"p":false,"s":"b"},{"p":true,"s":"a"},{"p":false,"s":"b"}],"loop_back":0})"));
  CHECK(trace_from_json(k, json) == t);
  CHECK(validate_trace(k, t));
  Trace broken = t;
  broken.states[1].values[0] = 1;
  std::string why;
  CHECK_FALSE(validate_trace(k, broken, &why));
  CHECK_FALSE(why.empty());
}

TEST_CASE("symbolic and explicit agree on random models") {
  testgen::Rng rng(21);
  testgen::ModelShape shape;
  shape.max_enums = 2;
  shape.max_bools = 4;
  shape.stage_literals = 0;
  for (int iter = 0; iter < 150; ++iter) {
    shape.stage_literals = iter % 2 ? rng.uniform(2, 5) : 0;
    const auto m = testgen::random_model(rng, shape);
    if (has_errors(check_semantics(m))) continue;
    const auto k = compile(m);
    REQUIRE(k.bit_count() <= 10);
    INFO(pretty_print(m));

    const auto states = oracle::all_states(m);
    // init_pred counted over raw bit vectors equals the oracle's initial states.
    std::size_t expected_init = 0;
    std::vector<State> oracle_init;
    for (const auto& s : states) {
      if (oracle::is_initial(m, s)) {
        ++expected_init;
        oracle_init.push_back(s);
      }
    }
    CHECK(count_init_models(k) == expected_init);
    CHECK(initial_states(k) == oracle_init);

    std::size_t mismatches = 0;
    for (const auto& s : states) {
      const auto next = successors(k, s);
      CHECK(next == oracle::successors(m, s));
      CHECK_FALSE(next.empty());
      // trans_pred truth table over valid pairs.
      for (const auto& t : states) {
        auto in = k.encode(s);
        const auto tb = k.encode(t);
        in.insert(in.end(), tb.begin(), tb.end());
        if (k.circuit().evaluate(k.trans_pred(), in) != oracle::is_transition(m, s, t)) ++mismatches;
      }
    }
    CHECK(mismatches == 0);
    CHECK(enumerate_reachable(k, 1 << 12).size() == oracle::count_reachable(m));
  }
}
