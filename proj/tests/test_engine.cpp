#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "flint/engine.hpp"
#include "flint/parser.hpp"
#include "flint/resolve.hpp"
#include "support/concrete_interp.hpp"
#include "support/program_gen.hpp"

using namespace flint;
using namespace flint::flc;
using namespace flint::symex;
using flint::testing::RunResult;
using flint::testing::RunStatus;
using flint::testing::run_concrete;

namespace {

IrProgram compile(const std::string& text, std::set<std::string> feats = {},
                  int loop_bound = 8) {
  SourceUnit u = parse_unit_text("t.flc", text);
  ProductDef p;
  p.name = "p";
  p.enabled = std::move(feats);
  ResolveOptions opt;
  opt.loop_bound = loop_bound;
  return resolve_product(u, p, opt);
}

std::set<std::string> dep_keys(const std::vector<DepPair>& deps) {
  std::set<std::string> out;
  for (const auto& d : deps) out.insert(flint::testing::dep_key(d));
  return out;
}

CallSequence seq(std::initializer_list<std::pair<const char*, int>> entries) {
  CallSequence s;
  for (const auto& [fn, line] : entries) s.push_back({fn, {"t.flc", line}});
  return s;
}

}  // namespace

TEST_CASE("a deterministic program yields exactly one normal path") {
  IrProgram prog = compile(R"(int32 g = 2;
void main() {
  g = g * 3;
  assert(g == 6);
}
)");
  ExtractResult res = extract_feature_models(prog);
  CHECK(res.normal.size() == 1);
  CHECK(res.fail.empty());
  CHECK(res.exhausted.empty());
  CHECK(res.paths_terminated == 1);
  CHECK_FALSE(res.truncated);
  CHECK(res.normal[0].status == PathStatus::Normal);
  CHECK(res.normal[0].pc.empty());
  REQUIRE(res.normal[0].sequences.size() == 1);
  CHECK(serialize_sequence(res.normal[0].sequences[0]) == "main@t.flc:2");
}

TEST_CASE("symbolic branches fork into complementary paths") {
  IrProgram prog = compile(R"(int32 g;
void main() {
  int32 x;
  make_symbolic(x, 0, 9);
  if (x > 4) {
    g = 1;
  } else {
    g = 2;
  }
}
)");
  ExtractResult res = extract_feature_models(prog);
  REQUIRE(res.normal.size() == 2);
  CHECK(res.fail.empty());
  // Each path carries exactly one branch atom over x.
  for (const auto& p : res.normal) {
    REQUIRE(p.pc.size() == 1);
    REQUIRE(p.vars.size() == 1);
    CHECK(p.vars[0].base == "x");
    CHECK(p.vars[0].lo == 0);
    CHECK(p.vars[0].hi == 9);
    CHECK_FALSE(p.over_approx);
  }
  std::set<Rel> rels = {res.normal[0].pc[0].rel, res.normal[1].pc[0].rel};
  CHECK(rels == std::set<Rel>{Rel::Gt, Rel::Le});
}

TEST_CASE("infeasible branch sides are pruned") {
  IrProgram prog = compile(R"(int32 g;
void main() {
  int32 x;
  make_symbolic(x, 0, 3);
  if (x > 10) {
    g = 1;
  }
  if (x >= 0) {
    g = 2;
  }
}
)");
  ExtractResult res = extract_feature_models(prog);
  // x > 10 is impossible and x >= 0 is a tautology: a single path survives.
  CHECK(res.normal.size() == 1);
  CHECK(res.fail.empty());
}

TEST_CASE("assertion failures carry the source diagnostic") {
  IrProgram prog = compile(R"(int32 g;
void main() {
  int32 x;
  make_symbolic(x, 0, 5);
  assert(x < 5);
}
)");
  ExtractResult res = extract_feature_models(prog);
  REQUIRE(res.fail.size() == 1);
  CHECK(res.normal.size() == 1);
  CHECK(res.fail[0].status == PathStatus::Failure);
  CHECK(res.fail[0].diagnostic == "assertion violated at t.flc:5");
  CHECK(res.fail[0].spec_id.empty());
}

TEST_CASE("fail statements record their interaction id") {
  IrProgram prog = compile(R"(void main() {
  int32 x;
  make_symbolic(x, 0, 3);
  if (x == 2) {
    fail() @spec(pair7);
  }
}
)");
  ExtractResult res = extract_feature_models(prog);
  REQUIRE(res.fail.size() == 1);
  CHECK(res.fail[0].spec_id == "pair7");
  CHECK(res.fail[0].diagnostic == "fail() at t.flc:5");
  CHECK(res.normal.size() == 1);
}

TEST_CASE("assume drops contradicted paths without terminating them") {
  IrProgram prog = compile(R"(int32 g;
void main() {
  int32 x;
  make_symbolic(x, 0, 9);
  if (x > 4) {
    g = 1;
  } else {
    g = 2;
  }
  assume(x <= 4);
  g = 3;
}
)");
  ExtractResult res = extract_feature_models(prog);
  // The x > 4 arm dies at the assume; only the other arm terminates, and
  // dropped paths are not counted as terminated.
  CHECK(res.normal.size() == 1);
  CHECK(res.paths_terminated == 1);
  CHECK(res.normal[0].pc.size() >= 1);
  CHECK(eval_atom(res.normal[0].pc[0], [](int) { return 3; }));
}

TEST_CASE("loop budget exhaustion is kept out of the corpora buckets") {
  IrProgram prog = compile(R"(int32 g;
void main() {
  int32 i;
  i = 0;
  while (i < 100) {
    i = i + 1;
  }
  g = 1;
}
)",
                           {}, 4);
  ExtractResult res = extract_feature_models(prog);
  CHECK(res.normal.empty());
  CHECK(res.fail.empty());
  CHECK(res.bound_exhausted == 1);
  REQUIRE(res.exhausted.size() == 1);
  CHECK(res.exhausted[0].status == PathStatus::BoundExhausted);
  CHECK(res.truncated == false);
  // Dependency pairs never come from exhausted paths.
  CHECK(res.ss.empty());
  CHECK(res.sl.empty());
}

TEST_CASE("division forks over the divisor interval and faults on zero") {
  IrProgram prog = compile(R"(int32 g;
void main() {
  int32 d;
  make_symbolic(d, 0, 2);
  g = 10 / d;
}
)");
  ExtractResult res = extract_feature_models(prog);
  REQUIRE(res.fail.size() == 1);
  CHECK(res.fail[0].diagnostic == "division by zero at t.flc:5");
  // One normal path per non-zero divisor value.
  CHECK(res.normal.size() == 2);
  std::set<long long> divisors;
  for (const auto& p : res.normal) {
    // The pinning constraint fixes d exactly; recover it by evaluation.
    REQUIRE(p.vars.size() == 1);
    for (long long v = 0; v <= 2; ++v) {
      bool all = true;
      for (const auto& a : p.pc)
        if (!eval_atom(a, [&](int) { return v; })) all = false;
      if (all) divisors.insert(v);
    }
  }
  CHECK(divisors == std::set<long long>{1, 2});
}

TEST_CASE("modulo by a never-zero symbolic divisor cannot fault") {
  IrProgram prog = compile(R"(int32 g;
void main() {
  int32 d;
  make_symbolic(d, 1, 3);
  g = 10 % d;
}
)");
  ExtractResult res = extract_feature_models(prog);
  CHECK(res.fail.empty());
  CHECK(res.normal.size() == 3);
}

TEST_CASE("concrete out-of-bounds accesses fail with offset and size") {
  IrProgram prog = compile(R"(int32 arr[3];
void main() {
  arr[5] = 1;
}
)");
  ExtractResult res = extract_feature_models(prog);
  REQUIRE(res.fail.size() == 1);
  CHECK(res.fail[0].diagnostic ==
        "out-of-bounds access to arr at t.flc:3 (offset 5, size 3)");
}

TEST_CASE("symbolic indices fork per in-domain offset plus feasible overflow") {
  IrProgram prog = compile(R"(int32 arr[3];
int32 g;
void main() {
  int32 i;
  make_symbolic(i, 0, 4);
  arr[i] = 7;
  g = 1;
}
)");
  ExtractResult res = extract_feature_models(prog);
  // Offsets 0..2 store fine; 3 and 4 are out of bounds.
  CHECK(res.normal.size() == 3);
  REQUIRE(res.fail.size() == 2);
  std::set<std::string> diags;
  for (const auto& f : res.fail) diags.insert(f.diagnostic);
  CHECK(diags == std::set<std::string>{
                     "out-of-bounds access to arr at t.flc:6 (offset 3, size 3)",
                     "out-of-bounds access to arr at t.flc:6 (offset 4, size 3)"});
}

TEST_CASE("store/load pairs record the last writer per key") {
  const char* text = R"(int32 a;
int32 b;
void main() {
  a = 1;
  a = 2;
  b = a;
}
)";
  IrProgram prog = compile(text);
  ExtractResult res = extract_feature_models(prog);
  // a=1 then a=2 is one store-store pair; the load reads the second store.
  auto ss = dep_keys(res.ss);
  auto sl = dep_keys(res.sl);
  CHECK(ss == std::set<std::string>{"t.flc:4|t.flc:5|a"});
  CHECK(sl == std::set<std::string>{"t.flc:5|t.flc:6|a"});

  RunResult oracle = run_concrete(prog, {});
  CHECK(oracle.status == RunStatus::Normal);
  std::set<std::string> oss, osl;
  for (const auto& d : oracle.pairs)
    (d.kind == DepPair::Kind::SS ? oss : osl).insert(flint::testing::dep_key(d));
  CHECK(oss == ss);
  CHECK(osl == sl);
}

TEST_CASE("self-accesses do not pair a store with itself") {
  IrProgram prog = compile(R"(int32 a = 1;
void main() {
  a = a + 1;
}
)");
  ExtractResult res = extract_feature_models(prog);
  // The load in `a + 1` happens before the store commits: no pair at all.
  CHECK(res.ss.empty());
  CHECK(res.sl.empty());
}

TEST_CASE("store-key granularity separates array cells only in offset mode") {
  const char* text = R"(int32 arr[4];
int32 g;
void main() {
  arr[0] = 1;
  g = arr[1];
}
)";
  IrProgram prog = compile(text);

  EngineConfig base;
  base.store_key = EngineConfig::StoreKey::BaseAddress;
  ExtractResult coarse = extract_feature_models(prog, base);
  CHECK(dep_keys(coarse.sl) == std::set<std::string>{"t.flc:4|t.flc:5|arr"});

  EngineConfig offs;
  offs.store_key = EngineConfig::StoreKey::ObjectOffset;
  ExtractResult fine = extract_feature_models(prog, offs);
  CHECK(fine.sl.empty());

  // The concrete oracle honors the same mode switch.
  CHECK(run_concrete(prog, {}, base).pairs.size() == 1);
  CHECK(run_concrete(prog, {}, offs).pairs.empty());
}

TEST_CASE("dependency pairs are deduplicated across paths and sorted") {
  IrProgram prog = compile(R"(int32 g;
void main() {
  int32 x;
  make_symbolic(x, 0, 9);
  g = 1;
  if (x > 4) {
    g = 2;
  } else {
    g = 2;
  }
}
)");
  ExtractResult res = extract_feature_models(prog);
  REQUIRE(res.normal.size() == 2);
  // Both arms store at distinct lines, so two SS pairs; each appears once.
  CHECK(res.ss.size() == 2);
  std::vector<std::string> keys;
  for (const auto& d : res.ss) keys.push_back(flint::testing::dep_key(d));
  CHECK(std::is_sorted(keys.begin(), keys.end()));
  CHECK(std::set<std::string>(keys.begin(), keys.end()).size() == keys.size());
}

TEST_CASE("call sequences snapshot the stack for failures") {
  IrProgram prog = compile(R"(void inner() {
  fail() @spec(deep);
}
void outer() {
  inner();
}
void main() {
  outer();
}
)");
  ExtractResult res = extract_feature_models(prog);
  REQUIRE(res.fail.size() == 1);
  REQUIRE(res.fail[0].sequences.size() == 1);
  CHECK(serialize_sequence(res.fail[0].sequences[0]) ==
        "main@t.flc:6>outer@t.flc:7>inner@t.flc:5");
}

TEST_CASE("normal paths keep the longest distinct call sequences") {
  IrProgram prog = compile(R"(void a() {}
void b() {}
void main() {
  a();
  b();
}
)");
  ExtractResult res = extract_feature_models(prog);
  REQUIRE(res.normal.size() == 1);
  const auto& seqs = res.normal[0].sequences;
  REQUIRE(seqs.size() == 2);
  // Both traces have depth 2; ties break toward smaller serialization.
  CHECK(serialize_sequence(seqs[0]) == "main@t.flc:3>a@t.flc:4");
  CHECK(serialize_sequence(seqs[1]) == "main@t.flc:3>b@t.flc:5");
}

TEST_CASE("choose_longest orders by length then serialization and caps at L") {
  std::set<CallSequence> pool = {
      seq({{"main", 1}}),
      seq({{"main", 1}, {"a", 2}}),
      seq({{"main", 1}, {"b", 3}}),
      seq({{"main", 1}, {"a", 2}, {"c", 4}}),
  };
  auto all = choose_longest(pool, 10);
  REQUIRE(all.size() == 4);
  CHECK(all[0].size() == 3);
  CHECK(serialize_sequence(all[1]) == "main@t.flc:1>a@t.flc:2");
  CHECK(serialize_sequence(all[2]) == "main@t.flc:1>b@t.flc:3");
  CHECK(all[3].size() == 1);

  auto capped = choose_longest(pool, 2);
  REQUIRE(capped.size() == 2);
  CHECK(capped[0].size() == 3);
  CHECK(serialize_sequence(capped[1]) == "main@t.flc:1>a@t.flc:2");

  CHECK(choose_longest({}, 5).empty());
}

TEST_CASE("the terminated-path budget marks the run truncated") {
  IrProgram prog = compile(R"(int32 g;
void main() {
  int32 a;
  int32 b;
  int32 c;
  make_symbolic(a, 0, 1);
  make_symbolic(b, 0, 1);
  make_symbolic(c, 0, 1);
  if (a > 0) { g = 1; } else { g = 2; }
  if (b > 0) { g = 3; } else { g = 4; }
  if (c > 0) { g = 5; } else { g = 6; }
}
)");
  EngineConfig cfg;
  cfg.max_paths = 3;
  ExtractResult res = extract_feature_models(prog, cfg);
  CHECK(res.truncated);
  CHECK(res.paths_terminated <= 3);

  EngineConfig roomy;
  ExtractResult full = extract_feature_models(prog, roomy);
  CHECK_FALSE(full.truncated);
  CHECK(full.normal.size() == 8);
}

TEST_CASE("search order does not change the set of terminated paths") {
  IrProgram prog = compile(R"(int32 g;
void main() {
  int32 a;
  int32 b;
  make_symbolic(a, 0, 2);
  make_symbolic(b, 0, 2);
  if (a > b) { g = 1; } else { g = 2; }
  if (a == 0) { fail() @spec(z); }
}
)");
  EngineConfig dfs, bfs;
  dfs.search = EngineConfig::Search::DFS;
  bfs.search = EngineConfig::Search::BFS;
  ExtractResult rd = extract_feature_models(prog, dfs);
  ExtractResult rb = extract_feature_models(prog, bfs);
  CHECK(rd.normal.size() == rb.normal.size());
  CHECK(rd.fail.size() == rb.fail.size());
  CHECK(dep_keys(rd.ss) == dep_keys(rb.ss));
  CHECK(dep_keys(rd.sl) == dep_keys(rb.sl));
}

TEST_CASE("random straight-line programs agree with the concrete oracle") {
  std::mt19937 rng(4242);
  for (int trial = 0; trial < 60; ++trial) {
    std::string text = flint::testing::gen_straightline(rng);
    CAPTURE(text);
    IrProgram prog = compile(text);
    for (auto mode : {EngineConfig::StoreKey::BaseAddress,
                      EngineConfig::StoreKey::ObjectOffset}) {
      EngineConfig cfg;
      cfg.store_key = mode;
      ExtractResult res = extract_feature_models(prog, cfg);
      REQUIRE_FALSE(res.truncated);

      // Straight-line: engine path count equals the domain product of the
      // symbolic inputs only when branches exist; here there are none, so
      // exactly one normal path, and its pairs must match one concrete run.
      REQUIRE(res.fail.size() + res.normal.size() == 1);
      RunResult oracle = run_concrete(prog, {}, cfg);
      std::set<std::string> oss, osl;
      for (const auto& d : oracle.pairs)
        (d.kind == DepPair::Kind::SS ? oss : osl).insert(flint::testing::dep_key(d));
      CHECK(dep_keys(res.ss) == oss);
      CHECK(dep_keys(res.sl) == osl);
      if (!res.fail.empty()) {
        CHECK(oracle.status == RunStatus::Failure);
        CHECK(oracle.diagnostic == res.fail[0].diagnostic);
      } else {
        CHECK(oracle.status == RunStatus::Normal);
      }
    }
  }
}
