#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "flint/engine.hpp"
#include "flint/error.hpp"
#include "flint/parser.hpp"
#include "flint/records.hpp"
#include "flint/resolve.hpp"

using namespace flint;
using namespace flint::flc;
using namespace flint::modelx;
using namespace flint::symex;
namespace fs = std::filesystem;

namespace {

SymVarInfo info(const std::string& base, int instance) {
  SymVarInfo v;
  v.base = base;
  v.instance = instance;
  return v;
}

SymValue c(long long x) { return SymValue::concrete(x); }

struct TempDir {
  fs::path dir;
  TempDir() {
    dir = fs::temp_directory_path() /
          ("flint-records-" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~TempDir() { fs::remove_all(dir); }
  std::string file(const std::string& name) const { return (dir / name).string(); }
};

// Dependency pairs point into the program, so keep it alongside the result.
struct Extraction {
  std::shared_ptr<IrProgram> prog;
  ExtractResult res;
};

Extraction extract_text(const std::string& text) {
  SourceUnit u = parse_unit_text("t.flc", text);
  ProductDef p;
  p.name = "prod";
  auto prog = std::make_shared<IrProgram>(resolve_product(u, p));
  ExtractResult res = extract_feature_models(*prog);
  return {std::move(prog), std::move(res)};
}

CallSequence trace(std::initializer_list<const char*> fns) {
  CallSequence s;
  int line = 1;
  for (const char* fn : fns) s.push_back({fn, {"t.flc", line++}});
  return s;
}

void expect_read_error(const std::string& path, const std::string& needle,
                       bool dep_kind = false) {
  try {
    if (dep_kind)
      read_dep_corpus(path);
    else
      read_path_corpus(path);
    FAIL_CHECK("expected an input error containing: " << needle);
  } catch (const Error& e) {
    CHECK(e.code == Errc::input);
    CHECK_MESSAGE(std::string(e.what()).find(needle) != std::string::npos, e.what());
  }
}

void write_raw(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  os << content;
}

}  // namespace

TEST_CASE("display names stay bare until a base repeats") {
  std::vector<SymVarInfo> vars = {info("x", 1), info("y", 1), info("x", 2)};
  AtomSerializer ser(vars);
  CHECK(ser.value_text(SymValue::var(0)) == "x_1");
  CHECK(ser.value_text(SymValue::var(1)) == "y");
  CHECK(ser.value_text(SymValue::var(2)) == "x_2");
}

TEST_CASE("values serialize as prefix terms with one relation direction") {
  AtomSerializer ser({info("x", 1), info("y", 1)});
  SymValue x = SymValue::var(0), y = SymValue::var(1);
  CHECK(ser.value_text(c(-7)) == "-7");
  CHECK(ser.value_text(SymValue::op(SymOp::Sub, {x, c(3)})) == "(Sub x 3)");
  // Gt/Ge fold into Lt/Le by swapping.
  CHECK(ser.value_text(SymValue::op(SymOp::Gt, {x, c(3)})) == "(Lt 3 x)");
  CHECK(ser.value_text(SymValue::op(SymOp::Ge, {x, c(3)})) == "(Le 3 x)");
  // Commutative operands order by serialized text; digits sort before names.
  CHECK(ser.value_text(SymValue::op(SymOp::Eq, {y, x})) == "(Eq x y)");
  CHECK(ser.value_text(SymValue::op(SymOp::Add, {y, c(1)})) == "(Add 1 y)");
  CHECK(ser.value_text(SymValue::op(SymOp::Mul, {y, x})) == "(Mul x y)");
  // Non-commutative operands keep their order.
  CHECK(ser.value_text(SymValue::op(SymOp::Sub, {y, x})) == "(Sub y x)");
  CHECK(ser.value_text(SymValue::op(SymOp::Not, {x})) == "(Not x)");
}

TEST_CASE("atoms normalize the same way as values") {
  AtomSerializer ser({info("x", 1), info("y", 1)});
  SymValue x = SymValue::var(0), y = SymValue::var(1);
  CHECK(ser.atom_text({Rel::Gt, x, c(3)}) == "(Lt 3 x)");
  CHECK(ser.atom_text({Rel::Ge, x, c(3)}) == "(Le 3 x)");
  CHECK(ser.atom_text({Rel::Lt, x, c(3)}) == "(Lt x 3)");
  CHECK(ser.atom_text({Rel::Eq, y, x}) == "(Eq x y)");
  CHECK(ser.atom_text({Rel::Ne, y, c(0)}) == "(Ne 0 y)");
  // Ordering happens on equality relations only; Lt keeps sides.
  CHECK(ser.atom_text({Rel::Lt, y, x}) == "(Lt y x)");
}

TEST_CASE("path records carry product, status and sorted atom texts") {
  Extraction ex = extract_text(R"(int32 g;
void main() {
  int32 x;
  make_symbolic(x, 0, 9);
  if (x > 4) {
    fail() @spec(s1);
  }
  g = 1;
}
)");
  auto records = make_path_records(ex.res, "prod");
  REQUIRE(records.size() == 2);
  // Normal paths precede failure paths.
  CHECK(records[0].status == "normal");
  CHECK(records[0].spec_id.empty());
  CHECK(records[1].status == "failure");
  CHECK(records[1].spec_id == "s1");
  for (const auto& r : records) {
    CHECK(r.product == "prod");
    CHECK(std::is_sorted(r.atoms.begin(), r.atoms.end()));
    CHECK_FALSE(r.over_approx);
    REQUIRE_FALSE(r.call_sequences.empty());
    CHECK(r.call_sequences[0][0].fn == "main");
  }
  CHECK(records[1].atoms == std::vector<std::string>{"(Lt 4 x)"});
}

TEST_CASE("dependency records keep locations, presences and the object") {
  Extraction ex = extract_text(R"(int32 a;
int32 b;
void main() {
  a = 1;
  b = a;
}
)");
  auto deps = make_dep_records(ex.res);
  REQUIRE(deps.size() == 1);
  CHECK(deps[0].kind == "SL");
  CHECK(deps[0].src_loc.line == 4);
  CHECK(deps[0].dst_loc.line == 5);
  CHECK(deps[0].object == "a");
  CHECK(deps[0].src_presence.is_true());
  CHECK(deps[0].dst_presence.is_true());
}

TEST_CASE("trace cleaning removes exact and prefix-star matches") {
  CallSequence s = trace({"main", "spec_check_a", "log_violation", "work"});
  CallSequence cleaned = clean_trace(s, {"spec_check_*", "log_violation"});
  REQUIRE(cleaned.size() == 2);
  CHECK(cleaned[0].fn == "main");
  CHECK(cleaned[1].fn == "work");
  // A '*' is a wildcard only at the end of the pattern.
  CHECK(clean_trace(trace({"spec_check_a"}), {"spec_*_a"}).size() == 1);
  CHECK(clean_trace(s, {}).size() == 4);
  // The bare-star pattern removes everything.
  CHECK(clean_trace(s, {"*"}).empty());
}

TEST_CASE("records whose sequences would empty are dropped and counted") {
  PathRecord keeps;
  keeps.status = "normal";
  keeps.call_sequences = {trace({"main", "helper"})};
  PathRecord drops;
  drops.status = "failure";
  drops.call_sequences = {trace({"main", "helper"}), trace({"helper"})};
  int dropped = -1;
  auto out = clean_records({keeps, drops}, {"helper"}, &dropped);
  REQUIRE(out.size() == 1);
  CHECK(dropped == 1);
  REQUIRE(out[0].call_sequences.size() == 1);
  CHECK(out[0].call_sequences[0].size() == 1);
  CHECK(out[0].call_sequences[0][0].fn == "main");
}

TEST_CASE("atomic writes leave no temporary files behind") {
  TempDir td;
  std::string path = td.file("out.txt");
  write_text_atomic(path, "alpha\nbeta\n");
  std::ifstream is(path);
  std::string all((std::istreambuf_iterator<char>(is)),
                  std::istreambuf_iterator<char>());
  CHECK(all == "alpha\nbeta\n");
  int entries = 0;
  for (const auto& _ : fs::directory_iterator(td.dir)) ++entries, (void)_;
  CHECK(entries == 1);
}

TEST_CASE("path corpora round-trip through JSON lines") {
  TempDir td;
  Extraction ex = extract_text(R"(int32 g;
void main() {
  int32 x;
  make_symbolic(x, 0, 9);
  if (x > 4) {
    fail() @spec(s1);
  }
  g = 1;
}
)");
  auto records = make_path_records(ex.res, "prod");
  std::string path = td.file("paths.jsonl");
  emit_path_corpus(records, path);
  auto back = read_path_corpus(path);
  REQUIRE(back.size() == records.size());
  for (size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].product == records[i].product);
    CHECK(back[i].spec_id == records[i].spec_id);
    CHECK(back[i].status == records[i].status);
    CHECK(back[i].atoms == records[i].atoms);
    CHECK(back[i].over_approx == records[i].over_approx);
    REQUIRE(back[i].call_sequences.size() == records[i].call_sequences.size());
    for (size_t s = 0; s < back[i].call_sequences.size(); ++s)
      CHECK(serialize_sequence(back[i].call_sequences[s]) ==
            serialize_sequence(records[i].call_sequences[s]));
  }
}

TEST_CASE("dependency corpora round-trip including presence expressions") {
  TempDir td;
  DepRecord d;
  d.kind = "SS";
  d.src_loc = {"m.flc", 10};
  d.dst_loc = {"m.flc", 20};
  d.src_presence = parse_feature_expr("A && !B");
  d.dst_presence = parse_feature_expr("1");
  d.object = "queue";
  std::string path = td.file("deps.jsonl");
  emit_dep_corpus({d}, path);
  auto back = read_dep_corpus(path);
  REQUIRE(back.size() == 1);
  CHECK(back[0].kind == "SS");
  CHECK(back[0].src_loc == d.src_loc);
  CHECK(back[0].dst_loc == d.dst_loc);
  CHECK(back[0].src_presence.equals_canonical(d.src_presence));
  CHECK(back[0].dst_presence.is_true());
  CHECK(back[0].object == "queue");
}

TEST_CASE("corpus readers validate the schema") {
  TempDir td;

  std::string missing = td.file("nope.jsonl");
  expect_read_error(missing, "cannot open corpus");

  std::string garbled = td.file("bad.jsonl");
  write_raw(garbled, "{not json\n");
  expect_read_error(garbled, "malformed corpus record");

  std::string partial = td.file("partial.jsonl");
  write_raw(partial, "{\"product\":\"p\",\"status\":\"normal\"}\n");
  expect_read_error(partial, "missing path-record field");

  std::string status = td.file("status.jsonl");
  write_raw(status,
            "{\"product\":\"p\",\"spec_id\":null,\"status\":\"odd\","
            "\"call_sequences\":[],\"atoms\":[],\"over_approx\":false}\n");
  expect_read_error(status, "bad status 'odd'");

  // Files mixing the two record kinds are rejected by both readers.
  Extraction ex = extract_text(R"(int32 a;
void main() {
  a = 1;
  a = 2;
}
)");
  std::string mixed = td.file("mixed.jsonl");
  auto paths = make_path_records(ex.res, "p");
  auto deps = make_dep_records(ex.res);
  REQUIRE_FALSE(paths.empty());
  REQUIRE_FALSE(deps.empty());
  std::string path_line, dep_line;
  {
    std::string p1 = td.file("p1.jsonl"), p2 = td.file("p2.jsonl");
    emit_path_corpus(paths, p1);
    emit_dep_corpus(deps, p2);
    std::ifstream i1(p1), i2(p2);
    std::getline(i1, path_line);
    std::getline(i2, dep_line);
  }
  write_raw(mixed, path_line + "\n" + dep_line + "\n");
  expect_read_error(mixed, "heterogeneous corpus");
  expect_read_error(mixed, "heterogeneous corpus", true);

  std::string badkind = td.file("kind.jsonl");
  write_raw(badkind,
            "{\"kind\":\"XX\",\"src\":{\"file\":\"f\",\"line\":1,\"presence\":\"1\"},"
            "\"dst\":{\"file\":\"f\",\"line\":2,\"presence\":\"1\"},\"object\":\"o\"}\n");
  expect_read_error(badkind, "bad dependency kind 'XX'", true);
}
