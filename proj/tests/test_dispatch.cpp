#include <doctest.h>

#include "odoforge/dispatch.hpp"

#include <fstream>
#include <sstream>

using namespace odoforge;

namespace {

const std::filesystem::path kFixtures = ODOFORGE_FIXTURES;

RunConfig fixture(const char* name) { return load_config(kFixtures / name); }

RunConfig with(const char* name, const std::string& extra) {
  return parse_config(read_file(kFixtures / name) + extra, kFixtures);
}

// [run] already exists in the fixtures, so overrides go through the struct
RunConfig dyadic_depth(int depth) {
  auto c = fixture("dyadic.cfg");
  c.depth = depth;
  c.window.reset();
  return c;
}

const Check* find(const Report& r, const std::string& name) {
  for (const auto& c : r.checks())
    if (c.name == name) return &c;
  return nullptr;
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("odoforge_dispatch_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

std::filesystem::path write_array(const std::filesystem::path& dir, const std::string& name, int (*sym)(int)) {
  std::ostringstream s;
  s << "# generated\n";
  for (int n = -40; n <= 40; ++n) s << "t^" << n << ' ' << sym(n) << '\n';
  auto p = dir / name;
  std::ofstream(p) << s.str();
  return p;
}

}  // namespace

TEST_CASE("validate: pass, and nesting failure carries a witness") {
  CHECK(dispatch(fixture("dyadic.cfg"), "validate").exit_code() == 0);
  auto bad = parse_config("[group]\nkind = free_abelian\ngenerators = t\n[chain]\nlevel1 = t^2\nlevel2 = t^6\nlevel3 = t^3\n");
  auto r = dispatch(bad, "validate");
  CHECK(r.exit_code() == 1);
  const auto* c = find(r, "validate.nesting");
  REQUIRE(c);
  CHECK(c->status == Status::Fail);
  CHECK(c->witness == std::optional<std::string>("t^3"));
}

TEST_CASE("toeplitz: dump prefix and verify") {
  auto dir = scratch("toeplitz");
  auto r = dispatch(fixture("dyadic.cfg"), "toeplitz", dir);
  CHECK(r.exit_code() == 0);
  std::istringstream dump(read_file(dir / "array.dump"));
  std::string prefix, line;
  int rows = 0;
  while (std::getline(dump, line)) {
    ++rows;
    if (prefix.size() < 8) prefix += line.substr(line.find(' ') + 1, 1);
  }
  CHECK(rows == 32);
  CHECK(prefix == "01000101");
  CHECK(std::filesystem::exists(dir / "report.json"));

  auto outside = fixture("dyadic.cfg");
  outside.window = std::vector<Word>{Word::from_exponents(outside.group, {500})};
  CHECK(dispatch(outside, "toeplitz").exit_code() == 3);
}

TEST_CASE("toeplitz: external arrays are never certified") {
  auto dir = scratch("external");
  auto periodic = write_array(dir, "periodic.txt", [](int n) { return ((n % 2) + 2) % 2; });
  auto spike = write_array(dir, "spike.txt", [](int n) { return n == 0 ? 1 : 0; });
  auto cfg = fixture("dyadic.cfg");
  cfg.window.reset();
  cfg.array_file = periodic;
  cfg.depth = 3;
  CHECK(dispatch(cfg, "toeplitz").exit_code() == 2);
  cfg.array_file = spike;
  auto r = dispatch(cfg, "toeplitz");
  CHECK(r.exit_code() == 1);
  CHECK(find(r, "toeplitz.verify_external")->witness.has_value());
}

TEST_CASE("periods: pass, even at radius 1 since gamma spans all of the level") {
  CHECK(dispatch(fixture("dyadic.cfg"), "periods").exit_code() == 0);
  auto cfg = dyadic_depth(5);
  cfg.radius = 1;
  auto r = dispatch(cfg, "periods");
  CHECK(r.exit_code() == 0);
  CHECK(find(r, "periods.structure")->data["inconclusive"] == 0);
}

TEST_CASE("factor: dyadic onto triadic fails at level 1") {
  auto r = dispatch(with("dyadic.cfg", "[factor]\ntarget = triadic.cfg\n"), "factor");
  CHECK(r.exit_code() == 1);
  const auto* c = find(r, "factor.between");
  REQUIRE(c);
  CHECK(c->data["failed_level"] == 1);
  CHECK(c->witness.has_value());

  auto four = parse_config(
      "[group]\nkind = free_abelian\ngenerators = t\n[chain]\nlevel1 = t^4\nlevel2 = t^16\nlevel3 = t^64\n"
      "[factor]\ntarget = dyadic.cfg\n",
      kFixtures);
  auto ok = dispatch(four, "factor");
  CHECK(ok.exit_code() == 0);
  CHECK(find(ok, "factor.between")->data["k"] == Json({0, 1, 1, 2, 2, 3, 3}));
  CHECK(find(ok, "factor.equivariance")->status == Status::Pass);

  CHECK(dispatch(fixture("free_s3.cfg"), "factor").exit_code() == 0);
}

TEST_CASE("eigen: dyadic depth 3 gives the k/8 table") {
  auto dir = scratch("eigen");
  auto r = dispatch(dyadic_depth(3), "eigen", dir);
  CHECK(r.exit_code() == 0);
  std::istringstream csv(read_file(dir / "characters.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "level,character,q_t");
  std::vector<std::string> qs;
  while (std::getline(csv, line)) qs.push_back(line.substr(line.rfind(',') + 1));
  CHECK(qs == std::vector<std::string>{"0", "1/8", "1/4", "3/8", "1/2", "5/8", "3/4", "7/8"});
}

TEST_CASE("measure: pass, and an incomplete sample is inconclusive") {
  auto dir = scratch("measure");
  CHECK(dispatch(fixture("dyadic.cfg"), "measure", dir).exit_code() == 0);
  CHECK(std::filesystem::exists(dir / "matrices.csv"));
  CHECK(std::filesystem::exists(dir / "measures.json"));
  auto cfg = fixture("dyadic.cfg");
  cfg.sample_radius = 3;
  CHECK(dispatch(cfg, "measure").exit_code() == 2);
}

TEST_CASE("errors and unknown verbs exit 3") {
  CHECK(dispatch(fixture("dyadic.cfg"), "plot").exit_code() == 3);
  auto cfg = parse_config("[group]\nkind = free_abelian\ngenerators = t\n[chain]\nlevel1 = t^2\nlevel2 = t^2\nlevel3 = t^4\n");
  auto r = dispatch(cfg, "toeplitz");
  CHECK(r.exit_code() == 3);
  CHECK(r.body()["error"]["kind"] == "IndexOneLevel");
  CHECK(r.body()["error"]["stage"] == "toeplitz");
}

TEST_CASE("all: every fixture passes and reports are byte-identical") {
  for (const char* f : {"dyadic.cfg", "triadic.cfg", "box.cfg", "free_aexp.cfg", "free_s3.cfg"}) {
    CAPTURE(f);
    auto a = dispatch(fixture(f), "all", scratch("all_a"));
    auto b = dispatch(fixture(f), "all", scratch("all_b"));
    CHECK(a.exit_code() == 0);
    CHECK(a.body_text() == b.body_text());
    for (const auto& c : a.checks())
      if (c.status == Status::Fail) CHECK(c.witness.has_value());
  }
}

TEST_CASE("report body excludes timing; file carries it beside the body") {
  auto r = dispatch(fixture("triadic.cfg"), "validate");
  CHECK(r.body_text().find("_ms") == std::string::npos);
  auto f = Json::parse(r.file_text());
  CHECK(f.contains("timing"));
  CHECK(f["body"] == r.body());
  CHECK(f["body_hash"] == fnv1a_hex(r.body_text()));
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}
