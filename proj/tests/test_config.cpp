#include <doctest.h>

#include "odoforge/config.hpp"

#include <string>

using namespace odoforge;

#ifndef ODOFORGE_FIXTURES
#error "ODOFORGE_FIXTURES must point at data/fixtures"
#endif

namespace {

const std::filesystem::path kFixtures = ODOFORGE_FIXTURES;

const char* kMinimal = R"(
[group]
kind = free_abelian
generators = t
[chain]
level1 = t^2
level2 = t^4
)";

template <class F>
ConfigError config_error(F&& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("no ConfigError");
  return ConfigError(ErrorKind::InvariantViolation, 0, 0, "", "");
}

}  // namespace

TEST_CASE("fixtures round-trip") {
  auto cfg = load_config(kFixtures / "dyadic.cfg");
  CHECK(cfg.group->kind() == GroupKind::FreeAbelian);
  CHECK(cfg.group->rank() == 1);
  CHECK(cfg.levels.size() == 6);
  CHECK(cfg.depth == 6);
  CHECK(cfg.radius == 15);
  REQUIRE(cfg.window);
  CHECK(cfg.window->size() == 32);
  CHECK(cfg.window->back().to_string() == "t^31");

  for (const char* f : {"triadic.cfg", "box.cfg", "free_aexp.cfg", "free_s3.cfg"}) {
    CAPTURE(f);
    auto c = load_config(kFixtures / f);
    CHECK(c.depth >= 1);
    CHECK(c.depth <= static_cast<int>(c.levels.size()));
  }
}

TEST_CASE("free-group words parse through the word grammar and print back") {
  auto cfg = load_config(kFixtures / "free_s3.cfg");
  REQUIRE(cfg.levels.size() == 3);
  const auto text = read_file(kFixtures / "free_s3.cfg");
  for (std::size_t n = 0; n < cfg.levels.size(); ++n) {
    const auto key = "level" + std::to_string(n + 1) + " = ";
    const auto at = text.find(key);
    REQUIRE(at != std::string::npos);
    const auto line = text.substr(at + key.size(), text.find('\n', at) - at - key.size());
    std::string printed;
    for (std::size_t i = 0; i < cfg.levels[n].size(); ++i)
      printed += (i ? ", " : "") + cfg.levels[n][i].to_string();
    CHECK(printed == line);
  }
}

TEST_CASE("defaults and run keys") {
  auto cfg = parse_config(kMinimal);
  CHECK(cfg.depth == 2);
  CHECK(cfg.command == "all");
  CHECK_FALSE(cfg.window);

  auto c2 = parse_config(std::string(kMinimal) +
                         "[run]\ndepth = 1\nradius = 3\nwindow = -2..2\ntolerance = 1e-6\ncommand = eigen\n"
                         "caps = max_states=50\n");
  CHECK(c2.depth == 1);
  CHECK(c2.radius == 3);
  CHECK(c2.window->size() == 5);
  CHECK(c2.tolerance == doctest::Approx(1e-6));
  CHECK(c2.command == "eigen");
  CHECK(c2.caps.max_states == 50);

  auto c3 = parse_config(std::string(kMinimal) + "[run]\nwindow = ball 2\n");
  CHECK(c3.window->size() == 5);
  auto c4 = parse_config(std::string(kMinimal) + "[run]\nwindow = t, t^-1 # comment\n");
  CHECK(c4.window->size() == 2);
}

TEST_CASE("canonical text and hash inputs") {
  auto a = parse_config(kMinimal);
  auto b = parse_config(std::string("# leading comment\n") + kMinimal);
  CHECK(a.canonical() == b.canonical());
  auto c = parse_config(std::string(kMinimal) + "[run]\nradius = 7\n");
  CHECK(a.canonical() != c.canonical());
}

TEST_CASE("syntax errors carry line and column") {
  auto e = config_error([] { parse_config("[group\nkind = free\n"); });
  CHECK(e.kind() == ErrorKind::SyntaxError);
  CHECK(e.line() == 1);

  e = config_error([] { parse_config("kind = free\n"); });
  CHECK(e.kind() == ErrorKind::SyntaxError);
  CHECK(e.line() == 1);
  CHECK(e.column() == 1);

  e = config_error([] { parse_config("[group]\n  kind free\n"); });
  CHECK(e.kind() == ErrorKind::SyntaxError);
  CHECK(e.line() == 2);
  CHECK(e.column() == 12);

  e = config_error([] { parse_config("[group]\nkind = free\ngenerators = a b\n[chain]\nlevel1 = a^2, b**a\n"); });
  CHECK(e.kind() == ErrorKind::SyntaxError);
  CHECK(e.line() == 5);
  CHECK(e.column() == 15);

  e = config_error([] { parse_config(std::string(kMinimal) + "[run]\nradius = 3x\n"); });
  CHECK(e.kind() == ErrorKind::SyntaxError);
  CHECK(e.field() == "run.radius");
}

TEST_CASE("semantic errors name the field") {
  auto e = config_error([] { parse_config("[group]\nkind = free\ngenerators = a b\n"); });
  CHECK(e.kind() == ErrorKind::SemanticError);
  CHECK(e.field() == "chain");

  e = config_error([] { parse_config("[group]\nkind = cyclic\ngenerators = a\n[chain]\nlevel1 = a\n"); });
  CHECK(e.field() == "group.kind");

  e = config_error([] { parse_config(std::string(kMinimal) + "[run]\ndepth = 3\n"); });
  CHECK(e.field() == "run.depth");

  e = config_error([] { parse_config(std::string(kMinimal) + "[run]\nradius = 0\n"); });
  CHECK(e.field() == "run.radius");

  e = config_error([] { parse_config(std::string(kMinimal) + "[run]\ncommand = plot\n"); });
  CHECK(e.field() == "run.command");

  e = config_error([] { parse_config(std::string(kMinimal) + "[run]\nspeed = 3\n"); });
  CHECK(e.field() == "run.speed");

  e = config_error([] { parse_config("[group]\nkind = free\ngenerators = a b\n[chain]\nlevel1 = c\n"); });
  CHECK(e.kind() == ErrorKind::SemanticError);
  CHECK(e.field() == "chain.level1");

  e = config_error([] { parse_config("[group]\nkind = free\ngenerators = a b\n[chain]\nlevel2 = a\n"); });
  CHECK(e.field() == "chain.level1");

  e = config_error([] { parse_config("[group]\nkind = free\ngenerators = a b\n[chain]\nlevel1 = a\n[extra]\n"); });
  CHECK(e.field() == "extra");
}
