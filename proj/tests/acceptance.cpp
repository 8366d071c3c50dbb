// One PASS/FAIL line per acceptance criterion. Exit status is the number of failures.

#include "odoforge/dispatch.hpp"
#include "odoforge/measures.hpp"

#include <array>
#include <bit>
#include <chrono>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

using namespace odoforge;

namespace {

const std::filesystem::path kFixtures = ODOFORGE_FIXTURES;
const char* kFixtureFiles[] = {"dyadic.cfg", "triadic.cfg", "box.cfg", "free_aexp.cfg", "free_s3.cfg"};

struct Failed {
  std::string why;
};

void require(bool ok, const std::string& why) {
  if (!ok) throw Failed{why};
}

Chain fixture_chain(const char* file, std::optional<int> depth = std::nullopt) {
  auto cfg = load_config(kFixtures / file);
  return validate_chain(cfg.group, cfg.levels, depth.value_or(cfg.depth), cfg.caps);
}

GroupPtr zz() { return GroupDescriptor::make(GroupKind::FreeAbelian, {"t"}); }
Word tw(std::int64_t n) { return Word::from_exponents(zz(), {n}); }
std::int64_t val(const Word& w) { return w.data()[0]; }

Chain power_chain(std::int64_t base, int depth) {
  std::vector<std::vector<Word>> gens;
  std::int64_t m = 1;
  for (int n = 0; n < depth; ++n) gens.push_back({tw(m *= base)});
  return validate_chain(zz(), gens, depth);
}

std::int64_t mod(std::int64_t a, std::int64_t m) { return ((a % m) + m) % m; }

// x(n) straight from coset membership: 0 on 2Z ∪ (3+8Z) ∪ (15+32Z) ∪ ...,
// 1 on (1+4Z) ∪ (7+16Z) ∪ ...; exact when the deciding modulus is at most 2^N
std::optional<int> dyadic_membership(std::int64_t n, int depth) {
  for (int j = 0; j < depth; ++j) {
    const std::int64_t m = std::int64_t{1} << (j + 1);
    if (mod(n, m) == m / 2 - 1) return j % 2;
  }
  return std::nullopt;
}

// The permutation of {0,1,2} that a word induces under a -> (0 1 2), b -> (0 1).
std::array<int, 3> s3_perm(const Word& w) {
  const std::vector<std::vector<int>> gens = {{1, 2, 0}, {1, 0, 2}};
  std::array<int, 3> p{0, 1, 2};
  const auto letters = w.data();
  for (auto it = letters.rbegin(); it != letters.rend(); ++it) {
    const auto& g = gens[static_cast<std::size_t>(std::abs(*it) - 1)];
    std::array<int, 3> q{};
    for (int i = 0; i < 3; ++i) {
      if (*it > 0)
        q[static_cast<std::size_t>(i)] = g[static_cast<std::size_t>(p[static_cast<std::size_t>(i)])];
      else
        for (int k = 0; k < 3; ++k)
          if (g[static_cast<std::size_t>(k)] == p[static_cast<std::size_t>(i)]) q[static_cast<std::size_t>(i)] = k;
    }
    p = q;
  }
  return p;
}

std::string criterion1() {
  auto chain = fixture_chain("free_s3.cfg");
  const auto& stab = chain.level(1);
  require(stab.index() == 3, "level 1 index " + std::to_string(stab.index()));
  const auto core = normal_core(stab);
  require(core.index() == 6, "core index " + std::to_string(core.index()));
  require(contains_subgroup(stab, core).contained, "core not inside the subgroup");
  const auto ball = ball_enumerate(stab.group(), 3);
  const auto core_ball = [&] {
    std::vector<Word> out;
    for (const auto& h : ball)
      if (core.contains(h)) out.push_back(h);
    return out;
  }();
  for (const auto& w : ball) {
    const bool kernel = s3_perm(w) == std::array<int, 3>{0, 1, 2};
    require(core.contains(w) == kernel, "core membership differs from the S3 kernel at " + w.to_string());
    for (const auto& h : core_ball)
      require(core.contains(w * h * invert(w)), "conjugate leaves the core: " + w.to_string() + ", " + h.to_string());
  }
  return "index 6, inside Stab, kernel oracle and conjugation closed over ball(3) (" +
         std::to_string(ball.size()) + " words)";
}

std::string criterion2() {
  const auto four = power_chain(4, 3);
  const auto two = power_chain(2, 6);
  const auto map = factor_between(four, two);
  require(map.ok(), "4-adic to 2-adic failed");
  for (int i = 0; i <= 6; ++i)
    require(map.levels()[static_cast<std::size_t>(i)] == (i + 1) / 2,
            "k_" + std::to_string(i) + " = " + std::to_string(map.levels()[static_cast<std::size_t>(i)]));
  auto pts = all_points(four, 3);
  require(pts.size() >= 20, "fewer than 20 source points");
  pts.resize(20);
  const auto ball = ball_enumerate(zz(), 3);
  for (const auto& p : pts)
    for (const auto& g : ball)
      require(map.apply(act_truncated(four, g, p)) == act_truncated(two, g, map.apply(p)), "not equivariant");

  const auto bad = factor_between(power_chain(2, 4), power_chain(3, 4));
  require(!bad.ok() && bad.failed_level() == 1, "2-adic to 3-adic did not fail at level 1");
  require(bad.witness() && mod(val(*bad.witness()), 3) != 0 && mod(val(*bad.witness()), 16) == 0,
          "witness does not separate the levels");
  return "k_i = ceil(i/2) for i <= 6, equivariant on 20 points x ball(3); 2-adic to 3-adic fails at level 1 with " +
         bad.witness()->to_string();
}

std::string criterion3() {
  std::size_t checks = 0;
  for (int n = 1; n <= 4; ++n) {
    const auto chain = power_chain(2, n);
    const auto grp = eigenvalue_group(chain, n);
    const std::int64_t order = std::int64_t{1} << n;
    require(!grp.infinite() && static_cast<std::int64_t>(grp.characters.size()) == order,
            "level " + std::to_string(n) + " has " + std::to_string(grp.characters.size()) + " characters");
    std::set<Rational> expected, got;
    for (std::int64_t k = 0; k < order; ++k) expected.insert(Rational(k, order));
    for (const auto& c : grp.characters) got.insert(c[0]);
    require(got == expected, "characters are not k/2^n");
    for (const auto& chi : grp.characters)
      for (const auto& p : all_points(chain, n))
        for (const auto& g : ball_enumerate(zz(), 20)) {
          ++checks;
          require(eigenfunction(chain, n, chi, act_truncated(chain, g, p)) ==
                      frac(character_eval(chi, g) + eigenfunction(chain, n, chi, p)),
                  "eigen relation fails");
        }
  }
  return "orders 2,4,8,16 with characters k/2^n; " + std::to_string(checks) + " exact eigen relations";
}

std::string criterion4() {
  const auto spec = ToeplitzSpec::build(power_chain(2, 6), 6);
  const int expected[] = {0, 1, 0, 0, 0, 1, 0, 1};
  for (int n = 0; n < 8; ++n) {
    const auto v = spec.evaluate(tw(n));
    require(v.exact && v.symbol == expected[n], "x(" + std::to_string(n) + ") = " + std::to_string(v.symbol));
    require(dyadic_membership(n, 6) == expected[n], "membership oracle disagrees at " + std::to_string(n));
  }
  // exactness against the trailing-ones oracle over a wide range
  for (std::int64_t n = -300; n <= 300; ++n) {
    const auto v = spec.evaluate(tw(n));
    const auto m = dyadic_membership(n, 6);
    require(v.exact == m.has_value(), "exactness differs at " + std::to_string(n));
    if (m) require(v.symbol == *m, "symbol differs at " + std::to_string(n));
    const int t = std::countr_one(static_cast<std::uint64_t>(n));
    if (t <= 5) require(v.symbol == t % 2, "trailing-ones oracle differs at " + std::to_string(n));
  }
  std::vector<Word> window;
  for (int n = 0; n < 32; ++n) window.push_back(tw(n));
  const auto rep = toeplitz_verify(spec, window, 40);
  require(rep.pass && rep.uncertified.empty() && rep.contradictions.empty(), "verify did not pass");
  for (const auto& e : rep.entries) require(e.level.has_value(), "uncertified " + e.position.to_string());
  return "x = 01000101 on 0..7, verify PASS on 0..31 at depth 6, " + std::to_string(rep.sampled_checks) +
         " sampled checks, 0 contradictions";
}

std::string criterion5() {
  const auto spec = ToeplitzSpec::build(power_chain(2, 5), 5);
  const auto rep = period_structure_check(spec, 4, 15, true);
  require(rep.inconclusive == 0, std::to_string(rep.inconclusive) + " inconclusive");
  std::size_t nonmembers = 0;
  for (int n = 0; n <= 4; ++n)
    for (std::int64_t g = -15; g <= 15; ++g)
      if (mod(g, std::int64_t{1} << n) != 0) ++nonmembers;
  require(rep.entries.size() == nonmembers && rep.witnesses == nonmembers, "not every non-member was tested");
  for (const auto& e : rep.entries) {
    const auto& f = e.result;
    require(f.outcome == Falsification::Outcome::Witness && f.w && f.gamma, "missing witness");
    const std::int64_t period = std::int64_t{1} << e.level;
    const auto w = val(*f.w), gamma = val(*f.gamma), g = val(e.g);
    require(mod(gamma, period) == 0, "gamma outside the level");
    // σ is constant on w + 2^n Z, and the shifted value is exactly different
    for (std::int64_t k = -8; k <= 8; ++k) {
      const auto m = dyadic_membership(w + k * period, 5);
      if (m) require(*m == f.sigma, "sigma not constant on the coset of " + f.w->to_string());
    }
    const auto shifted = dyadic_membership(w + gamma + g, 5);
    require(shifted && *shifted != f.sigma, "witness does not falsify " + e.g.to_string());
  }
  return std::to_string(rep.witnesses) + " non-members at levels 1..4 falsified, each witness rechecked";
}

struct Tower {
  std::vector<IncidenceMatrix> ms;
  std::vector<std::int64_t> sizes;
  TowerSequence seq;
};

Tower tower_of(const SampleSpace& space, const std::vector<Partition>& refiners, int n_max) {
  Tower t;
  t.seq = kr_tower_sequence(space, refiners, n_max);
  for (const auto& l : t.seq.levels) t.sizes.push_back(static_cast<std::int64_t>(l.transversal().size()));
  for (int n = 0; n < n_max; ++n) t.ms.push_back(incidence_matrix(space, t.seq.levels[n], t.seq.levels[n + 1]));
  return t;
}

std::string criterion6() {
  std::size_t matrices = 0;
  for (const char* f : kFixtureFiles) {
    auto cfg = load_config(kFixtures / f);
    auto chain = validate_chain(cfg.group, cfg.levels, cfg.depth, cfg.caps);
    auto spec = std::make_shared<const ToeplitzSpec>(ToeplitzSpec::build(chain, cfg.depth, cfg.caps.ball));
    const auto space = sample_space(spec, spec->tower().d[static_cast<std::size_t>(cfg.depth - 1)], cfg.sample_radius);
    require(space.size() == spec->top().index(), std::string(f) + ": sample incomplete");
    for (const auto& refiners :
         {default_refiners(space, cfg.depth), std::vector<Partition>(cfg.depth + 1, trivial_partition(space))}) {
      const auto t = tower_of(space, refiners, cfg.depth);
      for (std::size_t n = 0; n < t.ms.size(); ++n) {
        ++matrices;
        const auto& a = t.ms[n].a;
        for (std::size_t j = 0; j < a.cols(); ++j) {
          std::int64_t s = 0;
          for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, j);
          require(s * static_cast<std::int64_t>(spec->tower().d[n].size()) ==
                      static_cast<std::int64_t>(spec->tower().d[n + 1].size()),
                  std::string(f) + ": column sum off at level " + std::to_string(n));
        }
      }
      if (refiners.front().size() == 1) {
        const auto est = measure_estimate(t.ms, t.sizes, cfg.group->kind());
        for (int n = 0; n <= cfg.depth; ++n)
          require(est.point[n].size() == 1 && est.point[n][0] == Rational(1, chain.index(n)),
                  std::string(f) + ": trivial tower misses 1/index at level " + std::to_string(n));
      }
    }
  }
  return std::to_string(matrices) + " incidence matrices on 5 fixtures obey the column-sum law; k=1 towers give 1/index";
}

std::string criterion7() {
  auto spec = std::make_shared<const ToeplitzSpec>(ToeplitzSpec::build(power_chain(2, 5), 5));
  std::vector<Word> window;
  for (int n = 0; n < 4; ++n) window.push_back(tw(n));
  const auto space = sample_space(spec, window, 64);
  std::size_t cases = 0;
  for (int n = 0; n <= 5; ++n) {
    const auto q = base_partition(space, n);
    for (int wn = 0; wn <= 5; ++wn) {
      const auto r = pattern_partition(space, spec->tower().d[static_cast<std::size_t>(wn)]);
      const auto p = kr_refine(space, r, q);
      ++cases;
      require(is_partition(space, p.cells()), "output is not a partition");
      require(refines(space, p.cells(), r) && refines(space, p.cells(), q.cells()), "output does not refine both");
      require(p.base_union() == q.base_union(), "base cells do not union to C");
      require(kr_refine(space, r, p).cells() == p.cells(), "not idempotent");
    }
    require(kr_refine(space, trivial_partition(space), q).cells() == q.cells(), "trivial refiner changed Q");
  }
  return std::to_string(cases) + " refinements: refine R and Q, base unions equal C, idempotent, trivial identity";
}

std::string criterion8() {
  auto spec = std::make_shared<const ToeplitzSpec>(ToeplitzSpec::build(power_chain(2, 5), 5));
  std::vector<Word> window;
  for (int n = 0; n < 4; ++n) window.push_back(tw(n));
  const auto space = sample_space(spec, window, 64);
  const auto t = tower_of(space, default_refiners(space, 5), 5);
  const auto est = measure_estimate(t.ms, t.sizes, GroupKind::FreeAbelian);
  require(to_double(est.diameter) < 1e-9 && est.uniquely_ergodic, "diameter " + to_string(est.diameter));
  for (int n = 0; n < 5; ++n) {
    const auto& a = t.ms[n].a;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      Rational acc(0);
      for (std::size_t j = 0; j < a.cols(); ++j) acc += Rational(a(i, j)) * est.point[n + 1][j];
      require(acc == est.point[n][i], "mu_n != A_n mu_{n+1} at level " + std::to_string(n));
    }
  }
  std::ostringstream ks;
  for (const auto& l : t.seq.levels) ks << l.base().size() << ' ';
  return "diameter " + to_string(est.diameter) + ", mu_n = A_n mu_{n+1} exactly; k_n = " + ks.str();
}

std::string criterion9() {
  std::size_t points = 0;
  for (const char* f : kFixtureFiles) {
    auto cfg = load_config(kFixtures / f);
    const int depth = std::min(3, static_cast<int>(cfg.levels.size()));
    auto chain = validate_chain(cfg.group, cfg.levels, depth, cfg.caps);
    for (const auto& p : all_points(chain, depth)) {
      ++points;
      // independent scan: g fixes p iff g·t_n ∈ t_n Γ_n at every level
      std::vector<Word> scanned;
      for (const auto& g : ball_enumerate(chain.group(), 7)) {
        bool fixes = true;
        for (int n = 0; n <= depth && fixes; ++n)
          fixes = chain.level(n).coset_of(g * chain.level(n).transversal()[static_cast<std::size_t>(p.coords[n])]) ==
                  p.coords[n];
        if (fixes) scanned.push_back(g);
      }
      require(scanned == stabilizer_by_formula(chain, p, 7), std::string(f) + ": formula differs from scan");
      require(scanned == stabilizer_ball(chain, p, 7), std::string(f) + ": ball stabilizer differs from scan");
    }
  }
  return std::to_string(points) + " points on 5 fixtures, radius 7, depth 3";
}

std::string criterion10() {
  for (const char* f : kFixtureFiles) {
    const auto cfg = load_config(kFixtures / f);
    const auto a = dispatch(cfg, "all", std::filesystem::temp_directory_path() / "odoforge_accept_a");
    const auto b = dispatch(load_config(kFixtures / f), "all", std::filesystem::temp_directory_path() / "odoforge_accept_b");
    require(a.exit_code() == 0, std::string(f) + ": exit code " + std::to_string(a.exit_code()));
    require(a.body_text() == b.body_text(), std::string(f) + ": report bodies differ");
  }
  return "two `all` runs per fixture give byte-identical report bodies, all exit 0";
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<std::string()>> criteria[] = {
      {"1 normal core", criterion1},          {"2 factor map", criterion2},
      {"3 eigenvalues", criterion3},          {"4 toeplitz construction", criterion4},
      {"5 period structure", criterion5},     {"6 column sums", criterion6},
      {"7 KR refinement", criterion7},        {"8 measure inverse limit", criterion8},
      {"9 stabilizer formula", criterion9},   {"10 determinism", criterion10},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string status = "PASS", detail;
    try {
      detail = fn();
    } catch (const Failed& f) {
      status = "FAIL";
      detail = f.why;
    } catch (const std::exception& e) {
      status = "FAIL";
      detail = std::string("error: ") + e.what();
    }
    const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (status == "FAIL") ++failures;
    std::cout << status << " criterion " << name << ": " << detail << " (" << static_cast<long>(ms) << " ms)\n";
  }
  return failures;
}
