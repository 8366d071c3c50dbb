#include <doctest.h>

#include "odoforge/coset.hpp"
#include "odoforge/error.hpp"

#include <numeric>
#include <set>

using namespace odoforge;

namespace {

GroupPtr f2() { return GroupDescriptor::make(GroupKind::Free, {"a", "b"}); }
GroupPtr zz() { return GroupDescriptor::make(GroupKind::FreeAbelian, {"t"}); }
GroupPtr z2() { return GroupDescriptor::make(GroupKind::FreeAbelian, {"a", "b"}); }

SubgroupHandle gen(const GroupPtr& g, std::initializer_list<const char*> gens) {
  std::vector<Word> ws;
  for (auto s : gens) ws.push_back(parse_word(s, g));
  return subgroup_from_generators(g, ws);
}

// S3 acting on {0,1,2}: a -> (0 1 2), b -> (0 1).
const std::vector<std::vector<int>> kS3 = {{1, 2, 0}, {1, 0, 2}};

// Independent evaluation of the permutation image of a word: compose the
// generator permutations letter by letter (left action, rightmost first).
int perm_act(const Word& w, int point) {
  const auto& d = w.data();
  for (auto it = d.rbegin(); it != d.rend(); ++it) {
    const auto g = static_cast<std::size_t>((*it < 0 ? -*it : *it) - 1);
    if (*it > 0) {
      point = kS3[g][point];
    } else {
      for (int x = 0; x < 3; ++x)
        if (kS3[g][x] == point) {
          point = x;
          break;
        }
    }
  }
  return point;
}

std::int64_t exp_sum(const Word& w) {
  auto v = abelianize(w);
  return std::accumulate(v.begin(), v.end(), std::int64_t{0});
}

}  // namespace

TEST_CASE("subgroup_from_generators examples") {
  auto two = gen(zz(), {"t^2"});
  CHECK(two.index() == 2);
  CHECK(two.transversal()[0].is_identity());
  CHECK(two.transversal()[1].to_string() == "t");

  auto g = f2();
  auto h = gen(g, {"a", "b^2", "b*a*b^-1"});
  CHECK(h.index() == 2);
  // oracle: kernel of a -> 0, b -> 1 mod 2
  for (auto& w : ball_enumerate(g, 5)) CHECK(h.contains(w) == (abelianize(w)[1] % 2 == 0));
  for (const char* s : {"a", "b^2", "b*a*b^-1"}) CHECK(h.coset_of(parse_word(s, g)) == 0);

  CHECK(gen(z2(), {"a^2", "b^2"}).index() == 4);
}

TEST_CASE("subgroup construction errors") {
  auto g = f2();
  try {
    gen(g, {"a"});
    FAIL("expected NotFiniteIndex");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotFiniteIndex);
  }
  try {
    gen(z2(), {"a^3"});
    FAIL("expected NotFiniteIndex");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotFiniteIndex);
  }
  try {
    subgroup_from_generators(zz(), {parse_word("t^20000", zz())}, 10000);
    FAIL("expected StateCap");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::StateCap);
  }
  CHECK_THROWS_AS(gen(g, {"e"}), Error);
}

TEST_CASE("coset_of examples and table consistency") {
  auto two = gen(zz(), {"t^2"});
  CHECK(coset_of(two, parse_word("t^5", zz())) == coset_of(two, parse_word("t", zz())));

  auto g = f2();
  auto h = gen(g, {"a", "b^2", "b*a*b^-1"});
  CHECK(coset_of(h, parse_word("b*a", g)) == 1);
  CHECK(coset_of(h, Word::identity(g)) == 0);

  auto stab = stabilizer_of_action(g, kS3, 0);
  for (const auto* sub : {&h, &stab}) {
    auto ball = ball_enumerate(g, 4);
    for (const auto& w : ball)
      for (int k = 0; k < 2; ++k) {
        auto letter = Word::generator(g, k);
        CHECK(sub->coset_of(letter * w) == sub->table().act(letter, sub->coset_of(w)));
      }
    for (int i = 0; i < sub->index(); ++i) CHECK(sub->coset_of(sub->transversal()[i]) == i);
  }
}

TEST_CASE("abelian membership matches exponent-vector membership") {
  auto z = z2();
  auto lat = gen(z, {"a^2", "a*b^3"});  // lattice spanned by (2,0), (1,3)
  CHECK(lat.index() == 6);
  for (auto& w : ball_enumerate(z, 8)) {
    const auto v = w.data();
    // (x, y) = p(2,0) + q(1,3) iff 3 | y and 2 | x - y/3
    const bool member = v[1] % 3 == 0 && (v[0] - v[1] / 3) % 2 == 0;
    CHECK(lat.contains(w) == member);
  }
}

TEST_CASE("contains_subgroup") {
  auto z = zz();
  auto four = gen(z, {"t^4"});
  auto two = gen(z, {"t^2"});
  CHECK(contains_subgroup(two, four).contained);
  auto c = contains_subgroup(four, two);
  CHECK_FALSE(c.contained);
  REQUIRE(c.witness);
  CHECK(c.witness->to_string() == "t^2");

  // Klein-four kernel inside the even-length kernel.
  auto g = f2();
  const std::vector<std::vector<int>> klein = {{1, 0, 3, 2}, {2, 3, 0, 1}};
  auto inner = stabilizer_of_action(g, klein, 0);
  auto outer = gen(g, {"a^2", "a*b", "b^2"});
  CHECK(outer.index() == 2);
  for (const auto& s : schreier_data(inner).generators) CHECK(exp_sum(s) % 2 == 0);
  CHECK(contains_subgroup(outer, inner).contained);

  auto b_even = gen(g, {"a", "b^2", "b*a*b^-1"});
  auto a_even = gen(g, {"b", "a^2", "a*b*a^-1"});
  auto nc = contains_subgroup(b_even, a_even);
  CHECK_FALSE(nc.contained);
  REQUIRE(nc.witness);
  CHECK(a_even.contains(*nc.witness));
  CHECK_FALSE(b_even.contains(*nc.witness));
}

TEST_CASE("intersect") {
  auto z = zz();
  auto six = intersect(gen(z, {"t^2"}), gen(z, {"t^3"}));
  CHECK(six.index() == 6);
  for (auto& w : ball_enumerate(z, 12)) CHECK(six.contains(w) == (w.data()[0] % 6 == 0));

  auto h = gen(z, {"t^4"});
  CHECK(intersect(h, h).index() == 4);

  auto zz2 = z2();
  auto l1 = gen(zz2, {"a^2", "b"});
  auto l2 = gen(zz2, {"a", "b^3"});
  auto l = intersect(l1, l2);
  CHECK(l.index() == 6);
  auto hnf = hermite_normal_form(eigen_lattice_snf(l).lattice);
  CHECK(hnf == IntegerMatrix::from_rows({{2, 0}, {0, 3}}, 2));
  for (int x = 0; x < 6; ++x)
    for (int y = 0; y < 6; ++y) {
      auto w = Word::from_exponents(zz2, {x, y});
      CHECK(l.contains(w) == (x % 2 == 0 && y % 3 == 0));
    }

  auto g = f2();
  auto s0 = stabilizer_of_action(g, kS3, 0);
  auto ev = gen(g, {"a", "b^2", "b*a*b^-1"});
  auto both = intersect(s0, ev);
  for (auto& w : ball_enumerate(g, 4)) CHECK(both.contains(w) == (s0.contains(w) && ev.contains(w)));
}

TEST_CASE("normal_core") {
  auto z = zz();
  auto two = gen(z, {"t^2"});
  CHECK(normal_core(two).index() == 2);

  auto g = f2();
  auto stab = stabilizer_of_action(g, kS3, 0);
  CHECK(stab.index() == 3);
  auto core = normal_core(stab);
  CHECK(core.index() == 6);
  CHECK(contains_subgroup(stab, core).contained);
  CHECK(6 % core.index() == 0);
  CHECK(is_normal(core));
  CHECK_FALSE(is_normal(stab));
  // kernel of the action: w acts trivially on all three points
  for (auto& w : ball_enumerate(g, 4)) {
    const bool trivial = perm_act(w, 0) == 0 && perm_act(w, 1) == 1 && perm_act(w, 2) == 2;
    CHECK(core.contains(w) == trivial);
  }
  auto gens = schreier_data(core).generators;
  for (auto& x : ball_enumerate(g, 3))
    for (auto& s : gens) CHECK(core.contains(x * s * invert(x)));

  try {
    normal_core(stab, 5);
    FAIL("expected CoreCap");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CoreCap);
  }
}

TEST_CASE("conjugate") {
  auto g = f2();
  auto stab0 = stabilizer_of_action(g, kS3, 0);
  auto same = conjugate(stab0, Word::identity(g));
  for (auto& w : ball_enumerate(g, 4)) CHECK(same.contains(w) == stab0.contains(w));

  auto c = conjugate(stab0, parse_word("a", g));
  CHECK(c.index() == 3);
  for (auto& w : ball_enumerate(g, 4)) CHECK(c.contains(w) == (perm_act(w, 1) == 1));

  auto z = z2();
  auto lat = gen(z, {"a^2", "a*b^3"});
  auto lc = conjugate(lat, parse_word("a*b^-5", z));
  for (auto& w : ball_enumerate(z, 6)) CHECK(lc.contains(w) == lat.contains(w));
}

TEST_CASE("schreier_data") {
  auto z = zz();
  auto two = gen(z, {"t^2"});
  auto sd = schreier_data(two);
  REQUIRE(sd.transversal.size() == 2);
  CHECK(sd.transversal[1].to_string() == "t");
  REQUIRE(sd.generators.size() == 1);
  CHECK(sd.generators[0].to_string() == "t^2");

  auto g = f2();
  auto whole = whole_group(g);
  auto wd = schreier_data(whole);
  CHECK(wd.transversal.size() == 1);
  REQUIRE(wd.generators.size() == 2);
  CHECK(wd.generators[0].to_string() == "a");
  CHECK(wd.generators[1].to_string() == "b");

  auto stab = stabilizer_of_action(g, kS3, 0);
  auto st = schreier_data(stab);
  CHECK(st.transversal.size() == 3);
  CHECK(st.generators.size() == 4);  // 1 + n(k - 1) = 1 + 3
  for (auto& s : st.generators) CHECK(stab.contains(s));
  // they generate: rebuilding from them gives the same subgroup
  auto rebuilt = subgroup_from_generators(g, st.generators);
  CHECK(contains_subgroup(rebuilt, stab).contained);
  CHECK(contains_subgroup(stab, rebuilt).contained);
}

TEST_CASE("eigen_lattice_snf") {
  auto z = zz();
  for (int n = 1; n <= 4; ++n) {
    auto sub = subgroup_from_generators(z, {Word::from_exponents(z, {1 << n})});
    auto e = eigen_lattice_snf(sub);
    CHECK(e.torsion == std::vector<std::int64_t>{1 << n});
    CHECK(e.free_rank == 0);
    CHECK(e.quotient_order() == static_cast<std::uint64_t>(sub.index()));
  }
  auto e2 = eigen_lattice_snf(gen(z2(), {"a^2", "b^2"}));
  CHECK(e2.torsion == std::vector<std::int64_t>{2, 2});
  CHECK(e2.quotient_string() == "Z/2 x Z/2");

  auto lat = gen(z2(), {"a^2", "a*b^3"});
  CHECK(eigen_lattice_snf(lat).quotient_order() == 6);

  auto g = f2();
  auto ef = eigen_lattice_snf(gen(g, {"a", "b^2", "b*a*b^-1"}));
  CHECK(ef.torsion == std::vector<std::int64_t>{2});
  CHECK(ef.free_rank == 0);
}

TEST_CASE("caps parsing") {
  auto c = caps_from_string("max_states=20, core_cap=7,free_radius=3");
  CHECK(c.max_states == 20);
  CHECK(c.core_cap == 7);
  CHECK(c.ball.free_radius == 3);
  CHECK_THROWS_AS(caps_from_string("bogus=1"), Error);
  CHECK_THROWS_AS(caps_from_string("max_states=-2"), Error);
}

TEST_CASE("non-normal subgroup from generators matches the permutation oracle") {
  auto g = f2();
  auto stab = stabilizer_of_action(g, kS3, 0);
  auto rebuilt = subgroup_from_generators(g, schreier_data(stab).generators);
  CHECK(rebuilt.index() == 3);
  for (auto& w : ball_enumerate(g, 5)) CHECK(rebuilt.contains(w) == (perm_act(w, 0) == 0));
}
