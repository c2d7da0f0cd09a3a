#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>

#include "qpnls/combinatorics.hpp"
#include "qpnls/errors.hpp"

using namespace qpnls;

namespace {

Branch node3(Branch a, Branch b, Branch c) {
  std::vector<Branch> ch;
  ch.push_back(std::move(a));
  ch.push_back(std::move(b));
  ch.push_back(std::move(c));
  return Branch::node(std::move(ch));
}

// Independent recursion oracle for ell, separate from the library path.
std::int64_t ell_oracle(const Branch& b) {
  switch (b.kind()) {
    case Branch::Kind::leaf0: return 0;
    case Branch::Kind::leaf1: return 1;
    case Branch::Kind::node: {
      std::int64_t s = 1;
      for (const Branch& c : b.children()) s += ell_oracle(c);
      return s;
    }
  }
  return -1;
}

}  // namespace

TEST_CASE("counting functions on the basic branches") {
  const Branch l0 = Branch::leaf0();
  const Branch l1 = Branch::leaf1();
  CHECK(sigma2p(l0, 1) == 1);
  CHECK(sigma2p(l1, 1) == 3);
  CHECK(ell(l0, 1) == 0);
  CHECK(ell(l1, 1) == 1);
  CHECK(dfactor(l0, 1) == 1);
  CHECK(dfactor(l1, 1) == 1);

  const Branch mixed = node3(Branch::leaf1(), Branch::leaf0(), Branch::leaf1());
  CHECK(sigma2p(mixed, 1) == 7);  // 3 + 1 + 3
  // recursion: 1 + (1 + 0 + 1) = 3
  CHECK(ell_oracle(mixed) == 3);
  CHECK(ell(mixed, 1) == ell_oracle(mixed));
  CHECK(dfactor(mixed, 1) == 3);  // ell(node) * 1 * 1 * 1
  CHECK(sigma2p(mixed, 1) == 2 * ell(mixed, 1) + 1);
}

TEST_CASE("malformed branches are rejected") {
  std::vector<Branch> two;
  two.push_back(Branch::leaf0());
  two.push_back(Branch::leaf0());
  const Branch bad_arity = Branch::node(std::move(two));
  CHECK_THROWS_AS(sigma2p(bad_arity, 1), structure_error);
  CHECK_THROWS_AS(validate_branch(bad_arity, 1), structure_error);

  // A node cannot mix a depth-1-only child with a node child.
  const Branch inner = node3(Branch::leaf0(), Branch::leaf0(), Branch::leaf0());
  const Branch mixed_depth = node3(Branch::leaf1(), inner, Branch::leaf0());
  CHECK_THROWS_AS(validate_branch(mixed_depth, 1), structure_error);

  // But nesting a depth-2 node inside a depth-3 node is fine.
  const Branch deep = node3(inner, inner, node3(Branch::leaf1(), Branch::leaf0(), Branch::leaf1()));
  CHECK_NOTHROW(validate_branch(deep, 1));
}

TEST_CASE("term counts") {
  CHECK(term_count(1, 1) == 2);
  CHECK(term_count(2, 1) == 9);
  CHECK(term_count(3, 1) == 730);  // 1 + 9^3
  CHECK(term_count(2, 2) == 33);   // 1 + 2^5
  CHECK(term_count(4, 1).str() == "389017001");  // 1 + 730^3
}

TEST_CASE("branch enumeration is deterministic, complete, budget-aware") {
  auto g1 = enumerate_branches(1, 1, 100);
  REQUIRE(g1.size() == 2);
  CHECK(g1[0].kind() == Branch::Kind::leaf0);
  CHECK(g1[1].kind() == Branch::Kind::leaf1);

  bool truncated = true;
  auto g2 = enumerate_branches(2, 1, 100, &truncated);
  CHECK_FALSE(truncated);
  REQUIRE(g2.size() == 9);
  CHECK(g2[0].kind() == Branch::Kind::leaf0);
  // first node tuple: all children are the first child-universe element
  CHECK(g2[1] == node3(Branch::leaf0(), Branch::leaf0(), Branch::leaf0()));
  CHECK(g2[8] == node3(Branch::leaf1(), Branch::leaf1(), Branch::leaf1()));

  CHECK(enumerate_branches(2, 2, 1000).size() == 33);
  CHECK(enumerate_branches(3, 1, 100000).size() == 730);

  BranchStream s(2, 1, 5);
  std::uint64_t n = 0;
  while (s.next()) ++n;
  CHECK(n == 5);
  CHECK(s.truncated());

  for (int k = 1; k <= 3; ++k) {
    auto all = enumerate_branches(k, 1, 1000);
    for (const Branch& b : all) CHECK_NOTHROW(validate_branch(b, 1));
    CHECK(BigInt(all.size()) == term_count(k, 1));
  }
}

TEST_CASE("leaf slots: examples and the flat parity rule") {
  auto s0 = leaf_slots(Branch::leaf0(), 1);
  REQUIRE(s0.size() == 1);
  CHECK(s0[0].position == 1);
  CHECK(s0[0].sign == 1);
  CHECK_FALSE(s0[0].conjugated);

  auto s1 = leaf_slots(Branch::leaf1(), 1);
  REQUIRE(s1.size() == 3);
  CHECK(s1[0].sign == 1);
  CHECK(s1[1].sign == -1);
  CHECK(s1[2].sign == 1);
  CHECK_FALSE(s1[0].conjugated);
  CHECK(s1[1].conjugated);
  CHECK_FALSE(s1[2].conjugated);

  const Branch mixed = node3(Branch::leaf1(), Branch::leaf0(), Branch::leaf1());
  auto sm = leaf_slots(mixed, 1);
  REQUIRE(sm.size() == 7);
  for (std::size_t j = 0; j < sm.size(); ++j) {
    CHECK(sm[j].sign == (j % 2 == 0 ? 1 : -1));
    CHECK(sm[j].conjugated == (j % 2 == 1));
  }
}

TEST_CASE("structural invariants, exhaustive over small depths") {
  struct Case { int k, p; };
  for (const Case c : {Case{1, 1}, Case{2, 1}, Case{3, 1}, Case{1, 2}, Case{2, 2}}) {
    auto all = enumerate_branches(c.k, c.p, 1'000'000);
    CHECK(BigInt(all.size()) == term_count(c.k, c.p));
    for (const Branch& b : all) {
      const BigInt s2p = sigma2p(b, c.p);
      const BigInt l = ell(b, c.p);
      CHECK(s2p == 2 * c.p * l + 1);
      CHECK(s2p % 2 == 1);
      CHECK((2 * c.p * l) % 2 == 0);
      auto slots = leaf_slots(b, c.p);
      CHECK(BigInt(slots.size()) == s2p);
      for (std::size_t j = 0; j < slots.size(); ++j) {
        CHECK(slots[j].position == static_cast<int>(j + 1));
        CHECK(slots[j].sign == (j % 2 == 0 ? 1 : -1));
        CHECK(slots[j].conjugated == (j % 2 == 1));
      }
      CHECK(dfactor(b, c.p) >= 1);
    }
  }
}

TEST_CASE("combinatorial alternating sum") {
  auto slots0 = leaf_slots(Branch::leaf0(), 1);
  CHECK(cas({MultiIndex{1, 0}}, slots0) == MultiIndex{1, 0});

  auto slots1 = leaf_slots(Branch::leaf1(), 1);
  CHECK(cas({MultiIndex{1, 0}, MultiIndex{0, 1}, MultiIndex{1, 1}}, slots1) ==
        MultiIndex{2, 0});

  const Branch mixed = node3(Branch::leaf1(), Branch::leaf0(), Branch::leaf1());
  auto slots7 = leaf_slots(mixed, 1);
  std::vector<MultiIndex> same(7, MultiIndex{1, 0});
  // 4 plus signs, 3 minus signs: odd slot count leaves one net copy
  CHECK(cas(same, slots7) == MultiIndex{1, 0});

  CHECK_THROWS_AS(cas({MultiIndex{1, 0}}, slots1), argument_error);
}

TEST_CASE("gal sums") {
  const BigRat x(4, 27);  // (2p)^2p / P^P at p=1

  auto g10 = gal_sum_exact(1, 1, BigRat(0), 100);
  CHECK(g10.exact);
  CHECK(g10.value == 1);

  auto g1 = gal_sum_exact(1, 1, x, 100);
  CHECK(g1.exact);
  CHECK(g1.value == BigRat(31, 27));  // 1 + x

  // Independent nine-branch table (one linear branch; node tuples with
  // 0..3 depth-1 nonlinear children give ell = 1..4 and D = ell):
  //   1 + x + 3 x^2/2 + 3 x^3/3 + x^4/4
  const BigRat expected2 = 1 + x + 3 * x * x / 2 + x * x * x + x * x * x * x / 4;
  auto g2 = gal_sum_exact(2, 1, x, 100);
  CHECK(g2.exact);
  CHECK(g2.value == expected2);
  CHECK(g2.value.convert_to<double>() == doctest::Approx(1.18444).epsilon(1e-5));
  CHECK(g2.value <= BigRat(3, 2));

  // bound P/(2p) at the critical coupling, exhaustive
  for (int k = 1; k <= 3; ++k) {
    auto g = gal_sum_exact(k, 1, x, 1'000'000);
    CHECK(g.exact);
    CHECK(g.value <= BigRat(3, 2));
  }
  const BigRat x2(16 * 16, 3125);  // 4^4 / 5^5
  for (int k = 1; k <= 2; ++k) {
    auto g = gal_sum_exact(k, 2, x2, 1'000'000);
    CHECK(g.exact);
    CHECK(g.value <= BigRat(5, 4));
  }

  // monotone in x and k
  CHECK(gal_sum(2, 1, 0.05, 100).value <= gal_sum(2, 1, 0.1, 100).value);
  CHECK(gal_sum(1, 1, 0.1, 100).value <= gal_sum(2, 1, 0.1, 100).value);
  CHECK(gal_sum(2, 1, 0.1, 1000).value <= gal_sum(3, 1, 0.1, 1000).value);

  // truncated stream: lower bound, flagged inexact
  auto trunc = gal_sum_exact(3, 1, x, 10);
  CHECK_FALSE(trunc.exact);
  auto full = gal_sum_exact(3, 1, x, 1'000'000);
  CHECK(trunc.value <= full.value);

  CHECK_THROWS_AS(gal_sum(1, 1, -0.5, 100), argument_error);
}

namespace {
std::size_t count_occurrences(const std::string& hay, const std::string& needle) {
  std::size_t n = 0, pos = 0;
  while ((pos = hay.find(needle, pos)) != std::string::npos) {
    ++n;
    pos += needle.size();
  }
  return n;
}
}  // namespace

TEST_CASE("dot rendering") {
  const std::string d0 = render_tree_dot(Branch::leaf0(), 1);
  CHECK(count_occurrences(d0, "label=\"n\"") == 1);
  CHECK(count_occurrences(d0, "fillcolor=black") == 2);  // root + single leaf
  CHECK(count_occurrences(d0, "->") == 1);

  const std::string d1 = render_tree_dot(Branch::leaf1(), 1);
  CHECK(count_occurrences(d1, "fillcolor=red") == 2);
  CHECK(count_occurrences(d1, "fillcolor=green") == 1);
  CHECK(count_occurrences(d1, "->") == 3);
  CHECK(d1.find("m1") != std::string::npos);
  CHECK(d1.find("m3") != std::string::npos);

  const Branch chain = node3(Branch::leaf0(), Branch::leaf0(), Branch::leaf0());
  const std::string d2 = render_tree_dot(chain, 1);
  // three intermediate points, each with exactly one leaf child
  CHECK(count_occurrences(d2, "->") == 6);
  CHECK(count_occurrences(d2, "label=\"m") == 3);
  CHECK(count_occurrences(d2, "rank=same") == 3);
  // leaves alternate red/green/red via the parity rule; intermediates match
  CHECK(count_occurrences(d2, "fillcolor=red") == 4);
  CHECK(count_occurrences(d2, "fillcolor=green") == 2);
  CHECK(d2.find("note:") != std::string::npos);
}
