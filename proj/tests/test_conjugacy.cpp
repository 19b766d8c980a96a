#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace relhyp;
using V = Classification::Verdict;

TEST_CASE("classify", "[conjugacy]") {
  auto& E = fixtures::engine("g2");
  auto  c = E.classify("xx");
  CHECK(c.verdict == V::parabolic);
  CHECK(c.index == 1);
  CHECK(c.representative == "xx");
  CHECK(c.conjugator == "");

  c = E.classify("axA");
  CHECK(c.verdict == V::parabolic);
  CHECK(c.representative == "x");
  CHECK(E.normal_form()(inverse(c.conjugator) + "axA" + c.conjugator) == "x");

  CHECK(E.classify("a").verdict == V::hyperbolic);
  CHECK(E.classify("ax").verdict == V::hyperbolic);
  CHECK(E.classify("").verdict == V::identity);
  CHECK(E.classify("xyXY").verdict == V::identity);
  CHECK(fixtures::engine("free2").classify("abAB").verdict == V::hyperbolic);
}

TEST_CASE("conjugate_long", "[conjugacy]") {
  auto& E = fixtures::engine("free2");
  auto  r = E.conjugate_long("abb", "bba");
  REQUIRE(r.conjugate);
  CHECK(r.witness.size() == 1);
  CHECK(E.word_problem(r.witness + "abb" + inverse(r.witness) + inverse("bba")));
  CHECK_FALSE(E.conjugate_long("aabb", "abab").conjugate);
  CHECK(E.conjugate_long("aabb", "abab").reason == Reason::long_search_exhausted);
  r = E.conjugate_long("aabab", "aabab");
  CHECK(r.conjugate);
  CHECK(r.witness == "");
}

TEST_CASE("conjugate_short_hyperbolic", "[conjugacy]") {
  auto& E = fixtures::engine("free2");
  auto  r = E.conjugate_short_hyperbolic("ab", "ba");
  REQUIRE(r.conjugate);
  CHECK(r.witness == "A");
  CHECK_FALSE(E.conjugate_short_hyperbolic("a", "b").conjugate);
  CHECK(E.conjugate_short_hyperbolic("a", "b").reason == Reason::short_table_miss);
  r = E.conjugate_short_hyperbolic("a", "a");
  CHECK(r.conjugate);
  CHECK(r.witness == "");
}

TEST_CASE("conjugate_parabolic", "[conjugacy]") {
  auto& E = fixtures::engine("g2");
  auto  r = E.conjugate_parabolic(E.classify("x"), E.classify("x"));
  CHECK(r.conjugate);
  CHECK(r.witness == "");
  CHECK_FALSE(E.conjugate_parabolic(E.classify("x"), E.classify("y")).conjugate);
  CHECK_FALSE(E.conjugate_parabolic(E.classify("x"), E.classify("xx")).conjugate);
  r = E.conjugate_parabolic(E.classify("axA"), E.classify("Ax" "a"));
  REQUIRE(r.conjugate);
  CHECK(E.word_problem(r.witness + "axA" + inverse(r.witness) + inverse("Axa")));
  CHECK_THROWS_AS(E.conjugate_parabolic(E.classify("a"), E.classify("x")), std::invalid_argument);

  // a finite parabolic routes through its conjugacy classes
  auto& Z = fixtures::engine("z2z3");
  r       = Z.conjugate_parabolic(Z.classify("st" "s"), Z.classify("t"));
  REQUIRE(r.conjugate);
  CHECK(Z.word_problem(r.witness + "sts" + inverse(r.witness) + "u"));
}

TEST_CASE("decide", "[conjugacy]") {
  auto& F = fixtures::engine("free2");
  auto  c = F.decide("abA", "b");
  CHECK(c.conjugate);
  CHECK(c.verified);
  CHECK(c.witness == "A");

  auto& G = fixtures::engine("g2");
  c       = G.decide("a", "x");
  CHECK_FALSE(c.conjugate);
  CHECK(c.reason == Reason::class_mismatch);
  c = G.decide("axA", "x");
  CHECK(c.conjugate);
  CHECK(c.verified);
  CHECK(c.regime == Regime::parabolic);
  c = G.decide("", "xyXY");
  CHECK(c.conjugate);
  CHECK(c.regime == Regime::identity);
  CHECK_FALSE(G.decide("", "x").conjugate);
  // long elements go through the long-element search
  c = G.decide("axaxay", "xayaxa");
  CHECK(c.regime == Regime::long_);
  CHECK(c.L == 6);
  CHECK(c.conjugate);
  CHECK(c.verified);
  CHECK_THROWS_AS(G.decide("ab", "a"), presentation_error);
}

TEST_CASE("search", "[conjugacy]") {
  auto& F = fixtures::engine("free2");
  auto  g = F.search("abA", "b");
  CHECK(F.word_problem(g + "abA" + inverse(g) + "B"));
  CHECK(F.search("ab", "ba").size() == 1);
  CHECK_THROWS_AS(F.search("a", "b"), not_conjugate_error);
}

TEST_CASE("bounded_class", "[conjugacy]") {
  auto& F = fixtures::engine("free2");
  auto  b = F.bounded_class("a", 2);
  REQUIRE(b.size() == 1);
  CHECK(b[0].first == "a");
  // radius 3 adds b a B and B a b
  CHECK(F.bounded_class("a", 3).size() == 3);

  auto& G = fixtures::engine("g2");
  b       = G.bounded_class("x", 1);
  REQUIRE(b.size() == 1);
  CHECK(b[0].first == "x");
  b = G.bounded_class("", 0);
  REQUIRE(b.size() == 1);
  CHECK(b[0].first == "");
  for (auto const& [w, g] : G.bounded_class("ax", 3)) {
    CHECK(G.normal_form().equal(g + "ax" + inverse(g), w));
  }
}

TEST_CASE("certificate records", "[conjugacy]") {
  auto& F = fixtures::engine("free2");
  auto  r = F.decide("ab", "ba").record();
  CHECK(r.find("answer=conjugate\n") != std::string::npos);
  CHECK(r.find("witness=b\n") != std::string::npos);  // b ab B = ba
  CHECK(r.find("verified=1\n") != std::string::npos);
  CHECK(r.find("regime=short-hyperbolic\n") != std::string::npos);
  auto n = F.decide("a", "b").record();
  CHECK(n.find("answer=not_conjugate\n") != std::string::npos);
  // a fresh engine produces the same bytes
  Engine other(F.group(), F.profile());
  CHECK(other.decide("ab", "ba").record() == r);
}

TEST_CASE("decide agrees with exhaustive search", "[conjugacy][property]") {
  for (auto [name, n] : std::vector<std::pair<char const*, int>>{
           {"free2", 3}, {"g2", 3}, {"torsion", 3}, {"z2z3", 4}}) {
    auto&             E     = fixtures::engine(name);
    NormalForm const& nf    = E.normal_form();
    auto              words = fixtures::reduced_words(E.group(), n);
    BruteClassIndex   I(nf, words, n);
    size_t            agree = 0;
    INFO(name);
    for (size_t u = 0; u < words.size(); ++u) {
      auto row = I.conjugators_from(u);
      for (size_t v = 0; v < words.size(); ++v) {
        auto c = E.decide(words[u], words[v]);
        if (c.conjugate != row[v].has_value()) {
          FAIL_CHECK(words[u] << " vs " << words[v]);
          continue;
        }
        if (c.conjugate) {
          CHECK(nf(c.witness + words[u] + inverse(c.witness)) == nf(words[v]));
        }
        ++agree;
      }
    }
    CHECK(agree == words.size() * words.size());
  }
}
