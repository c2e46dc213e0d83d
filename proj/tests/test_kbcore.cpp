#include <catch_amalgamated.hpp>

#include "lcn/generators.hpp"
#include "lcn/kb.hpp"
#include "test_util.hpp"

using namespace lcn;

TEST_CASE("degree comparisons are exact") {
  CHECK(Degree{1, 2} == Degree{1, 2});
  CHECK(Degree{1, 2} != Degree{2, 4});  // stored form matters
  CHECK(Degree{1, 2}.value() == Degree{2, 4}.value());
  CHECK(Degree{1, 4} < Degree{1, 2});
  CHECK(Degree{2, 4} <= Degree{1, 2});
  CHECK(Degree{3, 4}.to_string() == "3/4");
}

TEST_CASE("cmp_holds covers all four operators") {
  CHECK(cmp_holds(Rational(1, 2), Cmp::GE, Rational(1, 2)));
  CHECK_FALSE(cmp_holds(Rational(1, 2), Cmp::GT, Rational(1, 2)));
  CHECK(cmp_holds(Rational(1, 2), Cmp::LE, Rational(1, 2)));
  CHECK_FALSE(cmp_holds(Rational(1, 2), Cmp::LT, Rational(1, 2)));
  CHECK(cmp_is_universal(Cmp::GE));
  CHECK(cmp_is_universal(Cmp::GT));
  CHECK_FALSE(cmp_is_universal(Cmp::LE));
  CHECK_FALSE(cmp_is_universal(Cmp::LT));
  for (const char* tok : {"geq", "gt", "leq", "lt"}) {
    auto c = cmp_from_token(tok);
    REQUIRE(c.has_value());
    CHECK(cmp_token(*c) == std::string(tok));
  }
}

TEST_CASE("concept expression identity and printing") {
  Concept a = ConceptExpr::make_name("a");
  Concept b = ConceptExpr::make_name("b");
  Concept e = ConceptExpr::make_impl(ConceptExpr::make_and(a, b), ConceptExpr::make_neg(b));
  CHECK(concept_to_string(e) == "impl(and(a,b),neg(b))");
  CHECK(concept_equal(e, ConceptExpr::make_impl(ConceptExpr::make_and(a, b),
                                                ConceptExpr::make_neg(b))));
  CHECK_FALSE(concept_equal(e, ConceptExpr::make_impl(a, b)));
  std::set<std::string> names;
  collect_names(e, names);
  CHECK(names == std::set<std::string>{"a", "b"});
}

TEST_CASE("phi table matches the clamped linear activation") {
  // Step function over (v-1, v] intervals equals min(1, max(0, w/n)) scaled
  // back to numerators, at every rational probe point.
  const int n = 4;
  PhiTable phi = reduction_phi(n);
  phi.validate();
  auto reference = [&](const Rational& w) {
    Rational r = w / n;
    if (r <= 0) return 0;
    if (r >= 1) return n;
    // smallest v with w <= v, i.e. ceil of w for the half-open rows
    return static_cast<int>(rat_ceil(w));
  };
  CHECK(phi.apply(Rational(2)) == 2);
  CHECK(phi.apply(Rational(100)) == 4);
  for (int num = -20; num <= 20; ++num)
    for (int den = 1; den <= 4; ++den) {
      Rational w(num, den);
      CHECK(phi.apply(w) == reference(w));
    }
}

TEST_CASE("phi table is monotone and total on random tables") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto [kb, q] = gen_random_kb(testutil::differential_params(seed));
    std::vector<Rational> probes;
    for (const PhiRow& row : kb.phi.rows) {
      if (row.lb) {
        probes.push_back(*row.lb);
        probes.push_back(*row.lb + Rational(1, 7));
        // exactly at the boundary the lower row still applies
        CHECK(kb.phi.apply(*row.lb) == row.v - 1);
      }
      if (row.ub) CHECK(kb.phi.apply(*row.ub) == row.v);
    }
    probes.push_back(Rational(-1000));
    probes.push_back(Rational(1000));
    std::sort(probes.begin(), probes.end());
    int prev = 0;
    for (std::size_t i = 0; i < probes.size(); ++i) {
      int v = kb.phi.apply(probes[i]);
      CHECK((v >= 0 && v <= kb.n));
      if (i > 0) CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("phi table validation rejects malformed tables") {
  PhiTable phi = reduction_phi(2);
  SECTION("gap between rows") {
    phi.rows[1].lb = Rational(-1);
    CHECK_THROWS_AS(phi.validate(), kb_error);
  }
  SECTION("missing row") {
    phi.rows.pop_back();
    CHECK_THROWS_AS(phi.validate(), kb_error);
  }
  SECTION("first row must start at -inf") {
    phi.rows[0].lb = Rational(-5);
    CHECK_THROWS_AS(phi.validate(), kb_error);
  }
  SECTION("empty interval") {
    phi.rows[1].lb = Rational(1);
    phi.rows[0].ub = Rational(1);
    phi.rows[1].ub = Rational(1);
    phi.rows[2].lb = Rational(1);
    CHECK_THROWS_AS(phi.validate(), kb_error);
  }
}

TEST_CASE("knowledge base validation") {
  KnowledgeBase kb = testutil::horse_kb();
  CHECK(kb.n == 4);
  CHECK(kb.num_concepts() == 5);
  CHECK(kb.has_individual("anonymous"));
  CHECK(kb.is_distinguished("horse"));
  CHECK_FALSE(kb.is_distinguished("tall"));
  CHECK(kb.wtis_for("horse").size() == 3);
  CHECK(kb.wtis_for("tall").empty());

  SECTION("undeclared name in wti") {
    kb.dbox.push_back({"zebra", ConceptExpr::top(), Rational(1)});
    CHECK_THROWS_AS(kb.finalize(), kb_error);
  }
  SECTION("undeclared name in axiom body") {
    kb.tbox.push_back({ConceptExpr::make_name("zebra"), ConceptExpr::top(), Cmp::GE, Rational(1)});
    CHECK_THROWS_AS(kb.finalize(), kb_error);
  }
  SECTION("duplicate concept name") {
    kb.concepts.push_back("horse");
    CHECK_THROWS_AS(kb.finalize(), kb_error);
  }
  SECTION("alpha outside [0,1]") {
    kb.tbox.push_back({ConceptExpr::top(), ConceptExpr::top(), Cmp::GE, Rational(3, 2)});
    CHECK_THROWS_AS(kb.finalize(), kb_error);
  }
  SECTION("assertion on unknown individual") {
    kb.abox.push_back({ConceptExpr::make_name("horse"), "pippo", Cmp::GE, Rational(1)});
    CHECK_THROWS_AS(kb.finalize(), kb_error);
  }
  SECTION("empty exactly_one group") {
    kb.exactly_one.push_back({"g", {}});
    CHECK_THROWS_AS(kb.finalize(), kb_error);
  }
}

TEST_CASE("assignment_to_map uses declared order") {
  KnowledgeBase kb = testutil::horse_kb();
  Assignment a = {4, 2, 4, 0, 0};
  DegreeMap m = assignment_to_map(kb, a);
  CHECK(m.at("horse") == Degree{4, 4});
  CHECK(m.at("has_tail") == Degree{2, 4});
  CHECK(m.at("small") == Degree{0, 4});
}
