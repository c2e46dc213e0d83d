#pragma once

#include <functional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lcn/kb.hpp"

namespace lcn {

// Propositional clause over positive/negative variable ids (1-based).
struct Clause {
  std::set<int> pos, neg;
};

struct ClauseSet {
  std::vector<Clause> clauses;

  void validate() const {
    for (const Clause& c : clauses)
      for (int x : c.pos)
        if (c.neg.count(x)) throw kb_error("tautological clause: contains both x and not x");
  }
  std::set<int> vars() const {
    std::set<int> out;
    for (const Clause& c : clauses) {
      out.insert(c.pos.begin(), c.pos.end());
      out.insert(c.neg.begin(), c.neg.end());
    }
    return out;
  }
};

// Truth space for the parity reduction: one degree step per clause, with
// phi(w) = min(1, max(0, w/n)) realized as half-open integer intervals.
inline PhiTable reduction_phi(int n) {
  PhiTable phi;
  phi.n = n;
  for (int v = 0; v <= n; ++v) {
    PhiRow row;
    row.v = v;
    if (v > 0) row.lb = Rational(v - 1);
    if (v < n) row.ub = Rational(v);
    phi.rows.push_back(row);
  }
  return phi;
}

// Encodes "is the maximum number of jointly satisfiable clauses even?" as the
// entailment of T(sat) ⊑ even_n >= 1. Gadgets: a crisp-forcing self loop per
// variable, a truncated-sum clause evaluator, a counter summing satisfied
// clauses into sat, and an xor chain tracking the parity of the count.
inline std::pair<KnowledgeBase, Query> gen_maxsat_even(const ClauseSet& gamma) {
  gamma.validate();
  const int n = static_cast<int>(gamma.clauses.size());
  auto var_name = [](int x) { return "x" + std::to_string(x); };
  auto clause_name = [](int i) { return "c" + std::to_string(i); };
  auto even_name = [](int i) { return "even_" + std::to_string(i); };

  std::vector<std::string> concepts;
  std::vector<WTI> dbox;
  const Concept top = ConceptExpr::top();

  if (n == 0) {
    // Degenerate instance: no clauses, k = 0 (even). even_0 is forced to 1
    // and the zero-weight inclusion pins sat at 0 = k, so the query is
    // entailed vacuously.
    concepts = {"sat", "even_0"};
    dbox.push_back({"sat", top, Rational(0)});
    dbox.push_back({"even_0", top, Rational(1)});
    PhiTable phi = reduction_phi(1);
    KnowledgeBase kb = make_kb(1, std::move(phi), concepts, {"anonymous"}, {}, {}, dbox);
    Query q{ConceptExpr::make_name("sat"), ConceptExpr::make_name("even_0"), Cmp::GE, Rational(1)};
    return {std::move(kb), std::move(q)};
  }

  for (int x : gamma.vars()) concepts.push_back(var_name(x));
  for (int i = 1; i <= n; ++i) concepts.push_back(clause_name(i));
  concepts.push_back("sat");
  for (int i = 0; i <= n; ++i) concepts.push_back(even_name(i));
  for (int i = 1; i <= n; ++i) {
    concepts.push_back(even_name(i) + "_1");
    concepts.push_back(even_name(i) + "_2");
  }

  const Rational big(n * n);
  for (int x : gamma.vars()) {
    Concept a = ConceptExpr::make_name(var_name(x));
    dbox.push_back({var_name(x), a, big});
  }
  for (int i = 1; i <= n; ++i) {
    const Clause& cl = gamma.clauses[i - 1];
    dbox.push_back({clause_name(i), top, Rational(static_cast<int>(cl.neg.size()) * n)});
    for (int x : cl.pos)
      dbox.push_back({clause_name(i), ConceptExpr::make_name(var_name(x)), Rational(n)});
    for (int x : cl.neg)
      dbox.push_back({clause_name(i), ConceptExpr::make_name(var_name(x)), Rational(-n)});
  }
  for (int i = 1; i <= n; ++i)
    dbox.push_back({"sat", ConceptExpr::make_name(clause_name(i)), Rational(1)});
  dbox.push_back({"even_0", top, Rational(n)});
  for (int i = 1; i <= n; ++i) {
    Concept prev = ConceptExpr::make_name(even_name(i - 1));
    Concept ci = ConceptExpr::make_name(clause_name(i));
    dbox.push_back({even_name(i) + "_1", prev, Rational(-n)});
    dbox.push_back({even_name(i) + "_1", ci, Rational(n)});
    dbox.push_back({even_name(i) + "_2", prev, Rational(n)});
    dbox.push_back({even_name(i) + "_2", ci, Rational(-n)});
    dbox.push_back({even_name(i), ConceptExpr::make_name(even_name(i) + "_1"), Rational(n)});
    dbox.push_back({even_name(i), ConceptExpr::make_name(even_name(i) + "_2"), Rational(n)});
  }

  KnowledgeBase kb = make_kb(n, reduction_phi(n), concepts, {"anonymous"}, {}, {}, dbox);
  Query q{ConceptExpr::make_name("sat"), ConceptExpr::make_name(even_name(n)), Cmp::GE,
          Rational(1)};
  return {std::move(kb), std::move(q)};
}

// Fully-connected feed-forward network as a weighted KB: one concept per
// node, one typicality inclusion per edge, inputs crisp by default.
struct NetSpec {
  std::vector<int> layers;  // e.g. {10, 20, 20, 1}; last must be 1
  std::uint64_t seed = 0;
  int n = 4;  // truth space denominator
  Rational wmin = Rational(-1), wmax = Rational(1);
  bool crisp_inputs = true;
};

// Evenly spaced thresholds over [wmin, wmax]: a discretized truncated-linear
// activation.
inline PhiTable linear_phi(int n, const Rational& wmin, const Rational& wmax) {
  PhiTable phi;
  phi.n = n;
  auto boundary = [&](int k) -> Rational {  // k = 1..n
    if (n == 1) return Rational((wmin + wmax) / 2);
    return Rational(wmin + (wmax - wmin) * Rational(k - 1, n - 1));
  };
  for (int v = 0; v <= n; ++v) {
    PhiRow row;
    row.v = v;
    if (v > 0) row.lb = boundary(v);
    if (v < n) row.ub = boundary(v + 1);
    phi.rows.push_back(row);
  }
  return phi;
}

inline std::pair<KnowledgeBase, Query> gen_mlp_kb(const NetSpec& spec) {
  if (spec.layers.size() < 2) throw kb_error("net spec: need at least two layers");
  for (int sz : spec.layers)
    if (sz < 1) throw kb_error("net spec: layer size must be positive");
  if (spec.layers.back() != 1) throw kb_error("net spec: last layer must have one node");
  if (spec.n < 1) throw kb_error("net spec: n must be >= 1");
  if (!(spec.wmin < spec.wmax)) throw kb_error("net spec: wmin must be < wmax");

  std::vector<std::vector<std::string>> layer_names;
  std::vector<std::string> concepts;
  for (std::size_t l = 0; l < spec.layers.size(); ++l) {
    std::vector<std::string> names;
    for (int j = 1; j <= spec.layers[l]; ++j) {
      std::string name;
      if (l == 0)
        name = "i" + std::to_string(j);
      else if (l + 1 == spec.layers.size())
        name = "o";
      else
        name = "h" + std::to_string(l) + "_" + std::to_string(j);
      names.push_back(name);
      concepts.push_back(name);
    }
    layer_names.push_back(std::move(names));
  }

  std::mt19937_64 rng(spec.seed);
  auto random_weight = [&]() {
    // uniform over {-100,...,100}/100; modulo keeps output portable
    int num = static_cast<int>(rng() % 201) - 100;
    return Rational(num, 100);
  };

  std::vector<WTI> dbox;
  for (std::size_t l = 0; l + 1 < layer_names.size(); ++l)
    for (const std::string& dst : layer_names[l + 1])
      for (const std::string& src : layer_names[l])
        dbox.push_back({dst, ConceptExpr::make_name(src), random_weight()});

  std::set<std::string> crisp;
  if (spec.crisp_inputs)
    for (const std::string& name : layer_names.front()) crisp.insert(name);

  KnowledgeBase kb = make_kb(spec.n, linear_phi(spec.n, spec.wmin, spec.wmax), concepts,
                             {"anonymous"}, {}, {}, dbox, crisp);
  Concept body = ConceptExpr::make_name(layer_names.front()[0]);
  if (layer_names.front().size() > 1)
    body = ConceptExpr::make_or(body, ConceptExpr::make_name(layer_names.front()[1]));
  Query q{ConceptExpr::make_name("o"), body, Cmp::GE, Rational(1, 2)};
  return {std::move(kb), std::move(q)};
}

struct RandomKbParams {
  std::uint64_t seed = 0;
  int n = 2;
  int num_names = 3;
  int num_inclusions = 2;
  int num_wtis = 2;
  int num_assertions = 0;
  bool allow_crisp = true;
  bool allow_groups = false;
  bool with_query = true;
};

// Random but valid KB; the default sizes keep it inside the oracle budget.
inline std::pair<KnowledgeBase, Query> gen_random_kb(const RandomKbParams& p) {
  if (p.num_names < 1) throw kb_error("random kb: need at least one name");
  std::mt19937_64 rng(p.seed);
  auto pick = [&](int bound) { return static_cast<int>(rng() % static_cast<std::uint64_t>(bound)); };

  std::vector<std::string> names;
  for (int i = 1; i <= p.num_names; ++i) names.push_back("a" + std::to_string(i));

  // Monotone partition with small integer/half-integer thresholds.
  PhiTable phi;
  phi.n = p.n;
  Rational t = Rational(-(p.n + 1)) / 2;
  std::vector<Rational> cuts;
  for (int v = 1; v <= p.n; ++v) {
    t += Rational(1 + pick(3), 2);
    cuts.push_back(t);
  }
  for (int v = 0; v <= p.n; ++v) {
    PhiRow row;
    row.v = v;
    if (v > 0) row.lb = cuts[v - 1];
    if (v < p.n) row.ub = cuts[v];
    phi.rows.push_back(row);
  }

  std::function<Concept(int)> random_expr = [&](int depth) -> Concept {
    int roll = pick(depth <= 0 ? 6 : 10);
    if (roll < 6) {
      if (roll == 4) return ConceptExpr::top();
      if (roll == 5) return ConceptExpr::bot();
      return ConceptExpr::make_name(names[pick(p.num_names)]);
    }
    if (roll < 8) return ConceptExpr::make_and(random_expr(depth - 1), random_expr(depth - 1));
    if (roll == 8) return ConceptExpr::make_or(random_expr(depth - 1), random_expr(depth - 1));
    return ConceptExpr::make_neg(random_expr(depth - 1));
  };
  auto random_cmp = [&]() { return static_cast<Cmp>(pick(4)); };
  auto random_alpha = [&]() { return Rational(pick(5), 4); };  // {0, 1/4, 1/2, 3/4, 1}

  std::vector<Inclusion> tbox;
  for (int i = 0; i < p.num_inclusions; ++i)
    tbox.push_back({random_expr(2), random_expr(2), random_cmp(), random_alpha()});

  std::vector<WTI> dbox;
  for (int i = 0; i < p.num_wtis; ++i) {
    Rational w = Rational(pick(13) - 6, 1 + pick(2));
    dbox.push_back({names[pick(p.num_names)], random_expr(2), w});
  }

  std::vector<std::string> individuals = {"anonymous"};
  std::vector<Assertion> abox;
  if (p.num_assertions > 0) {
    individuals.push_back("ind1");
    for (int i = 0; i < p.num_assertions; ++i)
      abox.push_back({random_expr(2), i % 2 == 0 ? "ind1" : "anonymous", random_cmp(),
                      random_alpha()});
  }

  std::set<std::string> crisp;
  if (p.allow_crisp && pick(2) == 1) crisp.insert(names[pick(p.num_names)]);

  std::vector<ExactlyOneGroup> groups;
  if (p.allow_groups && p.num_names >= 2 && pick(2) == 1) {
    ExactlyOneGroup g;
    g.id = "g1";
    g.members = {names[0], names[1]};
    groups.push_back(std::move(g));
  }

  KnowledgeBase kb = make_kb(p.n, std::move(phi), names, std::move(individuals), std::move(tbox),
                             std::move(abox), std::move(dbox), std::move(crisp), std::move(groups));
  Query q{ConceptExpr::make_name(names[pick(p.num_names)]), random_expr(2), random_cmp(),
          random_alpha()};
  return {std::move(kb), std::move(q)};
}

}  // namespace lcn
