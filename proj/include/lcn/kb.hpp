#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lcn/rational.hpp"

namespace lcn {

class kb_error : public std::runtime_error {
 public:
  explicit kb_error(const std::string& what) : std::runtime_error(what) {}
};

// A truth degree v/n from the finite truth space {0, 1/n, ..., n/n}.
struct Degree {
  int num = 0;
  int den = 1;

  Rational value() const { return Rational(num, den); }
  friend bool operator==(const Degree& a, const Degree& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator!=(const Degree& a, const Degree& b) { return !(a == b); }
  friend bool operator<(const Degree& a, const Degree& b) {
    return a.num * b.den < b.num * a.den;
  }
  friend bool operator<=(const Degree& a, const Degree& b) {
    return a.num * b.den <= b.num * a.den;
  }
  std::string to_string() const {
    return std::to_string(num) + "/" + std::to_string(den);
  }
};

enum class Cmp { GE, GT, LE, LT };

inline bool cmp_holds(const Rational& lhs, Cmp cmp, const Rational& rhs) {
  switch (cmp) {
    case Cmp::GE: return lhs >= rhs;
    case Cmp::GT: return lhs > rhs;
    case Cmp::LE: return lhs <= rhs;
    case Cmp::LT: return lhs < rhs;
  }
  return false;
}

inline bool cmp_is_universal(Cmp cmp) { return cmp == Cmp::GE || cmp == Cmp::GT; }

inline const char* cmp_token(Cmp cmp) {
  switch (cmp) {
    case Cmp::GE: return "geq";
    case Cmp::GT: return "gt";
    case Cmp::LE: return "leq";
    case Cmp::LT: return "lt";
  }
  return "?";
}

inline std::optional<Cmp> cmp_from_token(const std::string& tok) {
  if (tok == "geq") return Cmp::GE;
  if (tok == "gt") return Cmp::GT;
  if (tok == "leq") return Cmp::LE;
  if (tok == "lt") return Cmp::LT;
  return std::nullopt;
}

// Immutable concept expression tree, shared by handle.
class ConceptExpr;
using Concept = std::shared_ptr<const ConceptExpr>;

class ConceptExpr {
 public:
  enum class Kind { Name, Top, Bot, And, Or, Neg, Impl };

  Kind kind;
  std::string name;  // Kind::Name only
  Concept lhs, rhs;  // children; Neg uses lhs only

  static Concept make_name(std::string id) {
    return std::make_shared<ConceptExpr>(ConceptExpr{Kind::Name, std::move(id), nullptr, nullptr});
  }
  static Concept top() {
    static const Concept t = std::make_shared<ConceptExpr>(ConceptExpr{Kind::Top, {}, nullptr, nullptr});
    return t;
  }
  static Concept bot() {
    static const Concept b = std::make_shared<ConceptExpr>(ConceptExpr{Kind::Bot, {}, nullptr, nullptr});
    return b;
  }
  static Concept make_and(Concept l, Concept r) {
    return std::make_shared<ConceptExpr>(ConceptExpr{Kind::And, {}, std::move(l), std::move(r)});
  }
  static Concept make_or(Concept l, Concept r) {
    return std::make_shared<ConceptExpr>(ConceptExpr{Kind::Or, {}, std::move(l), std::move(r)});
  }
  static Concept make_neg(Concept c) {
    return std::make_shared<ConceptExpr>(ConceptExpr{Kind::Neg, {}, std::move(c), nullptr});
  }
  static Concept make_impl(Concept l, Concept r) {
    return std::make_shared<ConceptExpr>(ConceptExpr{Kind::Impl, {}, std::move(l), std::move(r)});
  }
};

inline bool concept_equal(const Concept& a, const Concept& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case ConceptExpr::Kind::Name: return a->name == b->name;
    case ConceptExpr::Kind::Top:
    case ConceptExpr::Kind::Bot: return true;
    case ConceptExpr::Kind::Neg: return concept_equal(a->lhs, b->lhs);
    default: return concept_equal(a->lhs, b->lhs) && concept_equal(a->rhs, b->rhs);
  }
}

// Term syntax used by the fact format: and(a,b), or(a,b), neg(a), impl(a,b).
inline std::string concept_to_string(const Concept& c) {
  switch (c->kind) {
    case ConceptExpr::Kind::Name: return c->name;
    case ConceptExpr::Kind::Top: return "top";
    case ConceptExpr::Kind::Bot: return "bot";
    case ConceptExpr::Kind::And:
      return "and(" + concept_to_string(c->lhs) + "," + concept_to_string(c->rhs) + ")";
    case ConceptExpr::Kind::Or:
      return "or(" + concept_to_string(c->lhs) + "," + concept_to_string(c->rhs) + ")";
    case ConceptExpr::Kind::Neg: return "neg(" + concept_to_string(c->lhs) + ")";
    case ConceptExpr::Kind::Impl:
      return "impl(" + concept_to_string(c->lhs) + "," + concept_to_string(c->rhs) + ")";
  }
  return "?";
}

inline void collect_names(const Concept& c, std::set<std::string>& out) {
  if (!c) return;
  if (c->kind == ConceptExpr::Kind::Name) out.insert(c->name);
  collect_names(c->lhs, out);
  collect_names(c->rhs, out);
}

// Total monotone step function R -> {0,...,n}/n over half-open intervals
// (lb, ub]; a missing bound stands for -inf / +inf.
struct PhiRow {
  int v = 0;
  std::optional<Rational> lb;  // nullopt = -inf
  std::optional<Rational> ub;  // nullopt = +inf
};

struct PhiTable {
  int n = 1;
  std::vector<PhiRow> rows;  // one per v = 0..n, ordered

  void validate() const {
    if (n < 1) throw kb_error("phi table: n must be >= 1");
    if (static_cast<int>(rows.size()) != n + 1)
      throw kb_error("phi table: expected " + std::to_string(n + 1) + " rows, got " +
                     std::to_string(rows.size()));
    for (int v = 0; v <= n; ++v) {
      const PhiRow& r = rows[v];
      if (r.v != v) throw kb_error("phi table: rows out of order at v=" + std::to_string(v));
      if (v == 0 && r.lb) throw kb_error("phi table: first row must have lb = -inf");
      if (v == n && r.ub) throw kb_error("phi table: last row must have ub = +inf");
      if (v > 0) {
        const PhiRow& prev = rows[v - 1];
        if (!prev.ub || !r.lb || *prev.ub != *r.lb)
          throw kb_error("phi table: gap or overlap between rows v=" + std::to_string(v - 1) +
                         " and v=" + std::to_string(v));
      }
      if (r.lb && r.ub && !(*r.lb < *r.ub))
        throw kb_error("phi table: empty interval at v=" + std::to_string(v));
    }
  }

  // The unique v with LB_v < w <= UB_v.
  int apply(const Rational& w) const {
    for (const PhiRow& r : rows) {
      if (r.lb && !(*r.lb < w)) continue;
      if (r.ub && !(w <= *r.ub)) continue;
      return r.v;
    }
    throw kb_error("phi table: no row matches weight " + rat_to_string(w));
  }
};

struct Inclusion {
  Concept lhs, rhs;
  Cmp cmp = Cmp::GE;
  Rational alpha;
};

struct Assertion {
  Concept concept_;
  std::string individual;
  Cmp cmp = Cmp::GE;
  Rational alpha;
};

// Weighted typicality inclusion: subject is a concept name by construction.
struct WTI {
  std::string subject;
  Concept body;
  Rational weight;
};

struct Query {
  Concept subject;  // wrapped by the typicality operator
  Concept body;
  Cmp cmp = Cmp::GE;
  Rational alpha;
};

struct ExactlyOneGroup {
  std::string id;
  std::vector<std::string> members;
};

class KnowledgeBase {
 public:
  int n = 1;
  PhiTable phi;
  std::vector<std::string> concepts;     // declared names, ordered
  std::vector<std::string> individuals;  // always contains "anonymous"
  std::vector<Inclusion> tbox;
  std::vector<Assertion> abox;
  std::vector<WTI> dbox;
  std::set<std::string> crisp;
  std::vector<ExactlyOneGroup> exactly_one;

  int concept_id(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw kb_error("unknown concept name: " + name);
    return it->second;
  }
  bool has_concept(const std::string& name) const { return index_.count(name) != 0; }
  bool has_individual(const std::string& id) const {
    return std::find(individuals.begin(), individuals.end(), id) != individuals.end();
  }
  std::size_t num_concepts() const { return concepts.size(); }

  bool is_distinguished(const std::string& name) const { return distinguished_.count(name) != 0; }
  const std::vector<std::string>& distinguished() const { return distinguished_order_; }
  // Indices into dbox, grouped by subject.
  const std::vector<std::size_t>& wtis_for(const std::string& subject) const {
    static const std::vector<std::size_t> empty;
    auto it = wti_by_subject_.find(subject);
    return it == wti_by_subject_.end() ? empty : it->second;
  }

  void finalize() {
    phi.validate();
    if (phi.n != n) throw kb_error("phi table n does not match KB n");
    index_.clear();
    for (std::size_t i = 0; i < concepts.size(); ++i) {
      if (!index_.emplace(concepts[i], static_cast<int>(i)).second)
        throw kb_error("duplicate concept name: " + concepts[i]);
    }
    if (!has_individual("anonymous")) individuals.push_back("anonymous");
    {
      std::set<std::string> seen;
      for (const auto& ind : individuals)
        if (!seen.insert(ind).second) throw kb_error("duplicate individual: " + ind);
    }
    auto check_names = [&](const Concept& c, const char* where) {
      std::set<std::string> names;
      collect_names(c, names);
      for (const auto& name : names)
        if (!has_concept(name))
          throw kb_error(std::string("undeclared concept name '") + name + "' in " + where);
    };
    auto check_alpha = [&](const Rational& a, const char* where) {
      if (a < 0 || a > 1)
        throw kb_error(std::string("alpha out of [0,1] in ") + where + ": " + rat_to_string(a));
    };
    for (const auto& inc : tbox) {
      check_names(inc.lhs, "concept inclusion");
      check_names(inc.rhs, "concept inclusion");
      check_alpha(inc.alpha, "concept inclusion");
    }
    for (const auto& as : abox) {
      check_names(as.concept_, "assertion");
      check_alpha(as.alpha, "assertion");
      if (!has_individual(as.individual))
        throw kb_error("undeclared individual '" + as.individual + "' in assertion");
    }
    wti_by_subject_.clear();
    distinguished_.clear();
    distinguished_order_.clear();
    for (std::size_t i = 0; i < dbox.size(); ++i) {
      const WTI& w = dbox[i];
      if (!has_concept(w.subject))
        throw kb_error("undeclared distinguished concept '" + w.subject + "' in wti");
      check_names(w.body, "wti body");
      if (distinguished_.insert(w.subject).second) distinguished_order_.push_back(w.subject);
      wti_by_subject_[w.subject].push_back(i);
    }
    for (const auto& name : crisp)
      if (!has_concept(name)) throw kb_error("undeclared concept name '" + name + "' in crisp");
    for (const auto& g : exactly_one) {
      if (g.members.empty()) throw kb_error("exactly_one group '" + g.id + "' has no members");
      for (const auto& m : g.members)
        if (!has_concept(m))
          throw kb_error("undeclared concept name '" + m + "' in exactly_one group '" + g.id + "'");
    }
  }

 private:
  std::map<std::string, int> index_;
  std::set<std::string> distinguished_;
  std::vector<std::string> distinguished_order_;
  std::map<std::string, std::vector<std::size_t>> wti_by_subject_;
};

inline KnowledgeBase make_kb(int n, PhiTable phi, std::vector<std::string> concepts,
                             std::vector<std::string> individuals, std::vector<Inclusion> tbox,
                             std::vector<Assertion> abox, std::vector<WTI> dbox,
                             std::set<std::string> crisp = {},
                             std::vector<ExactlyOneGroup> exactly_one = {}) {
  KnowledgeBase kb;
  kb.n = n;
  kb.phi = std::move(phi);
  kb.concepts = std::move(concepts);
  kb.individuals = std::move(individuals);
  kb.tbox = std::move(tbox);
  kb.abox = std::move(abox);
  kb.dbox = std::move(dbox);
  kb.crisp = std::move(crisp);
  kb.exactly_one = std::move(exactly_one);
  kb.finalize();
  return kb;
}

// Degrees of one domain element, indexed like kb.concepts.
using Assignment = std::vector<int>;

using DegreeMap = std::map<std::string, Degree>;

inline DegreeMap assignment_to_map(const KnowledgeBase& kb, const Assignment& a) {
  DegreeMap m;
  for (std::size_t i = 0; i < kb.concepts.size(); ++i) m[kb.concepts[i]] = Degree{a[i], kb.n};
  return m;
}

// Per-individual degree assignment over all declared names.
struct Valuation {
  std::map<std::string, Assignment> by_individual;
};

struct Verdict {
  bool entailed = false;
  std::optional<Degree> typical_degree;
  std::optional<DegreeMap> witness;
  bool kb_satisfiable = true;
  bool timed_out = false;
};

}  // namespace lcn
