#pragma once

#include <string>
#include <vector>

#include "lcn/kb.hpp"

namespace lcn {

// Godel connectives with involutive negation over a shared denominator n.

inline Degree tnorm(const Degree& a, const Degree& b) { return a <= b ? a : b; }
inline Degree snorm(const Degree& a, const Degree& b) { return a <= b ? b : a; }
inline Degree negate(const Degree& a) { return Degree{a.den - a.num, a.den}; }
inline Degree implies(const Degree& a, const Degree& b) {
  return a <= b ? Degree{a.den, a.den} : b;
}

// Numerator-level variants used in the inner loops.
inline int impl_num(int a, int b, int n) { return a <= b ? n : b; }

inline int eval_concept(const KnowledgeBase& kb, const Assignment& elem, const Concept& c) {
  switch (c->kind) {
    case ConceptExpr::Kind::Name: return elem[kb.concept_id(c->name)];
    case ConceptExpr::Kind::Top: return kb.n;
    case ConceptExpr::Kind::Bot: return 0;
    case ConceptExpr::Kind::And:
      return std::min(eval_concept(kb, elem, c->lhs), eval_concept(kb, elem, c->rhs));
    case ConceptExpr::Kind::Or:
      return std::max(eval_concept(kb, elem, c->lhs), eval_concept(kb, elem, c->rhs));
    case ConceptExpr::Kind::Neg: return kb.n - eval_concept(kb, elem, c->lhs);
    case ConceptExpr::Kind::Impl:
      return impl_num(eval_concept(kb, elem, c->lhs), eval_concept(kb, elem, c->rhs), kb.n);
  }
  throw kb_error("eval_concept: bad expression node");
}

inline Degree eval_concept(const KnowledgeBase& kb, const Valuation& val, const std::string& x,
                           const Concept& c) {
  auto it = val.by_individual.find(x);
  if (it == val.by_individual.end()) throw kb_error("valuation has no individual " + x);
  return Degree{eval_concept(kb, it->second, c), kb.n};
}

// Sum of w * D(x) over all typicality inclusions with the given subject,
// with D(x) taken in [0,1]; the empty sum is 0.
inline Rational weight_of(const KnowledgeBase& kb, const Assignment& elem,
                          const std::string& subject) {
  Rational total = 0;
  for (std::size_t i : kb.wtis_for(subject)) {
    const WTI& w = kb.dbox[i];
    total += w.weight * Rational(eval_concept(kb, elem, w.body), kb.n);
  }
  return total;
}

inline Rational weight_of(const KnowledgeBase& kb, const Valuation& val, const std::string& x,
                          const std::string& subject) {
  auto it = val.by_individual.find(x);
  if (it == val.by_individual.end()) throw kb_error("valuation has no individual " + x);
  return weight_of(kb, it->second, subject);
}

// Structural side conditions on one element: coherence of every distinguished
// concept, crisp concepts at 0 or n, exactly one group member at degree n.
inline bool element_coherent(const KnowledgeBase& kb, const Assignment& elem,
                             std::vector<std::string>* diagnostics = nullptr) {
  bool ok = true;
  auto fail = [&](std::string msg) {
    ok = false;
    if (diagnostics) diagnostics->push_back(std::move(msg));
  };
  for (const std::string& c : kb.distinguished()) {
    int expected = kb.phi.apply(weight_of(kb, elem, c));
    int actual = elem[kb.concept_id(c)];
    if (actual != expected)
      fail("concept " + c + " has degree " + std::to_string(actual) + "/" +
           std::to_string(kb.n) + " but phi(weight) = " + std::to_string(expected) + "/" +
           std::to_string(kb.n));
    if (diagnostics == nullptr && !ok) return false;
  }
  for (const std::string& c : kb.crisp) {
    int v = elem[kb.concept_id(c)];
    if (v != 0 && v != kb.n) fail("crisp concept " + c + " has non-crisp degree");
    if (diagnostics == nullptr && !ok) return false;
  }
  for (const auto& g : kb.exactly_one) {
    int at_top = 0;
    for (const auto& m : g.members)
      if (elem[kb.concept_id(m)] == kb.n) ++at_top;
    if (at_top != 1)
      fail("exactly_one group " + g.id + " has " + std::to_string(at_top) +
           " members at degree 1");
    if (diagnostics == nullptr && !ok) return false;
  }
  return ok;
}

inline bool is_coherent(const KnowledgeBase& kb, const Valuation& val,
                        std::vector<std::string>* diagnostics = nullptr) {
  bool ok = true;
  for (const auto& [ind, elem] : val.by_individual) {
    std::vector<std::string> local;
    if (!element_coherent(kb, elem, diagnostics ? &local : nullptr)) {
      ok = false;
      if (diagnostics)
        for (auto& d : local) diagnostics->push_back("[" + ind + "] " + std::move(d));
      else
        return false;
    }
  }
  return ok;
}

// Single-element reading of C ⊑ D θ α: the implication value at this element
// compared against α. Universal axioms apply it to every element; existential
// ones need a dedicated witness element (handled by oracle/solver).
inline bool inclusion_holds_at(const KnowledgeBase& kb, const Assignment& elem,
                               const Inclusion& inc) {
  int v = impl_num(eval_concept(kb, elem, inc.lhs), eval_concept(kb, elem, inc.rhs), kb.n);
  return cmp_holds(Rational(v, kb.n), inc.cmp, inc.alpha);
}

inline bool assertion_holds_at(const KnowledgeBase& kb, const Assignment& elem,
                               const Assertion& as) {
  int v = eval_concept(kb, elem, as.concept_);
  return cmp_holds(Rational(v, kb.n), as.cmp, as.alpha);
}

// All universal (>=, >) TBox inclusions at one element.
inline bool universal_inclusions_hold(const KnowledgeBase& kb, const Assignment& elem) {
  for (const Inclusion& inc : kb.tbox)
    if (cmp_is_universal(inc.cmp) && !inclusion_holds_at(kb, elem, inc)) return false;
  return true;
}

inline bool axiom_satisfied(const KnowledgeBase& kb, const Valuation& val, const Inclusion& inc,
                            const std::string& x) {
  auto it = val.by_individual.find(x);
  if (it == val.by_individual.end()) throw kb_error("valuation has no individual " + x);
  return inclusion_holds_at(kb, it->second, inc);
}

inline bool axiom_satisfied(const KnowledgeBase& kb, const Valuation& val, const Assertion& as) {
  auto it = val.by_individual.find(as.individual);
  if (it == val.by_individual.end())
    throw kb_error("valuation has no individual " + as.individual);
  return assertion_holds_at(kb, it->second, as);
}

// Value of T(C_q) ⊑ D_q at one element, given the global maximum degree of
// C_q. Elements below the maximum have typicality degree 0 and satisfy the
// implication vacuously.
inline Degree query_impl_value(const KnowledgeBase& kb, const Assignment& elem,
                               const Degree& typical_degree, const Query& q) {
  int cq = eval_concept(kb, elem, q.subject);
  int t = (cq == typical_degree.num && cq > 0) ? cq : 0;
  return Degree{impl_num(t, eval_concept(kb, elem, q.body), kb.n), kb.n};
}

inline Degree query_impl_value(const KnowledgeBase& kb, const Valuation& val, const std::string& x,
                               const Degree& typical_degree, const Query& q) {
  auto it = val.by_individual.find(x);
  if (it == val.by_individual.end()) throw kb_error("valuation has no individual " + x);
  return query_impl_value(kb, it->second, typical_degree, q);
}

}  // namespace lcn
