#pragma once

#include <cstdint>
#include <vector>

#include "lcn/kb.hpp"
#include "lcn/semantics.hpp"

namespace lcn {

class oracle_budget_error : public kb_error {
 public:
  explicit oracle_budget_error(const std::string& what) : kb_error(what) {}
};

constexpr std::uint64_t kDefaultOracleBudget = 10'000'000;

// The set of single-element assignments satisfying all universal TBox
// inclusions, crisp and exactly-one constraints, and phi-coherence. In the
// role-free logic this is the element space of the canonical model.
struct AchievableSet {
  std::vector<Assignment> elements;
};

inline AchievableSet enumerate_achievable(const KnowledgeBase& kb,
                                          std::uint64_t budget = kDefaultOracleBudget) {
  const std::size_t m = kb.num_concepts();
  std::uint64_t space = 1;
  for (std::size_t i = 0; i < m; ++i) {
    space *= static_cast<std::uint64_t>(kb.n + 1);
    if (space > budget)
      throw oracle_budget_error("too large for oracle: (n+1)^|names| exceeds budget");
  }
  AchievableSet out;
  Assignment elem(m, 0);
  for (std::uint64_t code = 0; code < space; ++code) {
    std::uint64_t rest = code;
    for (std::size_t i = 0; i < m; ++i) {
      elem[i] = static_cast<int>(rest % (kb.n + 1));
      rest /= kb.n + 1;
    }
    if (!universal_inclusions_hold(kb, elem)) continue;
    if (!element_coherent(kb, elem)) continue;
    out.elements.push_back(elem);
  }
  return out;
}

namespace detail {

inline bool individual_realizable(const KnowledgeBase& kb, const AchievableSet& vs,
                                  const std::string& ind) {
  for (const Assignment& elem : vs.elements) {
    bool ok = true;
    for (const Assertion& as : kb.abox)
      if (as.individual == ind && !assertion_holds_at(kb, elem, as)) {
        ok = false;
        break;
      }
    if (ok) return true;
  }
  return false;
}

}  // namespace detail

inline bool oracle_satisfiable(const KnowledgeBase& kb, const AchievableSet& vs) {
  if (vs.elements.empty()) return false;
  for (const std::string& ind : kb.individuals)
    if (!detail::individual_realizable(kb, vs, ind)) return false;
  for (const Inclusion& inc : kb.tbox) {
    if (cmp_is_universal(inc.cmp)) continue;
    bool witnessed = false;
    for (const Assignment& elem : vs.elements)
      if (inclusion_holds_at(kb, elem, inc)) {
        witnessed = true;
        break;
      }
    if (!witnessed) return false;
  }
  return true;
}

inline bool oracle_satisfiable(const KnowledgeBase& kb,
                               std::uint64_t budget = kDefaultOracleBudget) {
  return oracle_satisfiable(kb, enumerate_achievable(kb, budget));
}

inline Verdict oracle_entails(const KnowledgeBase& kb, const Query& q,
                              std::uint64_t budget = kDefaultOracleBudget) {
  AchievableSet vs = enumerate_achievable(kb, budget);
  Verdict verdict;
  if (!oracle_satisfiable(kb, vs)) {
    verdict.entailed = true;  // vacuous: no canonical model exists
    verdict.kb_satisfiable = false;
    return verdict;
  }
  int vmax = 0;
  for (const Assignment& elem : vs.elements)
    vmax = std::max(vmax, eval_concept(kb, elem, q.subject));
  verdict.typical_degree = Degree{vmax, kb.n};
  if (vmax == 0) {
    // No typical elements: the implication is 1 everywhere.
    verdict.entailed = cmp_is_universal(q.cmp) || cmp_holds(1, q.cmp, q.alpha);
    return verdict;
  }
  const Degree typical{vmax, kb.n};
  if (cmp_is_universal(q.cmp)) {
    verdict.entailed = true;
    for (const Assignment& elem : vs.elements) {
      if (eval_concept(kb, elem, q.subject) != vmax) continue;
      Degree val = query_impl_value(kb, elem, typical, q);
      if (!cmp_holds(val.value(), q.cmp, q.alpha)) {
        verdict.entailed = false;
        verdict.witness = assignment_to_map(kb, elem);
        break;
      }
    }
  } else {
    verdict.entailed = false;
    for (const Assignment& elem : vs.elements) {
      if (eval_concept(kb, elem, q.subject) != vmax) continue;
      Degree val = query_impl_value(kb, elem, typical, q);
      if (cmp_holds(val.value(), q.cmp, q.alpha)) {
        verdict.entailed = true;
        verdict.witness = assignment_to_map(kb, elem);
        break;
      }
    }
  }
  return verdict;
}

}  // namespace lcn
