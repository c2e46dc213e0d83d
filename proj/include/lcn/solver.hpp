#pragma once

#include <atomic>
#include <chrono>
#include <future>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lcn/kb.hpp"
#include "lcn/semantics.hpp"

namespace lcn {

// Degree-numerator interval [lo, hi] satisfying v/n cmp alpha; may come back
// empty (lo > hi) when the comparison is unsatisfiable in the truth space.
inline std::pair<int, int> interval_for_cmp(int n, Cmp cmp, const Rational& alpha) {
  Rational an = alpha * n;
  auto to_int = [](const BigInt& b) {
    if (b < -1) return -1;
    if (b > 1'000'000) return 1'000'000;
    return static_cast<int>(b);
  };
  int lo = 0, hi = n;
  switch (cmp) {
    case Cmp::GE: lo = to_int(rat_ceil(an)); break;
    case Cmp::GT: lo = to_int(rat_floor(an)) + 1; break;
    case Cmp::LE: hi = to_int(rat_floor(an)); break;
    case Cmp::LT: hi = to_int(rat_ceil(an)) - 1; break;
  }
  return {std::max(lo, 0), std::min(hi, n)};
}

inline Cmp cmp_negation(Cmp cmp) {
  switch (cmp) {
    case Cmp::GE: return Cmp::LT;
    case Cmp::GT: return Cmp::LE;
    case Cmp::LE: return Cmp::GT;
    case Cmp::LT: return Cmp::GE;
  }
  return Cmp::GE;
}

// A probe goal: conjunction of degree intervals over concept expressions,
// required at a single element of the search space.
struct SearchGoal {
  std::vector<std::pair<Concept, std::pair<int, int>>> constraints;
};

inline SearchGoal goal_exists_with_degree(const Concept& subject, int target) {
  return SearchGoal{{{subject, {target, target}}}};
}

inline SearchGoal goal_satisfy(const KnowledgeBase& kb, const std::vector<Assertion>& asserts) {
  SearchGoal g;
  for (const Assertion& as : asserts)
    g.constraints.push_back({as.concept_, interval_for_cmp(kb.n, as.cmp, as.alpha)});
  return g;
}

// Witness probe for step (b): an element with C_q at the typical degree whose
// implication value falls in the deciding range (a counterexample for
// universal queries, a confirming element for existential ones).
inline SearchGoal goal_exists_witness(const KnowledgeBase& kb, const Query& q, int typical) {
  Cmp cmp = cmp_is_universal(q.cmp) ? cmp_negation(q.cmp) : q.cmp;
  auto [lo, hi] = interval_for_cmp(kb.n, cmp, q.alpha);
  SearchGoal g;
  g.constraints.push_back({q.subject, {typical, typical}});
  if (lo > hi) {
    g.constraints.push_back({q.body, {1, 0}});  // impossible
    return g;
  }
  // impl(typical, d) = n if d >= typical, d otherwise.
  int dlo, dhi;
  if (lo <= kb.n && kb.n <= hi) {
    dlo = std::min(lo, typical);
    dhi = kb.n;
  } else {
    dlo = lo;
    dhi = std::min(hi, typical - 1);
  }
  g.constraints.push_back({q.body, {dlo, dhi}});
  return g;
}

enum class SolveStatus { Sat, Unsat, Timeout, Cancelled };

struct SolveResult {
  SolveStatus status = SolveStatus::Unsat;
  std::optional<Assignment> model;
};

using Clock = std::chrono::steady_clock;

struct ProbeControl {
  std::optional<Clock::time_point> deadline;
  // Set by the probe coordinator; a probe for degree v gives up once a
  // probe for a higher degree has already succeeded.
  const std::atomic<int>* best_success = nullptr;
  int probe_degree = -1;

  bool should_stop() const {
    if (deadline && Clock::now() > *deadline) return true;
    if (best_success && probe_degree >= 0 && best_success->load() > probe_degree) return true;
    return false;
  }
  SolveStatus stop_status() const {
    if (deadline && Clock::now() > *deadline) return SolveStatus::Timeout;
    return SolveStatus::Cancelled;
  }
};

// Per-node degree bounds over the expression DAG (order-encoding view: the
// pair (lb, ub) stands for the literals "degree >= lb" and "degree <= ub").
struct DomainState {
  std::vector<std::pair<int, int>> bounds;
};

// Branch-and-propagate search for one domain element. The DAG covers every
// named concept, all universal TBox inclusions, WTI bodies and goal
// expressions; propagation interleaves Godel bound rules, axiom pruning,
// phi-coherence weight intervals, crisp and exactly-one rules.
class ElementSearch {
 public:
  ElementSearch(const KnowledgeBase& kb, const SearchGoal& goal) : kb_(kb), n_(kb.n) {
    for (const std::string& name : kb.concepts) {
      int id = add_leaf(name);
      var_nodes_.push_back(id);
    }
    for (const Inclusion& inc : kb.tbox) {
      if (!cmp_is_universal(inc.cmp)) continue;
      int node = add_expr(ConceptExpr::make_impl(inc.lhs, inc.rhs));
      constraints_.push_back({node, interval_for_cmp(n_, inc.cmp, inc.alpha)});
    }
    for (const std::string& subject : kb.distinguished()) {
      PhiGroup grp;
      grp.subject_node = node_of_name(subject);
      for (std::size_t i : kb.wtis_for(subject))
        grp.terms.push_back({kb.dbox[i].weight, add_expr(kb.dbox[i].body)});
      init_fast_group(grp);
      phi_groups_.push_back(std::move(grp));
    }
    for (const auto& [expr, iv] : goal.constraints) constraints_.push_back({add_expr(expr), iv});
    for (const std::string& name : kb.crisp) crisp_nodes_.push_back(node_of_name(name));
    for (const auto& g : kb.exactly_one) {
      std::vector<int> members;
      for (const auto& m : g.members) members.push_back(node_of_name(m));
      groups_.push_back(std::move(members));
    }
  }

  DomainState root_state() const {
    DomainState s;
    s.bounds.assign(nodes_.size(), {0, n_});
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].kind == ConceptExpr::Kind::Top) s.bounds[i] = {n_, n_};
      if (nodes_[i].kind == ConceptExpr::Kind::Bot) s.bounds[i] = {0, 0};
    }
    return s;
  }

  std::pair<int, int> bounds_of(const DomainState& s, const std::string& name) const {
    return s.bounds[node_of_name_checked(name)];
  }

  // Runs pruning to fixpoint; false means conflict.
  bool propagate(DomainState& s) const {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (!tighten(s, static_cast<int>(i), upward_bounds(s, static_cast<int>(i)), changed))
          return false;
      for (const auto& [node, iv] : constraints_)
        if (!tighten(s, node, iv, changed)) return false;
      for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i)
        if (!push_down(s, i, changed)) return false;
      for (int v : crisp_nodes_) {
        auto& [lb, ub] = s.bounds[v];
        if (lb > 0 && lb < n_) {
          if (ub < n_) return false;
          lb = n_;
          changed = true;
        }
        if (ub < n_ && ub > 0) {
          if (lb > 0) return false;
          ub = 0;
          changed = true;
        }
      }
      for (const auto& members : groups_)
        if (!prune_group(s, members, changed)) return false;
      for (const auto& grp : phi_groups_)
        if (!prune_phi(s, grp, changed)) return false;
    }
    return true;
  }

  SolveResult solve(const ProbeControl& ctl = {}) const {
    DomainState s = root_state();
    if (!propagate(s)) return {SolveStatus::Unsat, std::nullopt};
    return dfs(s, ctl);
  }

 private:
  struct Node {
    ConceptExpr::Kind kind;
    int l = -1, r = -1;
    std::string name;  // leaves
  };
  struct PhiGroup {
    int subject_node = -1;
    std::vector<std::pair<Rational, int>> terms;  // (weight, body node)
    // Fast path: weights and phi boundaries rescaled to a shared integer
    // grid so the inner pruning loop avoids rational arithmetic.
    bool fast = false;
    std::vector<std::pair<long long, int>> units;     // (weight * scale / n, body node)
    std::vector<std::pair<long long, long long>> cuts;  // scaled (lb, ub] per degree
  };

  const KnowledgeBase& kb_;
  int n_;
  std::vector<Node> nodes_;  // topological: children precede parents
  std::map<std::string, int> node_key_;
  std::vector<int> var_nodes_;  // one per declared name, kb.concepts order
  std::vector<std::pair<int, std::pair<int, int>>> constraints_;
  std::vector<PhiGroup> phi_groups_;
  std::vector<int> crisp_nodes_;
  std::vector<std::vector<int>> groups_;

  int add_leaf(const std::string& name) {
    auto it = node_key_.find(name);
    if (it != node_key_.end()) return it->second;
    nodes_.push_back({ConceptExpr::Kind::Name, -1, -1, name});
    int id = static_cast<int>(nodes_.size()) - 1;
    node_key_[name] = id;
    return id;
  }

  int add_expr(const Concept& c) {
    std::string key = concept_to_string(c);
    auto it = node_key_.find(key);
    if (it != node_key_.end()) return it->second;
    Node node;
    node.kind = c->kind;
    if (c->lhs) node.l = add_expr(c->lhs);
    if (c->rhs) node.r = add_expr(c->rhs);
    if (c->kind == ConceptExpr::Kind::Name) return add_leaf(c->name);
    nodes_.push_back(node);
    int id = static_cast<int>(nodes_.size()) - 1;
    node_key_[key] = id;
    return id;
  }

  int node_of_name(const std::string& name) { return add_leaf(name); }
  int node_of_name_checked(const std::string& name) const {
    auto it = node_key_.find(name);
    if (it == node_key_.end()) throw kb_error("solver: unknown concept " + name);
    return it->second;
  }

  static bool tighten(DomainState& s, int node, std::pair<int, int> iv, bool& changed) {
    auto& [lb, ub] = s.bounds[node];
    if (iv.first > lb) {
      lb = iv.first;
      changed = true;
    }
    if (iv.second < ub) {
      ub = iv.second;
      changed = true;
    }
    return lb <= ub;
  }

  std::pair<int, int> upward_bounds(const DomainState& s, int i) const {
    const Node& node = nodes_[i];
    switch (node.kind) {
      case ConceptExpr::Kind::Name: return s.bounds[i];
      case ConceptExpr::Kind::Top: return {n_, n_};
      case ConceptExpr::Kind::Bot: return {0, 0};
      case ConceptExpr::Kind::And: {
        auto [la, ua] = s.bounds[node.l];
        auto [lb, ub] = s.bounds[node.r];
        return {std::min(la, lb), std::min(ua, ub)};
      }
      case ConceptExpr::Kind::Or: {
        auto [la, ua] = s.bounds[node.l];
        auto [lb, ub] = s.bounds[node.r];
        return {std::max(la, lb), std::max(ua, ub)};
      }
      case ConceptExpr::Kind::Neg: {
        auto [la, ua] = s.bounds[node.l];
        return {n_ - ua, n_ - la};
      }
      case ConceptExpr::Kind::Impl: {
        auto [la, ua] = s.bounds[node.l];
        auto [lb, ub] = s.bounds[node.r];
        if (ua <= lb) return {n_, n_};
        if (la > ub) return {lb, ub};
        return {lb, n_};
      }
    }
    return {0, n_};
  }

  bool push_down(DomainState& s, int i, bool& changed) const {
    const Node& node = nodes_[i];
    auto [lo, hi] = s.bounds[i];
    switch (node.kind) {
      case ConceptExpr::Kind::Name:
      case ConceptExpr::Kind::Top:
      case ConceptExpr::Kind::Bot: return true;
      case ConceptExpr::Kind::And: {
        if (!tighten(s, node.l, {lo, n_}, changed)) return false;
        if (!tighten(s, node.r, {lo, n_}, changed)) return false;
        if (s.bounds[node.l].first > hi && !tighten(s, node.r, {0, hi}, changed)) return false;
        if (s.bounds[node.r].first > hi && !tighten(s, node.l, {0, hi}, changed)) return false;
        return true;
      }
      case ConceptExpr::Kind::Or: {
        if (!tighten(s, node.l, {0, hi}, changed)) return false;
        if (!tighten(s, node.r, {0, hi}, changed)) return false;
        if (s.bounds[node.l].second < lo && !tighten(s, node.r, {lo, n_}, changed)) return false;
        if (s.bounds[node.r].second < lo && !tighten(s, node.l, {lo, n_}, changed)) return false;
        return true;
      }
      case ConceptExpr::Kind::Neg:
        return tighten(s, node.l, {n_ - hi, n_ - lo}, changed);
      case ConceptExpr::Kind::Impl: {
        if (lo > 0) {
          // value >= lo means lhs <= rhs or rhs >= lo
          int need = std::min(s.bounds[node.l].first, lo);
          if (!tighten(s, node.r, {need, n_}, changed)) return false;
          if (s.bounds[node.r].second < lo &&
              !tighten(s, node.l, {0, s.bounds[node.r].second}, changed))
            return false;
        }
        if (hi < n_) {
          // value <= hi < n means lhs > rhs and value = rhs
          if (!tighten(s, node.r, {lo, hi}, changed)) return false;
          if (!tighten(s, node.l, {s.bounds[node.r].first + 1, n_}, changed)) return false;
        }
        return true;
      }
    }
    return true;
  }

  bool prune_group(DomainState& s, const std::vector<int>& members, bool& changed) const {
    int fixed_top = 0, can_top = 0, last_candidate = -1;
    for (int m : members) {
      auto [lb, ub] = s.bounds[m];
      if (lb == n_) ++fixed_top;
      if (ub == n_) {
        ++can_top;
        last_candidate = m;
      }
    }
    if (fixed_top > 1 || can_top == 0) return false;
    if (fixed_top == 1) {
      for (int m : members) {
        auto [lb, ub] = s.bounds[m];
        if (lb == n_) continue;
        if (ub == n_ && !tighten(s, m, {0, n_ - 1}, changed)) return false;
      }
      return true;
    }
    if (can_top == 1) return tighten(s, last_candidate, {n_, n_}, changed);
    return true;
  }

  void init_fast_group(PhiGroup& grp) const {
    namespace mp = boost::multiprecision;
    BigInt scale = 1;
    for (const auto& [w, node] : grp.terms)
      scale = mp::lcm(scale, BigInt(mp::denominator(Rational(w / n_))));
    for (const PhiRow& row : kb_.phi.rows) {
      if (row.lb) scale = mp::lcm(scale, BigInt(mp::denominator(*row.lb)));
      if (row.ub) scale = mp::lcm(scale, BigInt(mp::denominator(*row.ub)));
    }
    const BigInt limit = BigInt(1) << 40;
    bool ok = true;
    auto to_ll = [&](const Rational& r) -> long long {
      Rational scaled(r * scale);
      BigInt num(mp::numerator(scaled));
      if (mp::denominator(scaled) != 1 || num > limit || num < -limit) {
        ok = false;
        return 0;
      }
      return static_cast<long long>(num);
    };
    std::vector<std::pair<long long, int>> units;
    long long magnitude = 0;
    for (const auto& [w, node] : grp.terms) {
      long long u = to_ll(Rational(w / n_));
      units.push_back({u, node});
      magnitude += (u < 0 ? -u : u) * n_;
      if (magnitude > (1LL << 60)) ok = false;
      if (!ok) return;
    }
    std::vector<std::pair<long long, long long>> cuts;
    for (const PhiRow& row : kb_.phi.rows) {
      long long lo = row.lb ? to_ll(*row.lb) : std::numeric_limits<long long>::min();
      long long hi = row.ub ? to_ll(*row.ub) : std::numeric_limits<long long>::max();
      cuts.push_back({lo, hi});
    }
    if (!ok) return;
    grp.fast = true;
    grp.units = std::move(units);
    grp.cuts = std::move(cuts);
  }

  int fast_apply(const PhiGroup& grp, long long w) const {
    for (int v = 0; v <= n_; ++v)
      if (grp.cuts[v].first < w && w <= grp.cuts[v].second) return v;
    throw kb_error("phi table: no row matches scaled weight");
  }

  bool prune_phi(DomainState& s, const PhiGroup& grp, bool& changed) const {
    if (grp.fast) {
      long long wlo = 0, whi = 0;
      for (const auto& [u, node] : grp.units) {
        auto [lb, ub] = s.bounds[node];
        if (u > 0) {
          wlo += u * lb;
          whi += u * ub;
        } else {
          wlo += u * ub;
          whi += u * lb;
        }
      }
      return tighten(s, grp.subject_node, {fast_apply(grp, wlo), fast_apply(grp, whi)}, changed);
    }
    Rational wlo = 0, whi = 0;
    for (const auto& [w, node] : grp.terms) {
      auto [lb, ub] = s.bounds[node];
      if (w > 0) {
        wlo += w * Rational(lb, n_);
        whi += w * Rational(ub, n_);
      } else {
        wlo += w * Rational(ub, n_);
        whi += w * Rational(lb, n_);
      }
    }
    int vlo = kb_.phi.apply(wlo);
    int vhi = kb_.phi.apply(whi);
    return tighten(s, grp.subject_node, {vlo, vhi}, changed);
  }

  // Effective branching width; crisp variables only take their endpoints.
  int domain_size(const DomainState& s, std::size_t var_idx) const {
    int node = var_nodes_[var_idx];
    auto [lb, ub] = s.bounds[node];
    if (kb_.crisp.count(kb_.concepts[var_idx])) return (lb == 0 ? 1 : 0) + (ub == n_ ? 1 : 0);
    return ub - lb + 1;
  }

  SolveResult dfs(DomainState& s, const ProbeControl& ctl) const {
    if (ctl.should_stop()) return {ctl.stop_status(), std::nullopt};
    int best_var = -1, best_size = 0;
    for (std::size_t i = 0; i < var_nodes_.size(); ++i) {
      auto [lb, ub] = s.bounds[var_nodes_[i]];
      if (lb == ub) continue;
      int size = domain_size(s, i);
      if (best_var < 0 || size < best_size) {
        best_var = static_cast<int>(i);
        best_size = size;
      }
    }
    if (best_var < 0) return verify_leaf(s);
    int node = var_nodes_[best_var];
    auto [lb, ub] = s.bounds[node];
    bool crisp = kb_.crisp.count(kb_.concepts[best_var]) != 0;
    for (int v = lb; v <= ub; ++v) {
      if (crisp && v != 0 && v != n_) continue;
      DomainState child = s;
      child.bounds[node] = {v, v};
      if (!propagate(child)) continue;
      SolveResult sub = dfs(child, ctl);
      if (sub.status != SolveStatus::Unsat) return sub;
    }
    return {SolveStatus::Unsat, std::nullopt};
  }

  // All variables fixed: re-check against the reference semantics before
  // reporting a model.
  SolveResult verify_leaf(const DomainState& s) const {
    Assignment elem(var_nodes_.size());
    for (std::size_t i = 0; i < var_nodes_.size(); ++i) elem[i] = s.bounds[var_nodes_[i]].first;
    if (!universal_inclusions_hold(kb_, elem)) return {SolveStatus::Unsat, std::nullopt};
    if (!element_coherent(kb_, elem)) return {SolveStatus::Unsat, std::nullopt};
    for (const auto& [node, iv] : constraints_) {
      int v = s.bounds[node].first;
      if (v < iv.first || v > iv.second) return {SolveStatus::Unsat, std::nullopt};
    }
    return {SolveStatus::Sat, elem};
  }
};

enum class ProbeMode { Descending, Ascending, Parallel };

struct SolverOptions {
  std::chrono::milliseconds timeout{0};  // 0 = none
  ProbeMode mode = ProbeMode::Descending;
};

inline std::optional<Clock::time_point> make_deadline(const SolverOptions& opts) {
  if (opts.timeout.count() <= 0) return std::nullopt;
  return Clock::now() + opts.timeout;
}

inline SolveResult solve_goal(const KnowledgeBase& kb, const SearchGoal& goal,
                              const SolverOptions& opts = {}) {
  ElementSearch search(kb, goal);
  ProbeControl ctl;
  ctl.deadline = make_deadline(opts);
  return search.solve(ctl);
}

struct MaxDegreeResult {
  int degree = 0;  // highest successful probe (lower bound on timeout)
  bool timed_out = false;
};

// Step (a): highest v such that some achievable element has subject at v/n.
inline MaxDegreeResult max_typical_degree(const KnowledgeBase& kb, const Concept& subject,
                                          const SolverOptions& opts = {}) {
  auto deadline = make_deadline(opts);
  MaxDegreeResult result;
  if (opts.mode == ProbeMode::Parallel) {
    std::atomic<int> best{0};
    std::atomic<bool> timeout{false};
    std::vector<std::future<void>> probes;
    for (int v = 1; v <= kb.n; ++v) {
      probes.push_back(std::async(std::launch::async, [&, v]() {
        ElementSearch search(kb, goal_exists_with_degree(subject, v));
        ProbeControl ctl{deadline, &best, v};
        SolveResult r = search.solve(ctl);
        if (r.status == SolveStatus::Sat) {
          int cur = best.load();
          while (cur < v && !best.compare_exchange_weak(cur, v)) {
          }
        } else if (r.status == SolveStatus::Timeout) {
          timeout.store(true);
        }
      }));
    }
    for (auto& p : probes) p.get();
    result.degree = best.load();
    result.timed_out = timeout.load() && result.degree < kb.n;
    return result;
  }
  if (opts.mode == ProbeMode::Descending) {
    for (int v = kb.n; v >= 1; --v) {
      ElementSearch search(kb, goal_exists_with_degree(subject, v));
      SolveResult r = search.solve(ProbeControl{deadline, nullptr, -1});
      if (r.status == SolveStatus::Sat) {
        result.degree = v;
        return result;
      }
      if (r.status == SolveStatus::Timeout) {
        result.timed_out = true;
        return result;
      }
    }
    return result;
  }
  for (int v = 1; v <= kb.n; ++v) {
    ElementSearch search(kb, goal_exists_with_degree(subject, v));
    SolveResult r = search.solve(ProbeControl{deadline, nullptr, -1});
    if (r.status == SolveStatus::Sat) result.degree = v;
    if (r.status == SolveStatus::Timeout) {
      result.timed_out = true;
      return result;
    }
  }
  return result;
}

// Satisfiability through independent probes: one per individual (its
// assertion set) and one per existential inclusion (its witness element).
inline std::optional<bool> solver_satisfiable(const KnowledgeBase& kb,
                                              const SolverOptions& opts = {}) {
  for (const std::string& ind : kb.individuals) {
    std::vector<Assertion> asserts;
    for (const Assertion& as : kb.abox)
      if (as.individual == ind) asserts.push_back(as);
    SolveResult r = solve_goal(kb, goal_satisfy(kb, asserts), opts);
    if (r.status == SolveStatus::Timeout) return std::nullopt;
    if (r.status != SolveStatus::Sat) return false;
  }
  for (const Inclusion& inc : kb.tbox) {
    if (cmp_is_universal(inc.cmp)) continue;
    SearchGoal g;
    g.constraints.push_back({ConceptExpr::make_impl(inc.lhs, inc.rhs),
                             interval_for_cmp(kb.n, inc.cmp, inc.alpha)});
    SolveResult r = solve_goal(kb, g, opts);
    if (r.status == SolveStatus::Timeout) return std::nullopt;
    if (r.status != SolveStatus::Sat) return false;
  }
  return true;
}

inline Verdict entails(const KnowledgeBase& kb, const Query& q, const SolverOptions& opts = {}) {
  Verdict verdict;
  std::optional<bool> sat = solver_satisfiable(kb, opts);
  if (!sat) {
    verdict.timed_out = true;
    return verdict;
  }
  if (!*sat) {
    verdict.entailed = true;
    verdict.kb_satisfiable = false;
    return verdict;
  }
  MaxDegreeResult md = max_typical_degree(kb, q.subject, opts);
  if (md.timed_out) {
    verdict.timed_out = true;
    if (md.degree > 0) verdict.typical_degree = Degree{md.degree, kb.n};
    return verdict;
  }
  verdict.typical_degree = Degree{md.degree, kb.n};
  if (md.degree == 0) {
    verdict.entailed = cmp_is_universal(q.cmp) || cmp_holds(1, q.cmp, q.alpha);
    return verdict;
  }
  SolveResult w = solve_goal(kb, goal_exists_witness(kb, q, md.degree), opts);
  if (w.status == SolveStatus::Timeout) {
    verdict.timed_out = true;
    return verdict;
  }
  bool found = w.status == SolveStatus::Sat;
  verdict.entailed = cmp_is_universal(q.cmp) ? !found : found;
  if (found) verdict.witness = assignment_to_map(kb, *w.model);
  return verdict;
}

}  // namespace lcn
