#pragma once

#include <optional>
#include <sstream>
#include <string>

#include "lcn/kb.hpp"
#include "lcn/kbio.hpp"

namespace lcn {

enum class EncodingVariant { Base, Order, BaseWc, OrderWc };

inline std::optional<EncodingVariant> encoding_variant_from_string(const std::string& s) {
  if (s == "base") return EncodingVariant::Base;
  if (s == "order") return EncodingVariant::Order;
  if (s == "base-wc") return EncodingVariant::BaseWc;
  if (s == "order-wc") return EncodingVariant::OrderWc;
  return std::nullopt;
}

inline const char* encoding_variant_name(EncodingVariant v) {
  switch (v) {
    case EncodingVariant::Base: return "base";
    case EncodingVariant::Order: return "order";
    case EncodingVariant::BaseWc: return "base-wc";
    case EncodingVariant::OrderWc: return "order-wc";
  }
  return "?";
}

namespace encoding_detail {

inline const char* script_block() {
  return R"(#script (python)
import clingo

def is_named_concept(c):
    ok = (c.type == clingo.SymbolType.Function and len(c.arguments) == 0
          and c.name not in ("top", "bot"))
    return clingo.Number(1 if ok else 0)

def min(a, b):
    return a if a.number <= b.number else b

def max(a, b):
    return a if a.number >= b.number else b

def neg(v, n):
    return clingo.Number(n.number - v.number)

def impl(a, b, n):
    return n if a.number <= b.number else b
#end.
)";
}

inline const char* common_block() {
  return R"(val(0..n).   concept(bot).   eval(bot,X,0) :- ind(X).   concept(top).   eval(top,X,n) :- ind(X).

{eval(C,X,V) : val(V)} = 1 :- concept(C), ind(X), @is_named_concept(C) = 1, not crisp(C).
{eval(C,X,0); eval(C,X,n)} = 1 :- concept(C), ind(X), @is_named_concept(C) = 1, crisp(C).

eval(and(A,B),X,@min(V,V'))  :- concept(and(A,B)), eval(A,X,V), eval(B,X,V').
eval( or(A,B),X,@max(V,V'))  :- concept( or(A,B)), eval(A,X,V), eval(B,X,V').
eval(neg(A),X,@neg(V,n)) :- concept(neg(A)),   eval(A,X,V).
eval(impl(A,B),X,@impl(V,V',n)) :- concept(impl(A,B)), eval(A,X,V), eval(B,X,V').
:- concept(C), @is_named_concept(C) != 1, crisp(C); ind(X), not eval(C,X,0), not eval(C,X,n).

:- concept_inclusion(C,D,geq,A), eval(impl(C,D),X,V), V < A.
:- concept_inclusion(C,D,gt,A),  eval(impl(C,D),X,V), V <= A.
ind(ci(C,D,leq,A)) :- concept_inclusion(C,D,leq,A).
ind(ci(C,D,lt,A))  :- concept_inclusion(C,D,lt,A).
:- concept_inclusion(C,D,leq,A), eval(impl(C,D),ci(C,D,leq,A),V), V > A.
:- concept_inclusion(C,D,lt,A),  eval(impl(C,D),ci(C,D,lt,A),V), V >= A.
:- assertion(C,X,geq,A); eval(C,X,V), V < A.
:- assertion(C,X,gt,A);  eval(C,X,V), V <= A.
:- assertion(C,X,leq,A); eval(C,X,V), V > A.
:- assertion(C,X,lt,A);  eval(C,X,V), V >= A.

:- exactly_one(ID), ind(X), #count{C : exactly_one_element(ID,C), eval(C,X,n)} != 1.
)";
}

inline const char* base_preference_block() {
  return R"(:~ query(C,_,_,_), eval(C,X,V), V > 0. [-1@V+1]
)";
}

inline const char* order_block() {
  return R"(:~ query(C,_,_,_), eval_ge(C,X,V). [-1@2]

{eval_ge(C,X,V) : val(V), V > 0} :- concept(C), ind(X).
:- eval_ge(C,X,V), V > 1, not eval_ge(C,X,V-1).

:- concept(C), ind(X); eval(C,X,V), V > 0; not eval_ge(C,X,V).
:- concept(C), ind(X); eval(C,X,V); eval_ge(C,X,V+1).
:- concept(C), ind(X); eval_ge(C,X,V), not eval_ge(C,X,V+1); not eval(C,X,V).

:- concept(and(A,B)), ind(X), eval_ge(and(A,B),X,V); not eval_ge(A,X,V).
:- concept(and(A,B)), ind(X); eval_ge(and(A,B),X,V); not eval_ge(B,X,V).
:- concept(and(A,B)), ind(X); eval_ge(A,X,V), eval_ge(B,X,V); not eval_ge(and(A,B),X,V).

:- concept(or(A,B)), ind(X); eval_ge(or(A,B),X,V); not eval_ge(A,X,V), not eval_ge(B,X,V).
:- concept(or(A,B)), ind(X); eval_ge(A,X,V); not eval_ge(or(A,B),X,V).
:- concept(or(A,B)), ind(X); eval_ge(B,X,V); not eval_ge(or(A,B),X,V).

:- concept(neg(A)), ind(X); eval_ge(neg(A),X,V); eval_ge(A,X,n-V+1).
:- concept(neg(A)), ind(X), val(V), V > 0; not eval_ge(A,X,n-V+1); not eval_ge(neg(A),X,V).

l_gt_r(A,B,X) :- concept(impl(A,B)), ind(X); eval_ge(A,X,V); not eval_ge(B,X,V).
:- concept(impl(A,B)), ind(X); eval_ge(impl(A,B),X,V); l_gt_r(A,B,X); not eval_ge(B,X,V).
:- concept(impl(A,B)), ind(X), val(V), V > 0; not l_gt_r(A,B,X); not eval_ge(impl(A,B),X,V).
:- concept(impl(A,B)), ind(X); eval_ge(B,X,V); not eval_ge(impl(A,B),X,V).
)";
}

inline const char* query_block() {
  return R"(typical(C,X) :- query(C,_,_,_), eval(C,X,V), V = #max{V' : eval(C,X',V')}.
witness :- query(C,D,geq,A); typical(C,X), eval(impl(C,D),X,V), V < A.
witness :- query(C,D,gt,A);  typical(C,X), eval(impl(C,D),X,V), V <= A.
witness :- query(C,D,leq,A); typical(C,X), eval(impl(C,D),X,V), V <= A.
witness :- query(C,D,lt,A);  typical(C,X), eval(impl(C,D),X,V), V < A.
:~ witness. [-1@1]

#show witness : witness.
#show eval(C,X,V) : witness, eval(C,X,V), concept(C), @is_named_concept(C) = 1.
)";
}

inline const char* base_wc_block() {
  return R"(:- val(V), valphi(V,LB,UB); wti(C,_,_), ind(X); eval(C,X,V);
   not LB < #sum{W*VD, D,VD : wti(C,D,W), eval(D,X,VD)} <= UB.
:- val(V), valphi(V,LB,UB); wti(C,_,_), ind(X); not eval(C,X,V);
   LB < #sum{W*VD, D,VD : wti(C,D,W), eval(D,X,VD)} <= UB.
)";
}

inline const char* order_wc_block() {
  return R"(:- val(V), V > 0, valphi(V,LB,UB); wti(C,_,_), ind(X); eval_ge(C,X,V);
   not #sum{W, D,VD : wti(C,D,W), eval_ge(D,X,VD)} > LB.
:- val(V), V > 0, valphi(V,LB,UB); wti(C,_,_), ind(X); not eval_ge(C,X,V);
   #sum{W, D,VD : wti(C,D,W), eval_ge(D,X,VD)} > LB.
)";
}

}  // namespace encoding_detail

// The fixed rule block of a variant, parameterized by n; facts are appended
// separately by export_encoding.
inline std::string export_rules(EncodingVariant variant, int n) {
  using namespace encoding_detail;
  std::ostringstream out;
  out << "#const n = " << n << ".\n\n";
  out << script_block() << "\n";
  out << common_block() << "\n";
  if (variant == EncodingVariant::Base || variant == EncodingVariant::BaseWc)
    out << base_preference_block() << "\n";
  else
    out << order_block() << "\n";
  out << query_block();
  if (variant == EncodingVariant::BaseWc) out << "\n" << base_wc_block();
  if (variant == EncodingVariant::OrderWc) out << "\n" << order_wc_block();
  return out.str();
}

inline std::string export_encoding(const KnowledgeBase& kb, const std::optional<Query>& query,
                                   EncodingVariant variant) {
  std::ostringstream out;
  out << "% logic-program export, variant " << encoding_variant_name(variant) << ", n = " << kb.n
      << "\n";
  if (variant == EncodingVariant::Base || variant == EncodingVariant::Order)
    out << "% warning: this variant does not enforce coherence of distinguished\n"
           "% concepts; the consuming system must supply its own propagation\n";
  bool integral = true;
  for (const PhiRow& row : kb.phi.rows) {
    if (row.lb && !is_integer(*row.lb * kb.n)) integral = false;
    if (row.ub && !is_integer(*row.ub * kb.n)) integral = false;
  }
  for (const WTI& w : kb.dbox)
    if (!is_integer(w.weight)) integral = false;
  if (!integral)
    out << "% warning: non-integer weights or thresholds below; standard grounders\n"
           "% only support the integer fragment of this format\n";
  out << "\n" << export_rules(variant, kb.n) << "\n";
  out << serialize_kb(kb, query, "#inf", "#sup");
  return out.str();
}

// Minimal structural lint for exported programs: balanced parentheses and
// braces, statements terminated by '.' or ']'.
inline bool lint_program(const std::string& text, std::string* message = nullptr) {
  int paren = 0, brace = 0;
  bool in_script = false;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    if (message) *message = "line " + std::to_string(lineno) + ": " + msg;
    return false;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.rfind("#script", 0) == 0) in_script = true;
    if (line.rfind("#end", 0) == 0) {
      in_script = false;
      continue;
    }
    if (in_script) continue;
    for (char c : line) {
      if (c == '%') break;
      if (c == '(') ++paren;
      if (c == ')') --paren;
      if (c == '{') ++brace;
      if (c == '}') --brace;
      if (paren < 0) return fail("unbalanced ')'");
      if (brace < 0) return fail("unbalanced '}'");
    }
  }
  if (paren != 0) return fail("unbalanced '('");
  if (brace != 0) return fail("unbalanced '{'");
  return true;
}

}  // namespace lcn
