#pragma once

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lcn/kb.hpp"

namespace lcn {

class parse_error : public kb_error {
 public:
  parse_error(int line, int col, const std::string& msg)
      : kb_error("line " + std::to_string(line) + ", col " + std::to_string(col) + ": " + msg),
        line_(line),
        col_(col) {}
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_, col_;
};

namespace kbio_detail {

// One argument term of a fact: a constant, a number, one of the interval-end
// tokens, or a nested function term over and/or/neg/impl.
struct Term {
  enum class Kind { Const, Int, Rat, Inf, NegInf, Func } kind = Kind::Const;
  std::string text;          // Const: identifier; Func: functor name
  BigInt int_value;          // Int
  Rational rat_value;        // Rat
  std::vector<Term> args;    // Func
};

struct FactLine {
  std::string predicate;
  std::vector<Term> args;
  int line = 0;
};

class LineParser {
 public:
  LineParser(const std::string& text, int line) : s_(text), line_(line) {}

  FactLine parse_fact() {
    FactLine fact;
    fact.line = line_;
    skip_ws();
    fact.predicate = read_ident();
    skip_ws();
    if (peek() == '(') {
      get();
      while (true) {
        fact.args.push_back(parse_term());
        skip_ws();
        char c = get();
        if (c == ')') break;
        if (c != ',') fail("expected ',' or ')'");
      }
    }
    skip_ws();
    if (get() != '.') fail("expected '.' at end of fact");
    skip_ws();
    if (pos_ < s_.size()) fail("trailing characters after fact");
    return fact;
  }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;
  int line_;

  [[noreturn]] void fail(const std::string& msg) {
    throw parse_error(line_, static_cast<int>(pos_) + 1, msg);
  }
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  char get() { return pos_ < s_.size() ? s_[pos_++] : '\0'; }
  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  std::string read_ident() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    if (pos_ == start) fail("expected identifier");
    return s_.substr(start, pos_ - start);
  }

  Term parse_term() {
    skip_ws();
    char c = peek();
    Term t;
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      if (c == '-') ++pos_;
      if (pos_ < s_.size() && !std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        pos_ = start;
        // may be -inf
        ++pos_;
        std::string id = read_ident();
        if (id == "inf") {
          t.kind = Term::Kind::NegInf;
          return t;
        }
        fail("expected number or -inf");
      }
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      std::string num = s_.substr(start, pos_ - start);
      if (peek() == '/') {
        ++pos_;
        std::size_t dstart = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (pos_ == dstart) fail("expected denominator after '/'");
        std::string den = s_.substr(dstart, pos_ - dstart);
        auto r = rat_from_string(num + "/" + den);
        if (!r) fail("malformed rational");
        t.kind = Term::Kind::Rat;
        t.rat_value = *r;
        return t;
      }
      t.kind = Term::Kind::Int;
      t.int_value = BigInt(num);
      return t;
    }
    std::string id = read_ident();
    if (id == "inf") {
      t.kind = Term::Kind::Inf;
      return t;
    }
    skip_ws();
    if (peek() == '(') {
      get();
      t.kind = Term::Kind::Func;
      t.text = id;
      while (true) {
        t.args.push_back(parse_term());
        skip_ws();
        char d = get();
        if (d == ')') break;
        if (d != ',') fail("expected ',' or ')'");
      }
      return t;
    }
    t.kind = Term::Kind::Const;
    t.text = id;
    return t;
  }
};

inline Concept term_to_concept(const Term& t, int line) {
  switch (t.kind) {
    case Term::Kind::Const:
      if (t.text == "top") return ConceptExpr::top();
      if (t.text == "bot") return ConceptExpr::bot();
      return ConceptExpr::make_name(t.text);
    case Term::Kind::Func: {
      auto need = [&](std::size_t k) {
        if (t.args.size() != k)
          throw parse_error(line, 1, t.text + "/" + std::to_string(t.args.size()) +
                                          ": wrong arity for concept term");
      };
      if (t.text == "and") {
        need(2);
        return ConceptExpr::make_and(term_to_concept(t.args[0], line),
                                     term_to_concept(t.args[1], line));
      }
      if (t.text == "or") {
        need(2);
        return ConceptExpr::make_or(term_to_concept(t.args[0], line),
                                    term_to_concept(t.args[1], line));
      }
      if (t.text == "neg") {
        need(1);
        return ConceptExpr::make_neg(term_to_concept(t.args[0], line));
      }
      if (t.text == "impl") {
        need(2);
        return ConceptExpr::make_impl(term_to_concept(t.args[0], line),
                                      term_to_concept(t.args[1], line));
      }
      throw parse_error(line, 1, "unknown concept functor '" + t.text + "'");
    }
    default: throw parse_error(line, 1, "expected a concept term");
  }
}

// alpha / LB / UB convention: a plain integer k stands for k/n, a rational
// literal stands for itself.
inline Rational scaled_value(const Term& t, int n, int line) {
  if (t.kind == Term::Kind::Int) return Rational(t.int_value, n);
  if (t.kind == Term::Kind::Rat) return t.rat_value;
  throw parse_error(line, 1, "expected a number");
}

inline Rational plain_value(const Term& t, int line) {
  if (t.kind == Term::Kind::Int) return Rational(t.int_value);
  if (t.kind == Term::Kind::Rat) return t.rat_value;
  throw parse_error(line, 1, "expected a number");
}

inline std::string const_text(const Term& t, int line, const char* what) {
  if (t.kind != Term::Kind::Const)
    throw parse_error(line, 1, std::string("expected a constant for ") + what);
  return t.text;
}

inline Cmp cmp_term(const Term& t, int line) {
  if (t.kind == Term::Kind::Const)
    if (auto c = cmp_from_token(t.text)) return *c;
  throw parse_error(line, 1, "expected one of geq/gt/leq/lt");
}

}  // namespace kbio_detail

struct ParsedKb {
  KnowledgeBase kb;
  std::optional<Query> query;
};

inline ParsedKb parse_kb(const std::string& text) {
  using namespace kbio_detail;
  std::vector<FactLine> facts;
  {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto cut = line.find('%');
      if (cut != std::string::npos) line.erase(cut);
      bool blank = std::all_of(line.begin(), line.end(),
                               [](unsigned char c) { return std::isspace(c); });
      if (blank) continue;
      facts.push_back(LineParser(line, lineno).parse_fact());
    }
  }

  static const std::vector<std::pair<std::string, std::size_t>> arities = {
      {"valphi", 3},     {"concept", 1},           {"ind", 1},
      {"concept_inclusion", 4}, {"assertion", 4},  {"wti", 3},
      {"query", 4},      {"crisp", 1},             {"exactly_one", 1},
      {"exactly_one_element", 2}};
  for (const FactLine& f : facts) {
    auto it = std::find_if(arities.begin(), arities.end(),
                           [&](const auto& a) { return a.first == f.predicate; });
    if (it == arities.end())
      throw parse_error(f.line, 1, "unknown predicate '" + f.predicate + "'");
    if (f.args.size() != it->second)
      throw parse_error(f.line, 1, f.predicate + ": expected " + std::to_string(it->second) +
                                       " arguments, got " + std::to_string(f.args.size()));
  }

  // phi table first: it fixes n, which scales every integer alpha/bound
  std::vector<std::tuple<int, std::optional<Rational>, std::optional<Rational>, int>> phi_rows;
  for (const FactLine& f : facts) {
    if (f.predicate != "valphi") continue;
    if (f.args[0].kind != Term::Kind::Int)
      throw parse_error(f.line, 1, "valphi: first argument must be an integer degree");
    int v = static_cast<int>(f.args[0].int_value);
    std::optional<Rational> lb, ub;
    if (f.args[1].kind != Term::Kind::NegInf) lb = Rational();  // filled after n known
    if (f.args[2].kind != Term::Kind::Inf) ub = Rational();
    phi_rows.push_back({v, lb, ub, f.line});
  }
  if (phi_rows.empty()) throw parse_error(1, 1, "no valphi table");
  int n = 0;
  for (auto& [v, lb, ub, line] : phi_rows) n = std::max(n, v);
  if (n < 1) throw parse_error(1, 1, "valphi table has no row with v >= 1");

  PhiTable phi;
  phi.n = n;
  {
    std::vector<PhiRow> rows;
    for (const FactLine& f : facts) {
      if (f.predicate != "valphi") continue;
      PhiRow row;
      row.v = static_cast<int>(f.args[0].int_value);
      if (f.args[1].kind != Term::Kind::NegInf) row.lb = scaled_value(f.args[1], n, f.line);
      if (f.args[2].kind != Term::Kind::Inf) row.ub = scaled_value(f.args[2], n, f.line);
      rows.push_back(row);
    }
    std::sort(rows.begin(), rows.end(), [](const PhiRow& a, const PhiRow& b) { return a.v < b.v; });
    phi.rows = std::move(rows);
  }

  std::vector<std::string> concepts;
  std::vector<std::string> individuals;
  std::vector<Inclusion> tbox;
  std::vector<Assertion> abox;
  std::vector<WTI> dbox;
  std::set<std::string> crisp;
  std::vector<ExactlyOneGroup> groups;
  std::optional<Query> query;

  for (const FactLine& f : facts) {
    if (f.predicate == "concept") {
      if (f.args[0].kind == Term::Kind::Const) {
        const std::string& name = f.args[0].text;
        if (name != "top" && name != "bot" &&
            std::find(concepts.begin(), concepts.end(), name) == concepts.end())
          concepts.push_back(name);
      } else {
        term_to_concept(f.args[0], f.line);  // syntax check; registration only
      }
    } else if (f.predicate == "ind") {
      std::string id = const_text(f.args[0], f.line, "individual");
      if (std::find(individuals.begin(), individuals.end(), id) == individuals.end())
        individuals.push_back(id);
    }
  }

  for (const FactLine& f : facts) {
    if (f.predicate == "concept_inclusion") {
      tbox.push_back({term_to_concept(f.args[0], f.line), term_to_concept(f.args[1], f.line),
                      cmp_term(f.args[2], f.line), scaled_value(f.args[3], n, f.line)});
    } else if (f.predicate == "assertion") {
      abox.push_back({term_to_concept(f.args[0], f.line),
                      const_text(f.args[1], f.line, "individual"), cmp_term(f.args[2], f.line),
                      scaled_value(f.args[3], n, f.line)});
    } else if (f.predicate == "wti") {
      if (f.args[0].kind != Term::Kind::Const)
        throw parse_error(f.line, 1,
                          "wti: distinguished concept must be a concept name, not a "
                          "composed concept");
      dbox.push_back({f.args[0].text, term_to_concept(f.args[1], f.line),
                      plain_value(f.args[2], f.line)});
    } else if (f.predicate == "query") {
      if (query) throw parse_error(f.line, 1, "duplicate query fact");
      query = Query{term_to_concept(f.args[0], f.line), term_to_concept(f.args[1], f.line),
                    cmp_term(f.args[2], f.line), scaled_value(f.args[3], n, f.line)};
    } else if (f.predicate == "crisp") {
      if (f.args[0].kind != Term::Kind::Const)
        throw parse_error(f.line, 1, "crisp: expected a concept name");
      crisp.insert(f.args[0].text);
    } else if (f.predicate == "exactly_one") {
      std::string id = const_text(f.args[0], f.line, "group id");
      if (std::none_of(groups.begin(), groups.end(),
                       [&](const ExactlyOneGroup& g) { return g.id == id; }))
        groups.push_back({id, {}});
    } else if (f.predicate == "exactly_one_element") {
      std::string id = const_text(f.args[0], f.line, "group id");
      std::string member = const_text(f.args[1], f.line, "group member");
      auto it = std::find_if(groups.begin(), groups.end(),
                             [&](const ExactlyOneGroup& g) { return g.id == id; });
      if (it == groups.end()) {
        groups.push_back({id, {member}});
      } else {
        it->members.push_back(member);
      }
    }
  }

  ParsedKb out;
  try {
    out.kb = make_kb(n, std::move(phi), std::move(concepts), std::move(individuals),
                     std::move(tbox), std::move(abox), std::move(dbox), std::move(crisp),
                     std::move(groups));
  } catch (const parse_error&) {
    throw;
  } catch (const kb_error& e) {
    throw parse_error(1, 1, e.what());
  }
  if (query) {
    std::set<std::string> names;
    collect_names(query->subject, names);
    collect_names(query->body, names);
    for (const auto& name : names)
      if (!out.kb.has_concept(name))
        throw parse_error(1, 1, "undeclared concept name '" + name + "' in query");
  }
  out.query = query;
  return out;
}

// Parses a standalone "query(C,D,theta,alpha)." fact against an existing KB
// (used for query overrides on the command line).
inline Query parse_query_fact(const std::string& text, const KnowledgeBase& kb) {
  using namespace kbio_detail;
  FactLine f = LineParser(text, 1).parse_fact();
  if (f.predicate != "query" || f.args.size() != 4)
    throw parse_error(1, 1, "expected a fact of the form query(C,D,theta,alpha).");
  Query q{term_to_concept(f.args[0], 1), term_to_concept(f.args[1], 1), cmp_term(f.args[2], 1),
          scaled_value(f.args[3], kb.n, 1)};
  std::set<std::string> names;
  collect_names(q.subject, names);
  collect_names(q.body, names);
  for (const auto& name : names)
    if (!kb.has_concept(name))
      throw parse_error(1, 1, "undeclared concept name '" + name + "' in query");
  return q;
}

namespace kbio_detail {

// Emit integer-over-n when exact, rational literal otherwise.
inline std::string scaled_to_string(const Rational& value, int n) {
  Rational scaled = value * n;
  if (is_integer(scaled)) return rat_to_string(scaled);
  return rat_to_string(value);
}

inline void collect_composites(const Concept& c, std::vector<std::string>& out,
                               std::set<std::string>& seen) {
  if (!c || c->kind == ConceptExpr::Kind::Name || c->kind == ConceptExpr::Kind::Top ||
      c->kind == ConceptExpr::Kind::Bot)
    return;
  collect_composites(c->lhs, out, seen);
  collect_composites(c->rhs, out, seen);
  std::string key = concept_to_string(c);
  if (seen.insert(key).second) out.push_back(key);
}

}  // namespace kbio_detail

// Canonical fact-file form; parse(serialize(kb)) reproduces the KB.
// `inf_token`/`neg_inf_token` let the encoding exporter swap in #sup/#inf.
inline std::string serialize_kb(const KnowledgeBase& kb, const std::optional<Query>& query,
                                const std::string& neg_inf_token = "-inf",
                                const std::string& inf_token = "inf") {
  using kbio_detail::collect_composites;
  using kbio_detail::scaled_to_string;
  std::ostringstream out;
  const int n = kb.n;
  for (const PhiRow& row : kb.phi.rows) {
    out << "valphi(" << row.v << ","
        << (row.lb ? scaled_to_string(*row.lb, n) : neg_inf_token) << ","
        << (row.ub ? scaled_to_string(*row.ub, n) : inf_token) << ").\n";
  }
  for (const std::string& name : kb.concepts) out << "concept(" << name << ").\n";
  {
    std::vector<std::string> composites;
    std::set<std::string> seen;
    for (const Inclusion& inc : kb.tbox)
      collect_composites(ConceptExpr::make_impl(inc.lhs, inc.rhs), composites, seen);
    for (const Assertion& as : kb.abox) collect_composites(as.concept_, composites, seen);
    for (const WTI& w : kb.dbox) collect_composites(w.body, composites, seen);
    if (query)
      collect_composites(ConceptExpr::make_impl(query->subject, query->body), composites, seen);
    for (const std::string& c : composites) out << "concept(" << c << ").\n";
  }
  for (const std::string& ind : kb.individuals) out << "ind(" << ind << ").\n";
  for (const std::string& c : kb.crisp) out << "crisp(" << c << ").\n";
  for (const ExactlyOneGroup& g : kb.exactly_one) {
    out << "exactly_one(" << g.id << ").\n";
    for (const std::string& m : g.members)
      out << "exactly_one_element(" << g.id << "," << m << ").\n";
  }
  for (const Inclusion& inc : kb.tbox)
    out << "concept_inclusion(" << concept_to_string(inc.lhs) << "," << concept_to_string(inc.rhs)
        << "," << cmp_token(inc.cmp) << "," << scaled_to_string(inc.alpha, n) << ").\n";
  for (const Assertion& as : kb.abox)
    out << "assertion(" << concept_to_string(as.concept_) << "," << as.individual << ","
        << cmp_token(as.cmp) << "," << scaled_to_string(as.alpha, n) << ").\n";
  for (const WTI& w : kb.dbox)
    out << "wti(" << w.subject << "," << concept_to_string(w.body) << ","
        << rat_to_string(w.weight) << ").\n";
  if (query)
    out << "query(" << concept_to_string(query->subject) << "," << concept_to_string(query->body)
        << "," << cmp_token(query->cmp) << "," << scaled_to_string(query->alpha, n) << ").\n";
  return out.str();
}

inline bool kb_equal(const KnowledgeBase& a, const KnowledgeBase& b) {
  auto opt_eq = [](const std::optional<Rational>& x, const std::optional<Rational>& y) {
    return x.has_value() == y.has_value() && (!x || *x == *y);
  };
  if (a.n != b.n || a.concepts != b.concepts || a.individuals != b.individuals) return false;
  if (a.phi.rows.size() != b.phi.rows.size()) return false;
  for (std::size_t i = 0; i < a.phi.rows.size(); ++i) {
    if (a.phi.rows[i].v != b.phi.rows[i].v) return false;
    if (!opt_eq(a.phi.rows[i].lb, b.phi.rows[i].lb)) return false;
    if (!opt_eq(a.phi.rows[i].ub, b.phi.rows[i].ub)) return false;
  }
  if (a.tbox.size() != b.tbox.size() || a.abox.size() != b.abox.size() ||
      a.dbox.size() != b.dbox.size())
    return false;
  for (std::size_t i = 0; i < a.tbox.size(); ++i) {
    const Inclusion &x = a.tbox[i], &y = b.tbox[i];
    if (!concept_equal(x.lhs, y.lhs) || !concept_equal(x.rhs, y.rhs) || x.cmp != y.cmp ||
        x.alpha != y.alpha)
      return false;
  }
  for (std::size_t i = 0; i < a.abox.size(); ++i) {
    const Assertion &x = a.abox[i], &y = b.abox[i];
    if (!concept_equal(x.concept_, y.concept_) || x.individual != y.individual ||
        x.cmp != y.cmp || x.alpha != y.alpha)
      return false;
  }
  for (std::size_t i = 0; i < a.dbox.size(); ++i) {
    const WTI &x = a.dbox[i], &y = b.dbox[i];
    if (x.subject != y.subject || !concept_equal(x.body, y.body) || x.weight != y.weight)
      return false;
  }
  if (a.crisp != b.crisp) return false;
  if (a.exactly_one.size() != b.exactly_one.size()) return false;
  for (std::size_t i = 0; i < a.exactly_one.size(); ++i)
    if (a.exactly_one[i].id != b.exactly_one[i].id ||
        a.exactly_one[i].members != b.exactly_one[i].members)
      return false;
  return true;
}

inline bool query_equal(const Query& a, const Query& b) {
  return concept_equal(a.subject, b.subject) && concept_equal(a.body, b.body) && a.cmp == b.cmp &&
         a.alpha == b.alpha;
}

}  // namespace lcn
