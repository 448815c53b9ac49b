#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "seudep/engine.hpp"
#include "seudep/error.hpp"
#include "seudep/mrm.hpp"

namespace seudep::csl {

// ---------------------------------------------------------------------
// AST

enum class Cmp { Lt, Le, Ge, Gt, Eq };

inline const char* to_string(Cmp c) {
  switch (c) {
    case Cmp::Lt: return "<";
    case Cmp::Le: return "<=";
    case Cmp::Ge: return ">=";
    case Cmp::Gt: return ">";
    case Cmp::Eq: return "=";
  }
  return "?";
}

/// Boolean formula over class labels and counter atoms (`mul<2`).
struct StateExpr {
  enum class Kind { True, False, Label, Counter, Not, And, Or } kind = Kind::True;
  std::string name;        // label or op class
  Cmp cmp = Cmp::Eq;       // counter atoms
  int value = 0;           // counter atoms
  std::vector<StateExpr> kids;
};

struct PathExpr {
  enum class Kind { Next, Until, BoundedUntil, Globally, Finally } kind = Kind::Next;
  double bound = 0.0;  // time bound for the bounded forms
  StateExpr lhs;       // Until family; unused for Next/G/F
  StateExpr sub;       // Next target, Until rhs, G/F body
};

struct Property;
using PropertyPtr = std::unique_ptr<Property>;

enum class FilterOp { Forall, Exists, Min, Max };

struct Property {
  enum class Kind { Steady, Prob, Reward, Filter } kind = Kind::Steady;

  bool is_query = true;  // =? if true, otherwise bound below
  Cmp bound_cmp = Cmp::Ge;
  double bound_value = 0.0;

  StateExpr state;          // Steady
  PathExpr path;            // Prob
  std::string reward_name;  // Reward
  enum class RewardBody { Cumulative, Steady, Reach } reward_body = RewardBody::Steady;
  double reward_bound = 0.0;  // C<=t horizon
  StateExpr reward_target;    // F target

  FilterOp filter_op = FilterOp::Forall;  // Filter
  PropertyPtr inner;
};

// ---------------------------------------------------------------------
// Parser: recursive descent over a tiny token stream.
//
// property  := 'filter' '(' op ',' property ')' | query
// query     := ('S'|'P'|'R' '{' string '}') ('=?' | cmp number) '[' body ']'
// path      := 'X' state | state 'U' ['<=' num] state
//            | ('G'|'F') ('<=' num | '[' num ',' num ']') state
// state     := or; or := and ('|' and)*; and := not ('&' not)*
// not       := '!' not | atom
// atom      := 'true' | 'false' | quoted-label | ident cmp int | '(' or ')'

namespace detail {

struct Lexer {
  std::string text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool eof() {
    skip_ws();
    return pos >= text.size();
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw error("property:" + std::to_string(pos + 1) + ": " + msg);
  }
  bool accept(const std::string& tok) {
    skip_ws();
    if (text.compare(pos, tok.size(), tok) == 0) {
      // Keywords must not run into an identifier tail.
      if (std::isalpha(static_cast<unsigned char>(tok[0]))) {
        std::size_t end = pos + tok.size();
        if (end < text.size() &&
            (std::isalnum(static_cast<unsigned char>(text[end])) || text[end] == '_'))
          return false;
      }
      pos += tok.size();
      return true;
    }
    return false;
  }
  void expect(const std::string& tok) {
    if (!accept(tok)) fail("expected '" + tok + "'");
  }
  std::string quoted() {
    skip_ws();
    if (pos >= text.size() || text[pos] != '"') fail("expected a quoted label");
    std::size_t end = text.find('"', pos + 1);
    if (end == std::string::npos) fail("unterminated quote");
    std::string s = text.substr(pos + 1, end - pos - 1);
    pos = end + 1;
    return s;
  }
  std::string ident() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    if (pos == start) fail("expected an identifier");
    return text.substr(start, pos - start);
  }
  double number() {
    skip_ws();
    std::size_t consumed = 0;
    double v;
    try {
      v = std::stod(text.substr(pos), &consumed);
    } catch (...) {
      fail("expected a number");
    }
    pos += consumed;
    return v;
  }
};

inline const std::vector<std::string>& known_labels() {
  static const std::vector<std::string> labels = {"operational", "degraded", "failed_safe",
                                                  "failed_unsafe", "failed"};
  return labels;
}

struct Parser {
  Lexer lex;

  StateExpr parse_atom() {
    if (lex.accept("(")) {
      StateExpr e = parse_or();
      lex.expect(")");
      return e;
    }
    if (lex.accept("!")) {
      StateExpr e;
      e.kind = StateExpr::Kind::Not;
      e.kids.push_back(parse_atom());
      return e;
    }
    if (lex.accept("true")) {
      StateExpr e;
      e.kind = StateExpr::Kind::True;
      return e;
    }
    if (lex.accept("false")) {
      StateExpr e;
      e.kind = StateExpr::Kind::False;
      return e;
    }
    lex.skip_ws();
    if (lex.pos < lex.text.size() && lex.text[lex.pos] == '"') {
      StateExpr e;
      e.kind = StateExpr::Kind::Label;
      e.name = lex.quoted();
      const auto& known = known_labels();
      if (std::find(known.begin(), known.end(), e.name) == known.end())
        lex.fail("unknown label \"" + e.name + "\"");
      return e;
    }
    if (lex.pos < lex.text.size() &&
        (lex.text[lex.pos] == 'P' || lex.text[lex.pos] == 'S' || lex.text[lex.pos] == 'R')) {
      // Peek ahead: a probability operator inside a state formula.
      std::size_t save = lex.pos;
      std::string id = lex.ident();
      if (id == "P" || id == "S" || id == "R")
        lex.fail("unsupported nesting: probabilistic operator inside a state formula");
      lex.pos = save;
    }
    StateExpr e;
    e.kind = StateExpr::Kind::Counter;
    e.name = lex.ident();
    if (lex.accept("<=")) e.cmp = Cmp::Le;
    else if (lex.accept(">=")) e.cmp = Cmp::Ge;
    else if (lex.accept("<")) e.cmp = Cmp::Lt;
    else if (lex.accept(">")) e.cmp = Cmp::Gt;
    else if (lex.accept("=")) e.cmp = Cmp::Eq;
    else lex.fail("expected a comparison after counter '" + e.name + "'");
    e.value = static_cast<int>(lex.number());
    return e;
  }

  StateExpr parse_and() {
    StateExpr e = parse_atom();
    while (lex.accept("&")) {
      StateExpr conj;
      conj.kind = StateExpr::Kind::And;
      conj.kids.push_back(std::move(e));
      conj.kids.push_back(parse_atom());
      e = std::move(conj);
    }
    return e;
  }

  StateExpr parse_or() {
    StateExpr e = parse_and();
    while (lex.accept("|")) {
      StateExpr disj;
      disj.kind = StateExpr::Kind::Or;
      disj.kids.push_back(std::move(e));
      disj.kids.push_back(parse_and());
      e = std::move(disj);
    }
    return e;
  }

  double time_bound() {
    if (lex.accept("<=")) {
      double t = lex.number();
      if (t < 0.0) lex.fail("negative time bound");
      return t;
    }
    if (lex.accept("[")) {
      double lo = lex.number();
      lex.expect(",");
      double hi = lex.number();
      lex.expect("]");
      if (lo != 0.0) lex.fail("only [0,t] windows are supported");
      if (hi < 0.0) lex.fail("negative time bound");
      return hi;
    }
    lex.fail("expected a time bound ('<=t' or '[0,t]')");
  }

  PathExpr parse_path() {
    PathExpr p;
    if (lex.accept("X")) {
      p.kind = PathExpr::Kind::Next;
      p.sub = parse_or();
      return p;
    }
    if (lex.accept("G")) {
      p.kind = PathExpr::Kind::Globally;
      p.bound = time_bound();
      p.sub = parse_or();
      return p;
    }
    if (lex.accept("F")) {
      p.kind = PathExpr::Kind::Finally;
      p.bound = time_bound();
      p.sub = parse_or();
      return p;
    }
    p.lhs = parse_or();
    lex.expect("U");
    if (lex.accept("<=")) {
      p.kind = PathExpr::Kind::BoundedUntil;
      p.bound = lex.number();
      if (p.bound < 0.0) lex.fail("negative time bound");
    } else {
      p.kind = PathExpr::Kind::Until;
    }
    p.sub = parse_or();
    return p;
  }

  void parse_bound(Property& prop, bool probability) {
    if (lex.accept("=?")) {
      prop.is_query = true;
      return;
    }
    prop.is_query = false;
    if (lex.accept("<=")) prop.bound_cmp = Cmp::Le;
    else if (lex.accept(">=")) prop.bound_cmp = Cmp::Ge;
    else if (lex.accept("<")) prop.bound_cmp = Cmp::Lt;
    else if (lex.accept(">")) prop.bound_cmp = Cmp::Gt;
    else lex.fail("expected '=?' or a bound");
    prop.bound_value = lex.number();
    if (probability && (prop.bound_value < 0.0 || prop.bound_value > 1.0))
      lex.fail("malformed bound: p not in [0,1]");
  }

  PropertyPtr parse_property() {
    auto prop = std::make_unique<Property>();
    if (lex.accept("filter")) {
      prop->kind = Property::Kind::Filter;
      lex.expect("(");
      if (lex.accept("forall")) prop->filter_op = FilterOp::Forall;
      else if (lex.accept("exists")) prop->filter_op = FilterOp::Exists;
      else if (lex.accept("min")) prop->filter_op = FilterOp::Min;
      else if (lex.accept("max")) prop->filter_op = FilterOp::Max;
      else lex.fail("expected a filter op (forall, exists, min, max)");
      lex.expect(",");
      prop->inner = parse_property();
      if (prop->inner->kind == Property::Kind::Filter)
        lex.fail("unsupported nesting: filter inside filter");
      lex.expect(")");
      return prop;
    }
    if (lex.accept("S")) {
      prop->kind = Property::Kind::Steady;
      parse_bound(*prop, true);
      lex.expect("[");
      prop->state = parse_or();
      lex.expect("]");
      return prop;
    }
    if (lex.accept("P")) {
      prop->kind = Property::Kind::Prob;
      parse_bound(*prop, true);
      lex.expect("[");
      prop->path = parse_path();
      lex.expect("]");
      return prop;
    }
    if (lex.accept("R")) {
      prop->kind = Property::Kind::Reward;
      lex.expect("{");
      prop->reward_name = lex.quoted();
      lex.expect("}");
      parse_bound(*prop, false);
      lex.expect("[");
      if (lex.accept("C")) {
        prop->reward_body = Property::RewardBody::Cumulative;
        lex.expect("<=");
        prop->reward_bound = lex.number();
        if (prop->reward_bound < 0.0) lex.fail("negative horizon");
      } else if (lex.accept("S")) {
        prop->reward_body = Property::RewardBody::Steady;
      } else if (lex.accept("F")) {
        prop->reward_body = Property::RewardBody::Reach;
        prop->reward_target = parse_or();
      } else {
        lex.fail("expected a reward body (C<=t, S, or F phi)");
      }
      lex.expect("]");
      return prop;
    }
    lex.fail("expected a property (S, P, R, or filter)");
  }
};

}  // namespace detail

inline PropertyPtr parse_property(const std::string& text) {
  detail::Parser parser;
  parser.lex.text = text;
  PropertyPtr p = parser.parse_property();
  if (!parser.lex.eof()) parser.lex.fail("trailing input after property");
  return p;
}

/// Parse a bare state formula (no P/S/R wrapper).
inline StateExpr parse_state_expr(const std::string& text) {
  detail::Parser parser;
  parser.lex.text = text;
  StateExpr e = parser.parse_or();
  if (!parser.lex.eof()) parser.lex.fail("trailing input after state expression");
  return e;
}

// ---------------------------------------------------------------------
// Pretty printer (round-trips through the parser).

inline void print_state(std::ostream& os, const StateExpr& e, int parent_prec = 0) {
  // precedence: ! (3) > & (2) > | (1)
  switch (e.kind) {
    case StateExpr::Kind::True: os << "true"; break;
    case StateExpr::Kind::False: os << "false"; break;
    case StateExpr::Kind::Label: os << '"' << e.name << '"'; break;
    case StateExpr::Kind::Counter: os << e.name << to_string(e.cmp) << e.value; break;
    case StateExpr::Kind::Not:
      os << '!';
      print_state(os, e.kids[0], 3);
      break;
    case StateExpr::Kind::And:
      if (parent_prec > 2) os << '(';
      print_state(os, e.kids[0], 2);
      os << " & ";
      print_state(os, e.kids[1], 2);
      if (parent_prec > 2) os << ')';
      break;
    case StateExpr::Kind::Or:
      if (parent_prec > 1) os << '(';
      print_state(os, e.kids[0], 1);
      os << " | ";
      print_state(os, e.kids[1], 1);
      if (parent_prec > 1) os << ')';
      break;
  }
}

inline std::string pretty_print(const Property& p) {
  std::ostringstream os;
  auto bound = [&]() {
    if (p.is_query) os << "=? ";
    else os << to_string(p.bound_cmp) << p.bound_value << ' ';
  };
  switch (p.kind) {
    case Property::Kind::Filter:
      os << "filter(";
      switch (p.filter_op) {
        case FilterOp::Forall: os << "forall"; break;
        case FilterOp::Exists: os << "exists"; break;
        case FilterOp::Min: os << "min"; break;
        case FilterOp::Max: os << "max"; break;
      }
      os << ", " << pretty_print(*p.inner) << ')';
      break;
    case Property::Kind::Steady:
      os << "S";
      bound();
      os << "[ ";
      print_state(os, p.state);
      os << " ]";
      break;
    case Property::Kind::Prob: {
      os << "P";
      bound();
      os << "[ ";
      const auto& path = p.path;
      switch (path.kind) {
        case PathExpr::Kind::Next:
          os << "X ";
          print_state(os, path.sub, 3);
          break;
        case PathExpr::Kind::Until:
          print_state(os, path.lhs, 3);
          os << " U ";
          print_state(os, path.sub, 3);
          break;
        case PathExpr::Kind::BoundedUntil:
          print_state(os, path.lhs, 3);
          os << " U<=" << path.bound << ' ';
          print_state(os, path.sub, 3);
          break;
        case PathExpr::Kind::Globally:
          os << "G[0," << path.bound << "] ";
          print_state(os, path.sub, 3);
          break;
        case PathExpr::Kind::Finally:
          os << "F[0," << path.bound << "] ";
          print_state(os, path.sub, 3);
          break;
      }
      os << " ]";
      break;
    }
    case Property::Kind::Reward:
      os << "R{\"" << p.reward_name << "\"}";
      bound();
      os << "[ ";
      switch (p.reward_body) {
        case Property::RewardBody::Cumulative: os << "C<=" << p.reward_bound; break;
        case Property::RewardBody::Steady: os << "S"; break;
        case Property::RewardBody::Reach:
          os << "F ";
          print_state(os, p.reward_target, 3);
          break;
      }
      os << " ]";
      break;
  }
  return os.str();
}

inline bool structurally_equal(const StateExpr& a, const StateExpr& b) {
  if (a.kind != b.kind || a.name != b.name || a.kids.size() != b.kids.size()) return false;
  if (a.kind == StateExpr::Kind::Counter && (a.cmp != b.cmp || a.value != b.value)) return false;
  for (std::size_t i = 0; i < a.kids.size(); ++i)
    if (!structurally_equal(a.kids[i], b.kids[i])) return false;
  return true;
}

inline bool structurally_equal(const Property& a, const Property& b) {
  if (a.kind != b.kind || a.is_query != b.is_query) return false;
  if (!a.is_query && (a.bound_cmp != b.bound_cmp || a.bound_value != b.bound_value)) return false;
  switch (a.kind) {
    case Property::Kind::Steady: return structurally_equal(a.state, b.state);
    case Property::Kind::Prob:
      if (a.path.kind != b.path.kind || a.path.bound != b.path.bound) return false;
      return structurally_equal(a.path.lhs, b.path.lhs) &&
             structurally_equal(a.path.sub, b.path.sub);
    case Property::Kind::Reward:
      return a.reward_name == b.reward_name && a.reward_body == b.reward_body &&
             a.reward_bound == b.reward_bound &&
             structurally_equal(a.reward_target, b.reward_target);
    case Property::Kind::Filter:
      return a.filter_op == b.filter_op && structurally_equal(*a.inner, *b.inner);
  }
  return false;
}

// ---------------------------------------------------------------------
// Evaluation

struct QueryResult {
  enum class Kind { Value, Boolean } kind = Kind::Value;
  double value = 0.0;
  bool boolean = false;

  std::string to_text() const {
    if (kind == Kind::Boolean) return boolean ? "true" : "false";
    std::ostringstream os;
    os.precision(10);
    os << value;
    return os.str();
  }
};

namespace detail {

inline bool compare(double v, Cmp cmp, double bound) {
  switch (cmp) {
    case Cmp::Lt: return v < bound;
    case Cmp::Le: return v <= bound;
    case Cmp::Ge: return v >= bound;
    case Cmp::Gt: return v > bound;
    case Cmp::Eq: return v == bound;
  }
  return false;
}

inline StateSet resolve(const StateExpr& e, const MarkovRewardModel& m) {
  const std::size_t n = m.size();
  StateSet out(n, 0);
  switch (e.kind) {
    case StateExpr::Kind::True:
      std::fill(out.begin(), out.end(), 1);
      break;
    case StateExpr::Kind::False: break;
    case StateExpr::Kind::Label: {
      if (e.name == "failed") {
        for (std::size_t s = 0; s < n; ++s) out[s] = is_failed(m.label[s]);
      } else {
        StateClass want = StateClass::Operational;
        if (e.name == "operational") want = StateClass::Operational;
        else if (e.name == "degraded") want = StateClass::Degraded;
        else if (e.name == "failed_safe") want = StateClass::FailedSafe;
        else if (e.name == "failed_unsafe") want = StateClass::FailedUnsafe;
        else throw error("unknown label \"" + e.name + "\"");
        for (std::size_t s = 0; s < n; ++s) out[s] = (m.label[s] == want);
      }
      break;
    }
    case StateExpr::Kind::Counter: {
      int cls = m.class_index(e.name);
      if (cls < 0) throw error("unknown counter '" + e.name + "' (not an op class)");
      for (std::size_t s = 0; s < n; ++s)
        out[s] = compare(m.states[s].counts[cls], e.cmp, e.value);
      break;
    }
    case StateExpr::Kind::Not: {
      StateSet k = resolve(e.kids[0], m);
      for (std::size_t s = 0; s < n; ++s) out[s] = !k[s];
      break;
    }
    case StateExpr::Kind::And: {
      StateSet a = resolve(e.kids[0], m), b = resolve(e.kids[1], m);
      for (std::size_t s = 0; s < n; ++s) out[s] = a[s] && b[s];
      break;
    }
    case StateExpr::Kind::Or: {
      StateSet a = resolve(e.kids[0], m), b = resolve(e.kids[1], m);
      for (std::size_t s = 0; s < n; ++s) out[s] = a[s] || b[s];
      break;
    }
  }
  return out;
}

/// Numeric per-state evaluation of a non-filter property body.
inline std::vector<double> evaluate_vector(const Property& p, const MarkovRewardModel& m,
                                           const EngineOptions& opts) {
  const std::size_t n = m.size();
  switch (p.kind) {
    case Property::Kind::Steady: {
      // Steady-state value is start-independent on a single closed class.
      StateSet target = resolve(p.state, m);
      Distribution pi = steady_state(m, opts);
      double v = 0.0;
      for (std::size_t s = 0; s < n; ++s)
        if (target[s]) v += pi[s];
      return std::vector<double>(n, v);
    }
    case Property::Kind::Prob: {
      const auto& path = p.path;
      switch (path.kind) {
        case PathExpr::Kind::Next: return next_prob(m, resolve(path.sub, m));
        case PathExpr::Kind::Until:
          return unbounded_until(m, resolve(path.lhs, m), resolve(path.sub, m), opts);
        case PathExpr::Kind::BoundedUntil:
          return bounded_until(m, resolve(path.lhs, m), resolve(path.sub, m), path.bound, opts);
        case PathExpr::Kind::Globally:
          return invariance_prob_all(m, resolve(path.sub, m), path.bound, opts);
        case PathExpr::Kind::Finally: {
          // F[0,t] phi  ==  true U<=t phi
          StateSet all(n, 1);
          return bounded_until(m, all, resolve(path.sub, m), path.bound, opts);
        }
      }
      throw error("unreachable path kind");
    }
    case Property::Kind::Reward: {
      switch (p.reward_body) {
        case Property::RewardBody::Steady:
          return std::vector<double>(n, expected_steady_reward(m, p.reward_name, opts));
        case Property::RewardBody::Cumulative: {
          // Per-state cumulative rewards come out of the same backward
          // uniformization pass the initial-state query uses.
          const auto& r = m.reward(p.reward_name);
          seudep::detail::Generator gen(m);
          double lambda = opts.uniformization_slack * gen.max_exit;
          if (p.reward_bound == 0.0 || lambda == 0.0) {
            std::vector<double> out(n, 0.0);
            if (lambda == 0.0)
              for (std::size_t s = 0; s < n; ++s) out[s] = r[s] * p.reward_bound;
            return out;
          }
          auto win = seudep::detail::poisson_window(lambda * p.reward_bound,
                                                    opts.poisson_epsilon * 1e-3);
          auto tail = win.tail_greater();
          std::vector<double> x = r, next(n, 0.0), acc(n, 0.0);
          for (std::int64_t k = 0;; ++k) {
            double tk;
            if (k < win.left) tk = 1.0;
            else if (k <= win.right) tk = tail[static_cast<std::size_t>(k - win.left)];
            else break;
            if (k > win.left && tk <= 0.0) break;
            for (std::size_t s = 0; s < n; ++s) acc[s] += tk * x[s] / lambda;
            gen.apply_uniformized_right(x, next, lambda);
            x.swap(next);
          }
          return acc;
        }
        case Property::RewardBody::Reach: {
          StateSet target = resolve(p.reward_target, m);
          // reach_reward is defined from the initial state; per-state
          // values solve the same linear system, so reuse it by
          // shifting the initial state.
          std::vector<double> out(n, 0.0);
          MarkovRewardModel shifted = m;
          for (std::size_t s = 0; s < n; ++s) {
            shifted.initial = static_cast<int>(s);
            out[s] = reach_reward(shifted, p.reward_name, target, opts);
          }
          return out;
        }
      }
      throw error("unreachable reward body");
    }
    case Property::Kind::Filter: throw error("filters cannot nest as values");
  }
  throw error("unreachable property kind");
}

}  // namespace detail

/// Resolve a state formula to the set of satisfying state indices.
inline StateSet resolve_states(const StateExpr& e, const MarkovRewardModel& m) {
  return detail::resolve(e, m);
}

/// Evaluate a parsed property against a model. Filters aggregate the
/// per-state vector of the inner property; everything else reports the
/// initial state.
inline QueryResult evaluate(const Property& p, const MarkovRewardModel& m,
                            const EngineOptions& opts = {}) {
  QueryResult out;
  if (p.kind == Property::Kind::Filter) {
    const Property& inner = *p.inner;
    if (inner.kind == Property::Kind::Filter) throw error("unsupported nesting: filter in filter");
    std::vector<double> values = detail::evaluate_vector(inner, m, opts);
    switch (p.filter_op) {
      case FilterOp::Forall:
      case FilterOp::Exists: {
        if (inner.is_query)
          throw error("filter(forall/exists) needs a bounded (boolean) inner property");
        bool all = true, any = false;
        for (double v : values) {
          bool b = detail::compare(v, inner.bound_cmp, inner.bound_value);
          all = all && b;
          any = any || b;
        }
        out.kind = QueryResult::Kind::Boolean;
        out.boolean = (p.filter_op == FilterOp::Forall) ? all : any;
        return out;
      }
      case FilterOp::Min:
      case FilterOp::Max: {
        if (!inner.is_query) throw error("filter(min/max) needs a value (=?) inner property");
        double best = values.front();
        for (double v : values) best = (p.filter_op == FilterOp::Min) ? std::min(best, v)
                                                                      : std::max(best, v);
        out.kind = QueryResult::Kind::Value;
        out.value = best;
        return out;
      }
    }
  }

  std::vector<double> values = detail::evaluate_vector(p, m, opts);
  double v = values[static_cast<std::size_t>(m.initial)];
  if (p.is_query) {
    out.kind = QueryResult::Kind::Value;
    out.value = v;
  } else {
    out.kind = QueryResult::Kind::Boolean;
    out.boolean = detail::compare(v, p.bound_cmp, p.bound_value);
  }
  return out;
}

inline QueryResult check(const std::string& property_text, const MarkovRewardModel& m,
                         const EngineOptions& opts = {}) {
  return evaluate(*parse_property(property_text), m, opts);
}

}  // namespace seudep::csl
