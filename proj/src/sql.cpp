#include "sqlaug/sql.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace sqlaug::sql {
namespace {

const std::set<std::string>& keywords() {
  static const std::set<std::string> kw = {
      "select", "distinct", "from",  "as",    "join",      "on",     "where", "and",
      "or",     "not",      "in",    "like",  "between",   "group",  "by",    "having",
      "order",  "asc",      "desc",  "limit", "union",     "intersect", "except",
      "inner",  "left",     "outer", "is",    "null",      "exists"};
  return kw;
}

bool is_aggregate(std::string_view lowered) {
  return lowered == "count" || lowered == "sum" || lowered == "avg" || lowered == "min" ||
         lowered == "max";
}

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Query parse_all() {
    Query q = parse_query();
    if (peek().text == ";") ++pos_;
    if (peek().kind != TokenKind::kEnd) fail("unexpected trailing token");
    return q;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }

  bool peek_kw(std::string_view kw, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == TokenKind::kIdent && to_lower(t.text) == kw;
  }

  bool accept_kw(std::string_view kw) {
    if (!peek_kw(kw)) return false;
    ++pos_;
    return true;
  }

  void expect_kw(std::string_view kw) {
    if (!accept_kw(kw)) fail("expected " + to_upper(kw));
  }

  bool accept_sym(std::string_view sym) {
    if (peek().kind == TokenKind::kSymbol && peek().text == sym) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect_sym(std::string_view sym) {
    if (!accept_sym(sym)) fail("expected '" + std::string(sym) + "'");
  }

  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    std::string near = t.kind == TokenKind::kEnd ? "<end>" : t.text;
    throw SqlError(what + " near '" + near + "' (token " + std::to_string(pos_) + ")");
  }

  bool is_keyword_token(std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == TokenKind::kIdent && keywords().count(to_lower(t.text)) > 0;
  }

  Query parse_query() {
    Query q;
    q.core = parse_core();
    for (std::string_view op : {"union", "intersect", "except"}) {
      if (accept_kw(op)) {
        q.set_op = std::string(op);
        q.rhs = Box<Query>(parse_query());
        break;
      }
    }
    return q;
  }

  SelectCore parse_core() {
    SelectCore core;
    expect_kw("select");
    core.distinct = accept_kw("distinct");
    do {
      core.items.push_back(parse_value(/*allow_subquery=*/false));
    } while (accept_sym(","));
    expect_kw("from");
    core.from = parse_table_ref();
    while (true) {
      if (accept_sym(",")) {
        core.joins.push_back(JoinClause{parse_table_ref(), {}});
        continue;
      }
      if (peek_kw("left")) fail("unsupported construct LEFT JOIN");
      accept_kw("inner");
      if (!accept_kw("join")) break;
      JoinClause join{parse_table_ref(), {}};
      if (accept_kw("on")) {
        do {
          ColumnRef a = parse_column();
          expect_sym("=");
          ColumnRef b = parse_column();
          join.on.emplace_back(std::move(a), std::move(b));
        } while (accept_kw("and"));
      }
      core.joins.push_back(std::move(join));
    }
    if (accept_kw("where")) core.where = parse_condition();
    if (accept_kw("group")) {
      expect_kw("by");
      do {
        core.group_by.push_back(parse_column());
      } while (accept_sym(","));
    }
    if (accept_kw("having")) core.having = parse_condition();
    if (accept_kw("order")) {
      expect_kw("by");
      do {
        OrderItem item;
        item.expr = parse_value(false);
        if (accept_kw("desc")) {
          item.descending = true;
          item.explicit_direction = true;
        } else if (accept_kw("asc")) {
          item.explicit_direction = true;
        }
        core.order_by.push_back(std::move(item));
      } while (accept_sym(","));
    }
    if (accept_kw("limit")) {
      if (peek().kind != TokenKind::kNumber) fail("expected number after LIMIT");
      core.limit = peek().text;
      ++pos_;
    }
    return core;
  }

  TableRef parse_table_ref() {
    TableRef ref;
    if (accept_sym("(")) {
      ref.subquery = Box<Query>(parse_query());
      expect_sym(")");
    } else {
      if (peek().kind != TokenKind::kIdent || is_keyword_token()) fail("expected table name");
      ref.table = peek().text;
      ++pos_;
    }
    if (accept_kw("as")) {
      if (peek().kind != TokenKind::kIdent) fail("expected alias");
      ref.alias = peek().text;
      ++pos_;
    } else if (peek().kind == TokenKind::kIdent && !is_keyword_token()) {
      ref.alias = peek().text;
      ++pos_;
    }
    return ref;
  }

  ColumnRef parse_column() {
    ColumnRef col;
    if (accept_sym("*")) {
      col.column = "*";
      return col;
    }
    if (peek().kind != TokenKind::kIdent || is_keyword_token()) fail("expected column");
    std::string first = peek().text;
    ++pos_;
    if (accept_sym(".")) {
      col.qualifier = std::move(first);
      if (accept_sym("*")) {
        col.column = "*";
      } else {
        if (peek().kind != TokenKind::kIdent) fail("expected column after '.'");
        col.column = peek().text;
        ++pos_;
      }
    } else {
      col.column = std::move(first);
    }
    return col;
  }

  ValueExpr parse_value(bool allow_subquery) {
    ValueExpr v;
    const Token& t = peek();
    if (t.kind == TokenKind::kNumber || t.kind == TokenKind::kString) {
      v.kind = ValueExpr::Kind::kLiteral;
      v.literal = t.text;
      ++pos_;
      return v;
    }
    if (t.kind == TokenKind::kSymbol && t.text == "-" && peek(1).kind == TokenKind::kNumber) {
      v.kind = ValueExpr::Kind::kLiteral;
      v.literal = "-" + peek(1).text;
      pos_ += 2;
      return v;
    }
    if (t.kind == TokenKind::kSymbol && t.text == "(") {
      if (!allow_subquery || !peek_kw("select", 1)) fail("unsupported parenthesized expression");
      ++pos_;
      v.kind = ValueExpr::Kind::kSubquery;
      v.subquery = Box<Query>(parse_query());
      expect_sym(")");
      return v;
    }
    if (t.kind == TokenKind::kIdent && is_aggregate(to_lower(t.text)) && peek(1).text == "(") {
      v.agg = to_lower(t.text);
      pos_ += 2;
      v.distinct = accept_kw("distinct");
      v.column = parse_column();
      expect_sym(")");
    } else {
      v.column = parse_column();
    }
    const Token& after = peek();
    if (after.kind == TokenKind::kSymbol &&
        (after.text == "+" || after.text == "-" || after.text == "/")) {
      fail("unsupported construct arithmetic expression");
    }
    return v;
  }

  Condition parse_condition() {
    Condition cond;
    cond.terms.push_back(parse_predicate());
    while (true) {
      if (accept_kw("and")) {
        cond.connectors.emplace_back("and");
      } else if (accept_kw("or")) {
        cond.connectors.emplace_back("or");
      } else {
        break;
      }
      cond.terms.push_back(parse_predicate());
    }
    return cond;
  }

  Predicate parse_predicate() {
    Predicate p;
    if (peek().kind == TokenKind::kSymbol && peek().text == "(" && !peek_kw("select", 1)) {
      fail("unsupported construct parenthesized condition");
    }
    if (accept_kw("not")) p.negated = true;
    if (peek_kw("exists")) fail("unsupported construct EXISTS");
    p.lhs = parse_value(true);
    if (accept_kw("not")) p.negated = !p.negated;
    const Token& t = peek();
    if (t.kind == TokenKind::kSymbol &&
        (t.text == "=" || t.text == "!=" || t.text == "<>" || t.text == "<" || t.text == ">" ||
         t.text == "<=" || t.text == ">=")) {
      p.op = t.text == "<>" ? "!=" : t.text;
      ++pos_;
      p.rhs = parse_value(true);
    } else if (accept_kw("like")) {
      p.op = "like";
      p.rhs = parse_value(true);
    } else if (accept_kw("in")) {
      p.op = "in";
      if (!peek_kw("select", 1)) fail("unsupported construct IN list");
      p.rhs = parse_value(true);
    } else if (accept_kw("between")) {
      p.op = "between";
      p.rhs = parse_value(true);
      expect_kw("and");
      p.rhs2 = parse_value(true);
    } else if (peek_kw("is")) {
      fail("unsupported construct IS NULL");
    } else {
      fail("expected comparison operator");
    }
    return p;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------- printing

class Printer {
 public:
  explicit Printer(const PrintOptions& opts) : o_(opts) {}

  std::string kw(std::string_view upper) const {
    return o_.lowercase ? to_lower(upper) : std::string(upper);
  }

  std::string ident(const std::string& s) const { return o_.lowercase ? to_lower(s) : s; }

  std::string table(const std::string& name) const {
    return o_.mask_tables ? std::string(kTablePlaceholder) : ident(name);
  }

  std::string column(const ColumnRef& c) const {
    if (c.is_star()) return "*";
    if (o_.mask_columns) return std::string(kColumnPlaceholder);
    if (c.qualifier.empty()) return ident(c.column);
    return ident(c.qualifier) + "." + ident(c.column);
  }

  std::string literal(const std::string& lit) const {
    return o_.mask_values ? std::string(kValuePlaceholder) : lit;
  }

  std::string value(const ValueExpr& v) const {
    switch (v.kind) {
      case ValueExpr::Kind::kLiteral:
        return literal(v.literal);
      case ValueExpr::Kind::kSubquery:
        if (o_.subquery_placeholder) return std::string(kSubqueryPlaceholder);
        return "(" + query(*v.subquery) + ")";
      case ValueExpr::Kind::kColumn:
        break;
    }
    std::string col = column(v.column);
    if (v.agg.empty()) return col;
    return v.agg + "(" + (v.distinct ? kw("DISTINCT") + " " : "") + col + ")";
  }

  std::string predicate(const Predicate& p) const {
    std::string out = value(p.lhs) + " ";
    const bool word_op = p.op == "like" || p.op == "in" || p.op == "between";
    if (p.negated && word_op) out += kw("NOT") + " ";
    if (word_op) {
      out += kw(to_upper(p.op));
    } else {
      out += p.op;
    }
    out += " " + value(p.rhs);
    if (p.rhs2) out += " " + kw("AND") + " " + value(*p.rhs2);
    if (p.negated && !word_op) out = kw("NOT") + " " + out;
    return out;
  }

  std::string condition(const Condition& c) const {
    std::vector<std::string> terms;
    terms.reserve(c.terms.size());
    for (const auto& t : c.terms) terms.push_back(predicate(t));
    const bool all_and = std::all_of(c.connectors.begin(), c.connectors.end(),
                                     [](const std::string& s) { return s == "and"; });
    if (o_.sort_conjuncts && all_and) std::sort(terms.begin(), terms.end());
    std::string out = terms[0];
    for (std::size_t i = 1; i < terms.size(); ++i) {
      out += " " + kw(to_upper(c.connectors[i - 1])) + " " + terms[i];
    }
    return out;
  }

  std::string table_ref(const TableRef& r) const {
    std::string out;
    if (r.subquery) {
      out = o_.subquery_placeholder ? std::string(kSubqueryPlaceholder)
                                    : "(" + query(*r.subquery) + ")";
    } else {
      out = table(r.table);
    }
    if (!r.alias.empty() && !o_.drop_aliases && !o_.mask_tables) {
      out += " " + kw("AS") + " " + ident(r.alias);
    }
    return out;
  }

  std::string core(const SelectCore& c) const {
    std::string out = kw("SELECT");
    if (c.distinct) out += " " + kw("DISTINCT");
    for (std::size_t i = 0; i < c.items.size(); ++i) {
      out += (i ? ", " : " ") + value(c.items[i]);
    }
    out += " " + kw("FROM") + " " + table_ref(c.from);
    for (const auto& j : c.joins) {
      out += " " + kw("JOIN") + " " + table_ref(j.ref);
      if (j.on.empty()) continue;
      std::vector<std::string> eqs;
      for (const auto& [a, b] : j.on) {
        std::string left = column(a);
        std::string right = column(b);
        if (o_.sort_conjuncts && right < left) std::swap(left, right);
        eqs.push_back(left + " = " + right);
      }
      if (o_.sort_conjuncts) std::sort(eqs.begin(), eqs.end());
      out += " " + kw("ON") + " " + join(eqs, " " + kw("AND") + " ");
    }
    if (c.where) out += " " + kw("WHERE") + " " + condition(*c.where);
    if (!c.group_by.empty()) {
      out += " " + kw("GROUP BY");
      for (std::size_t i = 0; i < c.group_by.size(); ++i) {
        out += (i ? ", " : " ") + column(c.group_by[i]);
      }
    }
    if (c.having) out += " " + kw("HAVING") + " " + condition(*c.having);
    if (!c.order_by.empty()) {
      out += " " + kw("ORDER BY");
      for (std::size_t i = 0; i < c.order_by.size(); ++i) {
        out += (i ? ", " : " ") + value(c.order_by[i].expr);
        if (c.order_by[i].descending) {
          out += " " + kw("DESC");
        } else if (c.order_by[i].explicit_direction || o_.explicit_asc) {
          out += " " + kw("ASC");
        }
      }
    }
    if (c.limit) out += " " + kw("LIMIT") + " " + literal(*c.limit);
    return out;
  }

  std::string query(const Query& q) const {
    std::string out = core(q.core);
    if (q.rhs) {
      if (o_.subquery_placeholder) return out;
      out += " " + kw(to_upper(q.set_op)) + " " + query(*q.rhs);
    }
    return out;
  }

 private:
  const PrintOptions& o_;
};

// ------------------------------------------------------------------ aliases

using AliasMap = std::map<std::string, std::string>;  // lowered alias -> table

void resolve_in_query(Query& q, std::vector<AliasMap>& scopes);

void resolve_column(ColumnRef& c, const std::vector<AliasMap>& scopes,
                    const std::vector<std::string>& scope_tables) {
  if (c.is_star()) {
    c.qualifier.clear();
    return;
  }
  if (c.qualifier.empty()) {
    if (scope_tables.size() == 1) c.qualifier = scope_tables.front();
    return;
  }
  const std::string key = to_lower(c.qualifier);
  for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
    auto found = it->find(key);
    if (found != it->end()) {
      c.qualifier = found->second;
      return;
    }
  }
}

void resolve_value(ValueExpr& v, std::vector<AliasMap>& scopes,
                   const std::vector<std::string>& tables) {
  if (v.kind == ValueExpr::Kind::kColumn) resolve_column(v.column, scopes, tables);
  if (v.kind == ValueExpr::Kind::kSubquery) resolve_in_query(*v.subquery, scopes);
}

void resolve_condition(Condition& c, std::vector<AliasMap>& scopes,
                       const std::vector<std::string>& tables) {
  for (auto& p : c.terms) {
    resolve_value(p.lhs, scopes, tables);
    resolve_value(p.rhs, scopes, tables);
    if (p.rhs2) resolve_value(*p.rhs2, scopes, tables);
  }
}

void resolve_in_query(Query& q, std::vector<AliasMap>& scopes) {
  SelectCore& c = q.core;
  AliasMap local;
  std::vector<std::string> tables;
  auto add_ref = [&](TableRef& r) {
    if (r.subquery) {
      resolve_in_query(*r.subquery, scopes);
      r.alias.clear();
      tables.emplace_back();  // an anonymous source still counts toward ambiguity
      return;
    }
    local[to_lower(r.table)] = r.table;
    if (!r.alias.empty()) local[to_lower(r.alias)] = r.table;
    r.alias.clear();
    tables.push_back(r.table);
  };
  add_ref(c.from);
  for (auto& j : c.joins) add_ref(j.ref);
  scopes.push_back(std::move(local));
  std::vector<std::string> single;
  if (tables.size() == 1 && !tables.front().empty()) single = tables;

  for (auto& item : c.items) resolve_value(item, scopes, single);
  for (auto& j : c.joins) {
    for (auto& [a, b] : j.on) {
      resolve_column(a, scopes, single);
      resolve_column(b, scopes, single);
    }
  }
  if (c.where) resolve_condition(*c.where, scopes, single);
  for (auto& g : c.group_by) resolve_column(g, scopes, single);
  if (c.having) resolve_condition(*c.having, scopes, single);
  for (auto& o : c.order_by) resolve_value(o.expr, scopes, single);
  scopes.pop_back();
  if (q.rhs) resolve_in_query(*q.rhs, scopes);
}

void collect_parts(const Query& q, const PrintOptions& opts, const Printer& printer,
                   std::vector<std::string>& out);

void collect_value_parts(const ValueExpr& v, const PrintOptions& opts, const Printer& printer,
                         std::vector<std::string>& out) {
  if (v.kind == ValueExpr::Kind::kSubquery) collect_parts(*v.subquery, opts, printer, out);
}

void collect_condition_parts(const Condition& c, const PrintOptions& opts,
                             const Printer& printer, std::vector<std::string>& out) {
  for (const auto& p : c.terms) {
    collect_value_parts(p.lhs, opts, printer, out);
    collect_value_parts(p.rhs, opts, printer, out);
    if (p.rhs2) collect_value_parts(*p.rhs2, opts, printer, out);
  }
}

void collect_parts(const Query& q, const PrintOptions& opts, const Printer& printer,
                   std::vector<std::string>& out) {
  const SelectCore& c = q.core;
  out.push_back(printer.core(c));
  if (c.from.subquery) collect_parts(*c.from.subquery, opts, printer, out);
  for (const auto& j : c.joins) {
    if (j.ref.subquery) collect_parts(*j.ref.subquery, opts, printer, out);
  }
  if (c.where) collect_condition_parts(*c.where, opts, printer, out);
  if (c.having) collect_condition_parts(*c.having, opts, printer, out);
  if (q.rhs) collect_parts(*q.rhs, opts, printer, out);
}

}  // namespace

std::vector<Token> tokenize(std::string_view sql) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < sql.size()) {
    const char c = sql[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < sql.size() && is_ident_char(sql[j])) ++j;
      out.push_back({TokenKind::kIdent, std::string(sql.substr(i, j - i))});
      i = j;
      continue;
    }
    if (c == '`') {
      const auto end = sql.find('`', i + 1);
      if (end == std::string_view::npos) throw SqlError("unterminated quoted identifier");
      out.push_back({TokenKind::kIdent, std::string(sql.substr(i + 1, end - i - 1))});
      i = end + 1;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < sql.size() && std::isdigit(static_cast<unsigned char>(sql[i + 1])))) {
      std::size_t j = i;
      while (j < sql.size() &&
             (std::isdigit(static_cast<unsigned char>(sql[j])) || sql[j] == '.')) {
        ++j;
      }
      out.push_back({TokenKind::kNumber, std::string(sql.substr(i, j - i))});
      i = j;
      continue;
    }
    if (c == '\'' || c == '"') {
      std::size_t j = i + 1;
      while (j < sql.size() && sql[j] != c) ++j;
      if (j >= sql.size()) throw SqlError("unterminated string literal");
      out.push_back({TokenKind::kString, std::string(sql.substr(i, j - i + 1))});
      i = j + 1;
      continue;
    }
    if (i + 1 < sql.size()) {
      const std::string_view two = sql.substr(i, 2);
      if (two == "!=" || two == "<>" || two == "<=" || two == ">=") {
        out.push_back({TokenKind::kSymbol, std::string(two)});
        i += 2;
        continue;
      }
    }
    if (std::string_view("=<>(),.*;+-/").find(c) != std::string_view::npos) {
      out.push_back({TokenKind::kSymbol, std::string(1, c)});
      ++i;
      continue;
    }
    throw SqlError(std::string("unexpected character '") + c + "' at offset " +
                   std::to_string(i));
  }
  out.push_back({TokenKind::kEnd, ""});
  return out;
}

Query parse(std::string_view sql) { return Parser(tokenize(sql)).parse_all(); }

std::string to_string(const Query& q, const PrintOptions& opts) { return Printer(opts).query(q); }

std::string to_string(const SelectCore& core, const PrintOptions& opts) {
  return Printer(opts).core(core);
}

void resolve_aliases(Query& q) {
  std::vector<AliasMap> scopes;
  resolve_in_query(q, scopes);
}

namespace detail {

namespace {
using ColumnFn =
    std::function<void(const ColumnRef&, const std::vector<const SelectCore*>&)>;

void visit_value(const ValueExpr& v, std::vector<const SelectCore*>& scopes, const ColumnFn& fn) {
  if (v.kind == ValueExpr::Kind::kColumn) fn(v.column, scopes);
  if (v.kind == ValueExpr::Kind::kSubquery) visit_columns(*v.subquery, scopes, fn);
}

void visit_condition(const Condition& c, std::vector<const SelectCore*>& scopes,
                     const ColumnFn& fn) {
  for (const auto& p : c.terms) {
    visit_value(p.lhs, scopes, fn);
    visit_value(p.rhs, scopes, fn);
    if (p.rhs2) visit_value(*p.rhs2, scopes, fn);
  }
}
}  // namespace

void visit_columns(const Query& q, std::vector<const SelectCore*>& scopes, const ColumnFn& fn) {
  const SelectCore& c = q.core;
  scopes.push_back(&c);
  for (const auto& item : c.items) visit_value(item, scopes, fn);
  // FROM subqueries are their own scopes and appear textually before joins.
  if (c.from.subquery) visit_columns(*c.from.subquery, scopes, fn);
  for (const auto& j : c.joins) {
    if (j.ref.subquery) visit_columns(*j.ref.subquery, scopes, fn);
    for (const auto& [a, b] : j.on) {
      fn(a, scopes);
      fn(b, scopes);
    }
  }
  if (c.where) visit_condition(*c.where, scopes, fn);
  for (const auto& g : c.group_by) fn(g, scopes);
  if (c.having) visit_condition(*c.having, scopes, fn);
  for (const auto& o : c.order_by) visit_value(o.expr, scopes, fn);
  scopes.pop_back();
  if (q.rhs) visit_columns(*q.rhs, scopes, fn);
}

}  // namespace detail

std::vector<std::string> split_parts(const Query& q, const PrintOptions& opts) {
  PrintOptions o = opts;
  o.subquery_placeholder = true;
  Printer printer(o);
  std::vector<std::string> out;
  collect_parts(q, o, printer, out);
  return out;
}

namespace {

void collect_tables(const Query& q, std::vector<std::string>& out);

void collect_condition_tables(const Condition& c, std::vector<std::string>& out) {
  for (const auto& p : c.terms) {
    for (const ValueExpr* v : {&p.lhs, &p.rhs}) {
      if (v->kind == ValueExpr::Kind::kSubquery) collect_tables(*v->subquery, out);
    }
    if (p.rhs2 && p.rhs2->kind == ValueExpr::Kind::kSubquery) collect_tables(*p.rhs2->subquery, out);
  }
}

void collect_tables(const Query& q, std::vector<std::string>& out) {
  auto add = [&](const TableRef& r) {
    if (r.subquery) {
      collect_tables(*r.subquery, out);
      return;
    }
    const std::string t = to_lower(r.table);
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
  };
  add(q.core.from);
  for (const auto& j : q.core.joins) add(j.ref);
  for (const auto& item : q.core.items) {
    if (item.kind == ValueExpr::Kind::kSubquery) collect_tables(*item.subquery, out);
  }
  if (q.core.where) collect_condition_tables(*q.core.where, out);
  if (q.core.having) collect_condition_tables(*q.core.having, out);
  if (q.rhs) collect_tables(*q.rhs, out);
}

}  // namespace

std::vector<std::string> referenced_tables(const Query& q) {
  std::vector<std::string> out;
  collect_tables(q, out);
  return out;
}

}  // namespace sqlaug::sql
