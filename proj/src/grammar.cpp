#include <array>
#include <set>

#include "sqlaug/parser.hpp"
#include "sqlaug/sql.hpp"

namespace sqlaug::grammar {
namespace {

constexpr int kMaxItems = 4;
constexpr int kMaxPredicates = 3;

constexpr std::array<std::string_view, kNumKeywords> kNames = {
    "select", "select_distinct", "agg_none", "agg_count", "agg_sum", "agg_avg", "agg_min",
    "agg_max", "join", "nojoin", "more", "where", "group_by", "having", "order_by", "limit",
    "eos", "=", "!=", "<", ">", "<=", ">=", "like", "and", "or", "asc", "desc"};

constexpr std::array<std::string_view, 6> kAggs = {"", "count", "sum", "avg", "min", "max"};
constexpr std::array<std::string_view, 7> kOps = {"=", "!=", "<", ">", "<=", ">=", "like"};

}  // namespace

std::string_view keyword_name(int k) { return kNames.at(static_cast<std::size_t>(k)); }

Machine::Machine(const SchemaGraph& schema)
    : schema_(&schema),
      tables_(static_cast<int>(schema.num_tables())),
      columns_(static_cast<int>(schema.num_columns())) {}

int Machine::size() const { return kNumKeywords + tables_ + columns_ + 1; }

bool Machine::linked(int t) const {
  return t != t1_ && schema_->join_columns(t1_, t).has_value();
}

bool Machine::column_in_scope(int c) const {
  const int t = schema_->columns()[static_cast<std::size_t>(c)].table;
  return t == t1_ || t == t2_;
}

std::vector<char> Machine::allowed() const {
  std::vector<char> a(static_cast<std::size_t>(size()), 0);
  auto kw = [&](int k) { a[static_cast<std::size_t>(k)] = 1; };
  auto columns = [&](bool star) {
    for (int c = 0; c < columns_; ++c) {
      if (column_in_scope(c)) a[static_cast<std::size_t>(kNumKeywords + tables_ + c)] = 1;
    }
    if (star) a[static_cast<std::size_t>(star_index())] = 1;
  };
  auto ops = [&](bool like) {
    for (int k = kOpEq; k <= kOpGe; ++k) kw(k);
    if (like) kw(kOpLike);
  };
  switch (phase_) {
    case Phase::kFromTable:
      for (int t = 0; t < tables_; ++t) a[static_cast<std::size_t>(kNumKeywords + t)] = 1;
      break;
    case Phase::kJoinChoice:
      kw(kNoJoin);
      for (int t = 0; t < tables_; ++t) {
        if (linked(t)) kw(kJoin);
      }
      break;
    case Phase::kJoinTable:
      for (int t = 0; t < tables_; ++t) {
        if (linked(t)) a[static_cast<std::size_t>(kNumKeywords + t)] = 1;
      }
      break;
    case Phase::kSelect:
      kw(kSelect);
      kw(kSelectDistinct);
      break;
    case Phase::kSelectAgg:
    case Phase::kOrderAgg:
      for (int k = kAggNone; k <= kAggMax; ++k) kw(k);
      break;
    case Phase::kHavingAgg:
      for (int k = kAggCount; k <= kAggMax; ++k) kw(k);
      break;
    case Phase::kSelectColumn:
    case Phase::kHavingColumn:
    case Phase::kOrderColumn:
      columns(agg_ == kAggNone || agg_ == kAggCount);
      break;
    case Phase::kWhereColumn:
    case Phase::kGroupColumn:
      columns(false);
      break;
    case Phase::kWhereOp:
      ops(true);
      break;
    case Phase::kHavingOp:
      ops(false);
      break;
    case Phase::kAfterSelect:
      if (items_ < kMaxItems) kw(kMore);
      kw(kWhere);
      kw(kGroupBy);
      kw(kOrderBy);
      kw(kLimit);
      kw(kEos);
      break;
    case Phase::kAfterWhere:
      if (predicates_ < kMaxPredicates) {
        kw(kAnd);
        kw(kOr);
      }
      kw(kGroupBy);
      kw(kOrderBy);
      kw(kLimit);
      kw(kEos);
      break;
    case Phase::kAfterGroup:
      kw(kHaving);
      kw(kOrderBy);
      kw(kLimit);
      kw(kEos);
      break;
    case Phase::kAfterHaving:
      kw(kOrderBy);
      kw(kLimit);
      kw(kEos);
      break;
    case Phase::kOrderDirection:
      kw(kAsc);
      kw(kDesc);
      break;
    case Phase::kAfterOrder:
      kw(kLimit);
      kw(kEos);
      break;
    case Phase::kDone:
      break;
  }
  return a;
}

void Machine::apply(int action) {
  const std::vector<char> a = allowed();
  if (action < 0 || action >= size() || !a[static_cast<std::size_t>(action)]) {
    throw ModelError("illegal grammar action " + std::to_string(action));
  }
  switch (phase_) {
    case Phase::kFromTable:
      t1_ = action - kNumKeywords;
      phase_ = Phase::kJoinChoice;
      return;
    case Phase::kJoinChoice:
      phase_ = action == kJoin ? Phase::kJoinTable : Phase::kSelect;
      return;
    case Phase::kJoinTable:
      t2_ = action - kNumKeywords;
      phase_ = Phase::kSelect;
      return;
    case Phase::kSelect:
      phase_ = Phase::kSelectAgg;
      return;
    case Phase::kSelectAgg:
      agg_ = action;
      phase_ = Phase::kSelectColumn;
      return;
    case Phase::kSelectColumn:
      ++items_;
      phase_ = Phase::kAfterSelect;
      return;
    case Phase::kWhereColumn:
      phase_ = Phase::kWhereOp;
      return;
    case Phase::kWhereOp:
      ++predicates_;
      phase_ = Phase::kAfterWhere;
      return;
    case Phase::kGroupColumn:
      phase_ = Phase::kAfterGroup;
      return;
    case Phase::kHavingAgg:
      agg_ = action;
      phase_ = Phase::kHavingColumn;
      return;
    case Phase::kHavingColumn:
      phase_ = Phase::kHavingOp;
      return;
    case Phase::kHavingOp:
      phase_ = Phase::kAfterHaving;
      return;
    case Phase::kOrderAgg:
      agg_ = action;
      phase_ = Phase::kOrderColumn;
      return;
    case Phase::kOrderColumn:
      phase_ = Phase::kOrderDirection;
      return;
    case Phase::kOrderDirection:
      phase_ = Phase::kAfterOrder;
      return;
    default:
      break;
  }
  switch (action) {
    case kMore:
      phase_ = Phase::kSelectAgg;
      break;
    case kWhere:
    case kAnd:
    case kOr:
      phase_ = Phase::kWhereColumn;
      break;
    case kGroupBy:
      phase_ = Phase::kGroupColumn;
      break;
    case kHaving:
      phase_ = Phase::kHavingAgg;
      break;
    case kOrderBy:
      phase_ = Phase::kOrderAgg;
      break;
    case kLimit:
    case kEos:
      phase_ = Phase::kDone;
      break;
    default:
      throw ModelError("unexpected grammar action " + std::to_string(action));
  }
}

std::vector<char> allowed_actions(const std::vector<int>& prefix, const SchemaGraph& schema) {
  Machine m(schema);
  for (int a : prefix) m.apply(a);
  return m.allowed();
}

bool is_complete(const std::vector<int>& actions, const SchemaGraph& schema) {
  Machine m(schema);
  try {
    for (int a : actions) m.apply(a);
  } catch (const ModelError&) {
    return false;
  }
  return m.done();
}

namespace {

class Linearizer {
 public:
  explicit Linearizer(const SchemaGraph& s) : s_(s) {}

  std::optional<std::vector<int>> run(const std::string& text) {
    sql::Query q;
    try {
      q = sql::parse(text);
    } catch (const SqlError&) {
      return std::nullopt;
    }
    sql::resolve_aliases(q);
    if (q.rhs) return std::nullopt;
    const sql::SelectCore& c = q.core;
    if (c.from.subquery || c.joins.size() > 1) return std::nullopt;
    const auto t1 = s_.find_table(c.from.table);
    if (!t1) return std::nullopt;
    t1_ = *t1;
    out_.push_back(kNumKeywords + t1_);
    if (c.joins.empty()) {
      out_.push_back(kNoJoin);
    } else {
      if (c.joins[0].ref.subquery) return std::nullopt;
      const auto t2 = s_.find_table(c.joins[0].ref.table);
      if (!t2 || *t2 == t1_) return std::nullopt;
      t2_ = *t2;
      out_.push_back(kJoin);
      out_.push_back(kNumKeywords + t2_);
    }
    out_.push_back(c.distinct ? kSelectDistinct : kSelect);
    for (std::size_t i = 0; i < c.items.size(); ++i) {
      if (i) out_.push_back(kMore);
      if (!value(c.items[i])) return std::nullopt;
    }
    if (c.where) {
      out_.push_back(kWhere);
      if (!condition(*c.where, false)) return std::nullopt;
    }
    if (c.group_by.size() > 1) return std::nullopt;
    if (!c.group_by.empty()) {
      out_.push_back(kGroupBy);
      const auto col = column(c.group_by[0]);
      if (!col || *col == star()) return std::nullopt;
      out_.push_back(*col);
      if (c.having) {
        out_.push_back(kHaving);
        if (!condition(*c.having, true)) return std::nullopt;
      }
    } else if (c.having) {
      return std::nullopt;
    }
    if (c.order_by.size() > 1) return std::nullopt;
    if (!c.order_by.empty()) {
      out_.push_back(kOrderBy);
      if (!value(c.order_by[0].expr)) return std::nullopt;
      out_.push_back(c.order_by[0].descending ? kDesc : kAsc);
    }
    out_.push_back(c.limit ? kLimit : kEos);
    if (!is_complete(out_, s_)) return std::nullopt;
    return out_;
  }

 private:
  int star() const {
    return kNumKeywords + static_cast<int>(s_.num_tables() + s_.num_columns());
  }

  std::optional<int> column(const sql::ColumnRef& ref) const {
    if (ref.is_star()) return star();
    std::vector<int> scope = {t1_};
    if (t2_ >= 0) scope.push_back(t2_);
    std::optional<int> found;
    for (int t : scope) {
      if (!ref.qualifier.empty() && to_lower(ref.qualifier) != to_lower(s_.tables()[static_cast<std::size_t>(t)])) {
        continue;
      }
      if (const auto idx = s_.find_column(t, ref.column)) {
        if (found) return std::nullopt;
        found = *idx;
      }
    }
    if (!found) return std::nullopt;
    return kNumKeywords + static_cast<int>(s_.num_tables()) + *found;
  }

  bool value(const sql::ValueExpr& v) {
    if (v.kind != sql::ValueExpr::Kind::kColumn || v.distinct) return false;
    int agg = -1;
    for (std::size_t i = 0; i < kAggs.size(); ++i) {
      if (v.agg == kAggs[i]) agg = kAggNone + static_cast<int>(i);
    }
    if (agg < 0) return false;
    const auto col = column(v.column);
    if (!col) return false;
    out_.push_back(agg);
    out_.push_back(*col);
    return true;
  }

  bool condition(const sql::Condition& c, bool having) {
    if (having && c.terms.size() != 1) return false;
    for (std::size_t i = 0; i < c.terms.size(); ++i) {
      if (i) out_.push_back(c.connectors[i - 1] == "or" ? kOr : kAnd);
      const sql::Predicate& p = c.terms[i];
      if (p.negated || p.rhs2 || p.rhs.kind != sql::ValueExpr::Kind::kLiteral) return false;
      if (having) {
        if (p.lhs.agg.empty() || !value(p.lhs)) return false;
      } else {
        if (!p.lhs.agg.empty() || p.lhs.kind != sql::ValueExpr::Kind::kColumn) return false;
        const auto col = column(p.lhs.column);
        if (!col || *col == star()) return false;
        out_.push_back(*col);
      }
      int op = -1;
      for (std::size_t k = 0; k < kOps.size(); ++k) {
        if (p.op == kOps[k]) op = kOpEq + static_cast<int>(k);
      }
      if (op < 0) return false;
      out_.push_back(op);
    }
    return true;
  }

  const SchemaGraph& s_;
  int t1_ = -1;
  int t2_ = -1;
  std::vector<int> out_;
};

}  // namespace

std::optional<std::vector<int>> linearize(const std::string& sql, const SchemaGraph& schema) {
  return Linearizer(schema).run(sql);
}

std::string render(const std::vector<int>& actions, const SchemaGraph& schema) {
  const int tables = static_cast<int>(schema.num_tables());
  const int columns = static_cast<int>(schema.num_columns());
  auto col = [&](int a) -> std::string {
    const int c = a - kNumKeywords - tables;
    if (c == columns) return "*";
    const Column& column = schema.columns()[static_cast<std::size_t>(c)];
    return schema.tables()[static_cast<std::size_t>(column.table)] + "." + column.name;
  };
  auto agg = [&](int k, const std::string& c) {
    if (k == kAggNone) return c;
    return std::string(kAggs[static_cast<std::size_t>(k - kAggNone)]) + "(" + c + ")";
  };
  auto op = [&](int k) {
    return k == kOpLike ? std::string("LIKE") : std::string(kNames[static_cast<std::size_t>(k)]);
  };

  Machine m(schema);
  std::string select, from, where, group, having, order, limit;
  int pending_agg = kAggNone;
  int t1 = -1;
  std::size_t i = 0;
  auto next = [&]() {
    if (i >= actions.size()) throw ModelError("incomplete action sequence");
    const int a = actions[i++];
    const Machine::Phase before = m.phase();
    m.apply(a);
    return std::make_pair(before, a);
  };
  while (!m.done()) {
    const auto [phase, a] = next();
    switch (phase) {
      case Machine::Phase::kFromTable:
        t1 = a - kNumKeywords;
        from = schema.tables()[static_cast<std::size_t>(t1)];
        break;
      case Machine::Phase::kJoinTable: {
        const int t2 = a - kNumKeywords;
        const auto on = *schema.join_columns(t1, t2);
        from += " JOIN " + schema.tables()[static_cast<std::size_t>(t2)] + " ON " +
                col(kNumKeywords + tables + on.first) + " = " + col(kNumKeywords + tables + on.second);
        break;
      }
      case Machine::Phase::kSelect:
        select = a == kSelectDistinct ? "SELECT DISTINCT " : "SELECT ";
        break;
      case Machine::Phase::kSelectAgg:
      case Machine::Phase::kHavingAgg:
      case Machine::Phase::kOrderAgg:
        pending_agg = a;
        break;
      case Machine::Phase::kSelectColumn:
        if (select.back() != ' ') select += ", ";
        select += agg(pending_agg, col(a));
        break;
      case Machine::Phase::kWhereColumn:
        where += col(a);
        break;
      case Machine::Phase::kWhereOp:
        where += " " + op(a) + " 'value'";
        break;
      case Machine::Phase::kGroupColumn:
        group = " GROUP BY " + col(a);
        break;
      case Machine::Phase::kHavingColumn:
        having = " HAVING " + agg(pending_agg, col(a));
        break;
      case Machine::Phase::kHavingOp:
        having += " " + op(a) + " 'value'";
        break;
      case Machine::Phase::kOrderColumn:
        order = " ORDER BY " + agg(pending_agg, col(a));
        break;
      case Machine::Phase::kOrderDirection:
        order += a == kDesc ? " DESC" : " ASC";
        break;
      default:
        if (a == kAnd || a == kOr) where += a == kAnd ? " AND " : " OR ";
        if (a == kWhere) where = " WHERE ";
        if (a == kLimit) limit = " LIMIT 1";
        break;
    }
  }
  if (i != actions.size()) throw ModelError("trailing actions after completion");
  return select + " FROM " + from + where + group + having + order + limit;
}

}  // namespace sqlaug::grammar
