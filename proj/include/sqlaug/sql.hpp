#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sqlaug/common.hpp"

/// A small SQL front end covering the Spider-style SELECT subset: set
/// operations, joins with ON equalities, nested subqueries in FROM/WHERE/HAVING,
/// aggregates, GROUP BY/HAVING/ORDER BY/LIMIT.
namespace sqlaug::sql {

enum class TokenKind { kIdent, kNumber, kString, kSymbol, kEnd };

struct Token {
  TokenKind kind = TokenKind::kEnd;
  std::string text;
};

/// Splits a query into tokens. Throws SqlError on unterminated strings or
/// unknown characters.
std::vector<Token> tokenize(std::string_view sql);

/// Owning pointer with deep-copy semantics, so AST nodes stay regular values.
template <typename T>
class Box {
 public:
  Box() = default;
  explicit Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}
  Box(const Box& other) : ptr_(other.ptr_ ? std::make_unique<T>(*other.ptr_) : nullptr) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    if (this != &other) ptr_ = other.ptr_ ? std::make_unique<T>(*other.ptr_) : nullptr;
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;
  ~Box() = default;

  explicit operator bool() const { return static_cast<bool>(ptr_); }
  T& operator*() { return *ptr_; }
  const T& operator*() const { return *ptr_; }
  T* operator->() { return ptr_.get(); }
  const T* operator->() const { return ptr_.get(); }
  T* get() { return ptr_.get(); }
  const T* get() const { return ptr_.get(); }

 private:
  std::unique_ptr<T> ptr_;
};

struct Query;

struct ColumnRef {
  std::string qualifier;  // table name or alias; empty when unqualified
  std::string column;     // "*" for the star column
  bool is_star() const { return column == "*"; }
};

/// One operand: an (optionally aggregated) column, a literal, or a subquery.
struct ValueExpr {
  enum class Kind { kColumn, kLiteral, kSubquery };
  Kind kind = Kind::kColumn;
  std::string agg;  // "", "count", "sum", "avg", "min", "max"
  bool distinct = false;
  ColumnRef column;
  std::string literal;
  Box<Query> subquery;
};

struct Predicate {
  bool negated = false;
  ValueExpr lhs;
  std::string op;  // = != < > <= >= like in between
  ValueExpr rhs;
  std::optional<ValueExpr> rhs2;  // upper bound for between
};

struct Condition {
  std::vector<Predicate> terms;
  std::vector<std::string> connectors;  // "and" / "or", size terms-1
};

struct TableRef {
  std::string table;
  std::string alias;
  Box<Query> subquery;
};

struct JoinClause {
  TableRef ref;
  std::vector<std::pair<ColumnRef, ColumnRef>> on;
};

struct OrderItem {
  ValueExpr expr;
  bool descending = false;
  bool explicit_direction = false;
};

struct SelectCore {
  bool distinct = false;
  std::vector<ValueExpr> items;
  TableRef from;
  std::vector<JoinClause> joins;
  std::optional<Condition> where;
  std::vector<ColumnRef> group_by;
  std::optional<Condition> having;
  std::vector<OrderItem> order_by;
  std::optional<std::string> limit;
};

struct Query {
  SelectCore core;
  std::string set_op;  // "", "union", "intersect", "except"
  Box<Query> rhs;
};

/// Parses a query; throws SqlError naming the offending token or construct.
Query parse(std::string_view sql);

struct PrintOptions {
  bool mask_tables = false;
  bool mask_columns = false;
  bool mask_values = false;
  bool lowercase = false;        // keywords and identifiers
  bool drop_aliases = false;     // omit "AS alias" in FROM/JOIN
  bool sort_conjuncts = false;   // sort pure-AND conditions and ON pairs
  bool subquery_placeholder = false;  // print nested queries as _SUB_
  bool explicit_asc = false;     // print ASC on ORDER BY items without a direction
};

inline constexpr std::string_view kTablePlaceholder = "_TAB_";
inline constexpr std::string_view kColumnPlaceholder = "_COL_";
inline constexpr std::string_view kValuePlaceholder = "_VAL_";
inline constexpr std::string_view kSubqueryPlaceholder = "_SUB_";

std::string to_string(const Query& q, const PrintOptions& opts = {});
std::string to_string(const SelectCore& core, const PrintOptions& opts = {});

/// Rewrites alias qualifiers to table names and qualifies bare columns when
/// the scope has a single table. Aliases are removed from TableRefs.
void resolve_aliases(Query& q);

/// Visits every column reference in textual order. The callback receives the
/// reference and the chain of enclosing SELECT scopes, innermost last.
template <typename Fn>
void for_each_column(const Query& q, Fn&& fn);

namespace detail {
void visit_columns(const Query& q, std::vector<const SelectCore*>& scopes,
                   const std::function<void(const ColumnRef&, const std::vector<const SelectCore*>&)>& fn);
}

template <typename Fn>
void for_each_column(const Query& q, Fn&& fn) {
  std::vector<const SelectCore*> scopes;
  detail::visit_columns(q, scopes, std::function<void(const ColumnRef&,
                                                       const std::vector<const SelectCore*>&)>(fn));
}

/// Names of every base table referenced anywhere in the query, lowercased
/// and in first-appearance order.
std::vector<std::string> referenced_tables(const Query& q);

/// Collects the cores of a query split at set operators and subqueries, in
/// textual pre-order. Each entry is printed with nested queries replaced by
/// _SUB_ when opts.subquery_placeholder is set.
std::vector<std::string> split_parts(const Query& q, const PrintOptions& opts);

}  // namespace sqlaug::sql
