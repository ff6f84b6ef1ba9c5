#include "sqlaug/toy.hpp"

#include <sqlite3.h>

#include <filesystem>
#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>

#include "sqlaug/common.hpp"

namespace sqlaug {

namespace {

enum class Role { kId, kLabel, kCategory, kNumber, kForeign };

struct ToyColumn {
  std::string name;
  Role role;
  std::vector<std::string> values;  // text pool for labels and categories
  int lo = 0;
  int hi = 0;  // numeric range
};

struct ToyTable {
  std::string name;
  std::string plural;
  std::vector<ToyColumn> columns;
};

struct ToyDomain {
  std::string db_id;
  ToyTable parent;
  ToyTable child;  // last column references parent.columns[0]
};

ToyColumn id(const std::string& n) { return {n, Role::kId, {}, 0, 0}; }
ToyColumn label(const std::string& n, std::vector<std::string> v) { return {n, Role::kLabel, std::move(v), 0, 0}; }
ToyColumn cat(const std::string& n, std::vector<std::string> v) { return {n, Role::kCategory, std::move(v), 0, 0}; }
ToyColumn num(const std::string& n, int lo, int hi) { return {n, Role::kNumber, {}, lo, hi}; }
ToyColumn fk(const std::string& n) { return {n, Role::kForeign, {}, 0, 0}; }

const std::vector<std::string> kPeople = {"Alice", "Bruno", "Chen", "Dara", "Emeka", "Farah", "Goran", "Hana",
                                          "Ivan", "Julia", "Kofi", "Lena", "Mateo", "Nadia", "Omar", "Priya"};

std::vector<ToyDomain> domains() {
  return {
      {"concert_hall",
       {"singer", "singers",
        {id("singer_id"), label("name", kPeople), cat("country", {"France", "Japan", "Brazil", "Canada", "Kenya"}),
         num("age", 18, 70), cat("gender", {"female", "male", "nonbinary"}), num("net_worth", 1, 900)}},
       {"concert", "concerts",
        {id("concert_id"), label("concert_name", {"Spring Gala", "Night Lights", "Echoes", "Summer Fest", "Aurora"}),
         cat("theme", {"pop", "rock", "jazz", "folk"}), num("year", 2000, 2023), cat("venue", {"Arena", "Stadium", "Theatre", "Park"}), num("attendance", 100, 90000), fk("singer_id")}}},
      {"library",
       {"author", "authors",
        {id("author_id"), label("name", kPeople), cat("nationality", {"Irish", "Chilean", "Korean", "Polish"}),
         num("birth_year", 1900, 1995), cat("gender", {"female", "male"}), num("awards", 0, 12)}},
       {"book", "books",
        {id("book_id"), label("title", {"Dust", "Harbor", "Iron Sky", "Paper Moon", "Quiet Hours", "Red Lake"}),
         cat("genre", {"mystery", "poetry", "history", "fantasy"}), num("pages", 80, 900), cat("language", {"English", "Spanish", "German", "Korean"}), num("price", 5, 80), fk("author_id")}}},
      {"company",
       {"department", "departments",
        {id("department_id"), label("name", {"Sales", "Research", "Legal", "Support", "Finance"}),
         cat("city", {"Lyon", "Osaka", "Denver", "Accra"}), num("budget", 10, 500), cat("division", {"north", "south", "east", "west"}), num("headcount", 3, 400)}},
       {"employee", "employees",
        {id("employee_id"), label("name", kPeople), cat("role", {"manager", "engineer", "analyst", "clerk"}),
         num("salary", 20000, 150000), num("age", 20, 65), cat("contract", {"permanent", "temporary", "intern"}), fk("department_id")}}},
      {"school",
       {"teacher", "teachers",
        {id("teacher_id"), label("name", kPeople), cat("subject", {"math", "biology", "music", "history"}),
         num("experience", 1, 40), cat("gender", {"female", "male"}), num("salary", 30000, 90000)}},
       {"course", "courses",
        {id("course_id"), label("course_name", {"Algebra", "Genetics", "Choir", "Ancient Rome", "Calculus"}),
         cat("level", {"beginner", "intermediate", "advanced"}), num("credits", 1, 6), cat("semester", {"fall", "spring", "summer"}), num("enrollment", 5, 300), fk("teacher_id")}}},
      {"airline",
       {"airport", "airports",
        {id("airport_id"), label("name", {"Northfield", "Bayview", "Redhill", "Lakeside", "Stonegate"}),
         cat("country", {"Spain", "Egypt", "Chile", "Norway"}), num("runways", 1, 6), cat("region", {"coastal", "inland", "island"}), num("passengers", 1000, 90000)}},
       {"flight", "flights",
        {id("flight_id"), label("flight_number", {"AB12", "CX300", "DL45", "EK7", "FR900"}),
         cat("status", {"on time", "delayed", "cancelled"}), num("distance", 200, 9000), num("price", 50, 1500),
         cat("aircraft", {"A320", "B737", "E190"}), fk("airport_id")}}},
      {"restaurant",
       {"restaurant", "restaurants",
        {id("restaurant_id"), label("name", {"Olive", "Saffron", "Basil", "Juniper", "Nori"}),
         cat("cuisine", {"Italian", "Thai", "Mexican", "Indian"}), num("rating", 1, 5), cat("district", {"old town", "harbor", "market"}), num("seats", 10, 200)}},
       {"dish", "dishes",
        {id("dish_id"), label("dish_name", {"Curry", "Tacos", "Risotto", "Pad Thai", "Gnocchi"}),
         cat("category", {"starter", "main", "dessert"}), num("price", 3, 40), num("calories", 100, 1200),
         cat("spice", {"mild", "medium", "hot"}), fk("restaurant_id")}}},
      {"museum_visit",
       {"museum", "museums",
        {id("museum_id"), label("name", {"Harbor Hall", "Stone Gallery", "City Annex", "Old Mill"}),
         cat("city", {"Porto", "Kyoto", "Quebec", "Nairobi"}), num("open_year", 1850, 2015), num("staff", 5, 300), cat("type", {"art", "science", "history"})}},
       {"exhibit", "exhibits",
        {id("exhibit_id"), label("title", {"Tides", "Bronze Age", "Light Works", "Maps", "Silk Roads"}),
         cat("theme", {"science", "art", "history", "design"}), num("visitors", 100, 90000),
         num("ticket_price", 0, 60), cat("room", {"east wing", "west wing", "atrium"}), fk("museum_id")}}},
  };
}

std::string human(const std::string& n) { return human_name(n); }

SchemaGraph to_schema(const ToyDomain& d) {
  std::vector<Column> cols;
  std::set<int> pks;
  std::set<std::pair<int, int>> fks;
  for (int t = 0; t < 2; ++t) {
    const ToyTable& table = t == 0 ? d.parent : d.child;
    for (const auto& c : table.columns) {
      const ColumnType type = (c.role == Role::kLabel || c.role == Role::kCategory) ? ColumnType::kText
                                                                                     : ColumnType::kNumber;
      if (c.role == Role::kId) pks.insert(static_cast<int>(cols.size()));
      if (c.role == Role::kForeign) fks.insert({static_cast<int>(cols.size()), 0});
      cols.push_back({t, c.name, "", type});
    }
  }
  return SchemaGraph(d.db_id, {d.parent.name, d.child.name}, cols, pks, fks);
}

class Rand {
 public:
  explicit Rand(std::uint64_t seed) : rng_(seed) {}
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
  int range(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::size_t>(hi - lo + 1))); }
  template <typename T>
  const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }
  std::size_t weighted(const std::vector<double>& w) {
    double total = 0.0;
    for (double x : w) total += x;
    double r = static_cast<double>(rng_() >> 11) * 0x1.0p-53 * total;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (r < w[i]) return i;
      r -= w[i];
    }
    return w.size() - 1;
  }

 private:
  std::mt19937_64 rng_;
};

std::vector<const ToyColumn*> with_role(const ToyTable& t, std::initializer_list<Role> roles) {
  std::vector<const ToyColumn*> out;
  for (const auto& c : t.columns) {
    for (Role r : roles) {
      if (c.role == r) out.push_back(&c);
    }
  }
  return out;
}

constexpr double kColumnSkew = 2.0;

// Annotators return to the same few columns: the i-th candidate in
// declaration order gets weight 1/(i+1)^2.
const ToyColumn& favoured(Rand& r, const std::vector<const ToyColumn*>& cands) {
  std::vector<double> w;
  for (std::size_t i = 0; i < cands.size(); ++i) w.push_back(std::pow(static_cast<double>(i + 1), -kColumnSkew));
  return *cands[r.weighted(w)];
}

// Projected columns favour labels, the way real questions mostly ask for names.
const ToyColumn& pick_projection(Rand& r, const ToyTable& t, const ToyColumn* avoid = nullptr) {
  std::vector<const ToyColumn*> cands;
  for (Role role : {Role::kLabel, Role::kCategory, Role::kNumber}) {
    for (const auto& c : t.columns) {
      if (&c != avoid && c.role == role) cands.push_back(&c);
    }
  }
  return favoured(r, cands);
}

struct Instance {
  std::vector<std::string> questions;
  std::string sql;
};

std::string fill(std::string s, const std::map<std::string, std::string>& vars) {
  for (const auto& [k, v] : vars) {
    const std::string key = "{" + k + "}";
    for (std::size_t p = s.find(key); p != std::string::npos; p = s.find(key, p + v.size())) {
      s.replace(p, key.size(), v);
    }
  }
  return s;
}

using Template = std::function<Instance(Rand&, const ToyDomain&, const ToyTable&)>;

std::vector<std::pair<double, Template>> templates() {
  std::vector<std::pair<double, Template>> out;
  out.push_back({1.0, [](Rand&, const ToyDomain&, const ToyTable& t) {
                   const std::map<std::string, std::string> v = {{"T", t.plural}};
                   return Instance{{fill("How many {T} are there ?", v), fill("Count the number of {T} .", v),
                                    fill("What is the total number of {T} ?", v)},
                                   "SELECT count(*) FROM " + t.name};
                 }});
  out.push_back({2.0, [](Rand& r, const ToyDomain&, const ToyTable& t) {
                   const ToyColumn& x = pick_projection(r, t);
                   const std::map<std::string, std::string> v = {{"T", t.plural}, {"x", human(x.name)}};
                   return Instance{{fill("List the {x} of all {T} .", v), fill("What is the {x} of each of the {T} ?", v),
                                    fill("Show the {x} of every one of the {T} .", v)},
                                   "SELECT " + x.name + " FROM " + t.name};
                 }});
  out.push_back({1.0, [](Rand& r, const ToyDomain&, const ToyTable& t) {
                   const ToyColumn& x = pick_projection(r, t);
                   const ToyColumn& y = pick_projection(r, t, &x);
                   const std::map<std::string, std::string> v = {
                       {"T", t.plural}, {"x", human(x.name)}, {"y", human(y.name)}};
                   return Instance{{fill("What are the {x} and {y} of all {T} ?", v),
                                    fill("Show the {x} and {y} of each of the {T} .", v)},
                                   "SELECT " + x.name + ", " + y.name + " FROM " + t.name};
                 }});
  out.push_back({2.0, [](Rand& r, const ToyDomain&, const ToyTable& t) {
                   const ToyColumn& c = favoured(r, with_role(t, {Role::kCategory}));
                   const ToyColumn& x = pick_projection(r, t, &c);
                   const std::string val = r.pick(c.values);
                   const std::map<std::string, std::string> v = {
                       {"T", t.plural}, {"x", human(x.name)}, {"c", human(c.name)}, {"v", val}};
                   return Instance{{fill("What is the {x} of the {T} whose {c} is {v} ?", v),
                                    fill("Show the {x} of {T} with {c} {v} .", v),
                                    fill("Find the {x} of the {T} that have {v} as {c} .", v)},
                                   "SELECT " + x.name + " FROM " + t.name + " WHERE " + c.name + " = '" + val + "'"};
                 }});
  out.push_back({2.0, [](Rand& r, const ToyDomain&, const ToyTable& t) {
                   const ToyColumn& n = favoured(r, with_role(t, {Role::kNumber}));
                   const ToyColumn& x = pick_projection(r, t, &n);
                   const int k = r.range(n.lo, n.hi);
                   const bool gt = r.below(2) == 0;
                   const std::map<std::string, std::string> v = {{"T", t.plural},
                                                                 {"x", human(x.name)},
                                                                 {"n", human(n.name)},
                                                                 {"k", std::to_string(k)},
                                                                 {"cmp", gt ? "greater" : "less"},
                                                                 {"more", gt ? "more" : "less"}};
                   return Instance{{fill("Which {T} have {n} {cmp} than {k} ? List their {x} .", v),
                                    fill("Show the {x} of {T} whose {n} is {more} than {k} .", v)},
                                   "SELECT " + x.name + " FROM " + t.name + " WHERE " + n.name + (gt ? " > " : " < ") +
                                       std::to_string(k)};
                 }});
  out.push_back({1.5, [](Rand& r, const ToyDomain&, const ToyTable& t) {
                   const ToyColumn& n = favoured(r, with_role(t, {Role::kNumber}));
                   static const std::vector<std::pair<std::string, std::string>> aggs = {
                       {"avg", "average"}, {"max", "maximum"}, {"min", "minimum"}, {"sum", "total"}};
                   const auto& [fn, word] = r.pick(aggs);
                   const std::map<std::string, std::string> v = {{"T", t.plural}, {"n", human(n.name)}, {"a", word}};
                   return Instance{{fill("What is the {a} {n} of all {T} ?", v), fill("Find the {a} {n} of the {T} .", v),
                                    fill("Give me the {a} {n} across {T} .", v)},
                                   "SELECT " + fn + "(" + n.name + ") FROM " + t.name};
                 }});
  out.push_back({0.7, [](Rand& r, const ToyDomain&, const ToyTable& t) {
                   const ToyColumn& n = favoured(r, with_role(t, {Role::kNumber}));
                   const std::map<std::string, std::string> v = {{"T", t.plural}, {"n", human(n.name)}};
                   return Instance{{fill("What are the maximum and minimum {n} of {T} ?", v),
                                    fill("Show the largest and smallest {n} among the {T} .", v)},
                                   "SELECT max(" + n.name + "), min(" + n.name + ") FROM " + t.name};
                 }});
  out.push_back({1.5, [](Rand& r, const ToyDomain&, const ToyTable& t) {
                   const ToyColumn& c = favoured(r, with_role(t, {Role::kCategory}));
                   const std::map<std::string, std::string> v = {{"T", t.plural}, {"c", human(c.name)}};
                   return Instance{{fill("Show each {c} and the number of {T} with that {c} .", v),
                                    fill("How many {T} are there for each {c} ?", v),
                                    fill("Count the {T} in each {c} .", v)},
                                   "SELECT " + c.name + ", count(*) FROM " + t.name + " GROUP BY " + c.name};
                 }});
  out.push_back({1.0, [](Rand& r, const ToyDomain&, const ToyTable& t) {
                   const ToyColumn& c = favoured(r, with_role(t, {Role::kCategory}));
                   const ToyColumn& n = favoured(r, with_role(t, {Role::kNumber}));
                   const std::map<std::string, std::string> v = {{"T", t.plural}, {"c", human(c.name)}, {"n", human(n.name)}};
                   return Instance{{fill("What is the average {n} of {T} for each {c} ?", v),
                                    fill("Show each {c} with the average {n} of its {T} .", v)},
                                   "SELECT " + c.name + ", avg(" + n.name + ") FROM " + t.name + " GROUP BY " + c.name};
                 }});
  out.push_back({1.5, [](Rand& r, const ToyDomain&, const ToyTable& t) {
                   const ToyColumn& n = favoured(r, with_role(t, {Role::kNumber}));
                   const ToyColumn& x = pick_projection(r, t, &n);
                   const bool desc = r.below(2) == 0;
                   const std::map<std::string, std::string> v = {
                       {"T", t.plural}, {"x", human(x.name)}, {"n", human(n.name)}, {"d", desc ? "descending" : "ascending"}};
                   return Instance{{fill("List the {x} of all {T} in {d} order of {n} .", v),
                                    fill("Show the {x} of the {T} sorted by {n} in {d} order .", v)},
                                   "SELECT " + x.name + " FROM " + t.name + " ORDER BY " + n.name + (desc ? " DESC" : " ASC")};
                 }});
  out.push_back({1.5, [](Rand& r, const ToyDomain&, const ToyTable& t) {
                   const ToyColumn& n = favoured(r, with_role(t, {Role::kNumber}));
                   const ToyColumn& x = pick_projection(r, t, &n);
                   const bool high = r.below(2) == 0;
                   const std::map<std::string, std::string> v = {{"T", t.name},
                                                                 {"x", human(x.name)},
                                                                 {"n", human(n.name)},
                                                                 {"hi", high ? "highest" : "lowest"},
                                                                 {"big", high ? "largest" : "smallest"}};
                   return Instance{{fill("What is the {x} of the {T} with the {hi} {n} ?", v),
                                    fill("Which {T} has the {big} {n} ? Give its {x} .", v)},
                                   "SELECT " + x.name + " FROM " + t.name + " ORDER BY " + n.name +
                                       (high ? " DESC" : " ASC") + " LIMIT 1"};
                 }});
  out.push_back({1.0, [](Rand& r, const ToyDomain&, const ToyTable& t) {
                   const ToyColumn& c = favoured(r, with_role(t, {Role::kCategory, Role::kLabel}));
                   const std::map<std::string, std::string> v = {{"T", t.plural}, {"c", human(c.name)}};
                   return Instance{{fill("What are the distinct {c} values of the {T} ?", v),
                                    fill("List all different {c} of {T} .", v)},
                                   "SELECT DISTINCT " + c.name + " FROM " + t.name};
                 }});
  out.push_back({1.0, [](Rand& r, const ToyDomain&, const ToyTable& t) {
                   const ToyColumn& c = favoured(r, with_role(t, {Role::kCategory}));
                   const int k = r.range(1, 4);
                   const std::map<std::string, std::string> v = {{"T", t.plural}, {"c", human(c.name)}, {"k", std::to_string(k)}};
                   return Instance{{fill("Which {c} has more than {k} {T} ?", v),
                                    fill("Show the {c} values shared by more than {k} {T} .", v)},
                                   "SELECT " + c.name + " FROM " + t.name + " GROUP BY " + c.name +
                                       " HAVING count(*) > " + std::to_string(k)};
                 }});
  out.push_back({1.0, [](Rand& r, const ToyDomain&, const ToyTable& t) {
                   const ToyColumn& c = favoured(r, with_role(t, {Role::kCategory}));
                   const ToyColumn& n = favoured(r, with_role(t, {Role::kNumber}));
                   const ToyColumn& x = pick_projection(r, t, &c);
                   const std::string val = r.pick(c.values);
                   const int k = r.range(n.lo, n.hi);
                   const bool conj = r.below(2) == 0;
                   const std::map<std::string, std::string> v = {{"T", t.plural}, {"x", human(x.name)},
                                                                 {"c", human(c.name)}, {"v", val},
                                                                 {"n", human(n.name)}, {"k", std::to_string(k)},
                                                                 {"op", conj ? "and" : "or"}};
                   return Instance{{fill("Show the {x} of {T} whose {c} is {v} {op} whose {n} is above {k} .", v),
                                    fill("Find the {x} of the {T} with {c} {v} {op} {n} greater than {k} .", v)},
                                   "SELECT " + x.name + " FROM " + t.name + " WHERE " + c.name + " = '" + val + "' " +
                                       (conj ? "AND " : "OR ") + n.name + " > " + std::to_string(k)};
                 }});
  // joins: table argument ignored, parent -> child over the foreign key
  out.push_back({1.5, [](Rand& r, const ToyDomain& d, const ToyTable&) {
                   const ToyColumn& x = pick_projection(r, d.parent);
                   const ToyColumn& y = pick_projection(r, d.child);
                   const std::string on = "T1." + d.parent.columns[0].name + " = T2." + d.child.columns.back().name;
                   const std::map<std::string, std::string> v = {{"P", d.parent.name}, {"C", d.child.name},
                                                                 {"Cs", d.child.plural}, {"x", human(x.name)},
                                                                 {"y", human(y.name)}};
                   return Instance{{fill("Show the {P} {x} and the {C} {y} for all {Cs} .", v),
                                    fill("For each {C} , list its {y} and the {x} of its {P} .", v)},
                                   "SELECT T1." + x.name + ", T2." + y.name + " FROM " + d.parent.name + " AS T1 JOIN " +
                                       d.child.name + " AS T2 ON " + on};
                 }});
  out.push_back({1.5, [](Rand& r, const ToyDomain& d, const ToyTable&) {
                   const ToyColumn& c = favoured(r, with_role(d.parent, {Role::kCategory}));
                   const ToyColumn& y = pick_projection(r, d.child);
                   const std::string val = r.pick(c.values);
                   const std::string on = "T1." + d.parent.columns[0].name + " = T2." + d.child.columns.back().name;
                   const std::map<std::string, std::string> v = {{"P", d.parent.name}, {"Ps", d.parent.plural},
                                                                 {"Cs", d.child.plural}, {"c", human(c.name)},
                                                                 {"v", val}, {"y", human(y.name)}};
                   return Instance{{fill("What is the {y} of {Cs} whose {P} has {c} {v} ?", v),
                                    fill("List the {y} of the {Cs} belonging to {Ps} with {c} {v} .", v)},
                                   "SELECT T2." + y.name + " FROM " + d.parent.name + " AS T1 JOIN " + d.child.name +
                                       " AS T2 ON " + on + " WHERE T1." + c.name + " = '" + val + "'"};
                 }});
  out.push_back({1.0, [](Rand& r, const ToyDomain& d, const ToyTable&) {
                   const ToyColumn& x = pick_projection(r, d.parent);
                   const std::string on = "T1." + d.parent.columns[0].name + " = T2." + d.child.columns.back().name;
                   const std::map<std::string, std::string> v = {{"P", d.parent.name}, {"Cs", d.child.plural},
                                                                 {"x", human(x.name)}};
                   return Instance{{fill("Show each {P} {x} and the number of {Cs} it has .", v),
                                    fill("How many {Cs} does each {P} have ? Show the {P} {x} too .", v)},
                                   "SELECT T1." + x.name + ", count(*) FROM " + d.parent.name + " AS T1 JOIN " +
                                       d.child.name + " AS T2 ON " + on + " GROUP BY T1." + x.name};
                 }});
  return out;
}

constexpr double kMainTableShare = 0.75;
constexpr double kTemplateSkew = 1.2;
constexpr double kReuse = 0.5;

// Openers for re-asking a query already in the corpus.
const std::vector<std::string> kOpeners = {"", "Please ", "Quick question : ", "I would like to know : ",
                                           "For the report , ", "Tell me : "};

std::string lower_first(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
  return s;
}

std::vector<AnnotatedPair> make_pairs(const ToyDomain& d, int n, std::uint64_t seed) {
  Rand r(seed);
  const auto tmpl = templates();
  // Each domain has its own popular question types: templates are ranked
  // in a domain-specific order and damped by rank.
  std::vector<std::size_t> rank(tmpl.size());
  for (std::size_t i = 0; i < rank.size(); ++i) rank[i] = i;
  for (std::size_t i = rank.size(); i > 1; --i) std::swap(rank[i - 1], rank[r.below(i)]);
  std::vector<double> weights;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    weights.push_back(tmpl[i].first * std::pow(static_cast<double>(rank[i] + 1), -kTemplateSkew));
  }
  // Popular requests get asked again: with probability kReuse a pair re-asks
  // an earlier query picked in proportion to how often it was asked.
  std::vector<Instance> asked;
  std::vector<double> times;
  std::vector<AnnotatedPair> out;
  std::set<std::string> questions;
  for (int guard = 0; static_cast<int>(out.size()) < n && guard < 100000; ++guard) {
    std::size_t idx;
    if (!asked.empty() && r.weighted({kReuse, 1.0 - kReuse}) == 0) {
      idx = r.weighted(times);
    } else {
      const auto& f = tmpl[r.weighted(weights)].second;
      const ToyTable& t = r.weighted({kMainTableShare, 1.0 - kMainTableShare}) == 0 ? d.parent : d.child;
      asked.push_back(f(r, d, t));
      times.push_back(0.0);
      idx = asked.size() - 1;
    }
    const Instance& inst = asked[idx];
    const std::string& base = r.pick(inst.questions);
    const std::string& opener = r.pick(kOpeners);
    const std::string q = opener.empty() ? base : opener + lower_first(base);
    if (!questions.insert(q).second) continue;
    times[idx] += 1.0;
    out.push_back({q, inst.sql, d.db_id});
  }
  return out;
}

void check(sqlite3* db, int rc, const std::string& what) {
  if (rc != SQLITE_OK) throw Error(what + ": " + sqlite3_errmsg(db));
}

}  // namespace

std::vector<SchemaGraph> ToyCorpus::train_schemas() const {
  std::vector<SchemaGraph> out;
  for (const auto& s : schemas) {
    if (s.db_id() != zero_shot_domain) out.push_back(s);
  }
  return out;
}

std::vector<SchemaGraph> ToyCorpus::zero_shot_schemas() const {
  std::vector<SchemaGraph> out;
  for (const auto& s : schemas) {
    if (s.db_id() == zero_shot_domain) out.push_back(s);
  }
  return out;
}

ToyCorpus make_toy_corpus(const ToyConfig& config) {
  if (config.pairs_per_domain < 1) throw InvariantError("toy corpus: pairs_per_domain must be >= 1");
  ToyCorpus c;
  const auto ds = domains();
  for (std::size_t i = 0; i < ds.size(); ++i) {
    c.schemas.push_back(to_schema(ds[i]));
    auto pairs = make_pairs(ds[i], config.pairs_per_domain, derive_seed(config.seed, "toy." + ds[i].db_id));
    const bool held_out = i + 1 == ds.size();
    auto& dst = held_out ? c.held_out : c.train;
    dst.insert(dst.end(), pairs.begin(), pairs.end());
    if (held_out) c.zero_shot_domain = ds[i].db_id;
    else c.train_domains.push_back(ds[i].db_id);
  }
  return c;
}

void write_toy_databases(const ToyCorpus& corpus, const std::string& dir, const ToyConfig& config) {
  namespace fs = std::filesystem;
  const auto ds = domains();
  for (const auto& d : ds) {
    if (!find_schema(corpus.schemas, d.db_id)) continue;
    const fs::path folder = fs::path(dir) / d.db_id;
    fs::create_directories(folder);
    const fs::path file = folder / (d.db_id + ".sqlite");
    fs::remove(file);
    sqlite3* db = nullptr;
    if (sqlite3_open(file.string().c_str(), &db) != SQLITE_OK) {
      const std::string msg = db ? sqlite3_errmsg(db) : "out of memory";
      sqlite3_close(db);
      throw Error("cannot create " + file.string() + ": " + msg);
    }
    try {
      Rand r(derive_seed(config.seed, "toy.rows." + d.db_id));
      check(db, sqlite3_exec(db, "BEGIN", nullptr, nullptr, nullptr), "begin");
      for (const ToyTable* t : {&d.parent, &d.child}) {
        std::vector<std::string> defs;
        for (const auto& c : t->columns) {
          const bool text = c.role == Role::kLabel || c.role == Role::kCategory;
          std::string def = c.name + (text ? " TEXT" : " INTEGER");
          if (c.role == Role::kId) def += " PRIMARY KEY";
          if (c.role == Role::kForeign) def += " REFERENCES " + d.parent.name + "(" + d.parent.columns[0].name + ")";
          defs.push_back(def);
        }
        check(db, sqlite3_exec(db, ("CREATE TABLE " + t->name + " (" + join(defs, ", ") + ")").c_str(), nullptr,
                               nullptr, nullptr),
              "create " + t->name);
        const std::string placeholders = join(std::vector<std::string>(t->columns.size(), "?"), ", ");
        sqlite3_stmt* stmt = nullptr;
        check(db, sqlite3_prepare_v2(db, ("INSERT INTO " + t->name + " VALUES (" + placeholders + ")").c_str(), -1,
                                     &stmt, nullptr),
              "prepare insert");
        for (int row = 1; row <= config.rows_per_table; ++row) {
          for (std::size_t k = 0; k < t->columns.size(); ++k) {
            const auto& c = t->columns[k];
            const int idx = static_cast<int>(k) + 1;
            switch (c.role) {
              case Role::kId: sqlite3_bind_int(stmt, idx, row); break;
              case Role::kForeign: sqlite3_bind_int(stmt, idx, r.range(1, config.rows_per_table)); break;
              case Role::kNumber: sqlite3_bind_int(stmt, idx, r.range(c.lo, c.hi)); break;
              default: {
                const std::string& v = r.pick(c.values);
                sqlite3_bind_text(stmt, idx, v.c_str(), -1, SQLITE_TRANSIENT);
              }
            }
          }
          if (sqlite3_step(stmt) != SQLITE_DONE) {
            sqlite3_finalize(stmt);
            throw Error(std::string("insert failed: ") + sqlite3_errmsg(db));
          }
          sqlite3_reset(stmt);
        }
        sqlite3_finalize(stmt);
      }
      check(db, sqlite3_exec(db, "COMMIT", nullptr, nullptr, nullptr), "commit");
    } catch (...) {
      sqlite3_close(db);
      throw;
    }
    sqlite3_close(db);
  }
}

void save_toy_corpus(const ToyCorpus& corpus, const std::string& dir, const ToyConfig& config) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  save_schemas((fs::path(dir) / "tables.json").string(), corpus.schemas);
  save_examples((fs::path(dir) / "train.json").string(), corpus.train);
  save_examples((fs::path(dir) / "heldout.json").string(), corpus.held_out);
  write_toy_databases(corpus, (fs::path(dir) / "database").string(), config);
}

}  // namespace sqlaug
