#pragma once

#include <fstream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace pimdb {

// Declarative query form. Queries arrive as JSON fixture files; there is no
// SQL parser. Columns are referenced by bare name, which the star schemas
// keep globally unique.

enum class AggFn { None, Sum, Count, Min, Max };

struct Expr {
    enum class Kind { Column, Const, Add, Sub, Mul };
    Kind kind = Kind::Const;
    std::string column;
    int64_t value = 0;
    std::shared_ptr<Expr> lhs, rhs;

    static Expr col(std::string name) {
        Expr e;
        e.kind = Kind::Column;
        e.column = std::move(name);
        return e;
    }
    static Expr constant(int64_t v) {
        Expr e;
        e.kind = Kind::Const;
        e.value = v;
        return e;
    }
    static Expr binary(Kind k, Expr a, Expr b) {
        Expr e;
        e.kind = k;
        e.lhs = std::make_shared<Expr>(std::move(a));
        e.rhs = std::make_shared<Expr>(std::move(b));
        return e;
    }

    template <typename Fn>
    void visit_columns(Fn&& fn) const {
        if (kind == Kind::Column) fn(column);
        if (lhs) lhs->visit_columns(fn);
        if (rhs) rhs->visit_columns(fn);
    }
};

struct SelectItem {
    std::string alias;
    AggFn agg = AggFn::None;
    std::optional<Expr> expr;  // absent only for COUNT(*)
};

/// Leaf comparison. Literals stay as raw JSON until planning, where the
/// column's logical type decides how to interpret them.
struct WhereLeaf {
    std::string column;
    std::string op;  // eq ne lt le gt ge between in like
    std::vector<nlohmann::json> literals;
};

struct WhereNode {
    enum class Kind { And, Or, Leaf };
    Kind kind = Kind::Leaf;
    std::vector<WhereNode> children;
    WhereLeaf leaf;
};

struct JoinSpec {
    std::string fk_column;  // on the query's target table
    std::string dim_table;  // joined on that table's primary key
};

struct Query {
    std::string name;
    std::string table;
    std::vector<SelectItem> select;
    std::optional<WhereNode> where;
    std::vector<JoinSpec> joins;
    std::vector<std::string> group_by;
    std::vector<std::string> order_by;  // select aliases; "-" prefix = descending
    int64_t limit = -1;                 // <0: no limit
};

// ----------------------------------------------------------------- json io

inline AggFn parse_agg(const std::string& s) {
    if (s == "sum") return AggFn::Sum;
    if (s == "count") return AggFn::Count;
    if (s == "min") return AggFn::Min;
    if (s == "max") return AggFn::Max;
    throw std::invalid_argument("unknown aggregate: " + s);
}
inline const char* agg_name(AggFn a) {
    switch (a) {
        case AggFn::None: return "none";
        case AggFn::Sum: return "sum";
        case AggFn::Count: return "count";
        case AggFn::Min: return "min";
        case AggFn::Max: return "max";
    }
    return "?";
}

inline Expr expr_from_json(const nlohmann::json& j) {
    if (j.contains("col")) return Expr::col(j.at("col").get<std::string>());
    if (j.contains("const")) return Expr::constant(j.at("const").get<int64_t>());
    for (auto [key, kind] : {std::pair{"add", Expr::Kind::Add},
                             std::pair{"sub", Expr::Kind::Sub},
                             std::pair{"mul", Expr::Kind::Mul}}) {
        if (j.contains(key)) {
            const auto& args = j.at(key);
            if (!args.is_array() || args.size() != 2)
                throw std::invalid_argument(std::string(key) + " takes exactly two operands");
            return Expr::binary(kind, expr_from_json(args[0]), expr_from_json(args[1]));
        }
    }
    throw std::invalid_argument("malformed expression: " + j.dump());
}

inline nlohmann::json expr_to_json(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::Column: return {{"col", e.column}};
        case Expr::Kind::Const: return {{"const", e.value}};
        case Expr::Kind::Add: return {{"add", {expr_to_json(*e.lhs), expr_to_json(*e.rhs)}}};
        case Expr::Kind::Sub: return {{"sub", {expr_to_json(*e.lhs), expr_to_json(*e.rhs)}}};
        case Expr::Kind::Mul: return {{"mul", {expr_to_json(*e.lhs), expr_to_json(*e.rhs)}}};
    }
    throw std::logic_error("bad expr kind");
}

inline WhereNode where_from_json(const nlohmann::json& j) {
    WhereNode n;
    if (j.contains("and") || j.contains("or")) {
        bool is_and = j.contains("and");
        n.kind = is_and ? WhereNode::Kind::And : WhereNode::Kind::Or;
        for (const auto& c : j.at(is_and ? "and" : "or")) n.children.push_back(where_from_json(c));
        if (n.children.empty()) throw std::invalid_argument("empty and/or node");
        return n;
    }
    n.kind = WhereNode::Kind::Leaf;
    n.leaf.column = j.at("col").get<std::string>();
    n.leaf.op = j.at("op").get<std::string>();
    if (n.leaf.op == "between") {
        n.leaf.literals = {j.at("lo"), j.at("hi")};
    } else if (n.leaf.op == "in") {
        for (const auto& v : j.at("values")) n.leaf.literals.push_back(v);
        if (n.leaf.literals.empty()) throw std::invalid_argument("empty IN list");
    } else if (n.leaf.op == "like") {
        n.leaf.literals = {j.at("pattern")};
    } else if (n.leaf.op == "eq" || n.leaf.op == "ne" || n.leaf.op == "lt" ||
               n.leaf.op == "le" || n.leaf.op == "gt" || n.leaf.op == "ge") {
        n.leaf.literals = {j.at("value")};
    } else {
        throw std::invalid_argument("unknown predicate op: " + n.leaf.op);
    }
    return n;
}

inline nlohmann::json where_to_json(const WhereNode& n) {
    if (n.kind != WhereNode::Kind::Leaf) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& c : n.children) arr.push_back(where_to_json(c));
        return {{n.kind == WhereNode::Kind::And ? "and" : "or", arr}};
    }
    nlohmann::json j = {{"col", n.leaf.column}, {"op", n.leaf.op}};
    if (n.leaf.op == "between") {
        j["lo"] = n.leaf.literals[0];
        j["hi"] = n.leaf.literals[1];
    } else if (n.leaf.op == "in") {
        j["values"] = n.leaf.literals;
    } else if (n.leaf.op == "like") {
        j["pattern"] = n.leaf.literals[0];
    } else {
        j["value"] = n.leaf.literals[0];
    }
    return j;
}

inline Query query_from_json(const nlohmann::json& j) {
    Query q;
    q.name = j.value("name", std::string{});
    q.table = j.at("table").get<std::string>();
    for (const auto& s : j.at("select")) {
        SelectItem item;
        item.alias = s.at("alias").get<std::string>();
        item.agg = s.contains("agg") ? parse_agg(s.at("agg").get<std::string>()) : AggFn::None;
        if (s.contains("expr"))
            item.expr = expr_from_json(s.at("expr"));
        else if (s.contains("col"))
            item.expr = Expr::col(s.at("col").get<std::string>());
        else if (item.agg != AggFn::Count)
            throw std::invalid_argument("select item needs expr/col unless COUNT(*)");
        q.select.push_back(std::move(item));
    }
    if (j.contains("where") && !j.at("where").is_null())
        q.where = where_from_json(j.at("where"));
    if (j.contains("joins"))
        for (const auto& jj : j.at("joins"))
            q.joins.push_back({jj.at("fk").get<std::string>(), jj.at("dim").get<std::string>()});
    if (j.contains("group_by")) q.group_by = j.at("group_by").get<std::vector<std::string>>();
    if (j.contains("order_by")) q.order_by = j.at("order_by").get<std::vector<std::string>>();
    if (j.contains("limit") && !j.at("limit").is_null()) q.limit = j.at("limit").get<int64_t>();
    return q;
}

inline nlohmann::json query_to_json(const Query& q) {
    nlohmann::json j;
    j["name"] = q.name;
    j["table"] = q.table;
    j["select"] = nlohmann::json::array();
    for (const auto& s : q.select) {
        nlohmann::json item = {{"alias", s.alias}};
        if (s.agg != AggFn::None) item["agg"] = agg_name(s.agg);
        if (s.expr) item["expr"] = expr_to_json(*s.expr);
        j["select"].push_back(item);
    }
    if (q.where) j["where"] = where_to_json(*q.where);
    j["joins"] = nlohmann::json::array();
    for (const auto& jn : q.joins) j["joins"].push_back({{"fk", jn.fk_column}, {"dim", jn.dim_table}});
    j["group_by"] = q.group_by;
    j["order_by"] = q.order_by;
    if (q.limit >= 0) j["limit"] = q.limit;
    return j;
}

inline Query load_query(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open query file: " + path);
    nlohmann::json j;
    in >> j;
    return query_from_json(j);
}

/// Every column a query references, WHERE tree included.
template <typename Fn>
inline void visit_query_columns(const Query& q, Fn&& fn) {
    for (const auto& s : q.select)
        if (s.expr) s.expr->visit_columns(fn);
    if (q.where) {
        auto walk = [&](auto&& self, const WhereNode& n) -> void {
            if (n.kind == WhereNode::Kind::Leaf)
                fn(n.leaf.column);
            else
                for (const auto& c : n.children) self(self, c);
        };
        walk(walk, *q.where);
    }
    for (const auto& g : q.group_by) fn(g);
}

}  // namespace pimdb
