#pragma once

// Naive row-at-a-time interpreter used as the correctness oracle for the
// columnar engine. Every fact row is materialized as a name->value map,
// joins are plain primary-key lookups, predicates and aggregates walk rows
// one at a time. No bitmaps, no dictionary rewriting, no denormalization.

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "pimdb/database.hpp"
#include "pimdb/engine.hpp"
#include "pimdb/query.hpp"

namespace refimpl {

using pimdb::ResultTable;
using pimdb::Row;
using pimdb::Value;

using RefRow = std::map<std::string, Value>;

inline Value cell(const pimdb::ColumnData& c, uint64_t r) {
    if (c.is_string()) return Value{c.str_at(r)};
    return Value{c.int_at(r)};
}

inline int64_t lit_int(const nlohmann::json& j, pimdb::LogicalType t) {
    using pimdb::LogicalType;
    switch (t) {
        case LogicalType::Int:
            return j.get<int64_t>();
        case LogicalType::Decimal:
            if (j.is_string()) return pimdb::csvio::parse_decimal(j.get<std::string>());
            if (j.is_number_integer()) return j.get<int64_t>() * 100;
            return int64_t(std::llround(j.get<double>() * 100.0));
        case LogicalType::Date:
            if (j.is_string()) return pimdb::csvio::parse_date(j.get<std::string>());
            return j.get<int64_t>();
        case LogicalType::String:
            throw std::invalid_argument("string column vs non-string literal");
    }
    throw std::logic_error("bad type");
}

inline bool ref_like(const std::string& s, const std::string& pat, size_t si = 0,
                     size_t pi = 0) {
    // straightforward recursive matcher, distinct from the engine's iterative one
    if (pi == pat.size()) return si == s.size();
    if (pat[pi] == '%')
        return ref_like(s, pat, si, pi + 1) ||
               (si < s.size() && ref_like(s, pat, si + 1, pi));
    if (si == s.size()) return false;
    if (pat[pi] == '_' || pat[pi] == s[si]) return ref_like(s, pat, si + 1, pi + 1);
    return false;
}

inline bool eval_leaf(const pimdb::WhereLeaf& leaf, const RefRow& row,
                      pimdb::LogicalType t) {
    const Value& v = row.at(leaf.column);
    if (leaf.op == "like")
        return ref_like(std::get<std::string>(v), leaf.literals[0].get<std::string>());
    if (t == pimdb::LogicalType::String) {
        const std::string& s = std::get<std::string>(v);
        auto lit = [&](size_t i) { return leaf.literals[i].get<std::string>(); };
        if (leaf.op == "eq") return s == lit(0);
        if (leaf.op == "ne") return s != lit(0);
        if (leaf.op == "lt") return s < lit(0);
        if (leaf.op == "le") return s <= lit(0);
        if (leaf.op == "gt") return s > lit(0);
        if (leaf.op == "ge") return s >= lit(0);
        if (leaf.op == "between") return lit(0) <= s && s <= lit(1);
        if (leaf.op == "in") {
            for (size_t i = 0; i < leaf.literals.size(); ++i)
                if (s == lit(i)) return true;
            return false;
        }
    } else {
        int64_t x = std::get<int64_t>(v);
        auto lit = [&](size_t i) { return lit_int(leaf.literals[i], t); };
        if (leaf.op == "eq") return x == lit(0);
        if (leaf.op == "ne") return x != lit(0);
        if (leaf.op == "lt") return x < lit(0);
        if (leaf.op == "le") return x <= lit(0);
        if (leaf.op == "gt") return x > lit(0);
        if (leaf.op == "ge") return x >= lit(0);
        if (leaf.op == "between") return lit(0) <= x && x <= lit(1);
        if (leaf.op == "in") {
            for (size_t i = 0; i < leaf.literals.size(); ++i)
                if (x == lit(i)) return true;
            return false;
        }
    }
    throw std::invalid_argument("unknown op: " + leaf.op);
}

inline bool eval_where(const pimdb::WhereNode& n, const RefRow& row,
                       const std::map<std::string, pimdb::LogicalType>& types) {
    using K = pimdb::WhereNode::Kind;
    if (n.kind == K::Leaf) return eval_leaf(n.leaf, row, types.at(n.leaf.column));
    if (n.kind == K::And) {
        for (const auto& c : n.children)
            if (!eval_where(c, row, types)) return false;
        return true;
    }
    for (const auto& c : n.children)
        if (eval_where(c, row, types)) return true;
    return false;
}

inline int64_t eval_expr(const pimdb::Expr& e, const RefRow& row) {
    using K = pimdb::Expr::Kind;
    switch (e.kind) {
        case K::Const: return e.value;
        case K::Column: return std::get<int64_t>(row.at(e.column));
        case K::Add: return eval_expr(*e.lhs, row) + eval_expr(*e.rhs, row);
        case K::Sub: return eval_expr(*e.lhs, row) - eval_expr(*e.rhs, row);
        case K::Mul: return eval_expr(*e.lhs, row) * eval_expr(*e.rhs, row);
    }
    throw std::logic_error("bad expr");
}

/// Fact rows with every joined dimension's columns merged in. Star-schema
/// FK -> PK joins never multiply rows, so this is a per-row lookup.
inline std::vector<RefRow> materialize(const pimdb::Database& db, const pimdb::Query& q) {
    const pimdb::Table& fact = db.table(q.table);
    std::vector<RefRow> rows(fact.row_count());
    for (size_t ci = 0; ci < fact.columns.size(); ++ci)
        for (uint64_t r = 0; r < fact.row_count(); ++r)
            rows[r][fact.column_names[ci]] = cell(fact.columns[ci], r);
    for (const auto& jn : q.joins) {
        const pimdb::TableSchema* ts = db.schema.find_table(jn.dim_table);
        if (!ts) throw std::invalid_argument("unknown join table: " + jn.dim_table);
        const pimdb::Table& dim = db.table(jn.dim_table);
        const pimdb::ColumnData& pk = dim.column(ts->primary_key);
        std::unordered_map<int64_t, uint64_t> idx;
        for (uint64_t i = 0; i < pk.rows(); ++i) idx.emplace(pk.int_at(i), i);
        for (auto& row : rows) {
            int64_t key = std::get<int64_t>(row.at(jn.fk_column));
            auto it = idx.find(key);
            if (it == idx.end()) throw std::runtime_error("dangling key in reference join");
            for (size_t ci = 0; ci < dim.columns.size(); ++ci) {
                const std::string& name = dim.column_names[ci];
                if (!row.count(name)) row[name] = cell(dim.columns[ci], it->second);
            }
        }
    }
    return rows;
}

inline ResultTable run_reference(const pimdb::Database& db, const pimdb::Query& q) {
    std::map<std::string, pimdb::LogicalType> types;
    for (const auto& t : db.schema.tables)
        for (const auto& c : t.columns) types.emplace(c.name, c.type);

    std::vector<RefRow> rows = materialize(db, q);
    if (q.where) {
        std::vector<RefRow> kept;
        for (auto& r : rows)
            if (eval_where(*q.where, r, types)) kept.push_back(std::move(r));
        rows = std::move(kept);
    }

    ResultTable out;
    for (const auto& s : q.select) out.columns.push_back(s.alias);

    bool any_agg = false;
    for (const auto& s : q.select) any_agg |= s.agg != pimdb::AggFn::None;

    if (!any_agg && q.group_by.empty()) {
        for (const auto& r : rows) {
            Row row;
            for (const auto& s : q.select) {
                const auto& e = *s.expr;
                if (e.kind == pimdb::Expr::Kind::Column &&
                    std::holds_alternative<std::string>(r.at(e.column)))
                    row.push_back(r.at(e.column));
                else
                    row.push_back(Value{eval_expr(e, r)});
            }
            out.rows.push_back(std::move(row));
        }
    } else {
        struct Acc {
            std::vector<int64_t> vals;
            std::vector<bool> seen;
        };
        std::map<Row, Acc> groups;
        for (const auto& r : rows) {
            Row key;
            for (const auto& g : q.group_by) key.push_back(r.at(g));
            auto [it, fresh] = groups.try_emplace(std::move(key));
            if (fresh) {
                it->second.vals.assign(q.select.size(), 0);
                it->second.seen.assign(q.select.size(), false);
            }
            Acc& a = it->second;
            for (size_t si = 0; si < q.select.size(); ++si) {
                const auto& s = q.select[si];
                using A = pimdb::AggFn;
                if (s.agg == A::None) continue;
                if (s.agg == A::Count) {
                    a.vals[si] += 1;
                    a.seen[si] = true;
                    continue;
                }
                int64_t v = eval_expr(*s.expr, r);
                if (s.agg == A::Sum) a.vals[si] += v;
                if (s.agg == A::Min) a.vals[si] = a.seen[si] ? std::min(a.vals[si], v) : v;
                if (s.agg == A::Max) a.vals[si] = a.seen[si] ? std::max(a.vals[si], v) : v;
                a.seen[si] = true;
            }
        }
        if (groups.empty() && q.group_by.empty()) groups.try_emplace(Row{});
        for (const auto& [key, a] : groups) {
            Row row;
            for (size_t si = 0; si < q.select.size(); ++si) {
                const auto& s = q.select[si];
                if (s.agg != pimdb::AggFn::None) {
                    row.push_back(Value{a.vals[si]});
                    continue;
                }
                const std::string& col = s.expr->column;
                auto gi = std::find(q.group_by.begin(), q.group_by.end(), col);
                if (gi == q.group_by.end())
                    throw std::invalid_argument("reference: '" + s.alias +
                                                "' is not a group key");
                row.push_back(key[size_t(gi - q.group_by.begin())]);
            }
            out.rows.push_back(std::move(row));
        }
    }

    if (!q.order_by.empty()) {
        std::vector<std::pair<size_t, bool>> keys;
        for (const auto& o : q.order_by) {
            bool desc = !o.empty() && o[0] == '-';
            std::string name = desc ? o.substr(1) : o;
            auto it = std::find(out.columns.begin(), out.columns.end(), name);
            if (it == out.columns.end())
                throw std::invalid_argument("reference: unknown order alias " + name);
            keys.emplace_back(size_t(it - out.columns.begin()), desc);
        }
        std::stable_sort(out.rows.begin(), out.rows.end(), [&](const Row& a, const Row& b) {
            for (auto [ci, desc] : keys) {
                if (a[ci] == b[ci]) continue;
                return desc ? b[ci] < a[ci] : a[ci] < b[ci];
            }
            return false;
        });
    } else {
        std::sort(out.rows.begin(), out.rows.end());
    }
    if (q.limit >= 0 && int64_t(out.rows.size()) > q.limit)
        out.rows.resize(size_t(q.limit));
    return out;
}

}  // namespace refimpl
