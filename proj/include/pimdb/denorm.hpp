#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "pimdb/database.hpp"
#include "pimdb/query.hpp"

namespace pimdb {

enum class DenormLevel { D1, D2, D3, D4 };

inline const char* level_name(DenormLevel l) {
    switch (l) {
        case DenormLevel::D1: return "D1";
        case DenormLevel::D2: return "D2";
        case DenormLevel::D3: return "D3";
        case DenormLevel::D4: return "D4";
    }
    return "?";
}

inline DenormLevel parse_level(const std::string& s) {
    if (s == "D1" || s == "d1") return DenormLevel::D1;
    if (s == "D2" || s == "d2") return DenormLevel::D2;
    if (s == "D3" || s == "d3") return DenormLevel::D3;
    if (s == "D4" || s == "d4") return DenormLevel::D4;
    throw std::invalid_argument("unknown denormalization level: " + s);
}

/// One dimension column to fold into the fact table, with the FK lookup
/// chain leading to it (at most two hops for snowflake shapes).
struct FoldEntry {
    std::string dim_table;
    std::string column;
    std::vector<std::string> fk_path;  // FK column names, starting on the fact

    bool operator<(const FoldEntry& o) const {
        return std::tie(dim_table, column) < std::tie(o.dim_table, o.column);
    }
    bool operator==(const FoldEntry& o) const {
        return dim_table == o.dim_table && column == o.column;
    }
};

/// Post-aggregation join needed by one query to recover columns that were
/// left out of the fold set because a primary key in the GROUP BY already
/// determines them.
struct ResidualJoin {
    std::string query_name;
    std::string dim_table;
    std::string key_column;            // dim PK, present in the GROUP BY
    std::vector<std::string> columns;  // columns to fetch after aggregation
};

struct DenormPlan {
    DenormLevel level = DenormLevel::D1;
    std::string fact_table;
    std::vector<FoldEntry> folds;
    std::vector<ResidualJoin> residual_joins;
};

namespace denorm_detail {

struct Resolved {
    std::string table;
    std::vector<std::string> fk_path;  // empty for fact columns
    bool is_pk = false;
};

/// Maps every reachable column name to its owning table. Reachability
/// follows declared FKs from the fact, at most two hops deep.
inline std::map<std::string, Resolved> resolve_columns(const Schema& schema,
                                                       const std::string& fact) {
    std::map<std::string, Resolved> out;
    const TableSchema* ft = schema.find_table(fact);
    if (!ft) throw std::invalid_argument("unknown fact table: " + fact);
    auto add = [&](const TableSchema& t, const std::vector<std::string>& path) {
        for (const auto& c : t.columns) {
            if (out.count(c.name)) {
                // a fact column (possibly a folded copy) shadows dim columns;
                // only a clash between two dimension tables is ambiguous
                if (out[c.name].table != t.name && !out[c.name].fk_path.empty() &&
                    !path.empty())
                    throw std::invalid_argument("ambiguous column name: " + c.name);
                continue;
            }
            out[c.name] = Resolved{t.name, path, c.name == t.primary_key};
        }
    };
    add(*ft, {});
    for (const auto& fk1 : ft->foreign_keys) {
        const TableSchema* d1 = schema.find_table(fk1.ref_table);
        add(*d1, {fk1.column});
        for (const auto& fk2 : d1->foreign_keys) {
            const TableSchema* d2 = schema.find_table(fk2.ref_table);
            add(*d2, {fk1.column, fk2.column});
            if (!d2->foreign_keys.empty())
                throw std::invalid_argument("FK chain deeper than two hops at " + d2->name);
        }
    }
    return out;
}

inline void collect_where_columns(const WhereNode& n, std::set<std::string>& out) {
    if (n.kind == WhereNode::Kind::Leaf)
        out.insert(n.leaf.column);
    else
        for (const auto& c : n.children) collect_where_columns(c, out);
}

}  // namespace denorm_detail

/// Chooses the fold set for one denormalization level.
///   D1: nothing. D2: dimension columns appearing in any WHERE clause.
///   D3: D2 plus SELECT/GROUP BY dimension columns, except columns that a
///       dimension primary key in the same GROUP BY already determines;
///       those are fetched by a cheap post-aggregation join instead.
///   D4: every non-key dimension column.
inline DenormPlan analyze_workload(const std::vector<Query>& queries, const Schema& schema,
                                   const std::string& fact, DenormLevel level) {
    using namespace denorm_detail;
    auto resolved = resolve_columns(schema, fact);
    auto check = [&](const std::string& col) {
        if (!resolved.count(col)) throw std::invalid_argument("unknown column: " + col);
    };
    for (const auto& q : queries) visit_query_columns(q, check);

    DenormPlan plan;
    plan.level = level;
    plan.fact_table = fact;
    std::set<FoldEntry> folds;
    auto fold_of = [&](const std::string& col) {
        const Resolved& r = resolved.at(col);
        return FoldEntry{r.table, col, r.fk_path};
    };
    auto is_dim = [&](const std::string& col) { return resolved.at(col).table != fact; };

    std::set<std::string> where_cols;  // workload-wide
    for (const auto& q : queries)
        if (q.where) collect_where_columns(*q.where, where_cols);

    if (level == DenormLevel::D4) {
        for (const auto& [col, r] : resolved)
            if (r.table != fact) folds.insert(fold_of(col));
    }
    if (level == DenormLevel::D2 || level == DenormLevel::D3) {
        for (const auto& c : where_cols)
            if (is_dim(c)) folds.insert(fold_of(c));
    }

    // query -> dim -> FD-excluded columns, resolved after the fold set settles
    std::vector<std::tuple<std::string, std::string, std::string>> excluded;
    if (level == DenormLevel::D3) {
        for (const auto& q : queries) {
            std::set<std::string> group_pks;  // dims whose PK is grouped on
            for (const auto& g : q.group_by) {
                const Resolved& r = resolved.at(g);
                if (r.table != fact && r.is_pk) group_pks.insert(r.table);
            }
            std::set<std::string> output_cols(q.group_by.begin(), q.group_by.end());
            for (const auto& s : q.select)
                if (s.expr) s.expr->visit_columns([&](const std::string& c) { output_cols.insert(c); });
            for (const auto& c : output_cols) {
                if (!is_dim(c)) continue;
                const Resolved& r = resolved.at(c);
                if (r.is_pk) {
                    // grouping key; fold so the widetable can group without joins
                    folds.insert(fold_of(c));
                } else if (where_cols.count(c) == 0 && group_pks.count(r.table)) {
                    excluded.emplace_back(q.name, r.table, c);
                } else {
                    folds.insert(fold_of(c));
                }
            }
        }
    }

    plan.folds.assign(folds.begin(), folds.end());
    if (level == DenormLevel::D3) {
        std::map<std::pair<std::string, std::string>, std::vector<std::string>> by_query_dim;
        for (const auto& [qname, dim, col] : excluded)
            if (!folds.count(FoldEntry{dim, col, {}}))
                by_query_dim[{qname, dim}].push_back(col);
        for (auto& [key, cols] : by_query_dim) {
            std::sort(cols.begin(), cols.end());
            cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
            plan.residual_joins.push_back(
                ResidualJoin{key.first, key.second,
                             schema.find_table(key.second)->primary_key, cols});
        }
    }
    return plan;
}

/// Materializes the fold set: the fact table gains one column per entry,
/// filled via FK -> PK lookup; dimension tables stay for residual joins.
inline Database build_widetable(const Database& db, const DenormPlan& plan) {
    Database out = db;
    Table* fact = out.find_table(plan.fact_table);
    if (!fact) throw std::invalid_argument("fact table missing: " + plan.fact_table);
    TableSchema* fact_schema = nullptr;
    for (auto& t : out.schema.tables)
        if (t.name == plan.fact_table) fact_schema = &t;

    // PK value -> row index per dimension
    std::map<std::string, std::unordered_map<int64_t, uint64_t>> pk_index;
    auto index_of = [&](const std::string& table) -> std::unordered_map<int64_t, uint64_t>& {
        auto it = pk_index.find(table);
        if (it != pk_index.end()) return it->second;
        const TableSchema* ts = out.schema.find_table(table);
        const ColumnData& pk = out.table(table).column(ts->primary_key);
        auto& idx = pk_index[table];
        for (uint64_t i = 0; i < pk.rows(); ++i) idx.emplace(pk.int_at(i), i);
        return idx;
    };

    uint64_t nrows = fact->row_count();
    for (const auto& fe : plan.folds) {
        if (fact->column_index(fe.column) >= 0) continue;  // already present
        // walk the FK chain once per row
        std::vector<uint64_t> dim_row(nrows);
        std::string cur_table = plan.fact_table;
        const Table* cur = fact;
        std::vector<uint64_t> rowidx(nrows);
        for (uint64_t i = 0; i < nrows; ++i) rowidx[i] = i;
        for (const auto& fk_col : fe.fk_path) {
            const ColumnData& fkc = cur->column(fk_col);
            const TableSchema* cur_ts = out.schema.find_table(cur_table);
            std::string next_table;
            for (const auto& fk : cur_ts->foreign_keys)
                if (fk.column == fk_col) next_table = fk.ref_table;
            if (next_table.empty())
                throw std::invalid_argument("no FK declared on " + cur_table + "." + fk_col);
            auto& idx = index_of(next_table);
            for (uint64_t i = 0; i < nrows; ++i) {
                int64_t key = fkc.int_at(rowidx[i]);
                auto it = idx.find(key);
                if (it == idx.end())
                    throw std::runtime_error("dangling FK value in " + cur_table + "." + fk_col);
                rowidx[i] = it->second;
            }
            cur_table = next_table;
            cur = &out.table(next_table);
        }
        const ColumnData& src = cur->column(fe.column);
        ColumnData folded;
        if (src.is_string()) {
            std::vector<std::string> vals(nrows);
            for (uint64_t i = 0; i < nrows; ++i) vals[i] = src.str_at(rowidx[i]);
            folded = encode_string_column(vals);
        } else {
            std::vector<int64_t> vals(nrows);
            for (uint64_t i = 0; i < nrows; ++i) vals[i] = src.int_at(rowidx[i]);
            folded = encode_int_column(src.type, vals);
        }
        fact->column_names.push_back(fe.column);
        fact->columns.push_back(std::move(folded));
        const TableSchema* dim_ts = out.schema.find_table(fe.dim_table);
        fact_schema->columns.push_back(*dim_ts->find_column(fe.column));
    }
    return out;
}

struct RewrittenQuery {
    Query query;
    std::vector<ResidualJoin> residual_joins;  // for this query only
};

/// Drops joins whose referenced dimension columns are all folded (or are
/// the dimension's primary key, already present as the FK value). Joins a
/// residual entry covers are dropped too; the engine replays them after
/// aggregation. Anything else passes through untouched.
inline RewrittenQuery rewrite_query(const Query& q, const Schema& schema,
                                    const DenormPlan& plan) {
    using namespace denorm_detail;
    auto resolved = resolve_columns(schema, plan.fact_table);
    std::set<std::pair<std::string, std::string>> folded;
    for (const auto& fe : plan.folds) folded.insert({fe.dim_table, fe.column});

    std::set<std::string> referenced;
    visit_query_columns(q, [&](const std::string& c) { referenced.insert(c); });

    RewrittenQuery out;
    for (const auto& rj : plan.residual_joins)
        if (rj.query_name == q.name) out.residual_joins.push_back(rj);
    std::set<std::pair<std::string, std::string>> residual_cols;
    for (const auto& rj : out.residual_joins)
        for (const auto& c : rj.columns) residual_cols.insert({rj.dim_table, c});

    out.query = q;
    std::vector<JoinSpec> kept;
    // tables referenced through still-unfolded, non-residual columns must
    // keep their joins; PK references are satisfied by the FK value itself
    // unless the fold set materialized them
    std::set<std::string> must_join;
    for (const auto& c : referenced) {
        auto it = resolved.find(c);
        if (it == resolved.end()) continue;  // alias refs (order_by) are skipped
        const Resolved& r = it->second;
        if (r.table == plan.fact_table) continue;
        if (folded.count({r.table, c}) || residual_cols.count({r.table, c})) continue;
        if (r.is_pk && r.fk_path.size() == 1) continue;  // equal to the fact FK column
        must_join.insert(r.table);
    }
    // keep a join if its dim (or any dim only reachable through it) is needed
    for (size_t i = 0; i < q.joins.size(); ++i) {
        const auto& jn = q.joins[i];
        bool needed = must_join.count(jn.dim_table) > 0;
        // an intermediate table is needed when a later join hangs off it
        for (size_t k = i + 1; k < q.joins.size() && !needed; ++k) {
            const TableSchema* dt = schema.find_table(jn.dim_table);
            for (const auto& fk : dt->foreign_keys)
                if (fk.column == q.joins[k].fk_column && must_join.count(q.joins[k].dim_table))
                    needed = true;
        }
        if (needed) kept.push_back(jn);
    }
    out.query.joins = kept;
    return out;
}

inline double memory_overhead(const Database& original, const Database& denorm) {
    double base = double(original.encoded_bytes());
    return (double(denorm.encoded_bytes()) - base) / base;
}

}  // namespace pimdb
