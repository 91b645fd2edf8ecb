#pragma once

#include <algorithm>
#include <chrono>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "pimdb/cost.hpp"
#include "pimdb/database.hpp"
#include "pimdb/denorm.hpp"
#include "pimdb/predicate.hpp"
#include "pimdb/query.hpp"
#include "pimdb/timing.hpp"

namespace pimdb {

using Value = std::variant<int64_t, std::string>;
using Row = std::vector<Value>;

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<Row> rows;
    bool operator==(const ResultTable&) const = default;
};

inline int64_t checked_add(int64_t a, int64_t b) {
    int64_t r;
    if (__builtin_add_overflow(a, b, &r))
        throw std::overflow_error("64-bit aggregate accumulator overflow");
    return r;
}
inline int64_t checked_sub(int64_t a, int64_t b) {
    int64_t r;
    if (__builtin_sub_overflow(a, b, &r))
        throw std::overflow_error("64-bit aggregate accumulator overflow");
    return r;
}
inline int64_t checked_mul(int64_t a, int64_t b) {
    int64_t r;
    if (__builtin_mul_overflow(a, b, &r))
        throw std::overflow_error("64-bit aggregate accumulator overflow");
    return r;
}

// -------------------------------------------------------------- literals

inline int64_t literal_as_int(const nlohmann::json& j, LogicalType t) {
    switch (t) {
        case LogicalType::Int:
            return j.get<int64_t>();
        case LogicalType::Decimal:
            if (j.is_string()) return csvio::parse_decimal(j.get<std::string>());
            if (j.is_number_integer()) return j.get<int64_t>() * 100;
            return int64_t(std::llround(j.get<double>() * 100.0));
        case LogicalType::Date:
            if (j.is_string()) return csvio::parse_date(j.get<std::string>());
            return j.get<int64_t>();
        case LogicalType::String:
            throw std::invalid_argument("string column compared with non-string literal");
    }
    throw std::logic_error("bad type");
}

// ------------------------------------------------------- code-space plan

/// One PIM pass: a code-space predicate over a packed column of the target
/// table, with the dictionary-derived selectivity estimate used to order
/// conjuncts cheapest-first.
struct PlannedPredicate {
    std::string column;
    Predicate pred;  // over dictionary codes
    double est_selectivity = 1.0;
};

/// Disjunction evaluated on PIM: every branch runs its own AND chain into a
/// branch bitmap, the host ORs the branch bitmaps.
struct PimOrGroup {
    std::vector<std::vector<PlannedPredicate>> branches;
};

struct PhysicalPlan {
    Query query;
    PimLevelSpec spec;
    std::vector<PlannedPredicate> pim_conjuncts;
    std::vector<PimOrGroup> pim_or_groups;
    std::optional<WhereNode> cpu_where;
    std::vector<ResidualJoin> residual_joins;
};

namespace engine_detail {

/// Rewrites a value-space comparison into code space. Always-false becomes
/// Lt 0, always-true Ge 0 (unsigned codes make both unconditional).
inline PlannedPredicate code_predicate(const std::string& column, const ColumnData& col,
                                       const std::string& op,
                                       const std::vector<nlohmann::json>& lits) {
    auto make = [&](CmpOp o, uint64_t lo, uint64_t hi, uint64_t matching) {
        double n = double(std::max<uint64_t>(col.dict_size(), 1));
        return PlannedPredicate{column, Predicate{o, lo, hi, column}, double(matching) / n};
    };
    auto always_false = [&] { return make(CmpOp::Lt, 0, 0, 0); };
    uint64_t n = col.dict_size();

    uint64_t lb, ub;
    if (col.is_string()) {
        const auto& d = col.str_dict;
        if (op == "between") {
            lb = d.lower_bound(lits[0].get<std::string>());
            ub = d.upper_bound(lits[1].get<std::string>());
        } else {
            lb = d.lower_bound(lits[0].get<std::string>());
            ub = d.upper_bound(lits[0].get<std::string>());
        }
    } else {
        const auto& d = col.int_dict;
        if (op == "between") {
            lb = d.lower_bound(literal_as_int(lits[0], col.type));
            ub = d.upper_bound(literal_as_int(lits[1], col.type));
        } else {
            int64_t v = literal_as_int(lits[0], col.type);
            lb = d.lower_bound(v);
            ub = d.upper_bound(v);
        }
    }
    if (op == "eq") return ub > lb ? make(CmpOp::Eq, lb, 0, 1) : always_false();
    if (op == "ne") return ub > lb ? make(CmpOp::Neq, lb, 0, n ? n - 1 : 0) : make(CmpOp::Ge, 0, 0, n);
    if (op == "lt") return lb > 0 ? make(CmpOp::Lt, lb, 0, lb) : always_false();
    if (op == "le") return ub > 0 ? make(CmpOp::Lt, ub, 0, ub) : always_false();
    if (op == "gt") return ub < n ? make(CmpOp::Ge, ub, 0, n - ub) : always_false();
    if (op == "ge") return lb < n ? make(CmpOp::Ge, lb, 0, n - lb) : always_false();
    if (op == "between") return ub > lb ? make(CmpOp::Between, lb, ub - 1, ub - lb) : always_false();
    throw std::invalid_argument("not a code-space op: " + op);
}

inline bool leaf_pim_eligible(const WhereLeaf& leaf, const Table& fact) {
    if (leaf.op == "like") return false;  // string matching stays on the host
    return fact.column_index(leaf.column) >= 0;
}

/// Whole subtree (for OR offload): every leaf must be eligible.
inline bool subtree_pim_eligible(const WhereNode& n, const Table& fact) {
    if (n.kind == WhereNode::Kind::Leaf) return leaf_pim_eligible(n.leaf, fact);
    for (const auto& c : n.children)
        if (!subtree_pim_eligible(c, fact)) return false;
    return true;
}

inline void flatten_and_branch(const WhereNode& n, const Table& fact,
                               std::vector<PlannedPredicate>& out) {
    if (n.kind == WhereNode::Kind::Leaf) {
        if (n.leaf.op == "in") {
            throw std::logic_error("IN inside OR branch handled by caller");
        }
        out.push_back(code_predicate(n.leaf.column, fact.column(n.leaf.column), n.leaf.op,
                                     n.leaf.literals));
        return;
    }
    if (n.kind != WhereNode::Kind::And)
        throw std::logic_error("nested OR inside OR branch not supported on PIM");
    for (const auto& c : n.children) flatten_and_branch(c, fact, out);
}

/// Does the branch tree only nest AND under the top OR (one level)?
inline bool or_shape_supported(const WhereNode& n) {
    if (n.kind != WhereNode::Kind::Or) return false;
    for (const auto& b : n.children) {
        if (b.kind == WhereNode::Kind::Or) return false;
        if (b.kind == WhereNode::Kind::And)
            for (const auto& l : b.children) {
                if (l.kind != WhereNode::Kind::Leaf || l.leaf.op == "in") return false;
            }
        if (b.kind == WhereNode::Kind::Leaf && b.leaf.op == "in") return false;
    }
    return true;
}

}  // namespace engine_detail

/// Splits the WHERE clause: the maximal set of top-level conjuncts that are
/// plain comparisons on the target table's packed columns goes to PIM,
/// ordered by estimated selectivity. A top-level OR whose leaves are all
/// eligible becomes per-branch PIM bitmaps merged on the host. Everything
/// else (LIKE, dimension columns behind a join) stays on the CPU path, and
/// joins and aggregation always run on the host.
inline PhysicalPlan plan_query(const Query& q, const Database& db, const PimLevelSpec& spec,
                               std::vector<ResidualJoin> residual = {}) {
    using namespace engine_detail;
    const Table& fact = db.table(q.table);
    PhysicalPlan plan;
    plan.query = q;
    plan.spec = spec;
    plan.residual_joins = std::move(residual);

    std::vector<const WhereNode*> conjuncts;
    if (q.where) {
        if (q.where->kind == WhereNode::Kind::And)
            for (const auto& c : q.where->children) conjuncts.push_back(&c);
        else
            conjuncts.push_back(&*q.where);
    }
    std::vector<WhereNode> cpu_conjuncts;
    for (const WhereNode* c : conjuncts) {
        if (c->kind == WhereNode::Kind::Leaf && leaf_pim_eligible(c->leaf, fact)) {
            const ColumnData& col = fact.column(c->leaf.column);
            if (c->leaf.op == "in") {
                PimOrGroup g;
                for (const auto& lit : c->leaf.literals)
                    g.branches.push_back({code_predicate(c->leaf.column, col, "eq", {lit})});
                plan.pim_or_groups.push_back(std::move(g));
            } else {
                plan.pim_conjuncts.push_back(
                    code_predicate(c->leaf.column, col, c->leaf.op, c->leaf.literals));
            }
        } else if (c->kind == WhereNode::Kind::Or && or_shape_supported(*c) &&
                   subtree_pim_eligible(*c, fact)) {
            PimOrGroup g;
            for (const auto& b : c->children) {
                std::vector<PlannedPredicate> branch;
                flatten_and_branch(b, fact, branch);
                g.branches.push_back(std::move(branch));
            }
            plan.pim_or_groups.push_back(std::move(g));
        } else {
            cpu_conjuncts.push_back(*c);
        }
    }
    std::stable_sort(plan.pim_conjuncts.begin(), plan.pim_conjuncts.end(),
                     [](const auto& a, const auto& b) {
                         return a.est_selectivity < b.est_selectivity;
                     });
    if (cpu_conjuncts.size() == 1) {
        plan.cpu_where = cpu_conjuncts.front();
    } else if (cpu_conjuncts.size() > 1) {
        WhereNode n;
        n.kind = WhereNode::Kind::And;
        n.children = std::move(cpu_conjuncts);
        plan.cpu_where = n;
    }
    return plan;
}

// --------------------------------------------------------------- execution

struct OperatorTime {
    std::string op;
    double ns = 0;
};

struct ExecutionReport {
    ResultTable result;
    double pim_time_ns = 0;  // modeled PIM filter time incl. mode switches
    std::vector<OperatorTime> operator_times;  // pim modeled + host measured
    double total_ns = 0;                       // sum of operator_times
    double pim_selectivity = 0;
    uint64_t rows_scanned = 0;
    uint64_t rows_gathered = 0;
    uint64_t fact_columns_gathered = 0;
    double cpu_path_model_ns = 0;  // analytic host side of the PIM path
    double cpu_only_model_ns = 0;  // analytic all-CPU execution
    double pim_path_model_ns = 0;  // pim_time + analytic host side
    double modeled_speedup = 1.0;
    // analytic pim-path components (sum to pim_path_model_ns)
    double model_fixed_ns = 0;
    double model_bitmap_ns = 0;
    double model_gather_ns = 0;
    double model_aggregate_ns = 0;
};

/// Analytic host-time model: fixed per-query overhead, a bitmap-driven
/// random gather at derated bandwidth, and a linear aggregation term.
inline double cpu_cost_model(uint64_t rows_gathered, double bytes_per_row,
                             const DramConfig& cfg) {
    const HostParams& h = cfg.host;
    double gather_ns = double(rows_gathered) * bytes_per_row * h.gather_derate /
                       h.seq_bandwidth_gbps;
    return h.fixed_overhead_ns + gather_ns +
           double(rows_gathered) * h.aggregate_ns_per_row;
}

/// Equality hash join: every (left, right) index pair with matching keys,
/// in left-row order.
inline std::vector<std::pair<size_t, size_t>> hash_join(const std::vector<int64_t>& left_keys,
                                                        const std::vector<int64_t>& right_keys) {
    std::unordered_multimap<int64_t, size_t> index;
    index.reserve(right_keys.size());
    for (size_t i = 0; i < right_keys.size(); ++i) index.emplace(right_keys[i], i);
    std::vector<std::pair<size_t, size_t>> out;
    for (size_t l = 0; l < left_keys.size(); ++l) {
        auto [lo, hi] = index.equal_range(left_keys[l]);
        std::vector<size_t> matches;
        for (auto it = lo; it != hi; ++it) matches.push_back(it->second);
        std::sort(matches.begin(), matches.end());
        for (size_t r : matches) out.emplace_back(l, r);
    }
    return out;
}

namespace engine_detail {

/// Columnar working set flowing through gather -> join -> residual filter.
struct WorkingSet {
    std::vector<std::string> names;
    std::vector<std::vector<Value>> cols;

    size_t row_count() const { return cols.empty() ? 0 : cols.front().size(); }
    int index(const std::string& n) const {
        for (size_t i = 0; i < names.size(); ++i)
            if (names[i] == n) return int(i);
        return -1;
    }
    const std::vector<Value>& col(const std::string& n) const {
        int i = index(n);
        if (i < 0) throw std::out_of_range("working set missing column " + n);
        return cols[size_t(i)];
    }
    void keep_rows(const std::vector<char>& mask) {
        for (auto& c : cols) {
            std::vector<Value> kept;
            kept.reserve(c.size());
            for (size_t i = 0; i < c.size(); ++i)
                if (mask[i]) kept.push_back(std::move(c[i]));
            c = std::move(kept);
        }
    }
};

inline Value column_value(const ColumnData& c, uint64_t row) {
    if (c.is_string()) return Value{c.str_at(row)};
    return Value{c.int_at(row)};
}

inline bool like_match(const std::string& s, const std::string& pat) {
    // % = any run, _ = any single char; classic two-pointer backtracking
    size_t si = 0, pi = 0, star = std::string::npos, mark = 0;
    while (si < s.size()) {
        if (pi < pat.size() && (pat[pi] == '_' || pat[pi] == s[si])) {
            ++si, ++pi;
        } else if (pi < pat.size() && pat[pi] == '%') {
            star = pi++;
            mark = si;
        } else if (star != std::string::npos) {
            pi = star + 1;
            si = ++mark;
        } else {
            return false;
        }
    }
    while (pi < pat.size() && pat[pi] == '%') ++pi;
    return pi == pat.size();
}

inline bool eval_leaf(const WhereLeaf& leaf, const Value& v, LogicalType t) {
    if (leaf.op == "like") return like_match(std::get<std::string>(v), leaf.literals[0].get<std::string>());
    if (t == LogicalType::String) {
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
        auto lit = [&](size_t i) { return literal_as_int(leaf.literals[i], t); };
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
    throw std::invalid_argument("unknown predicate op: " + leaf.op);
}

struct TypeMap {
    std::map<std::string, LogicalType> types;
    explicit TypeMap(const Schema& s) {
        for (const auto& t : s.tables)
            for (const auto& c : t.columns) types.emplace(c.name, c.type);
    }
    LogicalType of(const std::string& col) const {
        auto it = types.find(col);
        if (it == types.end()) throw std::out_of_range("unknown column: " + col);
        return it->second;
    }
};

inline bool eval_where(const WhereNode& n, const WorkingSet& ws, const TypeMap& tm, size_t row) {
    switch (n.kind) {
        case WhereNode::Kind::Leaf:
            return eval_leaf(n.leaf, ws.col(n.leaf.column)[row], tm.of(n.leaf.column));
        case WhereNode::Kind::And:
            for (const auto& c : n.children)
                if (!eval_where(c, ws, tm, row)) return false;
            return true;
        case WhereNode::Kind::Or:
            for (const auto& c : n.children)
                if (eval_where(c, ws, tm, row)) return true;
            return false;
    }
    return false;
}

inline int64_t eval_expr(const Expr& e, const WorkingSet& ws, size_t row) {
    switch (e.kind) {
        case Expr::Kind::Const:
            return e.value;
        case Expr::Kind::Column: {
            const Value& v = ws.col(e.column)[row];
            if (!std::holds_alternative<int64_t>(v))
                throw std::invalid_argument("string column in arithmetic: " + e.column);
            return std::get<int64_t>(v);
        }
        case Expr::Kind::Add:
            return checked_add(eval_expr(*e.lhs, ws, row), eval_expr(*e.rhs, ws, row));
        case Expr::Kind::Sub:
            return checked_sub(eval_expr(*e.lhs, ws, row), eval_expr(*e.rhs, ws, row));
        case Expr::Kind::Mul:
            return checked_mul(eval_expr(*e.lhs, ws, row), eval_expr(*e.rhs, ws, row));
    }
    throw std::logic_error("bad expr");
}

inline double elapsed_ns(std::chrono::steady_clock::time_point t0) {
    return double(std::chrono::duration_cast<std::chrono::nanoseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count());
}

}  // namespace engine_detail

/// Group-and-aggregate over a working set. Select items with an aggregate
/// reduce; plain items must be group keys (or residual placeholders filled
/// by the caller). With no GROUP BY and at least one aggregate the whole
/// input is one group.
inline ResultTable group_aggregate(const engine_detail::WorkingSet& ws,
                                   const std::vector<SelectItem>& select,
                                   const std::vector<std::string>& group_by,
                                   const std::set<std::string>& residual_cols = {}) {
    using engine_detail::WorkingSet;
    ResultTable out;
    for (const auto& s : select) out.columns.push_back(s.alias);

    bool any_agg = false;
    for (const auto& s : select) any_agg |= s.agg != AggFn::None;

    if (!any_agg && group_by.empty()) {  // plain projection
        for (size_t r = 0; r < ws.row_count(); ++r) {
            Row row;
            for (const auto& s : select) {
                if (s.expr->kind == Expr::Kind::Column &&
                    !std::holds_alternative<int64_t>(ws.col(s.expr->column)[r]))
                    row.push_back(ws.col(s.expr->column)[r]);
                else
                    row.push_back(Value{engine_detail::eval_expr(*s.expr, ws, r)});
            }
            out.rows.push_back(std::move(row));
        }
        return out;
    }

    struct Acc {
        std::vector<int64_t> vals;
        std::vector<bool> seen;
    };
    std::map<Row, Acc> groups;
    size_t nagg = select.size();
    for (size_t r = 0; r < ws.row_count(); ++r) {
        Row key;
        for (const auto& g : group_by) key.push_back(ws.col(g)[r]);
        auto [it, fresh] = groups.try_emplace(std::move(key));
        Acc& acc = it->second;
        if (fresh) {
            acc.vals.assign(nagg, 0);
            acc.seen.assign(nagg, false);
        }
        for (size_t si = 0; si < select.size(); ++si) {
            const SelectItem& s = select[si];
            switch (s.agg) {
                case AggFn::None:
                    break;  // group key or residual column, handled below
                case AggFn::Count:
                    acc.vals[si] = checked_add(acc.vals[si], 1);
                    acc.seen[si] = true;
                    break;
                case AggFn::Sum:
                    acc.vals[si] =
                        checked_add(acc.vals[si], engine_detail::eval_expr(*s.expr, ws, r));
                    acc.seen[si] = true;
                    break;
                case AggFn::Min: {
                    int64_t v = engine_detail::eval_expr(*s.expr, ws, r);
                    acc.vals[si] = acc.seen[si] ? std::min(acc.vals[si], v) : v;
                    acc.seen[si] = true;
                    break;
                }
                case AggFn::Max: {
                    int64_t v = engine_detail::eval_expr(*s.expr, ws, r);
                    acc.vals[si] = acc.seen[si] ? std::max(acc.vals[si], v) : v;
                    acc.seen[si] = true;
                    break;
                }
            }
        }
    }
    if (groups.empty() && group_by.empty()) {  // SUM over empty -> 0
        Acc& acc = groups[Row{}];
        acc.vals.assign(nagg, 0);
        acc.seen.assign(nagg, false);
    }

    for (const auto& [key, acc] : groups) {
        Row row;
        for (size_t si = 0; si < select.size(); ++si) {
            const SelectItem& s = select[si];
            if (s.agg != AggFn::None) {
                row.push_back(Value{acc.vals[si]});
                continue;
            }
            if (!s.expr) throw std::invalid_argument("plain select item without expression");
            if (s.expr->kind == Expr::Kind::Column) {
                const std::string& c = s.expr->column;
                auto gi = std::find(group_by.begin(), group_by.end(), c);
                if (gi != group_by.end()) {
                    row.push_back(key[size_t(gi - group_by.begin())]);
                    continue;
                }
                if (residual_cols.count(c)) {
                    row.push_back(Value{int64_t{0}});  // placeholder, filled post-join
                    continue;
                }
            }
            throw std::invalid_argument("non-aggregated select item '" + s.alias +
                                        "' is not a group key");
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

inline ExecutionReport execute(const PhysicalPlan& plan, const Database& db,
                               const DramConfig& cfg) {
    using namespace engine_detail;
    using clock = std::chrono::steady_clock;
    const Query& q = plan.query;
    const Table& fact = db.table(q.table);
    const TypeMap tm(db.schema);
    ExecutionReport rep;
    uint64_t nrows = fact.row_count();
    rep.rows_scanned = nrows;

    // --- PIM filter (functional bitmap + modeled latency) ---
    Bitmap bitmap(nrows, true);
    uint64_t pim_passes = 0;
    double scanned_bytes = 0;  // what an all-CPU scan of the same predicates reads
    auto apply = [&](const PlannedPredicate& pp, const Bitmap* acc) {
        const ColumnData& col = fact.column(pp.column);
        pim_passes++;
        scanned_bytes += double(col.codes.packed_bytes());
        rep.pim_time_ns +=
            page_filter_latency(cfg, plan.spec).total *
            double(pim_page_count(col.codes.packed_bytes(), cfg));
        return filter_column(col.codes, compile_predicate(pp.pred, col.codes.width), acc);
    };
    for (const auto& pp : plan.pim_conjuncts) bitmap = apply(pp, &bitmap);
    for (const auto& g : plan.pim_or_groups) {
        Bitmap merged(nrows, false);
        for (const auto& branch : g.branches) {
            Bitmap bb(nrows, true);
            for (const auto& pp : branch) bb = apply(pp, &bb);
            merged.or_with(bb);
        }
        bitmap.and_with(merged);
    }
    if (pim_passes > 0) rep.pim_time_ns += mode_switch_overhead(cfg);
    rep.operator_times.push_back({"pim_filter", rep.pim_time_ns});
    uint64_t selected = bitmap.popcount();
    rep.pim_selectivity = nrows ? double(selected) / double(nrows) : 0.0;

    // --- columns the host needs from the fact table ---
    std::set<std::string> needed;
    visit_query_columns(q, [&](const std::string& c) { needed.insert(c); });
    for (const auto& rj : plan.residual_joins) needed.insert(rj.key_column);
    if (plan.cpu_where) denorm_detail::collect_where_columns(*plan.cpu_where, needed);
    for (const auto& jn : q.joins) needed.insert(jn.fk_column);
    std::vector<std::string> fact_cols;
    for (const auto& c : needed)
        if (fact.column_index(c) >= 0) fact_cols.push_back(c);
    rep.fact_columns_gathered = fact_cols.size();

    // --- gather ---
    auto t0 = clock::now();
    WorkingSet ws;
    rep.rows_gathered = selected;
    for (const auto& c : fact_cols) {
        const ColumnData& col = fact.column(c);
        std::vector<Value> vals;
        vals.reserve(selected);
        bitmap.for_each_set([&](uint64_t i) { vals.push_back(column_value(col, i)); });
        ws.names.push_back(c);
        ws.cols.push_back(std::move(vals));
    }
    if (ws.names.empty()) {  // still track row multiplicity
        std::vector<Value> ones(selected, Value{int64_t{1}});
        ws.names.push_back("__row");
        ws.cols.push_back(std::move(ones));
    }
    rep.operator_times.push_back({"gather", elapsed_ns(t0)});

    // --- joins (host hash joins over decoded key values) ---
    t0 = clock::now();
    for (const auto& jn : q.joins) {
        const TableSchema* dts = db.schema.find_table(jn.dim_table);
        if (!dts) throw std::invalid_argument("unknown join table: " + jn.dim_table);
        const Table& dim = db.table(jn.dim_table);
        const ColumnData& pk = dim.column(dts->primary_key);
        std::vector<int64_t> right(pk.rows());
        for (uint64_t i = 0; i < pk.rows(); ++i) right[i] = pk.int_at(i);
        const auto& fkvals = ws.col(jn.fk_column);
        std::vector<int64_t> left(fkvals.size());
        for (size_t i = 0; i < fkvals.size(); ++i) left[i] = std::get<int64_t>(fkvals[i]);
        auto matches = hash_join(left, right);
        // project surviving left rows, then append needed dim columns
        std::vector<size_t> lidx, ridx;
        lidx.reserve(matches.size());
        for (auto [l, r] : matches) lidx.push_back(l), ridx.push_back(r);
        for (auto& c : ws.cols) {
            std::vector<Value> next;
            next.reserve(lidx.size());
            for (size_t i : lidx) next.push_back(c[i]);
            c = std::move(next);
        }
        for (const auto& c : needed) {
            if (ws.index(c) >= 0 || dim.column_index(c) < 0) continue;
            const ColumnData& dc = dim.column(c);
            std::vector<Value> vals;
            vals.reserve(ridx.size());
            for (size_t r : ridx) vals.push_back(column_value(dc, r));
            ws.names.push_back(c);
            ws.cols.push_back(std::move(vals));
        }
    }
    rep.operator_times.push_back({"join", elapsed_ns(t0)});

    // --- residual CPU predicates ---
    t0 = clock::now();
    if (plan.cpu_where) {
        std::vector<char> mask(ws.row_count());
        for (size_t r = 0; r < ws.row_count(); ++r)
            mask[r] = eval_where(*plan.cpu_where, ws, tm, r) ? 1 : 0;
        ws.keep_rows(mask);
    }
    rep.operator_times.push_back({"cpu_filter", elapsed_ns(t0)});

    // --- aggregate ---
    t0 = clock::now();
    std::set<std::string> residual_cols;
    for (const auto& rj : plan.residual_joins)
        for (const auto& c : rj.columns) residual_cols.insert(c);
    ResultTable result = group_aggregate(ws, q.select, q.group_by, residual_cols);

    // --- post-aggregation residual joins ---
    for (const auto& rj : plan.residual_joins) {
        const Table& dim = db.table(rj.dim_table);
        const ColumnData& pk = dim.column(rj.key_column);
        std::unordered_map<int64_t, uint64_t> idx;
        for (uint64_t i = 0; i < pk.rows(); ++i) idx.emplace(pk.int_at(i), i);
        int key_pos = -1;
        for (size_t gi = 0; gi < q.group_by.size(); ++gi) {
            for (size_t si = 0; si < q.select.size(); ++si)
                if (q.select[si].agg == AggFn::None && q.select[si].expr &&
                    q.select[si].expr->kind == Expr::Kind::Column &&
                    q.select[si].expr->column == rj.key_column)
                    key_pos = int(si);
        }
        if (key_pos < 0)
            throw std::invalid_argument("residual join key " + rj.key_column +
                                        " missing from select list");
        for (const auto& col : rj.columns) {
            int out_pos = -1;
            for (size_t si = 0; si < q.select.size(); ++si)
                if (q.select[si].agg == AggFn::None && q.select[si].expr &&
                    q.select[si].expr->kind == Expr::Kind::Column &&
                    q.select[si].expr->column == col)
                    out_pos = int(si);
            if (out_pos < 0) continue;
            const ColumnData& dc = dim.column(col);
            for (auto& row : result.rows) {
                int64_t key = std::get<int64_t>(row[size_t(key_pos)]);
                auto it = idx.find(key);
                if (it == idx.end()) throw std::runtime_error("residual join key not found");
                row[size_t(out_pos)] = column_value(dc, it->second);
            }
        }
    }
    rep.operator_times.push_back({"aggregate", elapsed_ns(t0)});

    // --- order / canonicalize / limit ---
    t0 = clock::now();
    if (!q.order_by.empty()) {
        std::vector<std::pair<size_t, bool>> keys;  // column index, descending
        for (const auto& o : q.order_by) {
            bool desc = !o.empty() && o[0] == '-';
            std::string name = desc ? o.substr(1) : o;
            auto it = std::find(result.columns.begin(), result.columns.end(), name);
            if (it == result.columns.end())
                throw std::invalid_argument("ORDER BY references unknown alias: " + name);
            keys.emplace_back(size_t(it - result.columns.begin()), desc);
        }
        std::stable_sort(result.rows.begin(), result.rows.end(),
                         [&](const Row& a, const Row& b) {
                             for (auto [ci, desc] : keys) {
                                 if (a[ci] == b[ci]) continue;
                                 return desc ? b[ci] < a[ci] : a[ci] < b[ci];
                             }
                             return false;
                         });
    } else {
        std::sort(result.rows.begin(), result.rows.end());  // canonical order
    }
    if (q.limit >= 0 && int64_t(result.rows.size()) > q.limit)
        result.rows.resize(size_t(q.limit));
    rep.operator_times.push_back({"sort_limit", elapsed_ns(t0)});

    rep.result = std::move(result);
    for (const auto& ot : rep.operator_times) rep.total_ns += ot.ns;

    // --- analytic accounting ---
    const HostParams& h = cfg.host;
    double gather_bytes_per_row = 8.0 * double(rep.fact_columns_gathered);
    double bitmap_bytes = double((nrows + 7) / 8);
    rep.model_fixed_ns = h.fixed_overhead_ns;
    rep.model_bitmap_ns = bitmap_bytes / h.seq_bandwidth_gbps;
    rep.model_gather_ns = double(rep.rows_gathered) * gather_bytes_per_row * h.gather_derate /
                          h.seq_bandwidth_gbps;
    rep.model_aggregate_ns = double(rep.rows_gathered) * h.aggregate_ns_per_row;
    rep.cpu_path_model_ns =
        rep.model_fixed_ns + rep.model_bitmap_ns + rep.model_gather_ns + rep.model_aggregate_ns;
    rep.pim_path_model_ns = rep.pim_time_ns + rep.cpu_path_model_ns;
    rep.cpu_only_model_ns = h.fixed_overhead_ns + scanned_bytes / h.seq_bandwidth_gbps +
                            double(rep.rows_gathered) * h.aggregate_ns_per_row;
    rep.modeled_speedup = rep.pim_path_model_ns > 0
                              ? rep.cpu_only_model_ns / rep.pim_path_model_ns
                              : 1.0;
    return rep;
}

/// Convenience wrapper: plan then execute.
inline ExecutionReport run_query(const Query& q, const Database& db, const DramConfig& cfg,
                                 const PimLevelSpec& spec,
                                 std::vector<ResidualJoin> residual = {}) {
    return execute(plan_query(q, db, spec, std::move(residual)), db, cfg);
}

}  // namespace pimdb
