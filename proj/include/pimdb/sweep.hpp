#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pimdb/cost.hpp"
#include "pimdb/denorm.hpp"
#include "pimdb/engine.hpp"
#include "pimdb/ssb.hpp"

namespace pimdb {

/// Experiment grid. Iteration order is fixed (scale factor, then denorm
/// level, then PIM spec, then query) so output is reproducible row for row.
struct SweepSpec {
    std::vector<double> scale_factors;
    std::vector<DenormLevel> levels;
    std::vector<PimLevelSpec> specs;
    uint64_t seed = 42;
};

struct SweepRow {
    double scale_factor = 0;
    std::string denorm_level;
    std::string pim_level;
    uint32_t salp = 0;
    std::string placement;
    std::string query;
    std::string metric;
    double value = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<std::string> errors;  // one entry per failed grid point
};

/// Filter units powered while one query runs at this level.
inline uint64_t active_bfus(const DramConfig& cfg, const PimLevelSpec& spec) {
    uint64_t chips = uint64_t{cfg.channels} * cfg.ranks_per_channel * cfg.chips_per_rank;
    switch (spec.level) {
        case PimLevel::BankAB: return chips * cfg.banks_per_chip();
        case PimLevel::BankSB: return chips;  // one active bank per chip
        case PimLevel::Rank: return uint64_t{cfg.channels} * cfg.ranks_per_channel;
        case PimLevel::Channel: return cfg.channels;
        case PimLevel::Subarray: return chips * cfg.banks_per_chip() * spec.salp;
    }
    return 0;
}

/// Modeled energy for one executed query, plus the all-CPU baseline.
struct RunEnergy {
    double pim_path_j = 0;
    double baseline_j = 0;
    double relative_efficiency = 1.0;
};

inline RunEnergy run_energy(const DramConfig& cfg, const PimLevelSpec& spec,
                            const ExecutionReport& rep) {
    EnergyPhases pim = {
        {"pim_filter", rep.pim_time_ns, cfg.power.dram_normal_w, active_bfus(cfg, spec), 0.0,
         spec.level == PimLevel::BankAB},
        {"host", rep.cpu_path_model_ns, cfg.power.dram_normal_w, 0, cfg.power.cpu_active_w,
         false}};
    EnergyPhases base = {{"cpu_only", rep.cpu_only_model_ns, cfg.power.dram_normal_w, 0,
                          cfg.power.cpu_active_w, false}};
    RunEnergy e;
    e.pim_path_j = energy_joules(cfg, pim);
    e.baseline_j = energy_joules(cfg, base);
    e.relative_efficiency = relative_efficiency(cfg, base, pim);
    return e;
}

namespace sweep_detail {

inline std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline SweepRow base_row(double sf, DenormLevel level, const PimLevelSpec& spec,
                         const std::string& query) {
    SweepRow r;
    r.scale_factor = sf;
    r.denorm_level = level_name(level);
    r.pim_level = level_name(spec.level);
    r.salp = spec.level == PimLevel::Subarray ? spec.salp : 0;
    r.placement = spec.level == PimLevel::Subarray
                      ? (spec.placement == Placement::Optimistic ? "optimistic" : "pessimistic")
                      : "-";
    r.query = query;
    return r;
}

}  // namespace sweep_detail

/// Runs the full grid. Failures at one grid point are recorded and the
/// sweep continues. Only modeled (deterministic) metrics are emitted, so
/// repeated runs with the same seed produce identical output.
inline SweepResult run_sweep(const SweepSpec& sweep, const std::vector<Query>& queries,
                             const DramConfig& cfg, const std::string& fact_table) {
    using sweep_detail::base_row;
    SweepResult out;
    auto emit = [&](SweepRow r, const std::string& metric, double v) {
        r.metric = metric;
        r.value = v;
        out.rows.push_back(std::move(r));
    };
    for (double sf : sweep.scale_factors) {
        Database base = generate_ssb(sf, sweep.seed);
        for (DenormLevel level : sweep.levels) {
            DenormPlan plan = analyze_workload(queries, base.schema, fact_table, level);
            Database wide = build_widetable(base, plan);
            PimLevelSpec any;
            emit(base_row(sf, level, any, "-"), "memory_overhead",
                 memory_overhead(base, wide));
            for (const auto& spec : sweep.specs) {
                std::vector<double> model_times, speedups;
                bool config_ok = true;
                for (const auto& q : queries) {
                    SweepRow r = base_row(sf, level, spec, q.name);
                    try {
                        RewrittenQuery rw = rewrite_query(q, wide.schema, plan);
                        ExecutionReport rep =
                            run_query(rw.query, wide, cfg, spec, rw.residual_joins);
                        emit(r, "pim_time_ns", rep.pim_time_ns);
                        emit(r, "pim_path_model_ns", rep.pim_path_model_ns);
                        emit(r, "cpu_only_model_ns", rep.cpu_only_model_ns);
                        emit(r, "modeled_speedup", rep.modeled_speedup);
                        emit(r, "pim_selectivity", rep.pim_selectivity);
                        emit(r, "rows_gathered", double(rep.rows_gathered));
                        emit(r, "result_rows", double(rep.result.rows.size()));
                        emit(r, "area_overhead", area_overhead(cfg, spec));
                        emit(r, "peak_power_w", peak_power(cfg, spec, active_bfus(cfg, spec)));
                        RunEnergy e = run_energy(cfg, spec, rep);
                        emit(r, "energy_j", e.pim_path_j);
                        emit(r, "relative_efficiency", e.relative_efficiency);
                        double total = rep.pim_path_model_ns;
                        emit(r, "pct_pim_filter", 100.0 * rep.pim_time_ns / total);
                        emit(r, "pct_fixed", 100.0 * rep.model_fixed_ns / total);
                        emit(r, "pct_bitmap_read", 100.0 * rep.model_bitmap_ns / total);
                        emit(r, "pct_gather", 100.0 * rep.model_gather_ns / total);
                        emit(r, "pct_aggregate", 100.0 * rep.model_aggregate_ns / total);
                        model_times.push_back(rep.pim_path_model_ns);
                        speedups.push_back(rep.modeled_speedup);
                    } catch (const std::exception& ex) {
                        emit(r, "error", 1.0);
                        out.errors.push_back(r.query + " @ " + r.denorm_level + "/" +
                                             r.pim_level + ": " + ex.what());
                        config_ok = false;
                    }
                }
                if (config_ok && !model_times.empty()) {
                    auto geomean = [](const std::vector<double>& v) {
                        double s = 0;
                        for (double x : v) s += std::log(x);
                        return std::exp(s / double(v.size()));
                    };
                    SweepRow r = base_row(sf, level, spec, "geomean");
                    emit(r, "pim_path_model_ns", geomean(model_times));
                    emit(r, "modeled_speedup", geomean(speedups));
                }
            }
        }
    }
    return out;
}

inline std::string sweep_csv_header() {
    return "scale_factor,denorm_level,pim_level,salp,placement,query,metric,value";
}

inline std::string sweep_row_csv(const SweepRow& r) {
    using sweep_detail::format_value;
    std::ostringstream os;
    os << format_value(r.scale_factor) << ',' << r.denorm_level << ',' << r.pim_level << ','
       << r.salp << ',' << r.placement << ',' << r.query << ',' << r.metric << ','
       << format_value(r.value);
    return os.str();
}

inline void write_sweep_csv(const SweepResult& res, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << sweep_csv_header() << '\n';
    for (const auto& r : res.rows) out << sweep_row_csv(r) << '\n';
}

inline void write_sweep_json(const SweepResult& res, const std::string& path) {
    nlohmann::json j;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : res.rows)
        j["rows"].push_back({{"scale_factor", sweep_detail::format_value(r.scale_factor)},
                             {"denorm_level", r.denorm_level},
                             {"pim_level", r.pim_level},
                             {"salp", r.salp},
                             {"placement", r.placement},
                             {"query", r.query},
                             {"metric", r.metric},
                             {"value", sweep_detail::format_value(r.value)}});
    j["errors"] = res.errors;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
}

inline SweepResult read_sweep_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    auto rows = csvio::parse_csv(in);
    if (rows.empty() || rows.front().size() != 8)
        throw std::runtime_error(path + ": not a sweep result file");
    SweepResult res;
    for (size_t i = 1; i < rows.size(); ++i) {
        const auto& f = rows[i];
        if (f.size() != 8) throw std::runtime_error(path + ": bad row arity");
        SweepRow r;
        r.scale_factor = std::stod(f[0]);
        r.denorm_level = f[1];
        r.pim_level = f[2];
        r.salp = uint32_t(std::stoul(f[3]));
        r.placement = f[4];
        r.query = f[5];
        r.metric = f[6];
        r.value = std::stod(f[7]);
        res.rows.push_back(std::move(r));
    }
    return res;
}

// ------------------------------------------------------------------ report

struct ReportTables {
    // config id -> rows
    std::vector<std::vector<std::string>> speedup_vs_selectivity;  // cfg, query, sel, speedup
    std::vector<std::vector<std::string>> operator_breakdown;      // cfg, query, op, percent
    std::vector<std::vector<std::string>> overhead_by_level;       // sf, level, overhead
};

inline std::string config_id(const SweepRow& r) {
    std::string id = "sf" + sweep_detail::format_value(r.scale_factor) + "/" + r.denorm_level +
                     "/" + r.pim_level;
    if (r.pim_level == "subarray")
        id += "-" + std::to_string(r.salp) + "-" + r.placement;
    return id;
}

inline ReportTables make_report(const SweepResult& res) {
    if (res.rows.empty()) throw std::invalid_argument("empty result matrix");
    ReportTables rt;
    std::map<std::pair<std::string, std::string>, std::map<std::string, double>> by_run;
    for (const auto& r : res.rows) {
        if (r.query == "-" || r.query == "geomean") continue;
        by_run[{config_id(r), r.query}][r.metric] = r.value;
    }
    for (const auto& [key, metrics] : by_run) {
        if (metrics.count("error")) continue;
        rt.speedup_vs_selectivity.push_back(
            {key.first, key.second, sweep_detail::format_value(metrics.at("pim_selectivity")),
             sweep_detail::format_value(metrics.at("modeled_speedup"))});
        for (const char* op : {"pct_pim_filter", "pct_fixed", "pct_bitmap_read", "pct_gather",
                               "pct_aggregate"})
            rt.operator_breakdown.push_back(
                {key.first, key.second, op, sweep_detail::format_value(metrics.at(op))});
    }
    for (const auto& r : res.rows)
        if (r.metric == "memory_overhead")
            rt.overhead_by_level.push_back({sweep_detail::format_value(r.scale_factor),
                                            r.denorm_level,
                                            sweep_detail::format_value(r.value)});
    return rt;
}

inline void write_table_csv(const std::vector<std::vector<std::string>>& rows,
                            const std::string& header, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << header << '\n';
    for (const auto& r : rows) {
        for (size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
        out << '\n';
    }
}

}  // namespace pimdb
