// Batch front-end: data generation, denormalization analysis, single query
// runs, design-space sweeps, and report rendering.
//
// Exit codes: 0 success, 2 validation failure, 3 partial sweep failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pimdb/config.hpp"
#include "pimdb/database.hpp"
#include "pimdb/denorm.hpp"
#include "pimdb/engine.hpp"
#include "pimdb/query.hpp"
#include "pimdb/ssb.hpp"
#include "pimdb/sweep.hpp"
#include "pimdb/timing.hpp"

namespace fs = std::filesystem;
using namespace pimdb;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitPartial = 3;

// Environment overrides: PIMDB_<FIELD> (upper-case top-level config field)
// takes precedence over the config file.
void apply_env_overrides(DramConfig& cfg) {
    auto get = [](const char* name) -> const char* { return std::getenv(name); };
    auto set_u32 = [&](const char* name, uint32_t& field) {
        if (const char* v = get(name)) field = uint32_t(std::stoul(v));
    };
    auto set_u64 = [&](const char* name, uint64_t& field) {
        if (const char* v = get(name)) field = std::stoull(v);
    };
    auto set_dbl = [&](const char* name, double& field) {
        if (const char* v = get(name)) field = std::stod(v);
    };
    set_u32("PIMDB_CHANNELS", cfg.channels);
    set_u32("PIMDB_RANKS_PER_CHANNEL", cfg.ranks_per_channel);
    set_u32("PIMDB_CHIPS_PER_RANK", cfg.chips_per_rank);
    set_u32("PIMDB_DEVICE_WIDTH", cfg.device_width);
    set_u32("PIMDB_BANK_GROUPS", cfg.bank_groups);
    set_u32("PIMDB_BANKS_PER_GROUP", cfg.banks_per_group);
    set_u32("PIMDB_SUBARRAYS_PER_BANK", cfg.subarrays_per_bank);
    set_u32("PIMDB_ROWS_PER_SUBARRAY", cfg.rows_per_subarray);
    set_u32("PIMDB_COLUMNS_PER_ROW", cfg.columns_per_row);
    set_dbl("PIMDB_CLOCK_PERIOD_NS", cfg.clock_period_ns);
    set_dbl("PIMDB_MODE_SWITCH_NS", cfg.mode_switch_ns);
    set_u64("PIMDB_SUPERPAGE_BYTES", cfg.superpage_bytes);
    set_u32("PIMDB_SUBARRAY_CYCLES_PER_WORD", cfg.subarray_cycles_per_word);
}

DramConfig load_cfg(const std::string& path) {
    DramConfig cfg;
    if (!path.empty()) cfg = load_config(path);
    apply_env_overrides(cfg);
    validate_config_or_throw(cfg);
    return cfg;
}

PimLevelSpec parse_pim_spec(const std::string& level, uint32_t salp,
                            const std::string& placement) {
    PimLevelSpec spec;
    if (level == "channel") spec.level = PimLevel::Channel;
    else if (level == "rank") spec.level = PimLevel::Rank;
    else if (level == "bank_sb") spec.level = PimLevel::BankSB;
    else if (level == "bank_ab") spec.level = PimLevel::BankAB;
    else if (level == "subarray") spec.level = PimLevel::Subarray;
    else throw std::invalid_argument("unknown pim level: " + level);
    spec.salp = salp;
    spec.placement =
        placement == "pessimistic" ? Placement::Pessimistic : Placement::Optimistic;
    return spec;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void write_result_csv(const ResultTable& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (size_t i = 0; i < t.columns.size(); ++i)
        out << (i ? "," : "") << csv_escape(t.columns[i]);
    out << '\n';
    for (const auto& row : t.rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "");
            if (std::holds_alternative<int64_t>(row[i]))
                out << std::get<int64_t>(row[i]);
            else
                out << csv_escape(std::get<std::string>(row[i]));
        }
        out << '\n';
    }
}

nlohmann::json report_to_json(const ExecutionReport& rep) {
    nlohmann::json j;
    j["pim_time_ns"] = rep.pim_time_ns;
    j["total_measured_ns"] = rep.total_ns;
    j["pim_selectivity"] = rep.pim_selectivity;
    j["rows_scanned"] = rep.rows_scanned;
    j["rows_gathered"] = rep.rows_gathered;
    j["cpu_only_model_ns"] = rep.cpu_only_model_ns;
    j["pim_path_model_ns"] = rep.pim_path_model_ns;
    j["modeled_speedup"] = rep.modeled_speedup;
    j["operators"] = nlohmann::json::array();
    for (const auto& ot : rep.operator_times)
        j["operators"].push_back({{"op", ot.op}, {"ns", ot.ns}});
    j["result_rows"] = rep.result.rows.size();
    return j;
}

std::vector<Query> load_queries(const std::vector<std::string>& paths) {
    std::vector<Query> qs;
    for (const auto& p : paths) {
        if (fs::is_directory(p)) {
            std::vector<fs::path> files;
            for (const auto& e : fs::directory_iterator(p))
                if (e.path().extension() == ".json") files.push_back(e.path());
            std::sort(files.begin(), files.end());
            for (const auto& f : files) qs.push_back(load_query(f.string()));
        } else {
            qs.push_back(load_query(p));
        }
    }
    return qs;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"processing-in-memory filtering design-space simulator"};
    app.require_subcommand(1);

    std::string config_path, out_path, db_path, query_path, level_str = "D1";
    std::string pim_level = "bank_ab", placement = "optimistic", fact = "lineorder";
    std::vector<std::string> query_paths;
    double sf = 0.01;
    uint64_t seed = 42;
    uint32_t salp = 1;

    auto* gen = app.add_subcommand("gen", "generate a synthetic star-schema store");
    gen->add_option("--sf", sf, "scale factor")->required();
    gen->add_option("--seed", seed, "generator seed");
    gen->add_option("--out", out_path, "output store file")->required();
    gen->add_option("--config", config_path, "config json");

    auto* denorm = app.add_subcommand("denorm", "workload denormalization analysis");
    denorm->add_option("--db", db_path, "input store file")->required();
    denorm->add_option("--queries", query_paths, "query fixture files or directory")->required();
    denorm->add_option("--level", level_str, "denormalization level D1..D4");
    denorm->add_option("--fact", fact, "fact table name");
    denorm->add_option("--out", out_path, "output directory")->required();

    auto* run = app.add_subcommand("run", "execute one query");
    run->add_option("--db", db_path, "input store file")->required();
    run->add_option("--query", query_path, "query fixture file")->required();
    run->add_option("--workload", query_paths, "workload files for denorm analysis");
    run->add_option("--level", level_str, "denormalization level D1..D4");
    run->add_option("--fact", fact, "fact table name");
    run->add_option("--pim", pim_level, "channel|rank|bank_sb|bank_ab|subarray");
    run->add_option("--salp", salp, "subarray parallelism");
    run->add_option("--placement", placement, "optimistic|pessimistic");
    run->add_option("--config", config_path, "config json");
    run->add_option("--out", out_path, "output directory")->required();

    std::vector<std::string> sweep_sfs = {"0.01"};
    std::vector<std::string> sweep_levels = {"D1", "D2", "D3"};
    std::vector<std::string> sweep_pims = {"channel", "rank", "bank_sb", "bank_ab",
                                           "subarray-2-optimistic", "subarray-8-pessimistic"};
    auto* sweep = app.add_subcommand("sweep", "run the experiment grid");
    sweep->add_option("--sf", sweep_sfs, "scale factors");
    sweep->add_option("--levels", sweep_levels, "denorm levels");
    sweep->add_option("--pims", sweep_pims,
                      "pim specs (level or subarray-<salp>-<placement>)");
    sweep->add_option("--queries", query_paths, "query fixture files or directory")->required();
    sweep->add_option("--fact", fact, "fact table name");
    sweep->add_option("--seed", seed, "generator seed");
    sweep->add_option("--config", config_path, "config json");
    sweep->add_option("--out", out_path, "output directory")->required();

    std::string matrix_path;
    auto* report = app.add_subcommand("report", "summarize a sweep result matrix");
    report->add_option("--in", matrix_path, "sweep csv")->required();
    report->add_option("--out", out_path, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            if (!(sf > 0)) {
                std::cerr << "error: scale factor must be positive\n";
                return kExitValidation;
            }
            Database db = generate_ssb(sf, seed);
            save_database(db, out_path);
            std::cout << "wrote " << out_path << " (" << db.table("lineorder").row_count()
                      << " fact rows, " << db.encoded_bytes() << " encoded bytes)\n";
            return kExitOk;
        }

        if (denorm->parsed()) {
            Database db = open_database(db_path);
            auto queries = load_queries(query_paths);
            DenormLevel level = parse_level(level_str);
            DenormPlan plan = analyze_workload(queries, db.schema, fact, level);
            Database wide = build_widetable(db, plan);
            fs::create_directories(out_path);
            nlohmann::json j;
            j["level"] = level_name(level);
            j["fact_table"] = plan.fact_table;
            j["folds"] = nlohmann::json::array();
            for (const auto& fe : plan.folds)
                j["folds"].push_back({{"dim_table", fe.dim_table}, {"column", fe.column}});
            j["residual_joins"] = nlohmann::json::array();
            for (const auto& rj : plan.residual_joins)
                j["residual_joins"].push_back({{"query", rj.query_name},
                                               {"dim_table", rj.dim_table},
                                               {"key", rj.key_column},
                                               {"columns", rj.columns}});
            j["memory_overhead"] = memory_overhead(db, wide);
            std::ofstream out(fs::path(out_path) / "denorm.json");
            out << j.dump(2) << '\n';
            save_database(wide, (fs::path(out_path) / "widetable.store").string());
            std::cout << j.dump(2) << '\n';
            return kExitOk;
        }

        if (run->parsed()) {
            DramConfig cfg = load_cfg(config_path);
            Database db = open_database(db_path);
            Query q = load_query(query_path);
            std::vector<Query> workload =
                query_paths.empty() ? std::vector<Query>{q} : load_queries(query_paths);
            DenormLevel level = parse_level(level_str);
            DenormPlan plan = analyze_workload(workload, db.schema, fact, level);
            Database wide = build_widetable(db, plan);
            RewrittenQuery rw = rewrite_query(q, wide.schema, plan);
            PimLevelSpec spec = parse_pim_spec(pim_level, salp, placement);
            ExecutionReport rep = run_query(rw.query, wide, cfg, spec, rw.residual_joins);
            fs::create_directories(out_path);
            std::ofstream out(fs::path(out_path) / "report.json");
            out << report_to_json(rep).dump(2) << '\n';
            write_result_csv(rep.result, (fs::path(out_path) / "result.csv").string());
            std::cout << report_to_json(rep).dump(2) << '\n';
            return kExitOk;
        }

        if (sweep->parsed()) {
            DramConfig cfg = load_cfg(config_path);
            auto queries = load_queries(query_paths);
            SweepSpec spec;
            spec.seed = seed;
            for (const auto& s : sweep_sfs) spec.scale_factors.push_back(std::stod(s));
            for (const auto& s : sweep_levels) spec.levels.push_back(parse_level(s));
            for (const auto& s : sweep_pims) {
                if (s.rfind("subarray", 0) == 0 && s.size() > 8) {
                    // subarray-<salp>-<placement>
                    size_t p1 = s.find('-'), p2 = s.find('-', p1 + 1);
                    uint32_t k = uint32_t(std::stoul(s.substr(p1 + 1, p2 - p1 - 1)));
                    spec.specs.push_back(parse_pim_spec("subarray", k, s.substr(p2 + 1)));
                } else {
                    spec.specs.push_back(parse_pim_spec(s, 1, "optimistic"));
                }
            }
            SweepResult res = run_sweep(spec, queries, cfg, fact);
            fs::create_directories(out_path);
            write_sweep_csv(res, (fs::path(out_path) / "sweep.csv").string());
            write_sweep_json(res, (fs::path(out_path) / "sweep.json").string());
            if (!res.errors.empty()) {
                for (const auto& e : res.errors) std::cerr << "grid point failed: " << e << '\n';
                return kExitPartial;
            }
            std::cout << "wrote " << res.rows.size() << " result rows to " << out_path << '\n';
            return kExitOk;
        }

        if (report->parsed()) {
            SweepResult res = read_sweep_csv(matrix_path);
            ReportTables rt = make_report(res);
            fs::create_directories(out_path);
            write_table_csv(rt.speedup_vs_selectivity, "config,query,selectivity,speedup",
                            (fs::path(out_path) / "speedup_vs_selectivity.csv").string());
            write_table_csv(rt.operator_breakdown, "config,query,operator,percent",
                            (fs::path(out_path) / "operator_breakdown.csv").string());
            write_table_csv(rt.overhead_by_level, "scale_factor,denorm_level,overhead",
                            (fs::path(out_path) / "overhead_by_level.csv").string());
            std::cout << "wrote report tables to " << out_path << '\n';
            return kExitOk;
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return kExitValidation;
    }
    return kExitValidation;
}
