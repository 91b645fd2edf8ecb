#pragma once

#include <bit>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace pimdb {

/// JEDEC-style timing parameters, in memory-clock cycles.
struct TimingParams {
    uint32_t tCCD_S = 4;
    uint32_t tCCD_L = 8;
    uint32_t tRCD = 22;
    uint32_t tRP = 22;
    uint32_t tRAS = 52;
    uint32_t tCL = 22;
};

struct PowerParams {
    double bfu_active_uw = 118.7;     // one filtering unit, active
    double dram_normal_w = 15.0;      // whole DRAM subsystem, normal operation
    double ab_peak_multiplier = 4.0;  // all-bank mode peak multiplier
    double cpu_active_w = 65.0;
};

struct AreaParams {
    double bfu_mm2 = 0.001;
    double walker_mm2 = 0.012;
    double chip_reference_mm2 = 16.0;
};

/// Analytic host-side cost model parameters.
struct HostParams {
    double seq_bandwidth_gbps = 25.6;    // sequential stream bandwidth, GB/s
    double gather_derate = 8.0;          // random-gather bandwidth penalty
    double fixed_overhead_ns = 50000.0;  // per-query parse/plan/dispatch
    double aggregate_ns_per_row = 5.0;
};

/// Full DRAM hierarchy geometry plus the timing/power/area model constants.
/// This is the single source of truth for every model in the library.
struct DramConfig {
    uint32_t channels = 8;
    uint32_t ranks_per_channel = 4;
    uint32_t chips_per_rank = 8;
    uint32_t device_width = 8;  // bits per chip per beat: 4, 8 or 16
    uint32_t bank_groups = 4;
    uint32_t banks_per_group = 4;
    uint32_t subarrays_per_bank = 16;
    uint32_t rows_per_subarray = 4096;
    uint32_t columns_per_row = 128;  // 64-bit column positions per chip row
    double clock_period_ns = 0.625;  // DDR4-3200 command clock

    TimingParams timing;
    PowerParams power;
    AreaParams area;
    HostParams host;

    double mode_switch_ns = 2000.0;  // one PIM mode transition (enter or exit)
    uint64_t superpage_bytes = 0;    // 0: PIM page = exactly one system row

    // Subarray PEs stream one 64-bit word through the walker every
    // `subarray_cycles_per_word` clocks. Calibration constant; the measured
    // subarray points are slower than pure SALP scaling would predict.
    uint32_t subarray_cycles_per_word = 3;

    // Rotate successive whole-system rows across subarrays so PIM pages
    // land in different subarrays.
    bool rotate_subarrays = true;

    uint32_t banks_per_chip() const { return bank_groups * banks_per_group; }
    uint64_t row_bytes_per_chip() const { return uint64_t{columns_per_row} * 8; }
    uint64_t bytes_per_chip() const {
        return uint64_t{banks_per_chip()} * subarrays_per_bank * rows_per_subarray *
               row_bytes_per_chip();
    }
    uint64_t total_bytes() const {
        return uint64_t{channels} * ranks_per_channel * chips_per_rank * bytes_per_chip();
    }
    /// One system-wide row position across every channel/rank/chip/bank.
    uint64_t system_row_bytes() const {
        return uint64_t{channels} * ranks_per_channel * chips_per_rank * banks_per_chip() *
               row_bytes_per_chip();
    }
    double ns(uint64_t cycles) const { return double(cycles) * clock_period_ns; }
};

inline bool is_pow2(uint64_t v) { return v != 0 && std::has_single_bit(v); }

/// Returns every violated invariant; empty means the config is usable.
inline std::vector<std::string> validate_config(const DramConfig& cfg) {
    std::vector<std::string> errs;
    auto require = [&](bool ok, const std::string& msg) {
        if (!ok) errs.push_back(msg);
    };
    require(cfg.channels >= 1 && is_pow2(cfg.channels), "channels must be a power of two >= 1");
    require(cfg.ranks_per_channel >= 1 && is_pow2(cfg.ranks_per_channel),
            "ranks_per_channel must be a power of two >= 1");
    require(cfg.chips_per_rank >= 1, "chips_per_rank must be >= 1");
    require(cfg.device_width == 4 || cfg.device_width == 8 || cfg.device_width == 16,
            "device_width must be 4, 8 or 16");
    require(cfg.chips_per_rank * cfg.device_width == 64,
            "chips_per_rank x device_width must equal 64");
    require(cfg.bank_groups >= 1 && cfg.banks_per_group >= 1 &&
                is_pow2(uint64_t{cfg.bank_groups} * cfg.banks_per_group),
            "total banks per chip must be a power of two >= 1");
    require(cfg.subarrays_per_bank >= 2 && cfg.subarrays_per_bank % 2 == 0,
            "subarrays_per_bank must be even (PEs are shared by subarray pairs)");
    require(cfg.rows_per_subarray >= 1, "rows_per_subarray must be >= 1");
    require(cfg.columns_per_row >= 1, "columns_per_row must be >= 1");
    require(cfg.clock_period_ns > 0, "clock_period_ns must be positive");
    require(cfg.subarray_cycles_per_word >= 1, "subarray_cycles_per_word must be >= 1");
    // Row access should be on the order of ~100 cycles; catch unit mistakes.
    uint64_t row_access = cfg.timing.tRP + cfg.timing.tRCD + cfg.timing.tCL;
    require(row_access >= 50 && row_access <= 200,
            "tRP+tRCD+tCL out of sanity range [50,200] cycles");
    return errs;
}

inline void validate_config_or_throw(const DramConfig& cfg) {
    auto errs = validate_config(cfg);
    if (!errs.empty()) {
        std::string msg = "invalid DramConfig:";
        for (const auto& e : errs) msg += "\n  - " + e;
        throw std::invalid_argument(msg);
    }
}

inline void to_json(nlohmann::json& j, const TimingParams& t) {
    j = {{"tCCD_S", t.tCCD_S}, {"tCCD_L", t.tCCD_L}, {"tRCD", t.tRCD},
         {"tRP", t.tRP},       {"tRAS", t.tRAS},     {"tCL", t.tCL}};
}
inline void from_json(const nlohmann::json& j, TimingParams& t) {
    t.tCCD_S = j.value("tCCD_S", t.tCCD_S);
    t.tCCD_L = j.value("tCCD_L", t.tCCD_L);
    t.tRCD = j.value("tRCD", t.tRCD);
    t.tRP = j.value("tRP", t.tRP);
    t.tRAS = j.value("tRAS", t.tRAS);
    t.tCL = j.value("tCL", t.tCL);
}
inline void to_json(nlohmann::json& j, const PowerParams& p) {
    j = {{"bfu_active_uw", p.bfu_active_uw},
         {"dram_normal_w", p.dram_normal_w},
         {"ab_peak_multiplier", p.ab_peak_multiplier},
         {"cpu_active_w", p.cpu_active_w}};
}
inline void from_json(const nlohmann::json& j, PowerParams& p) {
    p.bfu_active_uw = j.value("bfu_active_uw", p.bfu_active_uw);
    p.dram_normal_w = j.value("dram_normal_w", p.dram_normal_w);
    p.ab_peak_multiplier = j.value("ab_peak_multiplier", p.ab_peak_multiplier);
    p.cpu_active_w = j.value("cpu_active_w", p.cpu_active_w);
}
inline void to_json(nlohmann::json& j, const AreaParams& a) {
    j = {{"bfu_mm2", a.bfu_mm2},
         {"walker_mm2", a.walker_mm2},
         {"chip_reference_mm2", a.chip_reference_mm2}};
}
inline void from_json(const nlohmann::json& j, AreaParams& a) {
    a.bfu_mm2 = j.value("bfu_mm2", a.bfu_mm2);
    a.walker_mm2 = j.value("walker_mm2", a.walker_mm2);
    a.chip_reference_mm2 = j.value("chip_reference_mm2", a.chip_reference_mm2);
}
inline void to_json(nlohmann::json& j, const HostParams& h) {
    j = {{"seq_bandwidth_gbps", h.seq_bandwidth_gbps},
         {"gather_derate", h.gather_derate},
         {"fixed_overhead_ns", h.fixed_overhead_ns},
         {"aggregate_ns_per_row", h.aggregate_ns_per_row}};
}
inline void from_json(const nlohmann::json& j, HostParams& h) {
    h.seq_bandwidth_gbps = j.value("seq_bandwidth_gbps", h.seq_bandwidth_gbps);
    h.gather_derate = j.value("gather_derate", h.gather_derate);
    h.fixed_overhead_ns = j.value("fixed_overhead_ns", h.fixed_overhead_ns);
    h.aggregate_ns_per_row = j.value("aggregate_ns_per_row", h.aggregate_ns_per_row);
}
inline void to_json(nlohmann::json& j, const DramConfig& c) {
    j = {{"channels", c.channels},
         {"ranks_per_channel", c.ranks_per_channel},
         {"chips_per_rank", c.chips_per_rank},
         {"device_width", c.device_width},
         {"bank_groups", c.bank_groups},
         {"banks_per_group", c.banks_per_group},
         {"subarrays_per_bank", c.subarrays_per_bank},
         {"rows_per_subarray", c.rows_per_subarray},
         {"columns_per_row", c.columns_per_row},
         {"clock_period_ns", c.clock_period_ns},
         {"timing", c.timing},
         {"power", c.power},
         {"area", c.area},
         {"host", c.host},
         {"mode_switch_ns", c.mode_switch_ns},
         {"superpage_bytes", c.superpage_bytes},
         {"subarray_cycles_per_word", c.subarray_cycles_per_word},
         {"rotate_subarrays", c.rotate_subarrays}};
}
inline void from_json(const nlohmann::json& j, DramConfig& c) {
    c.channels = j.value("channels", c.channels);
    c.ranks_per_channel = j.value("ranks_per_channel", c.ranks_per_channel);
    c.chips_per_rank = j.value("chips_per_rank", c.chips_per_rank);
    c.device_width = j.value("device_width", c.device_width);
    c.bank_groups = j.value("bank_groups", c.bank_groups);
    c.banks_per_group = j.value("banks_per_group", c.banks_per_group);
    c.subarrays_per_bank = j.value("subarrays_per_bank", c.subarrays_per_bank);
    c.rows_per_subarray = j.value("rows_per_subarray", c.rows_per_subarray);
    c.columns_per_row = j.value("columns_per_row", c.columns_per_row);
    c.clock_period_ns = j.value("clock_period_ns", c.clock_period_ns);
    if (j.contains("timing")) c.timing = j.at("timing").get<TimingParams>();
    if (j.contains("power")) c.power = j.at("power").get<PowerParams>();
    if (j.contains("area")) c.area = j.at("area").get<AreaParams>();
    if (j.contains("host")) c.host = j.at("host").get<HostParams>();
    c.mode_switch_ns = j.value("mode_switch_ns", c.mode_switch_ns);
    c.superpage_bytes = j.value("superpage_bytes", c.superpage_bytes);
    c.subarray_cycles_per_word = j.value("subarray_cycles_per_word", c.subarray_cycles_per_word);
    c.rotate_subarrays = j.value("rotate_subarrays", c.rotate_subarrays);
}

inline DramConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json j;
    in >> j;
    DramConfig cfg = j.get<DramConfig>();
    validate_config_or_throw(cfg);
    return cfg;
}

}  // namespace pimdb
