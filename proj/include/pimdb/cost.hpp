#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "pimdb/config.hpp"
#include "pimdb/timing.hpp"

namespace pimdb {

/// On-chip area added by the filter units, as a fraction of the reference
/// chip area. Rank and channel units live outside the DRAM die, so their
/// on-chip overhead is zero.
inline double area_overhead(const DramConfig& cfg, const PimLevelSpec& spec) {
    switch (spec.level) {
        case PimLevel::BankAB:
        case PimLevel::BankSB:
            return cfg.banks_per_chip() * cfg.area.bfu_mm2 / cfg.area.chip_reference_mm2;
        case PimLevel::Subarray:
            // each active PE needs a comparator plus two row walkers
            return spec.salp * (cfg.area.bfu_mm2 + 2.0 * cfg.area.walker_mm2) /
                   cfg.area.chip_reference_mm2;
        case PimLevel::Rank:
        case PimLevel::Channel:
            return 0.0;
    }
    return 0.0;
}

/// Peak subsystem power in watts while `active_bfus` units filter. All-bank
/// mode multiplies the DRAM term because every bank activates at once.
inline double peak_power(const DramConfig& cfg, const PimLevelSpec& spec, uint64_t active_bfus) {
    double dram = cfg.power.dram_normal_w;
    if (spec.level == PimLevel::BankAB) dram *= cfg.power.ab_peak_multiplier;
    return dram + double(active_bfus) * cfg.power.bfu_active_uw * 1e-6;
}

struct EnergyPhase {
    std::string label;
    double duration_ns = 0;
    double dram_power_w = 0;
    uint64_t bfu_count = 0;
    double cpu_power_w = 0;
    bool ab_active = false;
};

using EnergyPhases = std::vector<EnergyPhase>;

inline double phase_power_w(const DramConfig& cfg, const EnergyPhase& p) {
    double dram = p.dram_power_w * (p.ab_active ? cfg.power.ab_peak_multiplier : 1.0);
    return dram + double(p.bfu_count) * cfg.power.bfu_active_uw * 1e-6 + p.cpu_power_w;
}

inline double energy_joules(const DramConfig& cfg, const EnergyPhases& phases) {
    double j = 0;
    for (const auto& p : phases) {
        if (p.duration_ns < 0) throw std::invalid_argument("negative phase duration");
        j += p.duration_ns * 1e-9 * phase_power_w(cfg, p);
    }
    return j;
}

/// Ratio > 1 means the PIM path spends less energy than the baseline.
inline double relative_efficiency(const DramConfig& cfg, const EnergyPhases& baseline,
                                  const EnergyPhases& pim) {
    return energy_joules(cfg, baseline) / energy_joules(cfg, pim);
}

}  // namespace pimdb
