#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pimdb/address.hpp"
#include "pimdb/config.hpp"

namespace pimdb {

enum class PimLevel { Channel, Rank, BankSB, BankAB, Subarray };
enum class Placement { Optimistic, Pessimistic };

/// One point in the PIM design space. `salp` and `placement` only apply at
/// Subarray level; salp is the number of concurrently active PEs per bank.
struct PimLevelSpec {
    PimLevel level = PimLevel::BankAB;
    uint32_t salp = 1;
    Placement placement = Placement::Optimistic;
};

inline const char* level_name(PimLevel l) {
    switch (l) {
        case PimLevel::Channel: return "channel";
        case PimLevel::Rank: return "rank";
        case PimLevel::BankSB: return "bank_sb";
        case PimLevel::BankAB: return "bank_ab";
        case PimLevel::Subarray: return "subarray";
    }
    return "?";
}

inline void validate_spec(const DramConfig& cfg, const PimLevelSpec& spec) {
    if (spec.level == PimLevel::Subarray) {
        uint32_t max_salp = cfg.subarrays_per_bank / 2;  // each PE serves a subarray pair
        if (spec.salp < 1 || spec.salp > max_salp)
            throw std::invalid_argument("salp must be in [1, subarrays_per_bank/2]");
    }
}

struct LatencyBreakdown {
    double activation = 0;        // ns, tRP + tRCD contributions
    double column_stream = 0;     // ns, per-word cadence over the page
    double lisa = 0;              // ns, inter-subarray row movement
    double bitmap_writeback = 0;  // ns, result flush at page boundaries
    double mode_switch = 0;       // ns, PIM mode enter + exit
    double total = 0;

    LatencyBreakdown& operator+=(const LatencyBreakdown& o) {
        activation += o.activation;
        column_stream += o.column_stream;
        lisa += o.lisa;
        bitmap_writeback += o.bitmap_writeback;
        mode_switch += o.mode_switch;
        total += o.total;
        return *this;
    }
    LatencyBreakdown scaled(double f) const {
        return {activation * f, column_stream * f, lisa * f, bitmap_writeback * f,
                mode_switch * f, total * f};
    }
};

inline LatencyBreakdown finish(LatencyBreakdown b) {
    b.total = b.activation + b.column_stream + b.lisa + b.bitmap_writeback + b.mode_switch;
    return b;
}

/// One LISA hop moves a row between adjacent subarrays at 1/8 the cost of a
/// regular row activation.
inline double lisa_transfer_latency(const DramConfig& cfg, uint64_t hops) {
    return double(hops) * cfg.ns(cfg.timing.tRCD + cfg.timing.tRAS) / 8.0;
}

namespace detail {
// PEs sit between subarray pairs; pair q serves subarrays 2q and 2q+1.
inline uint64_t pair_distance(uint32_t subarray, uint32_t pair) {
    if (subarray / 2 == pair) return 0;
    uint32_t lo = 2 * pair, hi = 2 * pair + 1;
    return subarray < lo ? lo - subarray : subarray - hi;
}
}  // namespace detail

/// LISA hops needed to bring a row from `subarray_index` to a PE.
/// Optimistic assumes the k PEs are evenly spaced over the pair positions;
/// Pessimistic is the worst case over every possible placement of k PEs.
inline uint64_t salp_hop_count(const DramConfig& cfg, uint32_t subarray_index, uint32_t salp,
                               Placement placement) {
    if (subarray_index >= cfg.subarrays_per_bank)
        throw std::out_of_range("subarray index out of range");
    uint32_t npairs = cfg.subarrays_per_bank / 2;
    if (salp < 1 || salp > npairs) throw std::invalid_argument("salp out of range");
    if (placement == Placement::Optimistic) {
        uint64_t best = UINT64_MAX;
        for (uint32_t i = 0; i < salp; ++i) {
            uint32_t q = uint32_t(uint64_t{i} * npairs / salp);
            best = std::min(best, detail::pair_distance(subarray_index, q));
        }
        return best;
    }
    // Adversarial placement puts all k PEs at the pairs farthest from this
    // subarray, so the reachable distance is the k-th largest pair distance.
    std::vector<uint64_t> d(npairs);
    for (uint32_t q = 0; q < npairs; ++q) d[q] = detail::pair_distance(subarray_index, q);
    std::sort(d.begin(), d.end());
    return d[npairs - salp];
}

/// Latency to filter one PIM page (one system-wide row position).
///
/// BankAB streams every bank in parallel at tCCD_S cadence. Single-unit
/// levels (BankSB, Rank, Channel) serialize the banks and stream at tCCD_L,
/// the same-bank-group column cadence; Rank matches BankSB because the
/// on-DIMM unit is fed at the identical per-bank rate, and a channel unit
/// serializes its ranks. Subarray PEs stream one word per
/// subarray_cycles_per_word clocks with k-way parallelism; optimistic
/// placement keeps data in PE-equipped subarrays (no LISA movement),
/// pessimistic pays worst-case hops per page.
inline LatencyBreakdown page_filter_latency(const DramConfig& cfg, const PimLevelSpec& spec) {
    validate_spec(cfg, spec);
    const auto& t = cfg.timing;
    LatencyBreakdown b;
    double act = cfg.ns(t.tRP + t.tRCD);
    double wb = cfg.ns(t.tCCD_S);
    switch (spec.level) {
        case PimLevel::BankAB:
            b.activation = act;
            b.column_stream = cfg.ns(uint64_t{cfg.columns_per_row} * t.tCCD_S);
            b.bitmap_writeback = wb;
            break;
        case PimLevel::BankSB:
        case PimLevel::Rank:
        case PimLevel::Channel: {
            double banks = cfg.banks_per_chip();
            if (spec.level == PimLevel::Channel) banks *= cfg.ranks_per_channel;
            b.activation = act * banks;
            b.column_stream = cfg.ns(uint64_t{cfg.columns_per_row} * t.tCCD_L) * banks;
            b.bitmap_writeback = wb * banks;
            break;
        }
        case PimLevel::Subarray: {
            double k = spec.salp;
            b.activation = act / k;
            b.column_stream =
                cfg.ns(uint64_t{cfg.columns_per_row} * cfg.subarray_cycles_per_word) / k;
            b.bitmap_writeback = wb / k;
            if (spec.placement == Placement::Pessimistic) {
                uint64_t worst = 0;
                for (uint32_t s = 0; s < cfg.subarrays_per_bank; ++s)
                    worst = std::max(worst, salp_hop_count(cfg, s, spec.salp, spec.placement));
                b.lisa = lisa_transfer_latency(cfg, worst);
            }
            break;
        }
    }
    return finish(b);
}

inline double mode_switch_overhead(const DramConfig& cfg) { return 2.0 * cfg.mode_switch_ns; }

/// End-to-end latency to filter a packed column: `passes` full sweeps (one
/// per predicate term) over its PIM pages, plus one mode-switch pair.
inline LatencyBreakdown column_filter_latency(const DramConfig& cfg, const PimLevelSpec& spec,
                                              uint64_t packed_bytes, uint64_t passes = 1) {
    if (passes < 1) throw std::invalid_argument("passes must be >= 1");
    uint64_t pages = pim_page_count(packed_bytes, cfg);
    LatencyBreakdown b = page_filter_latency(cfg, spec).scaled(double(passes) * double(pages));
    b.mode_switch = mode_switch_overhead(cfg);
    return finish(b);
}

}  // namespace pimdb
