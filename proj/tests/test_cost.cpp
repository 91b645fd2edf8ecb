#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "pimdb/cost.hpp"
#include "pimdb/sweep.hpp"

using namespace pimdb;

namespace {
const DramConfig kCfg;
}

TEST_CASE("on-chip area overhead per level") {
    // 16 banks x 0.001 mm^2 over a 16 mm^2 reference die
    CHECK(area_overhead(kCfg, {PimLevel::BankAB}) == 0.001);
    CHECK(area_overhead(kCfg, {PimLevel::BankSB}) == 0.001);
    // off-die units add nothing to the DRAM chip
    CHECK(area_overhead(kCfg, {PimLevel::Rank}) == 0.0);
    CHECK(area_overhead(kCfg, {PimLevel::Channel}) == 0.0);
    // per-subarray PEs pay a comparator and two row walkers each
    CHECK(area_overhead(kCfg, {PimLevel::Subarray, 4, Placement::Optimistic}) ==
          Catch::Approx(4 * (0.001 + 2 * 0.012) / 16.0));
    CHECK(area_overhead(kCfg, {PimLevel::Subarray, 8, Placement::Optimistic}) ==
          Catch::Approx(2 * area_overhead(kCfg, {PimLevel::Subarray, 4, Placement::Optimistic})));
}

TEST_CASE("peak power multiplies the dram term only in all-bank mode") {
    CHECK(peak_power(kCfg, {PimLevel::BankAB}, 0) == Catch::Approx(4.0 * 15.0));
    CHECK(peak_power(kCfg, {PimLevel::BankSB}, 0) == Catch::Approx(15.0));
    CHECK(peak_power(kCfg, {PimLevel::Rank}, 32) ==
          Catch::Approx(15.0 + 32 * 118.7e-6));
    CHECK(peak_power(kCfg, {PimLevel::BankAB}, 4096) ==
          Catch::Approx(60.0 + 4096 * 118.7e-6));
}

TEST_CASE("active unit counts per level") {
    CHECK(active_bfus(kCfg, {PimLevel::BankAB}) == 4096);
    CHECK(active_bfus(kCfg, {PimLevel::BankSB}) == 256);
    CHECK(active_bfus(kCfg, {PimLevel::Rank}) == 32);
    CHECK(active_bfus(kCfg, {PimLevel::Channel}) == 8);
    CHECK(active_bfus(kCfg, {PimLevel::Subarray, 2, Placement::Optimistic}) == 2 * 4096);
    CHECK(active_bfus(kCfg, {PimLevel::Subarray, 8, Placement::Optimistic}) == 8 * 4096);
}

TEST_CASE("phase energy integrates power over duration") {
    EnergyPhase p{"filter", 1e9, 15.0, 1000, 5.0, false};
    // one second at 15 W dram + 1000 x 118.7 uW + 5 W cpu
    CHECK(energy_joules(kCfg, {p}) == Catch::Approx(15.0 + 0.1187 + 5.0));
    p.ab_active = true;
    CHECK(energy_joules(kCfg, {p}) == Catch::Approx(60.0 + 0.1187 + 5.0));
    CHECK(energy_joules(kCfg, {}) == 0.0);
    EnergyPhase bad{"x", -1.0, 15.0, 0, 0.0, false};
    CHECK_THROWS_AS(energy_joules(kCfg, {bad}), std::invalid_argument);
}

TEST_CASE("energy is additive over any split of the phase list") {
    std::mt19937_64 rng(99);
    for (int t = 0; t < 1000; ++t) {
        EnergyPhases phases(1 + rng() % 6);
        for (auto& p : phases) {
            p.duration_ns = double(rng() % 1000000);
            p.dram_power_w = double(rng() % 40);
            p.bfu_count = rng() % 5000;
            p.cpu_power_w = double(rng() % 20);
            p.ab_active = (rng() & 1) != 0;
        }
        double whole = energy_joules(kCfg, phases);
        double split = 0;
        for (const auto& p : phases) split += energy_joules(kCfg, {p});
        CHECK(whole == Catch::Approx(split));
    }
}

TEST_CASE("relative efficiency compares baseline energy to device energy") {
    EnergyPhases base = {{"scan", 2000.0, 15.0, 0, 10.0, false}};
    EnergyPhases dev = {{"filter", 100.0, 15.0, 4096, 0.0, true}};
    double want = energy_joules(kCfg, base) / energy_joules(kCfg, dev);
    CHECK(relative_efficiency(kCfg, base, dev) == Catch::Approx(want));
    CHECK(want > 1.0);  // shorter busy window wins despite the peak multiplier
}
