#include <catch2/catch_amalgamated.hpp>

#include "pimdb/timing.hpp"

using namespace pimdb;

namespace {
const DramConfig kCfg;  // DDR4-3200 defaults, 0.625 ns clock
}

TEST_CASE("all-bank page latency matches the cycle-count oracle") {
    // (tRP + tRCD) + 128 x tCCD_S + tCCD_S writeback = 44 + 512 + 4 = 560 cycles
    LatencyBreakdown b = page_filter_latency(kCfg, {PimLevel::BankAB});
    CHECK(b.activation == Catch::Approx(44 * 0.625));
    CHECK(b.column_stream == Catch::Approx(512 * 0.625));
    CHECK(b.bitmap_writeback == Catch::Approx(4 * 0.625));
    CHECK(b.lisa == 0.0);
    CHECK(b.mode_switch == 0.0);
    CHECK(b.total == Catch::Approx(350.0));
    // sanity band for one 4 MiB page at all-bank level
    CHECK(b.total >= 340.0);
    CHECK(b.total <= 420.0);
}

TEST_CASE("single-unit levels serialize banks at the slow column cadence") {
    // per bank: 44 + 128 x tCCD_L + 4 = 1072 cycles; 16 banks = 17152
    LatencyBreakdown sb = page_filter_latency(kCfg, {PimLevel::BankSB});
    CHECK(sb.total == Catch::Approx(17152 * 0.625));
    LatencyBreakdown rank = page_filter_latency(kCfg, {PimLevel::Rank});
    CHECK(rank.total == Catch::Approx(sb.total));
    // a channel unit serializes its 4 ranks
    LatencyBreakdown ch = page_filter_latency(kCfg, {PimLevel::Channel});
    CHECK(ch.total == Catch::Approx(4 * sb.total));
    // single-bank over all-bank ratio, frozen: 17152 / 560
    CHECK(sb.total / page_filter_latency(kCfg, {PimLevel::BankAB}).total ==
          Catch::Approx(30.62857142857143));
}

TEST_CASE("subarray level divides the whole page walk by the parallelism") {
    // (44 + 128 x 3 + 4) / k cycles
    auto page = [&](uint32_t k) {
        return page_filter_latency(kCfg, {PimLevel::Subarray, k, Placement::Optimistic}).total;
    };
    CHECK(page(2) == Catch::Approx(216 * 0.625));
    CHECK(page(4) == Catch::Approx(108 * 0.625));
    CHECK(page(8) == Catch::Approx(54 * 0.625));
    CHECK(page(2) / page(4) == Catch::Approx(2.0));
    CHECK(page(4) / page(8) == Catch::Approx(2.0));
}

TEST_CASE("spec validation bounds subarray parallelism") {
    CHECK_NOTHROW(validate_spec(kCfg, {PimLevel::Subarray, 8, Placement::Optimistic}));
    CHECK_THROWS_AS(validate_spec(kCfg, {PimLevel::Subarray, 9, Placement::Optimistic}),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate_spec(kCfg, {PimLevel::Subarray, 0, Placement::Optimistic}),
                    std::invalid_argument);
    CHECK_NOTHROW(validate_spec(kCfg, {PimLevel::BankAB, 99}));  // salp ignored
}

TEST_CASE("hop counts against hand-worked placements") {
    // 16 subarrays -> 8 pair positions
    SECTION("optimistic even spacing") {
        // one PE at pair 0: subarray 15 is 14 rows above pair slot 1
        CHECK(salp_hop_count(kCfg, 15, 1, Placement::Optimistic) == 14);
        CHECK(salp_hop_count(kCfg, 0, 1, Placement::Optimistic) == 0);
        CHECK(salp_hop_count(kCfg, 1, 1, Placement::Optimistic) == 0);
        // eight PEs cover every pair: zero hops everywhere
        for (uint32_t s = 0; s < 16; ++s)
            CHECK(salp_hop_count(kCfg, s, 8, Placement::Optimistic) == 0);
        // two PEs at pairs 0 and 4: subarray 5 sits next to pair 2, three
        // rows below pair 4's slot at subarray 8
        CHECK(salp_hop_count(kCfg, 5, 2, Placement::Optimistic) == 3);
    }
    SECTION("pessimistic adversarial placement") {
        // distances from subarray 0 to pairs 0..7 are 0,2,4,...,14;
        // one PE lands at the farthest pair
        CHECK(salp_hop_count(kCfg, 0, 1, Placement::Pessimistic) == 14);
        // with all eight PEs placed, the nearest is the local pair
        CHECK(salp_hop_count(kCfg, 0, 8, Placement::Pessimistic) == 0);
        // two PEs at the two farthest pairs: reachable at the 2nd largest
        CHECK(salp_hop_count(kCfg, 0, 2, Placement::Pessimistic) == 12);
    }
    SECTION("pessimistic never beats optimistic") {
        for (uint32_t s = 0; s < 16; ++s)
            for (uint32_t k = 1; k <= 8; ++k)
                CHECK(salp_hop_count(kCfg, s, k, Placement::Pessimistic) >=
                      salp_hop_count(kCfg, s, k, Placement::Optimistic));
    }
    CHECK_THROWS_AS(salp_hop_count(kCfg, 16, 1, Placement::Optimistic), std::out_of_range);
    CHECK_THROWS_AS(salp_hop_count(kCfg, 0, 9, Placement::Optimistic), std::invalid_argument);
}

TEST_CASE("lisa hop cost is one eighth of a full row activation cycle") {
    // (tRCD + tRAS) x 0.625 / 8 = 74 x 0.625 / 8 = 5.78125 ns per hop
    CHECK(lisa_transfer_latency(kCfg, 1) == Catch::Approx(5.78125));
    CHECK(lisa_transfer_latency(kCfg, 4) == Catch::Approx(23.125));
    CHECK(lisa_transfer_latency(kCfg, 0) == 0.0);
}

TEST_CASE("pessimistic subarray pages pay worst-case movement") {
    LatencyBreakdown opt =
        page_filter_latency(kCfg, {PimLevel::Subarray, 2, Placement::Optimistic});
    LatencyBreakdown pes =
        page_filter_latency(kCfg, {PimLevel::Subarray, 2, Placement::Pessimistic});
    CHECK(opt.lisa == 0.0);
    // worst subarray under 2 adversarial PEs needs 12 hops (frozen)
    CHECK(pes.lisa == Catch::Approx(12 * 5.78125));
    CHECK(pes.total == Catch::Approx(opt.total + pes.lisa));
}

TEST_CASE("column latency scales pages and passes and adds one mode switch") {
    CHECK(mode_switch_overhead(kCfg) == Catch::Approx(4000.0));
    // 287 pages for 600,038,146 16-bit values
    LatencyBreakdown one = column_filter_latency(kCfg, {PimLevel::BankAB}, 1200076292ull);
    CHECK(one.total == Catch::Approx(287 * 350.0 + 4000.0));
    LatencyBreakdown two = column_filter_latency(kCfg, {PimLevel::BankAB}, 1200076292ull, 2);
    CHECK(two.total - two.mode_switch == Catch::Approx(2 * (one.total - one.mode_switch)));
    CHECK(two.mode_switch == Catch::Approx(4000.0));
    CHECK_THROWS_AS(column_filter_latency(kCfg, {PimLevel::BankAB}, 100, 0),
                    std::invalid_argument);
}

TEST_CASE("breakdown components always sum to the total") {
    for (PimLevelSpec spec : {PimLevelSpec{PimLevel::Channel}, PimLevelSpec{PimLevel::Rank},
                              PimLevelSpec{PimLevel::BankSB}, PimLevelSpec{PimLevel::BankAB},
                              PimLevelSpec{PimLevel::Subarray, 4, Placement::Pessimistic}}) {
        LatencyBreakdown b = column_filter_latency(kCfg, spec, 123456789, 3);
        CHECK(b.total == Catch::Approx(b.activation + b.column_stream + b.lisa +
                                       b.bitmap_writeback + b.mode_switch));
    }
}
