#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "pimdb/bitmap.hpp"
#include "pimdb/column.hpp"
#include "pimdb/predicate.hpp"

using namespace pimdb;

namespace {

// element-at-a-time oracle, no packing involved
bool naive_eval(CmpOp op, uint64_t v, uint64_t lo, uint64_t hi) {
    switch (op) {
        case CmpOp::Eq: return v == lo;
        case CmpOp::Neq: return v != lo;
        case CmpOp::Lt: return v < lo;
        case CmpOp::Le: return v <= lo;
        case CmpOp::Gt: return v > lo;
        case CmpOp::Ge: return v >= lo;
        case CmpOp::Between: return lo <= v && v <= hi;
    }
    return false;
}

std::vector<bool> naive_filter(const std::vector<uint64_t>& vals, CmpOp op, uint64_t lo,
                               uint64_t hi) {
    std::vector<bool> out(vals.size());
    for (size_t i = 0; i < vals.size(); ++i) out[i] = naive_eval(op, vals[i], lo, hi);
    return out;
}

void check_against_oracle(const std::vector<uint64_t>& vals, uint32_t width, CmpOp op,
                          uint64_t lo, uint64_t hi) {
    PackedColumn col = pack_column(vals, width);
    Bitmap got = filter_column(col, compile_predicate({op, lo, hi, "c"}, width));
    std::vector<bool> want = naive_filter(vals, op, lo, hi);
    REQUIRE(got.length() == vals.size());
    for (size_t i = 0; i < vals.size(); ++i) {
        if (got.get(i) != want[i]) {
            CAPTURE(width, int(op), lo, hi, i, vals[i]);
            REQUIRE(got.get(i) == want[i]);
        }
    }
}

constexpr CmpOp kOps[] = {CmpOp::Eq,  CmpOp::Neq, CmpOp::Lt,     CmpOp::Le,
                          CmpOp::Gt,  CmpOp::Ge,  CmpOp::Between};

}  // namespace

TEST_CASE("bit packing layout is lane 0 in the low bits") {
    PackedColumn col = pack_column({1, 5, 9, 5}, 16);
    REQUIRE(col.words.size() == 1);
    CHECK(col.words[0] == 0x0005000900050001ull);
    CHECK(col.get(0) == 1);
    CHECK(col.get(2) == 9);
    col.set(2, 0xABCD);
    CHECK(col.words[0] == 0x0005ABCD00050001ull);
    CHECK(unpack_column(col) == std::vector<uint64_t>{1, 5, 0xABCD, 5});
}

TEST_CASE("pack/unpack round trips every width") {
    std::mt19937_64 rng(11);
    for (uint32_t w : {2u, 4u, 8u, 16u, 32u, 64u}) {
        uint64_t mask = w == 64 ? ~uint64_t{0} : (uint64_t{1} << w) - 1;
        std::vector<uint64_t> vals(301);
        for (auto& v : vals) v = rng() & mask;
        PackedColumn col = pack_column(vals, w);
        CHECK(col.packed_bytes() == ((301 * w + 63) / 64) * 8);
        CHECK(unpack_column(col) == vals);
    }
}

TEST_CASE("packing rejects unsupported widths and oversized values") {
    CHECK_THROWS_AS(pack_column({0}, 3), std::invalid_argument);
    CHECK_THROWS_AS(pack_column({4}, 2), std::overflow_error);
    CHECK_NOTHROW(pack_column({3}, 2));
}

TEST_CASE("min_width needs strict headroom over the max value") {
    CHECK(min_width(0) == 2);
    CHECK(min_width(3) == 2);
    CHECK(min_width(4) == 4);
    CHECK(min_width(15) == 4);
    CHECK(min_width(16) == 8);
    CHECK(min_width(255) == 8);
    CHECK(min_width(65535) == 16);
    CHECK(min_width(65536) == 32);
    CHECK(min_width(uint64_t{1} << 32) == 64);
    CHECK(min_width(~uint64_t{0}) == 64);
}

TEST_CASE("bitmap tail bits stay clear under every mutator") {
    Bitmap b(70, true);
    CHECK(b.popcount() == 70);
    CHECK(b.word_count() == 2);
    CHECK(b.word(1) == (1ull << 6) - 1);
    b.set_word(1, ~0ull);
    CHECK(b.popcount() == 70);
    b.clear(69);
    CHECK(b.popcount() == 69);
    b.set(69);
    CHECK(b.get(69));
}

TEST_CASE("bitmap set-bit iteration is ascending and complete") {
    Bitmap b(200);
    std::vector<uint64_t> want = {0, 1, 63, 64, 65, 127, 128, 199};
    for (uint64_t i : want) b.set(i);
    CHECK(b.set_bits() == want);
    CHECK(iter_set_bits(b) == want);
    CHECK(b.popcount() == want.size());
}

TEST_CASE("bitmap conjunction and disjunction") {
    Bitmap a(130), b(130);
    a.set(0);
    a.set(100);
    b.set(100);
    b.set(129);
    CHECK(bitmap_and(a, b).set_bits() == std::vector<uint64_t>{100});
    CHECK(bitmap_or(a, b).set_bits() == std::vector<uint64_t>{0, 100, 129});
    Bitmap c(131);
    CHECK_THROWS_AS(a.and_with(c), std::invalid_argument);
    CHECK_THROWS_AS(a.or_with(c), std::invalid_argument);
}

TEST_CASE("predicate compilation validates width and operands") {
    CHECK_THROWS_AS(compile_predicate({CmpOp::Eq, 1, 0, "c"}, 5), std::invalid_argument);
    CHECK_THROWS_AS(compile_predicate({CmpOp::Eq, 4, 0, "c"}, 2), std::overflow_error);
    CHECK_THROWS_AS(compile_predicate({CmpOp::Between, 0, 20, "c"}, 4), std::overflow_error);
    CHECK_THROWS_AS(compile_predicate({CmpOp::Between, 3, 1, "c"}, 4), std::invalid_argument);
    CHECK_NOTHROW(compile_predicate({CmpOp::Between, 1, 3, "c"}, 4));
}

TEST_CASE("filter_column checks width and accumulator shape") {
    PackedColumn col = pack_column({1, 2, 3}, 4);
    CHECK_THROWS_AS(filter_column(col, compile_predicate({CmpOp::Eq, 1, 0, "c"}, 8)),
                    std::invalid_argument);
    Bitmap wrong(4);
    CHECK_THROWS_AS(filter_column(col, compile_predicate({CmpOp::Eq, 1, 0, "c"}, 4), &wrong),
                    std::invalid_argument);
}

TEST_CASE("accumulator ANDs new matches into prior ones") {
    std::vector<uint64_t> vals = {0, 1, 2, 3, 4, 5, 6, 7};
    PackedColumn col = pack_column(vals, 4);
    Bitmap ge2 = filter_column(col, compile_predicate({CmpOp::Ge, 2, 0, "c"}, 4));
    Bitmap both = filter_column(col, compile_predicate({CmpOp::Le, 5, 0, "c"}, 4), &ge2);
    CHECK(both.set_bits() == std::vector<uint64_t>{2, 3, 4, 5});
}

TEST_CASE("exhaustive operator/operand sweep at width 2") {
    // every lane value at every position within and across words
    std::vector<uint64_t> vals;
    for (int i = 0; i < 131; ++i) vals.push_back(uint64_t(i * 7 % 4));
    for (CmpOp op : kOps) {
        for (uint64_t lo = 0; lo < 4; ++lo) {
            if (op == CmpOp::Between) {
                for (uint64_t hi = lo; hi < 4; ++hi) check_against_oracle(vals, 2, op, lo, hi);
            } else {
                check_against_oracle(vals, 2, op, lo, 0);
            }
        }
    }
}

TEST_CASE("exhaustive operator/operand sweep at width 4") {
    std::vector<uint64_t> vals;
    for (int i = 0; i < 259; ++i) vals.push_back(uint64_t(i * 11 % 16));
    for (CmpOp op : kOps) {
        for (uint64_t lo = 0; lo < 16; ++lo) {
            if (op == CmpOp::Between) {
                for (uint64_t hi = lo; hi < 16; ++hi) check_against_oracle(vals, 4, op, lo, hi);
            } else {
                check_against_oracle(vals, 4, op, lo, 0);
            }
        }
    }
}

TEST_CASE("random filter cases match the naive oracle at all widths") {
    std::mt19937_64 rng(2024);
    for (int t = 0; t < 1000; ++t) {
        uint32_t width = std::vector<uint32_t>{2, 4, 8, 16, 32, 64}[rng() % 6];
        uint64_t mask = width == 64 ? ~uint64_t{0} : (uint64_t{1} << width) - 1;
        std::vector<uint64_t> vals(1 + rng() % 200);
        for (auto& v : vals) v = rng() & mask;
        CmpOp op = kOps[rng() % 7];
        uint64_t lo = rng() & mask, hi = rng() & mask;
        if (lo > hi) std::swap(lo, hi);
        check_against_oracle(vals, width, op, lo, op == CmpOp::Between ? hi : 0);
    }
}

TEST_CASE("float ordering transform preserves order") {
    std::vector<double> vals = {-1e300, -2.5, -0.0, 0.0, 1e-300, 2.5, 1e300};
    for (size_t i = 0; i + 1 < vals.size(); ++i)
        CHECK(float_to_ordered(vals[i]) <= float_to_ordered(vals[i + 1]));
    for (double v : vals) CHECK(ordered_to_float(float_to_ordered(v)) == v);
}

TEST_CASE("signed ordering transform preserves order at the stored width") {
    std::vector<int64_t> vals = {-128, -1, 0, 1, 127};
    for (size_t i = 0; i + 1 < vals.size(); ++i)
        CHECK(signed_to_ordered(vals[i], 8) < signed_to_ordered(vals[i + 1], 8));
    for (int64_t v : vals) CHECK(ordered_to_signed(signed_to_ordered(v, 8), 8) == v);
}
