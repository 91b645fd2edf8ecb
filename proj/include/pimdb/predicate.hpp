#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "pimdb/bitmap.hpp"
#include "pimdb/column.hpp"

namespace pimdb {

enum class CmpOp { Eq, Neq, Lt, Le, Gt, Ge, Between };

/// Single-column comparison over packed unsigned codes. Between is inclusive
/// at both ends.
struct Predicate {
    CmpOp op = CmpOp::Eq;
    uint64_t lo = 0;  // operand; Between lower bound
    uint64_t hi = 0;  // Between upper bound only
    std::string column_id;
};

/// A predicate specialized to one lane width, ready to evaluate a packed word
/// lane by lane.
struct ConfiguredComparator {
    uint32_t width = 64;
    CmpOp op = CmpOp::Eq;
    uint64_t lo = 0;
    uint64_t hi = 0;

    bool eval(uint64_t v) const {
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
};

inline ConfiguredComparator compile_predicate(const Predicate& p, uint32_t width) {
    if (!is_supported_width(width)) throw std::invalid_argument("unsupported width");
    uint64_t limit = width == 64 ? ~uint64_t{0} : (uint64_t{1} << width) - 1;
    if (p.lo > limit || (p.op == CmpOp::Between && p.hi > limit))
        throw std::overflow_error("predicate operand does not fit width");
    if (p.op == CmpOp::Between && p.lo > p.hi)
        throw std::invalid_argument("Between requires lo <= hi");
    return ConfiguredComparator{width, p.op, p.lo, p.hi};
}

/// Evaluates the comparator over every element, producing one bit per row.
/// With an accumulator the new bits AND into it (conjunction accumulation).
/// Works a packed word at a time; result bits flush in 64-bit buffer units.
inline Bitmap filter_column(const PackedColumn& col, const ConfiguredComparator& cmp,
                            const Bitmap* acc = nullptr) {
    if (cmp.width != col.width) throw std::invalid_argument("comparator/column width mismatch");
    if (acc && acc->length() != col.length)
        throw std::invalid_argument("accumulator length mismatch");
    Bitmap out(col.length);
    uint64_t lanes = col.lanes_per_word();
    uint64_t mask = col.value_mask();
    uint64_t buffer = 0;       // 64-bit output buffer, flushed when full
    unsigned buffered = 0;
    size_t out_word = 0;
    uint64_t remaining = col.length;
    for (uint64_t wi = 0; wi < col.words.size(); ++wi) {
        uint64_t w = col.words[wi];
        uint64_t in_word = remaining < lanes ? remaining : lanes;
        for (uint64_t lane = 0; lane < in_word; ++lane) {
            uint64_t v = (w >> (lane * col.width)) & mask;
            if (cmp.eval(v)) buffer |= uint64_t{1} << buffered;
            if (++buffered == 64) {
                out.set_word(out_word++, buffer);
                buffer = 0;
                buffered = 0;
            }
        }
        remaining -= in_word;
    }
    if (buffered) out.set_word(out_word, buffer);
    if (acc) out.and_with(*acc);
    return out;
}

}  // namespace pimdb
