#pragma once

#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <vector>

namespace pimdb {

inline bool is_supported_width(uint32_t w) {
    return w == 2 || w == 4 || w == 8 || w == 16 || w == 32 || w == 64;
}

/// Smallest supported width whose value range strictly exceeds max_value.
inline uint32_t min_width(uint64_t max_value) {
    for (uint32_t w : {2u, 4u, 8u, 16u, 32u}) {
        if (max_value < (uint64_t{1} << w)) return w;
    }
    return 64;
}

/// Bit-packed fixed-width column. Element 0 sits in the low bits of word 0;
/// unused tail slots of the last word are zero.
struct PackedColumn {
    uint32_t width = 64;
    uint64_t length = 0;
    std::vector<uint64_t> words;

    uint64_t lanes_per_word() const { return 64 / width; }
    uint64_t packed_bytes() const { return words.size() * 8; }

    uint64_t value_mask() const {
        return width == 64 ? ~uint64_t{0} : (uint64_t{1} << width) - 1;
    }

    uint64_t get(uint64_t i) const {
        uint64_t bit = i * width;
        return (words[bit / 64] >> (bit % 64)) & value_mask();
    }

    void set(uint64_t i, uint64_t v) {
        uint64_t bit = i * width;
        uint64_t m = value_mask();
        words[bit / 64] = (words[bit / 64] & ~(m << (bit % 64))) | ((v & m) << (bit % 64));
    }

    bool operator==(const PackedColumn&) const = default;
};

inline PackedColumn pack_column(const std::vector<uint64_t>& values, uint32_t width) {
    if (!is_supported_width(width)) throw std::invalid_argument("unsupported column width");
    PackedColumn col;
    col.width = width;
    col.length = values.size();
    col.words.assign((values.size() * width + 63) / 64, 0);
    uint64_t limit = col.value_mask();
    for (uint64_t i = 0; i < values.size(); ++i) {
        if (width < 64 && values[i] > limit)
            throw std::overflow_error("value does not fit column width");
        col.set(i, values[i]);
    }
    return col;
}

inline std::vector<uint64_t> unpack_column(const PackedColumn& col) {
    std::vector<uint64_t> out(col.length);
    for (uint64_t i = 0; i < col.length; ++i) out[i] = col.get(i);
    return out;
}

/// Order-preserving map from double bit patterns to unsigned integers, so
/// range predicates on floating-point data run in the unsigned comparator.
inline uint64_t float_to_ordered(double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    // negative values: flip everything; positive: flip sign bit only
    return (bits & (uint64_t{1} << 63)) ? ~bits : bits | (uint64_t{1} << 63);
}

inline double ordered_to_float(uint64_t u) {
    uint64_t bits = (u & (uint64_t{1} << 63)) ? u & ~(uint64_t{1} << 63) : ~u;
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

/// Signed integers shift into unsigned space by flipping the sign bit at the
/// stored width, which keeps the natural order under unsigned comparison.
inline uint64_t signed_to_ordered(int64_t v, uint32_t width) {
    return (uint64_t(v) + (uint64_t{1} << (width - 1))) &
           (width == 64 ? ~uint64_t{0} : (uint64_t{1} << width) - 1);
}

inline int64_t ordered_to_signed(uint64_t u, uint32_t width) {
    return int64_t(u) - int64_t(uint64_t{1} << (width - 1));
}

}  // namespace pimdb
