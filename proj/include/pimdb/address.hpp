#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pimdb/config.hpp"

namespace pimdb {

/// Decomposed physical address. `column` indexes 64-bit word positions within
/// one bank's slice of a system row, so it ranges over
/// chips_per_rank x columns_per_row; the de-interleaved layout keeps each such
/// word inside a single chip (chip index = column / columns_per_row).
struct AddressParts {
    uint32_t channel = 0;
    uint32_t rank = 0;
    uint32_t bank_group = 0;
    uint32_t bank = 0;
    uint32_t subarray = 0;
    uint32_t row_in_subarray = 0;
    uint32_t column = 0;

    bool operator==(const AddressParts&) const = default;
};

namespace detail {
inline uint64_t words_per_bank_row(const DramConfig& cfg) {
    return uint64_t{cfg.chips_per_rank} * cfg.columns_per_row;
}
}  // namespace detail

/// Splits an 8-byte-aligned physical address under the default interleave:
/// consecutive words walk channel -> rank -> bank group -> bank, then column,
/// then subarray, then row; successive system rows rotate across subarrays.
inline AddressParts decompose_address(const DramConfig& cfg, uint64_t byte_address) {
    if (byte_address % 8 != 0) throw std::invalid_argument("address must be 8-byte aligned");
    if (byte_address >= cfg.total_bytes()) throw std::out_of_range("address beyond capacity");
    uint64_t w = byte_address / 8;
    AddressParts p;
    p.channel = uint32_t(w % cfg.channels);
    w /= cfg.channels;
    p.rank = uint32_t(w % cfg.ranks_per_channel);
    w /= cfg.ranks_per_channel;
    p.bank_group = uint32_t(w % cfg.bank_groups);
    w /= cfg.bank_groups;
    p.bank = uint32_t(w % cfg.banks_per_group);
    w /= cfg.banks_per_group;
    uint64_t wpr = detail::words_per_bank_row(cfg);
    p.column = uint32_t(w % wpr);
    w /= wpr;
    uint32_t sub = uint32_t(w % cfg.subarrays_per_bank);
    w /= cfg.subarrays_per_bank;
    p.row_in_subarray = uint32_t(w);
    if (cfg.rotate_subarrays)
        sub = (sub + p.row_in_subarray) % cfg.subarrays_per_bank;
    p.subarray = sub;
    return p;
}

inline uint64_t compose_address(const DramConfig& cfg, const AddressParts& p) {
    uint64_t wpr = detail::words_per_bank_row(cfg);
    if (p.channel >= cfg.channels || p.rank >= cfg.ranks_per_channel ||
        p.bank_group >= cfg.bank_groups || p.bank >= cfg.banks_per_group ||
        p.subarray >= cfg.subarrays_per_bank || p.row_in_subarray >= cfg.rows_per_subarray ||
        p.column >= wpr)
        throw std::out_of_range("address part exceeds its configured bound");
    uint32_t sub = p.subarray;
    if (cfg.rotate_subarrays)
        sub = (sub + cfg.subarrays_per_bank - p.row_in_subarray % cfg.subarrays_per_bank) %
              cfg.subarrays_per_bank;
    uint64_t w = p.row_in_subarray;
    w = w * cfg.subarrays_per_bank + sub;
    w = w * wpr + p.column;
    w = w * cfg.banks_per_group + p.bank;
    w = w * cfg.bank_groups + p.bank_group;
    w = w * cfg.ranks_per_channel + p.rank;
    w = w * cfg.channels + p.channel;
    return w * 8;
}

/// PIM page geometry: the minimum PIM allocation unit. A page always fills
/// whole system-wide rows; when a superpage size is configured, enough rows
/// are spanned to make the page a whole multiple of it.
struct PimPageGeometry {
    uint64_t bytes = 0;
    uint32_t rows_spanned = 0;
    uint32_t banks_covered = 0;
};

inline PimPageGeometry pim_page_geometry(const DramConfig& cfg) {
    PimPageGeometry g;
    uint64_t row = cfg.system_row_bytes();
    uint32_t rows = 1;
    if (cfg.superpage_bytes > 0) {
        while ((row * rows) % cfg.superpage_bytes != 0 &&
               uint64_t{rows} * cfg.rows_per_subarray * cfg.subarrays_per_bank > rows)
            ++rows;
        // fall back to covering one superpage if rows alone cannot align
        while (row * rows < cfg.superpage_bytes) ++rows;
    }
    g.rows_spanned = rows;
    g.bytes = row * rows;
    g.banks_covered = cfg.channels * cfg.ranks_per_channel * cfg.chips_per_rank *
                      cfg.banks_per_chip();
    return g;
}

inline uint64_t pim_page_bytes(const DramConfig& cfg) { return pim_page_geometry(cfg).bytes; }

/// Pages needed to hold a column of `column_bytes`; the tail page is padded.
inline uint64_t pim_page_count(uint64_t column_bytes, const DramConfig& cfg) {
    uint64_t page = pim_page_bytes(cfg);
    return (column_bytes + page - 1) / page;
}

/// De-interleaved image of one 64-byte cache line: chips[c] holds the local
/// 64-bit words of chip c, so every word lives wholly in one chip.
struct DeinterleavedLine {
    std::vector<std::vector<uint64_t>> chips;  // [chip][word within chip]
};

inline uint64_t line_word(const std::array<uint8_t, 64>& line, unsigned i) {
    uint64_t w = 0;
    for (unsigned b = 0; b < 8; ++b) w |= uint64_t{line[i * 8 + b]} << (8 * b);
    return w;
}

/// Word k of the line goes to chip k % chips_per_rank. For x8 this puts all
/// 8 bytes of word k in chip k; a rank-wide beat i then carries byte i of
/// every word.
inline DeinterleavedLine deinterleave_cacheline(const std::array<uint8_t, 64>& line,
                                                const DramConfig& cfg) {
    DeinterleavedLine out;
    out.chips.resize(cfg.chips_per_rank);
    for (unsigned k = 0; k < 8; ++k)
        out.chips[k % cfg.chips_per_rank].push_back(line_word(line, k));
    return out;
}

inline std::array<uint8_t, 64> reinterleave_cacheline(const DeinterleavedLine& layout,
                                                      const DramConfig& cfg) {
    std::array<uint8_t, 64> line{};
    std::vector<size_t> next(cfg.chips_per_rank, 0);
    for (unsigned k = 0; k < 8; ++k) {
        unsigned c = k % cfg.chips_per_rank;
        uint64_t w = layout.chips[c][next[c]++];
        for (unsigned b = 0; b < 8; ++b) line[k * 8 + b] = uint8_t(w >> (8 * b));
    }
    return line;
}

/// Bits delivered by rank-wide beat `i` of a line read: device_width bits
/// from each chip, which for x8 is byte i of every word.
inline std::vector<uint8_t> rank_beat(const DeinterleavedLine& layout, const DramConfig& cfg,
                                      unsigned beat) {
    std::vector<uint8_t> out;  // one byte-sized slot per chip (width <= 16 split into bytes)
    unsigned width = cfg.device_width;
    for (const auto& chip : layout.chips) {
        uint64_t local = 0;
        // concatenate the chip's words, word-major, then take slice `beat`
        unsigned bits = unsigned(chip.size()) * 64;
        unsigned off = beat * width;
        if (off < bits) {
            uint64_t word = chip[off / 64];
            local = (word >> (off % 64)) & ((width == 64) ? ~0ull : ((1ull << width) - 1));
        }
        out.push_back(uint8_t(local));
        if (width == 16) out.push_back(uint8_t(local >> 8));
    }
    return out;
}

}  // namespace pimdb
