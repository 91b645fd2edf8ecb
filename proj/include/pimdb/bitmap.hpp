#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace pimdb {

/// Selection bit vector. Bits at positions >= length stay zero; every
/// mutator below maintains that so popcount never over-counts the tail.
class Bitmap {
public:
    Bitmap() = default;
    explicit Bitmap(uint64_t length, bool fill = false)
        : length_(length), words_((length + 63) / 64, fill ? ~0ull : 0ull) {
        if (fill) mask_tail();
    }

    uint64_t length() const { return length_; }
    const std::vector<uint64_t>& words() const { return words_; }

    bool get(uint64_t i) const { return (words_[i / 64] >> (i % 64)) & 1; }
    void set(uint64_t i) { words_[i / 64] |= 1ull << (i % 64); }
    void clear(uint64_t i) { words_[i / 64] &= ~(1ull << (i % 64)); }

    void set_word(size_t w, uint64_t value) {
        words_[w] = value;
        if (w + 1 == words_.size()) mask_tail();
    }
    uint64_t word(size_t w) const { return words_[w]; }
    size_t word_count() const { return words_.size(); }

    uint64_t popcount() const {
        uint64_t n = 0;
        for (uint64_t w : words_) n += std::popcount(w);
        return n;
    }

    void and_with(const Bitmap& other) {
        check_len(other);
        for (size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
    }
    void or_with(const Bitmap& other) {
        check_len(other);
        for (size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
    }

    /// Set-bit indices in ascending order via repeated trailing-zero
    /// extraction, the same scan the host uses to walk PIM result bitmaps.
    template <typename Fn>
    void for_each_set(Fn&& fn) const {
        for (size_t wi = 0; wi < words_.size(); ++wi) {
            uint64_t w = words_[wi];
            while (w) {
                unsigned tz = unsigned(std::countr_zero(w));
                fn(uint64_t(wi) * 64 + tz);
                w &= w - 1;
            }
        }
    }

    std::vector<uint64_t> set_bits() const {
        std::vector<uint64_t> out;
        out.reserve(popcount());
        for_each_set([&](uint64_t i) { out.push_back(i); });
        return out;
    }

    bool operator==(const Bitmap&) const = default;

private:
    void check_len(const Bitmap& other) const {
        if (other.length_ != length_) throw std::invalid_argument("bitmap length mismatch");
    }
    void mask_tail() {
        if (length_ % 64 != 0 && !words_.empty())
            words_.back() &= (1ull << (length_ % 64)) - 1;
    }

    uint64_t length_ = 0;
    std::vector<uint64_t> words_;
};

inline Bitmap bitmap_and(const Bitmap& a, const Bitmap& b) {
    Bitmap r = a;
    r.and_with(b);
    return r;
}

inline Bitmap bitmap_or(const Bitmap& a, const Bitmap& b) {
    Bitmap r = a;
    r.or_with(b);
    return r;
}

inline std::vector<uint64_t> iter_set_bits(const Bitmap& a) { return a.set_bits(); }

}  // namespace pimdb
