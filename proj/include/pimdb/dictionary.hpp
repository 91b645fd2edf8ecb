#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace pimdb {

/// Order-preserving dictionary: codes are ranks in the sorted distinct value
/// list, so comparing codes is equivalent to comparing values.
template <typename T>
struct Dictionary {
    std::vector<T> values;  // sorted ascending, distinct

    static Dictionary build(const std::vector<T>& raw) {
        Dictionary d;
        d.values = raw;
        std::sort(d.values.begin(), d.values.end());
        d.values.erase(std::unique(d.values.begin(), d.values.end()), d.values.end());
        return d;
    }

    uint64_t size() const { return values.size(); }

    bool contains(const T& v) const {
        auto it = std::lower_bound(values.begin(), values.end(), v);
        return it != values.end() && *it == v;
    }

    uint64_t encode(const T& v) const {
        auto it = std::lower_bound(values.begin(), values.end(), v);
        if (it == values.end() || *it != v) throw std::out_of_range("value not in dictionary");
        return uint64_t(it - values.begin());
    }

    const T& decode(uint64_t code) const {
        if (code >= values.size()) throw std::out_of_range("dictionary code out of range");
        return values[code];
    }

    /// Number of dictionary values strictly less than v; usable directly as
    /// the code-space lower bound when rewriting value predicates.
    uint64_t lower_bound(const T& v) const {
        return uint64_t(std::lower_bound(values.begin(), values.end(), v) - values.begin());
    }
    uint64_t upper_bound(const T& v) const {
        return uint64_t(std::upper_bound(values.begin(), values.end(), v) - values.begin());
    }
};

template <typename T>
Dictionary<T> build_dictionary(const std::vector<T>& raw) {
    return Dictionary<T>::build(raw);
}

}  // namespace pimdb
