#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pimdb/column.hpp"
#include "pimdb/dictionary.hpp"
#include "pimdb/schema.hpp"

namespace pimdb {

/// Civil-date helpers (proleptic Gregorian), days relative to 1970-01-01.
inline int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    int64_t era = (y >= 0 ? y : y - 399) / 400;
    unsigned yoe = unsigned(y - era * 400);
    unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + int64_t(doe) - 719468;
}

inline void civil_from_days(int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    unsigned doe = unsigned(z - era * 146097);
    unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    int yy = int(yoe) + int(era) * 400;
    unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = yy + (m <= 2);
}

/// One stored column: order-preserving dictionary plus bit-packed codes.
/// Every column is dictionary-encoded, including numerics, so that all
/// predicate evaluation happens over unsigned code space.
struct ColumnData {
    LogicalType type = LogicalType::Int;
    Dictionary<int64_t> int_dict;       // numeric types
    Dictionary<std::string> str_dict;   // String type
    PackedColumn codes;

    uint64_t rows() const { return codes.length; }
    bool is_string() const { return type == LogicalType::String; }
    uint64_t dict_size() const { return is_string() ? str_dict.size() : int_dict.size(); }

    uint64_t code_at(uint64_t i) const { return codes.get(i); }
    int64_t int_at(uint64_t i) const { return int_dict.decode(codes.get(i)); }
    const std::string& str_at(uint64_t i) const { return str_dict.decode(codes.get(i)); }

    uint64_t encoded_bytes() const {
        uint64_t dict = 0;
        if (is_string()) {
            for (const auto& v : str_dict.values) dict += v.size() + 8;
        } else {
            dict = int_dict.size() * 8;
        }
        return dict + codes.packed_bytes();
    }
    /// Logical (pre-compression) size: one 8-byte slot per value.
    uint64_t decoded_bytes() const { return rows() * 8; }

    bool operator==(const ColumnData& o) const {
        return type == o.type && int_dict.values == o.int_dict.values &&
               str_dict.values == o.str_dict.values && codes == o.codes;
    }
};

inline ColumnData encode_int_column(LogicalType type, const std::vector<int64_t>& values) {
    ColumnData c;
    c.type = type;
    c.int_dict = Dictionary<int64_t>::build(values);
    std::vector<uint64_t> codes(values.size());
    for (size_t i = 0; i < values.size(); ++i) codes[i] = c.int_dict.encode(values[i]);
    uint64_t max_code = c.int_dict.size() ? c.int_dict.size() - 1 : 0;
    c.codes = pack_column(codes, min_width(max_code));
    return c;
}

inline ColumnData encode_string_column(const std::vector<std::string>& values) {
    ColumnData c;
    c.type = LogicalType::String;
    c.str_dict = Dictionary<std::string>::build(values);
    std::vector<uint64_t> codes(values.size());
    for (size_t i = 0; i < values.size(); ++i) codes[i] = c.str_dict.encode(values[i]);
    uint64_t max_code = c.str_dict.size() ? c.str_dict.size() - 1 : 0;
    c.codes = pack_column(codes, min_width(max_code));
    return c;
}

inline std::vector<int64_t> decode_int_column(const ColumnData& c) {
    std::vector<int64_t> out(c.rows());
    for (uint64_t i = 0; i < c.rows(); ++i) out[i] = c.int_at(i);
    return out;
}

inline std::vector<std::string> decode_string_column(const ColumnData& c) {
    std::vector<std::string> out(c.rows());
    for (uint64_t i = 0; i < c.rows(); ++i) out[i] = c.str_at(i);
    return out;
}

struct Table {
    std::string name;
    std::vector<std::string> column_names;
    std::vector<ColumnData> columns;

    uint64_t row_count() const { return columns.empty() ? 0 : columns.front().rows(); }

    int column_index(const std::string& n) const {
        for (size_t i = 0; i < column_names.size(); ++i)
            if (column_names[i] == n) return int(i);
        return -1;
    }
    const ColumnData& column(const std::string& n) const {
        int i = column_index(n);
        if (i < 0) throw std::out_of_range(name + ": no column " + n);
        return columns[i];
    }

    uint64_t encoded_bytes() const {
        uint64_t b = 0;
        for (const auto& c : columns) b += c.encoded_bytes();
        return b;
    }
    uint64_t decoded_bytes() const {
        uint64_t b = 0;
        for (const auto& c : columns) b += c.decoded_bytes();
        return b;
    }

    bool operator==(const Table& o) const {
        return name == o.name && column_names == o.column_names && columns == o.columns;
    }
};

struct Database {
    Schema schema;
    std::vector<Table> tables;

    Table* find_table(const std::string& n) {
        for (auto& t : tables)
            if (t.name == n) return &t;
        return nullptr;
    }
    const Table* find_table(const std::string& n) const {
        for (const auto& t : tables)
            if (t.name == n) return &t;
        return nullptr;
    }
    const Table& table(const std::string& n) const {
        const Table* t = find_table(n);
        if (!t) throw std::out_of_range("no table " + n);
        return *t;
    }

    uint64_t encoded_bytes() const {
        uint64_t b = 0;
        for (const auto& t : tables) b += t.encoded_bytes();
        return b;
    }
    uint64_t decoded_bytes() const {
        uint64_t b = 0;
        for (const auto& t : tables) b += t.decoded_bytes();
        return b;
    }

    bool operator==(const Database& o) const {
        return nlohmann::json(schema) == nlohmann::json(o.schema) && tables == o.tables;
    }
};

// ---------------------------------------------------------------- binary io

namespace storeio {

constexpr char kMagic[8] = {'P', 'I', 'M', 'D', 'B', 'S', 'T', '1'};
constexpr uint32_t kVersion = 1;

inline void put_u64(std::ostream& out, uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = char(v >> (8 * i));
    out.write(b, 8);
}
inline uint64_t get_u64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw std::runtime_error("store file truncated");
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t{b[i]} << (8 * i);
    return v;
}
inline void put_str(std::ostream& out, const std::string& s) {
    put_u64(out, s.size());
    out.write(s.data(), std::streamsize(s.size()));
    static const char pad[8] = {};
    out.write(pad, std::streamsize((8 - s.size() % 8) % 8));
}
inline std::string get_str(std::istream& in) {
    uint64_t n = get_u64(in);
    std::string s(n, '\0');
    in.read(s.data(), std::streamsize(n));
    in.ignore(std::streamsize((8 - n % 8) % 8));
    if (!in) throw std::runtime_error("store file truncated");
    return s;
}

}  // namespace storeio

inline void save_database(const Database& db, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write store file: " + path);
    out.write(storeio::kMagic, 8);
    storeio::put_u64(out, storeio::kVersion);
    storeio::put_str(out, nlohmann::json(db.schema).dump());
    storeio::put_u64(out, db.tables.size());
    for (const auto& t : db.tables) {
        storeio::put_str(out, t.name);
        storeio::put_u64(out, t.columns.size());
        for (size_t ci = 0; ci < t.columns.size(); ++ci) {
            const ColumnData& c = t.columns[ci];
            storeio::put_str(out, t.column_names[ci]);
            storeio::put_u64(out, uint64_t(c.type));
            if (c.is_string()) {
                storeio::put_u64(out, c.str_dict.size());
                for (const auto& v : c.str_dict.values) storeio::put_str(out, v);
            } else {
                storeio::put_u64(out, c.int_dict.size());
                for (int64_t v : c.int_dict.values) storeio::put_u64(out, uint64_t(v));
            }
            storeio::put_u64(out, c.codes.width);
            storeio::put_u64(out, c.codes.length);
            storeio::put_u64(out, c.codes.words.size());
            for (uint64_t w : c.codes.words) storeio::put_u64(out, w);
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline Database open_database(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open store file: " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::string(magic, 8) != std::string(storeio::kMagic, 8))
        throw std::runtime_error("not a column store file: " + path);
    if (storeio::get_u64(in) != storeio::kVersion)
        throw std::runtime_error("unsupported store version");
    Database db;
    db.schema = nlohmann::json::parse(storeio::get_str(in)).get<Schema>();
    uint64_t ntables = storeio::get_u64(in);
    for (uint64_t ti = 0; ti < ntables; ++ti) {
        Table t;
        t.name = storeio::get_str(in);
        uint64_t ncols = storeio::get_u64(in);
        for (uint64_t ci = 0; ci < ncols; ++ci) {
            t.column_names.push_back(storeio::get_str(in));
            ColumnData c;
            c.type = LogicalType(storeio::get_u64(in));
            uint64_t dn = storeio::get_u64(in);
            if (c.is_string()) {
                c.str_dict.values.reserve(dn);
                for (uint64_t i = 0; i < dn; ++i) c.str_dict.values.push_back(storeio::get_str(in));
            } else {
                c.int_dict.values.reserve(dn);
                for (uint64_t i = 0; i < dn; ++i)
                    c.int_dict.values.push_back(int64_t(storeio::get_u64(in)));
            }
            c.codes.width = uint32_t(storeio::get_u64(in));
            c.codes.length = storeio::get_u64(in);
            uint64_t nwords = storeio::get_u64(in);
            c.codes.words.reserve(nwords);
            for (uint64_t i = 0; i < nwords; ++i) c.codes.words.push_back(storeio::get_u64(in));
            t.columns.push_back(std::move(c));
        }
        db.tables.push_back(std::move(t));
    }
    return db;
}

// ------------------------------------------------------------------- csv in

namespace csvio {

/// RFC-4180 subset: comma separator, CRLF or LF record ends, double-quoted
/// fields with "" escapes.
inline std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false, any = false;
    int ch;
    while ((ch = in.get()) != EOF) {
        char c = char(ch);
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    field += '"';
                    in.get();
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"' && field.empty()) {
            quoted = true;
            any = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (c == '\n') {
            if (any || !field.empty() || !row.empty()) {
                row.push_back(std::move(field));
                field.clear();
                rows.push_back(std::move(row));
                row.clear();
                any = false;
            }
        } else if (c != '\r') {
            field += c;
            any = true;
        }
    }
    if (any || !field.empty() || !row.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline int64_t parse_int(const std::string& s) {
    size_t pos = 0;
    int64_t v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
}

/// "123", "123.4", "123.45" -> scaled integer with two implied decimals.
inline int64_t parse_decimal(const std::string& s) {
    size_t dot = s.find('.');
    if (dot == std::string::npos) return parse_int(s) * 100;
    int64_t whole = parse_int(s.substr(0, dot));
    std::string frac = s.substr(dot + 1);
    if (frac.empty() || frac.size() > 2) throw std::invalid_argument("bad decimal fraction");
    if (frac.size() == 1) frac += '0';
    int64_t f = parse_int(frac);
    bool neg = !s.empty() && s[0] == '-';
    return whole * 100 + (neg ? -f : f);
}

/// "YYYY-MM-DD" -> days since 1970-01-01.
inline int64_t parse_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') throw std::invalid_argument("bad date");
    int y = int(parse_int(s.substr(0, 4)));
    unsigned m = unsigned(parse_int(s.substr(5, 2)));
    unsigned d = unsigned(parse_int(s.substr(8, 2)));
    if (m < 1 || m > 12 || d < 1 || d > 31) throw std::invalid_argument("bad date");
    return days_from_civil(y, m, d);
}

}  // namespace csvio

/// Loads one table from CSV. The header row must list the schema's columns
/// in order; every cell must parse under its column's logical type.
inline Table load_csv_table(const std::string& path, const TableSchema& ts) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open csv file: " + path);
    auto rows = csvio::parse_csv(in);
    if (rows.empty()) throw std::runtime_error(path + ": missing header row");
    const auto& header = rows.front();
    if (header.size() != ts.columns.size())
        throw std::runtime_error(path + ": header arity does not match schema");
    for (size_t i = 0; i < header.size(); ++i)
        if (header[i] != ts.columns[i].name)
            throw std::runtime_error(path + ": header column '" + header[i] +
                                     "' does not match schema column '" + ts.columns[i].name + "'");
    size_t ncols = ts.columns.size();
    std::vector<std::vector<int64_t>> ints(ncols);
    std::vector<std::vector<std::string>> strs(ncols);
    for (size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != ncols)
            throw std::runtime_error(path + ": row " + std::to_string(r) + " has " +
                                     std::to_string(rows[r].size()) + " fields, expected " +
                                     std::to_string(ncols));
        for (size_t c = 0; c < ncols; ++c) {
            const std::string& cell = rows[r][c];
            try {
                switch (ts.columns[c].type) {
                    case LogicalType::Int: ints[c].push_back(csvio::parse_int(cell)); break;
                    case LogicalType::Decimal: ints[c].push_back(csvio::parse_decimal(cell)); break;
                    case LogicalType::Date: ints[c].push_back(csvio::parse_date(cell)); break;
                    case LogicalType::String: strs[c].push_back(cell); break;
                }
            } catch (const std::exception&) {
                throw std::runtime_error(path + ": row " + std::to_string(r) + ", column '" +
                                         ts.columns[c].name + "': cannot parse '" + cell + "'");
            }
        }
    }
    Table t;
    t.name = ts.name;
    for (size_t c = 0; c < ncols; ++c) {
        t.column_names.push_back(ts.columns[c].name);
        if (ts.columns[c].type == LogicalType::String)
            t.columns.push_back(encode_string_column(strs[c]));
        else
            t.columns.push_back(encode_int_column(ts.columns[c].type, ints[c]));
    }
    return t;
}

}  // namespace pimdb
