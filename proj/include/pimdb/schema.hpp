#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace pimdb {

/// Logical column types. Decimal is a scaled integer (two implied decimal
/// places); Date is days since 1970-01-01. Both evaluate as plain integers.
enum class LogicalType { Int, Decimal, Date, String };

inline const char* type_name(LogicalType t) {
    switch (t) {
        case LogicalType::Int: return "int";
        case LogicalType::Decimal: return "decimal";
        case LogicalType::Date: return "date";
        case LogicalType::String: return "string";
    }
    return "?";
}

inline LogicalType parse_type(const std::string& s) {
    if (s == "int") return LogicalType::Int;
    if (s == "decimal") return LogicalType::Decimal;
    if (s == "date") return LogicalType::Date;
    if (s == "string") return LogicalType::String;
    throw std::invalid_argument("unknown logical type: " + s);
}

struct ColumnSchema {
    std::string name;
    LogicalType type = LogicalType::Int;
};

struct ForeignKey {
    std::string column;     // column of this table
    std::string ref_table;  // joined table; key is that table's primary key
};

struct TableSchema {
    std::string name;
    std::vector<ColumnSchema> columns;
    std::string primary_key;
    std::vector<ForeignKey> foreign_keys;

    const ColumnSchema* find_column(const std::string& n) const {
        for (const auto& c : columns)
            if (c.name == n) return &c;
        return nullptr;
    }
};

struct Schema {
    std::vector<TableSchema> tables;

    const TableSchema* find_table(const std::string& n) const {
        for (const auto& t : tables)
            if (t.name == n) return &t;
        return nullptr;
    }
};

/// Every FK must point at an existing table, and every PK must name one of
/// the table's own columns.
inline void validate_schema(const Schema& s) {
    for (const auto& t : s.tables) {
        if (!t.primary_key.empty() && !t.find_column(t.primary_key))
            throw std::invalid_argument(t.name + ": primary key column missing");
        for (const auto& fk : t.foreign_keys) {
            if (!t.find_column(fk.column))
                throw std::invalid_argument(t.name + ": FK column missing: " + fk.column);
            const TableSchema* ref = s.find_table(fk.ref_table);
            if (!ref) throw std::invalid_argument(t.name + ": FK target missing: " + fk.ref_table);
            if (ref->primary_key.empty())
                throw std::invalid_argument(fk.ref_table + ": FK target has no primary key");
        }
    }
}

inline void to_json(nlohmann::json& j, const ColumnSchema& c) {
    j = {{"name", c.name}, {"type", type_name(c.type)}};
}
inline void from_json(const nlohmann::json& j, ColumnSchema& c) {
    c.name = j.at("name").get<std::string>();
    c.type = parse_type(j.at("type").get<std::string>());
}
inline void to_json(nlohmann::json& j, const ForeignKey& f) {
    j = {{"column", f.column}, {"ref_table", f.ref_table}};
}
inline void from_json(const nlohmann::json& j, ForeignKey& f) {
    f.column = j.at("column").get<std::string>();
    f.ref_table = j.at("ref_table").get<std::string>();
}
inline void to_json(nlohmann::json& j, const TableSchema& t) {
    j = {{"name", t.name},
         {"columns", t.columns},
         {"primary_key", t.primary_key},
         {"foreign_keys", t.foreign_keys}};
}
inline void from_json(const nlohmann::json& j, TableSchema& t) {
    t.name = j.at("name").get<std::string>();
    t.columns = j.at("columns").get<std::vector<ColumnSchema>>();
    t.primary_key = j.value("primary_key", std::string{});
    if (j.contains("foreign_keys"))
        t.foreign_keys = j.at("foreign_keys").get<std::vector<ForeignKey>>();
}
inline void to_json(nlohmann::json& j, const Schema& s) { j = {{"tables", s.tables}}; }
inline void from_json(const nlohmann::json& j, Schema& s) {
    s.tables = j.at("tables").get<std::vector<TableSchema>>();
}

inline Schema load_schema(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open schema file: " + path);
    nlohmann::json j;
    in >> j;
    Schema s = j.get<Schema>();
    validate_schema(s);
    return s;
}

}  // namespace pimdb
