#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "pimdb/database.hpp"

namespace pimdb {

// Star-schema benchmark style synthetic workload: one fact table (lineorder)
// and four dimensions (date, customer, supplier, part). Value domains follow
// the benchmark conventions the fixture queries exercise:
//   d_year 1992..1998, lo_discount 0..10, lo_quantity 1..50, lo_tax 0..8,
//   5 regions x 5 nations, 10 cities per nation (nation prefix + digit),
//   5 manufacturers x 5 categories x 10 brands (250 brand values),
//   part sizes 1..50. Draws are uniform; row counts scale linearly with the
//   scale factor except part, which scales logarithmically above SF 1.

namespace ssbgen {

inline const std::vector<std::string>& regions() {
    static const std::vector<std::string> v = {"AFRICA", "AMERICA", "ASIA", "EUROPE",
                                               "MIDDLE EAST"};
    return v;
}

inline const std::vector<std::pair<std::string, int>>& nations() {
    // nation name, region index
    static const std::vector<std::pair<std::string, int>> v = {
        {"ALGERIA", 0},   {"ETHIOPIA", 0},      {"KENYA", 0},     {"MOROCCO", 0},
        {"MOZAMBIQUE", 0}, {"ARGENTINA", 1},    {"BRAZIL", 1},    {"CANADA", 1},
        {"PERU", 1},      {"UNITED STATES", 1}, {"CHINA", 2},     {"INDIA", 2},
        {"INDONESIA", 2}, {"JAPAN", 2},         {"VIETNAM", 2},   {"FRANCE", 3},
        {"GERMANY", 3},   {"ROMANIA", 3},       {"RUSSIA", 3},    {"UNITED KINGDOM", 3},
        {"EGYPT", 4},     {"IRAN", 4},          {"IRAQ", 4},      {"JORDAN", 4},
        {"SAUDI ARABIA", 4}};
    return v;
}

inline std::string city_of(int nation_idx, int digit) {
    // benchmark convention: 9-character nation prefix plus a digit
    std::string prefix = nations()[size_t(nation_idx)].first;
    prefix.resize(9, ' ');
    return prefix + char('0' + digit);
}

inline const std::vector<std::string>& colors() {
    static const std::vector<std::string> v = {
        "almond", "azure", "beige", "blue",  "brown", "coral",  "cyan",   "forest",
        "gold",   "green", "ivory", "khaki", "lemon", "maroon", "olive",  "orange",
        "pink",   "plum",  "red",   "rose",  "salmon", "tan",   "violet", "white"};
    return v;
}

inline const std::vector<std::string>& containers() {
    static const std::vector<std::string> v = {"SM BOX",  "SM CASE", "SM PACK", "MED BOX",
                                               "MED CASE", "MED PACK", "LG BOX", "LG CASE",
                                               "LG PACK", "JUMBO BOX"};
    return v;
}

inline const std::vector<std::string>& part_types() {
    static const std::vector<std::string> v = {
        "ECONOMY ANODIZED", "ECONOMY BRUSHED", "ECONOMY PLATED", "ECONOMY POLISHED",
        "LARGE ANODIZED",   "LARGE BRUSHED",   "LARGE PLATED",   "LARGE POLISHED",
        "MEDIUM ANODIZED",  "MEDIUM BRUSHED",  "MEDIUM PLATED",  "MEDIUM POLISHED",
        "PROMO ANODIZED",   "PROMO BRUSHED",   "PROMO PLATED",   "PROMO POLISHED",
        "SMALL ANODIZED",   "SMALL BRUSHED",   "SMALL PLATED",   "SMALL POLISHED",
        "STANDARD ANODIZED", "STANDARD BRUSHED", "STANDARD PLATED", "STANDARD POLISHED"};
    return v;
}

inline const std::vector<std::string>& mktsegments() {
    static const std::vector<std::string> v = {"AUTOMOBILE", "BUILDING", "FURNITURE",
                                               "HOUSEHOLD", "MACHINERY"};
    return v;
}

inline const std::vector<std::string>& priorities() {
    static const std::vector<std::string> v = {"1-URGENT", "2-HIGH", "3-MEDIUM",
                                               "4-NOT SPECIFIED", "5-LOW"};
    return v;
}

inline const std::vector<std::string>& shipmodes() {
    static const std::vector<std::string> v = {"AIR", "FOB", "MAIL", "RAIL",
                                               "REG AIR", "SHIP", "TRUCK"};
    return v;
}

inline std::string zero_pad(uint64_t v, int digits) {
    std::string s = std::to_string(v);
    while (int(s.size()) < digits) s.insert(s.begin(), '0');
    return s;
}

inline std::string phone(std::mt19937_64& rng) {
    std::string s = zero_pad(10 + rng() % 25, 2) + "-";
    s += zero_pad(rng() % 1000, 3) + "-" + zero_pad(rng() % 1000, 3) + "-" +
         zero_pad(rng() % 10000, 4);
    return s;
}

// one independent stream per table keeps tables stable under reordering
inline std::mt19937_64 stream(uint64_t seed, uint64_t table_tag) {
    std::mt19937_64 rng(seed ^ (table_tag * 0x9E3779B97F4A7C15ull));
    rng.discard(16);
    return rng;
}

}  // namespace ssbgen

inline Schema ssb_schema() {
    Schema s;
    s.tables.push_back(TableSchema{
        "date",
        {{"d_datekey", LogicalType::Date},     {"d_date", LogicalType::String},
         {"d_dayofweek", LogicalType::String}, {"d_month", LogicalType::String},
         {"d_year", LogicalType::Int},         {"d_yearmonthnum", LogicalType::Int},
         {"d_yearmonth", LogicalType::String}, {"d_daynuminweek", LogicalType::Int},
         {"d_daynuminmonth", LogicalType::Int}, {"d_daynuminyear", LogicalType::Int},
         {"d_monthnuminyear", LogicalType::Int}, {"d_weeknuminyear", LogicalType::Int},
         {"d_sellingseason", LogicalType::String}, {"d_lastdayinweekfl", LogicalType::Int},
         {"d_lastdayinmonthfl", LogicalType::Int}, {"d_holidayfl", LogicalType::Int},
         {"d_weekdayfl", LogicalType::Int}},
        "d_datekey",
        {}});
    s.tables.push_back(TableSchema{
        "customer",
        {{"c_custkey", LogicalType::Int},   {"c_name", LogicalType::String},
         {"c_address", LogicalType::String}, {"c_city", LogicalType::String},
         {"c_nation", LogicalType::String}, {"c_region", LogicalType::String},
         {"c_phone", LogicalType::String},  {"c_mktsegment", LogicalType::String}},
        "c_custkey",
        {}});
    s.tables.push_back(TableSchema{
        "supplier",
        {{"s_suppkey", LogicalType::Int},   {"s_name", LogicalType::String},
         {"s_address", LogicalType::String}, {"s_city", LogicalType::String},
         {"s_nation", LogicalType::String}, {"s_region", LogicalType::String},
         {"s_phone", LogicalType::String}},
        "s_suppkey",
        {}});
    s.tables.push_back(TableSchema{
        "part",
        {{"p_partkey", LogicalType::Int},  {"p_name", LogicalType::String},
         {"p_mfgr", LogicalType::String},  {"p_category", LogicalType::String},
         {"p_brand1", LogicalType::String}, {"p_color", LogicalType::String},
         {"p_type", LogicalType::String},  {"p_size", LogicalType::Int},
         {"p_container", LogicalType::String}},
        "p_partkey",
        {}});
    s.tables.push_back(TableSchema{
        "lineorder",
        {{"lo_orderkey", LogicalType::Int},     {"lo_linenumber", LogicalType::Int},
         {"lo_custkey", LogicalType::Int},      {"lo_partkey", LogicalType::Int},
         {"lo_suppkey", LogicalType::Int},      {"lo_orderdate", LogicalType::Date},
         {"lo_orderpriority", LogicalType::String}, {"lo_shippriority", LogicalType::Int},
         {"lo_quantity", LogicalType::Int},     {"lo_extendedprice", LogicalType::Decimal},
         {"lo_ordtotalprice", LogicalType::Decimal}, {"lo_discount", LogicalType::Int},
         {"lo_revenue", LogicalType::Decimal},  {"lo_supplycost", LogicalType::Decimal},
         {"lo_tax", LogicalType::Int},          {"lo_commitdate", LogicalType::Date},
         {"lo_shipmode", LogicalType::String}},
        "",
        {{"lo_custkey", "customer"},
         {"lo_partkey", "part"},
         {"lo_suppkey", "supplier"},
         {"lo_orderdate", "date"}}});
    return s;
}

namespace ssbgen {

inline Table make_date_table(const TableSchema& ts) {
    static const char* months[] = {"January",   "February", "March",    "April",
                                   "May",       "June",     "July",     "August",
                                   "September", "October",  "November", "December"};
    static const char* mon3[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                 "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
    static const char* weekdays[] = {"Monday", "Tuesday",  "Wednesday", "Thursday",
                                     "Friday", "Saturday", "Sunday"};
    static const char* seasons[] = {"Winter", "Spring", "Summer", "Fall"};
    int64_t start = days_from_civil(1992, 1, 1);
    int64_t stop = days_from_civil(1998, 12, 31);
    std::vector<int64_t> datekey, year, ymnum, dnw, dnm, dny, mny, wny, ldwfl, ldmfl, holfl,
        wdfl;
    std::vector<std::string> datestr, dow, month, ym, season;
    int64_t year_start = start;
    for (int64_t d = start; d <= stop; ++d) {
        int y;
        unsigned m, dd;
        civil_from_days(d, y, m, dd);
        if (m == 1 && dd == 1) year_start = d;
        datekey.push_back(d);
        datestr.push_back(std::to_string(y) + "-" + zero_pad(m, 2) + "-" + zero_pad(dd, 2));
        int dowi = int(((d % 7) + 7 + 3) % 7);  // 1970-01-01 was a Thursday
        dow.push_back(weekdays[dowi]);
        month.push_back(months[m - 1]);
        year.push_back(y);
        ymnum.push_back(int64_t(y) * 100 + m);
        ym.push_back(std::string(mon3[m - 1]) + std::to_string(y));
        dnw.push_back(dowi + 1);
        dnm.push_back(dd);
        int64_t doy = d - year_start + 1;
        dny.push_back(doy);
        mny.push_back(m);
        wny.push_back((doy - 1) / 7 + 1);
        season.push_back(seasons[(m - 1) / 3]);
        ldwfl.push_back(dowi == 6 ? 1 : 0);
        int ny;
        unsigned nm, nd;
        civil_from_days(d + 1, ny, nm, nd);
        ldmfl.push_back(nd == 1 ? 1 : 0);
        holfl.push_back((m == 12 && dd >= 25) || (m == 1 && dd == 1) ? 1 : 0);
        wdfl.push_back(dowi < 5 ? 1 : 0);
    }
    Table t;
    t.name = ts.name;
    for (const auto& c : ts.columns) t.column_names.push_back(c.name);
    t.columns = {encode_int_column(LogicalType::Date, datekey),
                 encode_string_column(datestr),
                 encode_string_column(dow),
                 encode_string_column(month),
                 encode_int_column(LogicalType::Int, year),
                 encode_int_column(LogicalType::Int, ymnum),
                 encode_string_column(ym),
                 encode_int_column(LogicalType::Int, dnw),
                 encode_int_column(LogicalType::Int, dnm),
                 encode_int_column(LogicalType::Int, dny),
                 encode_int_column(LogicalType::Int, mny),
                 encode_int_column(LogicalType::Int, wny),
                 encode_string_column(season),
                 encode_int_column(LogicalType::Int, ldwfl),
                 encode_int_column(LogicalType::Int, ldmfl),
                 encode_int_column(LogicalType::Int, holfl),
                 encode_int_column(LogicalType::Int, wdfl)};
    return t;
}

}  // namespace ssbgen

inline Database generate_ssb(double scale_factor, uint64_t seed) {
    if (!(scale_factor > 0)) throw std::invalid_argument("scale factor must be positive");
    using namespace ssbgen;
    Database db;
    db.schema = ssb_schema();

    uint64_t ncust = uint64_t(std::max<long long>(1, std::llround(30000.0 * scale_factor)));
    uint64_t nsupp = uint64_t(std::max<long long>(1, std::llround(2000.0 * scale_factor)));
    uint64_t npart;
    if (scale_factor >= 1.0)
        npart = uint64_t(std::llround(200000.0 * (1.0 + std::floor(std::log2(scale_factor)))));
    else
        npart = uint64_t(std::max<long long>(1, std::llround(200000.0 * scale_factor)));
    uint64_t norders = uint64_t(std::max<long long>(1, std::llround(1500000.0 * scale_factor)));

    db.tables.push_back(make_date_table(db.schema.tables[0]));
    const ColumnData& datekeys = db.tables[0].columns[0];
    uint64_t ndates = datekeys.rows();

    {  // customer
        auto rng = stream(seed, 1);
        std::vector<int64_t> key;
        std::vector<std::string> name, addr, city, nation, region, ph, seg;
        for (uint64_t i = 0; i < ncust; ++i) {
            key.push_back(int64_t(i) + 1);
            name.push_back("Customer#" + zero_pad(i + 1, 9));
            addr.push_back("cAddr" + std::to_string(rng() % (10 * ncust)));
            int ni = int(rng() % nations().size());
            city.push_back(city_of(ni, int(rng() % 10)));
            nation.push_back(nations()[size_t(ni)].first);
            region.push_back(regions()[size_t(nations()[size_t(ni)].second)]);
            ph.push_back(phone(rng));
            seg.push_back(mktsegments()[rng() % mktsegments().size()]);
        }
        Table t;
        t.name = "customer";
        for (const auto& c : db.schema.tables[1].columns) t.column_names.push_back(c.name);
        t.columns = {encode_int_column(LogicalType::Int, key), encode_string_column(name),
                     encode_string_column(addr),               encode_string_column(city),
                     encode_string_column(nation),             encode_string_column(region),
                     encode_string_column(ph),                 encode_string_column(seg)};
        db.tables.push_back(std::move(t));
    }

    {  // supplier
        auto rng = stream(seed, 2);
        std::vector<int64_t> key;
        std::vector<std::string> name, addr, city, nation, region, ph;
        for (uint64_t i = 0; i < nsupp; ++i) {
            key.push_back(int64_t(i) + 1);
            name.push_back("Supplier#" + zero_pad(i + 1, 9));
            addr.push_back("sAddr" + std::to_string(rng() % (10 * nsupp)));
            int ni = int(rng() % nations().size());
            city.push_back(city_of(ni, int(rng() % 10)));
            nation.push_back(nations()[size_t(ni)].first);
            region.push_back(regions()[size_t(nations()[size_t(ni)].second)]);
            ph.push_back(phone(rng));
        }
        Table t;
        t.name = "supplier";
        for (const auto& c : db.schema.tables[2].columns) t.column_names.push_back(c.name);
        t.columns = {encode_int_column(LogicalType::Int, key), encode_string_column(name),
                     encode_string_column(addr),               encode_string_column(city),
                     encode_string_column(nation),             encode_string_column(region),
                     encode_string_column(ph)};
        db.tables.push_back(std::move(t));
    }

    {  // part: 5 mfgrs x 5 categories x 10 brands = 250 brand values
        auto rng = stream(seed, 3);
        std::vector<int64_t> key, size;
        std::vector<std::string> name, mfgr, cat, brand, color, type, container;
        for (uint64_t i = 0; i < npart; ++i) {
            key.push_back(int64_t(i) + 1);
            uint64_t m = 1 + rng() % 5, c = 1 + rng() % 5, b = 1 + rng() % 10;
            mfgr.push_back("MFGR#" + std::to_string(m));
            cat.push_back("MFGR#" + std::to_string(m) + std::to_string(c));
            brand.push_back("MFGR#" + std::to_string(m) + std::to_string(c) + zero_pad(b, 2));
            const std::string& col1 = colors()[rng() % colors().size()];
            const std::string& col2 = colors()[rng() % colors().size()];
            name.push_back(col1 + " " + col2);
            color.push_back(col1);
            type.push_back(part_types()[rng() % part_types().size()]);
            size.push_back(int64_t(1 + rng() % 50));
            container.push_back(containers()[rng() % containers().size()]);
        }
        Table t;
        t.name = "part";
        for (const auto& c : db.schema.tables[3].columns) t.column_names.push_back(c.name);
        t.columns = {encode_int_column(LogicalType::Int, key),  encode_string_column(name),
                     encode_string_column(mfgr),                encode_string_column(cat),
                     encode_string_column(brand),               encode_string_column(color),
                     encode_string_column(type),                encode_int_column(LogicalType::Int, size),
                     encode_string_column(container)};
        db.tables.push_back(std::move(t));
    }

    {  // lineorder: 1..7 lines per order, ~4 on average
        auto rng = stream(seed, 4);
        std::vector<int64_t> okey, lnum, ckey, pkey, skey, odate, shipprio, qty, eprice,
            totprice, disc, rev, scost, tax, cdate;
        std::vector<std::string> oprio, smode;
        for (uint64_t o = 1; o <= norders; ++o) {
            uint64_t nlines = 1 + rng() % 7;
            int64_t cust = int64_t(1 + rng() % ncust);
            int64_t od = datekeys.int_at(rng() % ndates);
            const std::string& prio = priorities()[rng() % priorities().size()];
            int64_t total = 0;
            size_t first = okey.size();
            for (uint64_t l = 1; l <= nlines; ++l) {
                okey.push_back(int64_t(o));
                lnum.push_back(int64_t(l));
                ckey.push_back(cust);
                int64_t part = int64_t(1 + rng() % npart);
                pkey.push_back(part);
                skey.push_back(int64_t(1 + rng() % nsupp));
                odate.push_back(od);
                oprio.push_back(prio);
                shipprio.push_back(0);
                int64_t q = int64_t(1 + rng() % 50);
                qty.push_back(q);
                // unit price in cents, 900.00 .. 2000.00, keyed to the part
                int64_t unit = 90000 + int64_t((uint64_t(part) * 7919) % 110001);
                int64_t ep = q * unit;
                eprice.push_back(ep);
                total += ep;
                int64_t d = int64_t(rng() % 11);
                disc.push_back(d);
                rev.push_back(ep * (100 - d) / 100);
                scost.push_back(unit * 6 / 10 * q);
                tax.push_back(int64_t(rng() % 9));
                cdate.push_back(od + int64_t(30 + rng() % 61));
                smode.push_back(shipmodes()[rng() % shipmodes().size()]);
            }
            for (size_t i = first; i < okey.size(); ++i) totprice.push_back(total);
        }
        Table t;
        t.name = "lineorder";
        for (const auto& c : db.schema.tables[4].columns) t.column_names.push_back(c.name);
        t.columns = {encode_int_column(LogicalType::Int, okey),
                     encode_int_column(LogicalType::Int, lnum),
                     encode_int_column(LogicalType::Int, ckey),
                     encode_int_column(LogicalType::Int, pkey),
                     encode_int_column(LogicalType::Int, skey),
                     encode_int_column(LogicalType::Date, odate),
                     encode_string_column(oprio),
                     encode_int_column(LogicalType::Int, shipprio),
                     encode_int_column(LogicalType::Int, qty),
                     encode_int_column(LogicalType::Decimal, eprice),
                     encode_int_column(LogicalType::Decimal, totprice),
                     encode_int_column(LogicalType::Int, disc),
                     encode_int_column(LogicalType::Decimal, rev),
                     encode_int_column(LogicalType::Decimal, scost),
                     encode_int_column(LogicalType::Int, tax),
                     encode_int_column(LogicalType::Date, cdate),
                     encode_string_column(smode)};
        db.tables.push_back(std::move(t));
    }
    return db;
}

}  // namespace pimdb
