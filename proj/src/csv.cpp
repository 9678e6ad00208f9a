#include "hetvol/csv.hpp"

#include "hetvol/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hetvol {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

bool parse_time_seconds(const std::string& s, double& out) {
    int h = 0, m = 0, sec = 0;
    if (std::sscanf(s.c_str(), "%d:%d:%d", &h, &m, &sec) != 3) return false;
    if (h < 0 || h > 23 || m < 0 || m > 59 || sec < 0 || sec > 60) return false;
    out = 3600.0 * h + 60.0 * m + sec;
    return true;
}

} // namespace

IntradayParseReport read_intraday_csv(const std::string& path,
                                      const std::string& symbol) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open intraday file: " + path);
    IntradayParseReport rep;
    rep.series.symbol = symbol;
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    {
        auto h = split_csv_line(line);
        if (h.size() < 3 || h[0] != "date" || h[1] != "time" || h[2] != "price")
            throw DataError(path + ": expected header date,time,price");
    }
    IntradayDay day;
    int lineno = 1;
    auto flush_day = [&] {
        if (!day.date.empty()) rep.series.days.push_back(day);
        day = IntradayDay{};
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        bool ok = f.size() >= 3;
        double t = 0.0, p = 0.0;
        if (ok) ok = parse_time_seconds(f[1], t);
        if (ok) {
            try {
                std::size_t pos = 0;
                p = std::stod(f[2], &pos);
                ok = pos == f[2].size();
            } catch (...) {
                ok = false;
            }
        }
        if (!ok) {
            ++rep.bad_rows;
            if (rep.row_errors.size() < 20)
                rep.row_errors.push_back("line " + std::to_string(lineno) +
                                         ": malformed row");
            continue;
        }
        if (f[0] != day.date) {
            flush_day();
            day.date = f[0];
        }
        if (!day.time_s.empty() && t <= day.time_s.back()) {
            ++rep.bad_rows;
            if (rep.row_errors.size() < 20)
                rep.row_errors.push_back("line " + std::to_string(lineno) +
                                         ": non-increasing timestamp");
            continue;
        }
        day.time_s.push_back(t);
        day.price.push_back(p);
    }
    flush_day();
    return rep;
}

void Table::write(std::ostream& os) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        os << header[i] << (i + 1 < header.size() ? "," : "\n");
    for (const auto& r : rows)
        for (std::size_t i = 0; i < r.size(); ++i)
            os << r[i] << (i + 1 < r.size() ? "," : "\n");
}

void Table::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write: " + path);
    write(out);
}

NumericCsv read_numeric_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open: " + path);
    NumericCsv out;
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    out.header = split_csv_line(line);
    out.columns.resize(out.header.size());
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (f.size() != out.header.size())
            throw DataError(path + " line " + std::to_string(lineno) +
                            ": wrong field count");
        for (std::size_t i = 0; i < f.size(); ++i) {
            try {
                out.columns[i].push_back(std::stod(f[i]));
            } catch (...) {
                out.columns[i].push_back(NAN);
            }
        }
    }
    return out;
}

int NumericCsv::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return int(i);
    return -1;
}

std::vector<double> read_logvol_csv(const std::string& path) {
    const NumericCsv csv = read_numeric_csv(path);
    int c = csv.column("omega");
    if (c >= 0) return csv.columns[c];
    c = csv.column("rv");
    if (c < 0) throw DataError(path + ": need an omega or rv column");
    std::vector<double> omega;
    omega.reserve(csv.columns[c].size());
    for (double rv : csv.columns[c]) {
        if (!(rv > 0.0)) throw DataError(path + ": rv must be positive");
        omega.push_back(0.5 * std::log(rv));
    }
    return omega;
}

} // namespace hetvol
