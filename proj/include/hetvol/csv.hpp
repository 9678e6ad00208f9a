#ifndef HETVOL_CSV_HPP
#define HETVOL_CSV_HPP

#include "hetvol/volatility.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace hetvol {

// Intraday input: header `date,time,price`, ISO date, HH:MM:SS time,
// decimal price. One file per symbol; consecutive rows with the same date
// form one trading day.
struct IntradayParseReport {
    IntradaySeries series;
    int bad_rows = 0;
    std::vector<std::string> row_errors; // "line N: why" (first few)
};

IntradayParseReport read_intraday_csv(const std::string& path,
                                      const std::string& symbol);

// floats are emitted with 12 significant digits everywhere
std::string format_double(double v);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    void write(std::ostream& os) const;
    void save(const std::string& path) const;
};

// generic numeric CSV reader: header row + double columns
struct NumericCsv {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;
    int column(const std::string& name) const; // -1 when absent
};

NumericCsv read_numeric_csv(const std::string& path);

// omega series: prefers an `omega` column, else `rv` (omega = ln sqrt rv)
std::vector<double> read_logvol_csv(const std::string& path);

} // namespace hetvol

#endif
