#pragma once

#include <map>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace dirac {

using CsvCell = std::variant<double, long long, std::string>;

// Comma-separated table with a '#'-prefixed metadata block. Every row is
// tagged with the scenario name and library version; floats carry 17
// significant digits so values round-trip.
class CsvTable {
public:
    CsvTable(std::string scenario, std::vector<std::string> columns);

    void meta(const std::string& key, const std::string& value);
    void meta(const std::string& key, double value);
    void row(const std::vector<CsvCell>& cells);

    std::size_t rows() const { return rows_.size(); }
    void write(std::ostream& os) const;
    void save(const std::string& path) const;

private:
    std::string scenario_;
    std::vector<std::string> columns_;
    std::vector<std::pair<std::string, std::string>> meta_;
    std::vector<std::vector<CsvCell>> rows_;
};

std::string format_double(double v);

}  // namespace dirac
