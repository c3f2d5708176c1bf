#include "dirac/csv.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "dirac/types.hpp"

namespace dirac {

namespace {

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

std::string cell_text(const CsvCell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    return quote(std::get<std::string>(c));
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

CsvTable::CsvTable(std::string scenario, std::vector<std::string> columns)
    : scenario_(std::move(scenario)), columns_(std::move(columns)) {}

void CsvTable::meta(const std::string& key, const std::string& value) { meta_.emplace_back(key, value); }

void CsvTable::meta(const std::string& key, double value) { meta_.emplace_back(key, format_double(value)); }

void CsvTable::row(const std::vector<CsvCell>& cells) {
    if (cells.size() != columns_.size()) throw DomainError("csv row width does not match the header");
    rows_.push_back(cells);
}

void CsvTable::write(std::ostream& os) const {
    os << "# scenario: " << scenario_ << '\n';
    os << "# version: " << kVersion << '\n';
    for (const auto& [k, v] : meta_) os << "# " << k << ": " << v << '\n';
    for (const auto& c : columns_) os << quote(c) << ',';
    os << "scenario,version\n";
    for (const auto& r : rows_) {
        for (const auto& c : r) os << cell_text(c) << ',';
        os << quote(scenario_) << ',' << kVersion << '\n';
    }
}

void CsvTable::save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    write(f);
}

}  // namespace dirac
