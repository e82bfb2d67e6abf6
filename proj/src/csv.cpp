#include "solab/csv.hpp"

#include <sstream>

namespace solab {

int CsvTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return static_cast<int>(i);
    throw error("CsvTable: no column named " + name);
}

std::vector<double> CsvTable::column(const std::string& name) const {
    const int c = column_index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw error("read_csv: cannot open " + path);
    CsvTable t;
    std::string line;
    if (!std::getline(is, line)) throw error("read_csv: empty file " + path);
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) t.columns.push_back(cell);
    }
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != t.columns.size()) throw error("read_csv: ragged row in " + path);
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace solab
