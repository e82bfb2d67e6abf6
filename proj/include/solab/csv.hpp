#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "solab/field.hpp"

namespace solab {

/// Minimal CSV emitter. Doubles are printed with %.17g so values round-trip
/// exactly and output is byte-stable across runs.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : os_(path) {
        if (!os_) throw error("CsvWriter: cannot open " + path);
    }

    void header(const std::vector<std::string>& cols) {
        for (std::size_t i = 0; i < cols.size(); ++i) {
            if (i) os_ << ',';
            os_ << cols[i];
        }
        os_ << '\n';
    }

    void row(const std::vector<double>& vals) {
        char buf[32];
        for (std::size_t i = 0; i < vals.size(); ++i) {
            if (i) os_ << ',';
            std::snprintf(buf, sizeof(buf), "%.17g", vals[i]);
            os_ << buf;
        }
        os_ << '\n';
    }

private:
    std::ofstream os_;
};

/// Parse a CSV written by CsvWriter: first line headers, then double rows.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    int column_index(const std::string& name) const;
    std::vector<double> column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

}  // namespace solab
