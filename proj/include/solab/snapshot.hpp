#pragma once

#include <map>
#include <string>

#include "solab/field.hpp"

namespace solab {

/// Field snapshot container (binary, little-endian, round-trips bit-exact):
///   char     magic[8]  = "SOLABFLD"
///   u32      version   = 1
///   u32      dim
///   u32      points          samples per axis
///   u32      meta_count
///   f64      extent          box length L per axis
///   f64      time
///   meta_count entries of { char name[16] (NUL padded); f64 value }
///   points^dim samples of { f64 re; f64 im } in row-major order
struct Snapshot {
    ComplexField field;
    double time = 0.0;
    std::map<std::string, double> metadata;  // e.g. {mu, lambda, s, residual} for profiles
};

void write_snapshot(const std::string& path, const Snapshot& snap);
Snapshot read_snapshot(const std::string& path);

}  // namespace solab
