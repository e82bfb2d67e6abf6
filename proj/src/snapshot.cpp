#include "solab/snapshot.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace solab {

namespace {

constexpr char kMagic[8] = {'S', 'O', 'L', 'A', 'B', 'F', 'L', 'D'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kNameLen = 16;

template <typename T>
void put(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw error("snapshot: truncated file");
    return v;
}

}  // namespace

void write_snapshot(const std::string& path, const Snapshot& snap) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw error("snapshot: cannot open for writing: " + path);
    os.write(kMagic, sizeof(kMagic));
    put(os, kVersion);
    put(os, static_cast<std::uint32_t>(snap.field.grid.dim));
    put(os, static_cast<std::uint32_t>(snap.field.grid.points));
    put(os, static_cast<std::uint32_t>(snap.metadata.size()));
    put(os, snap.field.grid.extent);
    put(os, snap.time);
    for (const auto& [name, value] : snap.metadata) {
        char buf[kNameLen] = {};
        if (name.size() >= kNameLen) throw error("snapshot: metadata name too long: " + name);
        std::memcpy(buf, name.data(), name.size());
        os.write(buf, kNameLen);
        put(os, value);
    }
    for (const auto& z : snap.field.values) {
        put(os, z.real());
        put(os, z.imag());
    }
    if (!os) throw error("snapshot: write failed: " + path);
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw error("snapshot: cannot open: " + path);
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw error("snapshot: bad magic in " + path);
    if (get<std::uint32_t>(is) != kVersion) throw error("snapshot: unsupported version");
    const auto dim = get<std::uint32_t>(is);
    const auto points = get<std::uint32_t>(is);
    const auto meta_count = get<std::uint32_t>(is);
    const auto extent = get<double>(is);
    const auto time = get<double>(is);

    Snapshot snap;
    snap.time = time;
    for (std::uint32_t i = 0; i < meta_count; ++i) {
        char buf[kNameLen];
        is.read(buf, kNameLen);
        if (!is) throw error("snapshot: truncated metadata");
        std::string name(buf, strnlen(buf, kNameLen));
        snap.metadata[name] = get<double>(is);
    }
    Grid g(static_cast<int>(dim), extent, static_cast<int>(points));
    snap.field = ComplexField(g);
    for (auto& z : snap.field.values) {
        const double re = get<double>(is);
        const double im = get<double>(is);
        z = cplx{re, im};
    }
    return snap;
}

}  // namespace solab
