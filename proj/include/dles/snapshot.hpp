#pragma once

// Binary field snapshots. Layout of one file:
//
//   "DLES" | u32 version = 1 | u8 ndim | u64 size per axis | u8 stagger tag |
//   f64 values, row-major
//
// All integers and reals are little-endian. One file holds one component.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "dles/grid.hpp"

namespace dles {

inline constexpr std::uint32_t snapshot_version = 1;

struct SnapshotHeader {
    std::uint32_t version = snapshot_version;
    std::vector<std::uint64_t> sizes;
    std::uint8_t stagger_tag = 0;
};

namespace detail {

template <class T>
void put_le(std::ostream& os, T v) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(b, b + sizeof(T));
    }
    os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get_le(std::istream& is, const std::string& path) {
    unsigned char b[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(b), sizeof(T))) {
        throw Error("snapshot " + path + ": truncated file");
    }
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(b, b + sizeof(T));
    }
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
}

} // namespace detail

template <int Dim>
void write_field(const std::filesystem::path& path, const Field<Dim>& f) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw Error("snapshot " + path.string() + ": cannot open for writing");
    }
    os.write("DLES", 4);
    detail::put_le<std::uint32_t>(os, snapshot_version);
    detail::put_le<std::uint8_t>(os, static_cast<std::uint8_t>(Dim));
    for (int a = 0; a < Dim; ++a) {
        detail::put_le<std::uint64_t>(os, f.extent(a));
    }
    detail::put_le<std::uint8_t>(os, f.location().tag());
    for (double x : f.values()) {
        detail::put_le<double>(os, x);
    }
    if (!os) {
        throw Error("snapshot " + path.string() + ": write failed");
    }
}

inline SnapshotHeader read_snapshot_header(std::istream& is, const std::string& path) {
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "DLES", 4) != 0) {
        throw Error("snapshot " + path + ": bad magic bytes");
    }
    SnapshotHeader h;
    h.version = detail::get_le<std::uint32_t>(is, path);
    if (h.version != snapshot_version) {
        throw Error("snapshot " + path + ": unsupported version " + std::to_string(h.version));
    }
    const auto ndim = detail::get_le<std::uint8_t>(is, path);
    if (ndim != 1 && ndim != 3) {
        throw Error("snapshot " + path + ": unsupported dimension " + std::to_string(ndim));
    }
    h.sizes.resize(ndim);
    for (auto& s : h.sizes) {
        s = detail::get_le<std::uint64_t>(is, path);
    }
    h.stagger_tag = detail::get_le<std::uint8_t>(is, path);
    return h;
}

/// Reads a field written by write_field. The domain length is not stored.
template <int Dim>
Field<Dim> read_field(const std::filesystem::path& path, double length) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw Error("snapshot " + path.string() + ": cannot open for reading");
    }
    const SnapshotHeader h = read_snapshot_header(is, path.string());
    if (h.sizes.size() != static_cast<std::size_t>(Dim)) {
        throw Error("snapshot " + path.string() + ": expected a " + std::to_string(Dim) + "D field");
    }
    typename Field<Dim>::Shape shape{};
    for (int a = 0; a < Dim; ++a) {
        shape[a] = static_cast<std::size_t>(h.sizes[a]);
    }
    Field<Dim> f(shape, length, Stagger::from_tag(h.stagger_tag));
    for (auto& x : f.values()) {
        x = detail::get_le<double>(is, path.string());
    }
    if (is.peek() != std::char_traits<char>::eof()) {
        throw Error("snapshot " + path.string() + ": trailing bytes after payload");
    }
    return f;
}

/// Writes <stem>_1.dles, <stem>_2.dles, <stem>_3.dles.
inline std::vector<std::filesystem::path> write_vector_field(const std::filesystem::path& stem, const VectorField& v) {
    std::vector<std::filesystem::path> out;
    for (int i = 0; i < 3; ++i) {
        out.emplace_back(stem.string() + "_" + std::to_string(i + 1) + ".dles");
        write_field(out.back(), v[i]);
    }
    return out;
}

inline VectorField read_vector_field(const std::filesystem::path& stem, double length) {
    std::array<Field3D, 3> c;
    for (int i = 0; i < 3; ++i) {
        c[i] = read_field<3>(stem.string() + "_" + std::to_string(i + 1) + ".dles", length);
        if (c[i].location() != Stagger::face(i)) {
            throw Error("snapshot " + stem.string() + ": component " + std::to_string(i + 1) + " is not face-located");
        }
    }
    VectorField v(Grid3D(c[0].extent(0), length));
    for (int i = 0; i < 3; ++i) {
        v[i] = std::move(c[i]);
    }
    return v;
}

} // namespace dles
