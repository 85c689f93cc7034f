#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "mfgcache/lattice.hpp"

namespace mfgcache::io {

// FNV-1a over raw bytes.
std::uint64_t fnv1a64(std::span<const unsigned char> bytes,
                      std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a64(std::string_view text);
std::string hex64(std::uint64_t v);

// Binary dump: one line of JSON (dimensions, ranges, kind, checksum of the
// payload) followed by little-endian doubles in lattice order.
void write_grid(const std::filesystem::path& path, const mfg::Grid3& grid,
                std::string_view kind);

struct LoadedGrid {
  mfg::Grid3 grid;
  std::string kind;
};

// Throws MissingArtifact when absent, unreadable or failing the checksum.
LoadedGrid read_grid(const std::filesystem::path& path);

// CSV with columns t, x, Q, value.
void write_grid_csv(const std::filesystem::path& path, const mfg::Grid3& grid);

// Writes via a temporary file and a rename so readers never see half files.
void write_text(const std::filesystem::path& path, std::string_view text);

// Compact fixed formatting shared by every CSV writer.
std::string fmt(double v);

}  // namespace mfgcache::io
