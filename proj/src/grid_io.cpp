#include "mfgcache/grid_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "json.hpp"

#include "mfgcache/errors.hpp"

namespace mfgcache::io {

static_assert(std::endian::native == std::endian::little,
              "grid dumps assume a little-endian host");

std::uint64_t fnv1a64(std::span<const unsigned char> bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a64(std::string_view text) {
  return fnv1a64({reinterpret_cast<const unsigned char*>(text.data()), text.size()});
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error("short write on " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

namespace {

std::span<const unsigned char> bytes_of(std::span<const double> d) {
  return {reinterpret_cast<const unsigned char*>(d.data()), d.size_bytes()};
}

}  // namespace

void write_grid(const std::filesystem::path& path, const mfg::Grid3& grid,
                std::string_view kind) {
  const auto& lat = grid.lattice();
  const auto data = grid.data();
  nlohmann::json h = {
      {"format", "mfgcache-grid"},
      {"version", 1},
      {"kind", kind},
      {"nt", lat.nt()},
      {"nx", lat.nx()},
      {"nq", lat.nq()},
      {"t_range", {0.0, lat.horizon()}},
      {"x_range", {0.0, 1.0}},
      {"q_range", {0.0, lat.storage()}},
      {"layout", "t-major, Q fastest, cell centred, float64 little-endian"},
      {"checksum", "fnv1a64:" + hex64(fnv1a64(bytes_of(data)))},
  };
  std::string text = h.dump() + "\n";
  const auto payload = bytes_of(data);
  text.append(reinterpret_cast<const char*>(payload.data()), payload.size());
  write_text(path, text);
}

LoadedGrid read_grid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifact("missing grid dump " + path.string());
  std::string header;
  std::getline(in, header);
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(header);
  } catch (const nlohmann::json::exception&) {
    throw MissingArtifact("corrupt grid header in " + path.string());
  }
  if (h.value("format", "") != "mfgcache-grid")
    throw MissingArtifact(path.string() + " is not a grid dump");
  try {
    const mfg::Lattice lat(h.at("nx").get<int>(), h.at("nq").get<int>(),
                           h.at("nt").get<int>(), h.at("t_range").at(1).get<double>(),
                           h.at("q_range").at(1).get<double>());
    mfg::Grid3 grid(lat);
    auto data = grid.data();
    in.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(data.size_bytes()));
    if (in.gcount() != static_cast<std::streamsize>(data.size_bytes()))
      throw MissingArtifact("truncated grid dump " + path.string());
    const std::string expect = h.at("checksum").get<std::string>();
    if (expect != "fnv1a64:" + hex64(fnv1a64(bytes_of(data))))
      throw MissingArtifact("checksum mismatch in " + path.string());
    return {std::move(grid), h.at("kind").get<std::string>()};
  } catch (const nlohmann::json::exception& e) {
    throw MissingArtifact("corrupt grid header in " + path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw MissingArtifact("bad grid dimensions in " + path.string() + ": " + e.what());
  }
}

void write_grid_csv(const std::filesystem::path& path, const mfg::Grid3& grid) {
  const auto& lat = grid.lattice();
  std::string out = "t,x,Q,value\n";
  out.reserve(lat.slices() * lat.slice_size() * 40);
  for (int n = 0; n <= lat.nt(); ++n)
    for (int i = 0; i < lat.nx(); ++i)
      for (int k = 0; k < lat.nq(); ++k) {
        out += fmt(lat.t(n));
        out += ',';
        out += fmt(lat.x(i));
        out += ',';
        out += fmt(lat.q(k));
        out += ',';
        out += fmt(grid(n, i, k));
        out += '\n';
      }
  write_text(path, out);
}

}  // namespace mfgcache::io
