#pragma once

// Field snapshots: a `key = value` metadata file next to a raw payload of
// little-endian IEEE-754 doubles, row-major, fields concatenated in the
// declared order.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "thetasav/config.hpp"
#include "thetasav/errors.hpp"
#include "thetasav/grid.hpp"

namespace thetasav {

struct Snapshot {
  int nx = 0;
  int ny = 0;
  double lx = 0.0;
  double ly = 0.0;
  double time = 0.0;
  long step = 0;
  std::vector<std::string> names;
  std::vector<std::vector<double>> fields;
};

namespace detail {

inline std::string exact_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

inline void put_le(std::ostream& os, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

inline double get_le(const unsigned char* b) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace detail

/// Writes `<base>.meta` and `<base>.bin`.
inline void write_snapshot(const Snapshot& s, const std::filesystem::path& base) {
  const std::size_t n = static_cast<std::size_t>(s.nx) * s.ny;
  if (s.names.size() != s.fields.size()) throw SnapshotError("field names and payloads differ in count");
  for (const auto& f : s.fields) {
    if (f.size() != n) throw SnapshotError("field size does not match nx*ny");
  }
  std::filesystem::path meta = base;
  meta += ".meta";
  std::filesystem::path bin = base;
  bin += ".bin";
  std::ofstream m(meta);
  if (!m) throw SnapshotError("cannot write '" + meta.string() + "'");
  std::string joined;
  for (std::size_t i = 0; i < s.names.size(); ++i) joined += (i ? "," : "") + s.names[i];
  m << "format = thetasav-snapshot\n"
    << "nx = " << s.nx << "\nny = " << s.ny << "\nlx = " << detail::exact_double(s.lx)
    << "\nly = " << detail::exact_double(s.ly) << "\ntime = " << detail::exact_double(s.time)
    << "\nstep = " << s.step << "\nfields = " << joined << "\nendianness = little\n"
    << "payload = " << bin.filename().string() << "\n";
  std::ofstream b(bin, std::ios::binary);
  if (!b) throw SnapshotError("cannot write '" + bin.string() + "'");
  for (const auto& f : s.fields) {
    for (double v : f) detail::put_le(b, v);
  }
  if (!m || !b) throw SnapshotError("write failed for snapshot '" + base.string() + "'");
}

/// Reads a snapshot given its `.meta` path or its base path.
inline Snapshot read_snapshot(std::filesystem::path path) {
  if (path.extension() != ".meta") path += ".meta";
  const ConfigMap meta = [&] {
    std::ifstream in(path);
    if (!in) throw SnapshotError("cannot open '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      return parse_config_text(ss.str(), path.string());
    } catch (const ConfigError& e) {
      throw SnapshotError(e.what());
    }
  }();
  auto need = [&](const char* key) -> const std::string& {
    auto it = meta.find(key);
    if (it == meta.end()) throw SnapshotError(std::string("snapshot metadata lacks '") + key + "'");
    return it->second;
  };
  if (need("format") != "thetasav-snapshot") throw SnapshotError("not a thetasav snapshot");
  if (need("endianness") != "little") throw SnapshotError("unsupported endianness");
  Snapshot s;
  try {
    s.nx = std::stoi(need("nx"));
    s.ny = std::stoi(need("ny"));
    s.lx = std::stod(need("lx"));
    s.ly = std::stod(need("ly"));
    s.time = std::stod(need("time"));
    s.step = std::stol(need("step"));
  } catch (const std::logic_error&) {
    throw SnapshotError("malformed snapshot metadata in '" + path.string() + "'");
  }
  std::stringstream names(need("fields"));
  for (std::string name; std::getline(names, name, ',');) s.names.push_back(trim(name));
  if (s.nx <= 0 || s.ny <= 0) throw SnapshotError("snapshot grid dimensions must be positive");

  const std::filesystem::path bin = path.parent_path() / need("payload");
  std::ifstream b(bin, std::ios::binary);
  if (!b) throw SnapshotError("cannot open payload '" + bin.string() + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  const std::size_t n = static_cast<std::size_t>(s.nx) * s.ny;
  const std::size_t expected = 8 * n * s.names.size();
  if (bytes.size() != expected) {
    throw SnapshotError("payload size mismatch: expected " + std::to_string(expected) + " bytes, found " +
                        std::to_string(bytes.size()));
  }
  for (std::size_t f = 0; f < s.names.size(); ++f) {
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = detail::get_le(&bytes[8 * (f * n + k)]);
    s.fields.push_back(std::move(v));
  }
  return s;
}

}  // namespace thetasav
