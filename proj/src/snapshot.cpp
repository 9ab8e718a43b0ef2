#include "nematowave/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "nematowave/errors.hpp"

namespace nematowave {

namespace {

constexpr const char* kMagic = "NEMATOWAVE1";

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void put_doubles(std::ostream& os, const std::vector<double>& v) {
  if constexpr (std::endian::native == std::endian::little) {
    os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  } else {
    for (double x : v) {
      auto bits = std::bit_cast<std::uint64_t>(x);
      unsigned char b[8];
      for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
      os.write(reinterpret_cast<const char*>(b), 8);
    }
  }
}

void get_doubles(std::istream& is, std::vector<double>& v) {
  if constexpr (std::endian::native == std::endian::little) {
    is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  } else {
    for (double& x : v) {
      unsigned char b[8];
      is.read(reinterpret_cast<char*>(b), 8);
      std::uint64_t bits = 0;
      for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
      x = std::bit_cast<double>(bits);
    }
  }
  if (!is) throw FormatError("snapshot payload is truncated");
}

template <class T, std::size_t N>
std::array<T, N> parse_list(const std::string& text, const char* key) {
  std::array<T, N> out{};
  std::istringstream is(text);
  std::string item;
  std::size_t k = 0;
  while (std::getline(is, item, ',')) {
    if (k >= N) throw FormatError(std::string("snapshot header: too many values for ") + key);
    std::istringstream iv(item);
    iv >> out[k];
    if (!iv || !iv.eof()) throw FormatError(std::string("snapshot header: bad value for ") + key);
    ++k;
  }
  if (k != N) throw FormatError(std::string("snapshot header: expected 3 values for ") + key);
  return out;
}

}  // namespace

void write_snapshot(std::ostream& os, const State& s) {
  const GridSpec& g = s.spec();
  os << kMagic << " dim=" << g.dim() << " points=" << g.points(0) << ',' << g.points(1) << ',' << g.points(2)
     << " extent=" << fmt17(g.extent(0)) << ',' << fmt17(g.extent(1)) << ',' << fmt17(g.extent(2))
     << " t=" << fmt17(s.t) << '\n';
  put_doubles(os, s.u.values);
  put_doubles(os, s.v.values);
  if (!os) throw FormatError("failed writing snapshot");
}

State read_snapshot(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError("snapshot is empty");
  std::istringstream hs(line);
  std::string magic;
  hs >> magic;
  if (magic != kMagic) throw FormatError("not a snapshot (bad magic '" + magic + "')");
  int dim = 0;
  std::array<std::size_t, 3> points{};
  std::array<double, 3> extent{};
  double t = 0.0;
  unsigned seen = 0;
  std::string tok;
  while (hs >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw FormatError("snapshot header: malformed token '" + tok + "'");
    const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    std::istringstream iv(val);
    if (key == "dim") {
      iv >> dim;
      if (!iv || !iv.eof()) throw FormatError("snapshot header: bad dim");
      seen |= 1u;
    } else if (key == "points") {
      points = parse_list<std::size_t, 3>(val, "points");
      seen |= 2u;
    } else if (key == "extent") {
      extent = parse_list<double, 3>(val, "extent");
      seen |= 4u;
    } else if (key == "t") {
      iv >> t;
      if (!iv || !iv.eof()) throw FormatError("snapshot header: bad t");
      seen |= 8u;
    } else {
      throw FormatError("snapshot header: unknown key '" + key + "'");
    }
  }
  if (seen != 15u) throw FormatError("snapshot header: missing dim, points, extent or t");
  if (dim < 1 || dim > 3) throw FormatError("snapshot header: dim must be 1..3");
  for (int a = dim; a < 3; ++a)
    if (points[a] != 1) throw FormatError("snapshot header: unused axes must have one point");

  GridSpec spec;
  try {
    spec = GridSpec(dim, extent, points);
  } catch (const PreconditionError& e) {
    throw FormatError(std::string("snapshot header: ") + e.what());
  }
  State s(spec, t);
  get_doubles(is, s.u.values);
  get_doubles(is, s.v.values);
  if (is.peek() != std::char_traits<char>::eof()) throw FormatError("snapshot has trailing bytes");
  return s;
}

void write_snapshot_file(const std::string& path, const State& s) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open snapshot for writing: " + path);
  write_snapshot(os, s);
}

State read_snapshot_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open snapshot: " + path);
  return read_snapshot(is);
}

}  // namespace nematowave
