#pragma once

// Binary state snapshots. One text header line
//   NEMATOWAVE1 dim=<d> points=<p1,p2,p3> extent=<e1,e2,e3> t=<time>
// then u and v as raw little-endian float64, row-major.

#include <iosfwd>
#include <string>

#include "nematowave/grid.hpp"

namespace nematowave {

void write_snapshot(std::ostream& os, const State& s);
State read_snapshot(std::istream& is);

void write_snapshot_file(const std::string& path, const State& s);
State read_snapshot_file(const std::string& path);

}  // namespace nematowave
