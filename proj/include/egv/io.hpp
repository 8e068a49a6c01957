#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "egv/field.hpp"
#include "egv/gravity.hpp"
#include "egv/harmonics.hpp"

// File formats.
//
// Snapshot (binary, little endian, extension does not matter):
//   bytes 0..3   magic "EGV1"
//   u64          cells per axis (n); the grid carries n+1 nodes per axis
//   f64          half_width
//   f64          body radius
//   f64          snapshot time
//   f64[3*(n+1)^3]  displacement, component major, x fastest within a component
//   f64[3*(n+1)^3]  velocity, same layout
//
// Gravity trace (CSV): header "t,x,y,z,gSx,gSy,gSz", then for every sample
// time a block of rows, one per observation point, points in the same order in
// every block.
//
// Multipole dump (CSV): a comment line echoing the expansion centre and Lmax,
// then "l,m,coeff" rows. Within a degree the m label runs -l..l in the order
// of the solid harmonic table.
//
// All writers go through atomic_write: write to <path>.tmp, then rename.

namespace egv {

static_assert(std::endian::native == std::endian::little,
              "snapshot format assumes a little endian host");

inline void atomic_write(const std::string& path, const std::string& bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    out.write(bytes.data(), std::streamsize(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot move " + tmp + " into place");
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Full precision, locale independent number formatting for CSV output.
inline std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct DenseSnapshot {
  Grid grid;
  VectorField u;
  VectorField v;
  double t = 0.0;
};

namespace detail {

template <class T>
void put(std::string& out, const T& v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <class T>
T get(const std::string& in, std::size_t& off) {
  if (off + sizeof(T) > in.size()) throw std::runtime_error("snapshot file truncated");
  T v;
  std::memcpy(&v, in.data() + off, sizeof(T));
  off += sizeof(T);
  return v;
}

}  // namespace detail

inline std::string encode_snapshot(const Grid& grid, const VectorField& u, const VectorField& v,
                                   double t) {
  std::string out;
  const std::size_t nvals = 3 * grid.node_count();
  out.reserve(4 + 8 + 3 * 8 + 2 * nvals * 8);
  out.append("EGV1", 4);
  detail::put<std::uint64_t>(out, std::uint64_t(grid.n));
  detail::put<double>(out, grid.half_width);
  detail::put<double>(out, grid.radius);
  detail::put<double>(out, t);
  out.append(reinterpret_cast<const char*>(u.data.data()), nvals * sizeof(double));
  out.append(reinterpret_cast<const char*>(v.data.data()), nvals * sizeof(double));
  return out;
}

inline bool looks_like_snapshot(const std::string& bytes) {
  return bytes.size() >= 4 && bytes.compare(0, 4, "EGV1") == 0;
}

inline DenseSnapshot decode_snapshot(const std::string& bytes) {
  if (!looks_like_snapshot(bytes)) throw std::runtime_error("not a snapshot file (bad magic)");
  std::size_t off = 4;
  const auto n = detail::get<std::uint64_t>(bytes, off);
  const double half_width = detail::get<double>(bytes, off);
  const double radius = detail::get<double>(bytes, off);
  const double t = detail::get<double>(bytes, off);
  if (n < 4 || n > 4096) throw std::runtime_error("snapshot header has implausible cell count");
  Grid grid(int(n), half_width, radius);
  DenseSnapshot snap{grid, VectorField(grid), VectorField(grid), t};
  const std::size_t nvals = 3 * grid.node_count();
  if (bytes.size() - off != 2 * nvals * sizeof(double))
    throw std::runtime_error("snapshot payload size does not match header");
  std::memcpy(snap.u.data.data(), bytes.data() + off, nvals * sizeof(double));
  std::memcpy(snap.v.data.data(), bytes.data() + off + nvals * sizeof(double),
              nvals * sizeof(double));
  return snap;
}

inline void write_snapshot(const std::string& path, const Grid& grid, const VectorField& u,
                           const VectorField& v, double t) {
  atomic_write(path, encode_snapshot(grid, u, v, t));
}

inline DenseSnapshot read_snapshot(const std::string& path) {
  return decode_snapshot(read_file(path));
}

inline std::string encode_trace_csv(const GravityTrace& trace) {
  std::string out = "t,x,y,z,gSx,gSy,gSz\n";
  for (std::size_t it = 0; it < trace.times.size(); ++it)
    for (std::size_t ip = 0; ip < trace.points.size(); ++ip) {
      const Vec3& p = trace.points[ip];
      const Vec3& g = trace.values[it][ip];
      out += csv_num(trace.times[it]) + ',' + csv_num(p.x) + ',' + csv_num(p.y) + ',' +
             csv_num(p.z) + ',' + csv_num(g.x) + ',' + csv_num(g.y) + ',' + csv_num(g.z) + '\n';
    }
  return out;
}

inline GravityTrace decode_trace_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) throw std::runtime_error("trace file is empty");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,x,y,z,gSx,gSy,gSz")
    throw std::runtime_error("trace line 1: unexpected header '" + line + "'");

  GravityTrace trace;
  std::vector<Vec3> block_points;
  std::vector<Vec3> block_values;
  bool have_time = false;
  double cur_t = 0.0;

  auto flush_block = [&] {
    if (!have_time) return;
    if (trace.points.empty()) {
      trace.points = block_points;
    } else {
      if (block_points.size() != trace.points.size())
        throw std::runtime_error("trace: block at t = " + csv_num(cur_t) +
                                 " has a different point count");
      for (std::size_t i = 0; i < block_points.size(); ++i)
        if ((block_points[i] - trace.points[i]).norm_inf() != 0.0)
          throw std::runtime_error("trace: observation points differ between time blocks");
    }
    trace.times.push_back(cur_t);
    trace.values.push_back(block_values);
    block_points.clear();
    block_values.clear();
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double f[7];
    std::size_t pos = 0;
    for (int c = 0; c < 7; ++c) {
      const std::size_t next = line.find(',', pos);
      const std::string tok = line.substr(pos, next == std::string::npos ? next : next - pos);
      char* end = nullptr;
      f[c] = std::strtod(tok.c_str(), &end);
      if (tok.empty() || end != tok.c_str() + tok.size())
        throw std::runtime_error("trace line " + std::to_string(lineno) + ": bad number '" + tok + "'");
      if (c < 6) {
        if (next == std::string::npos)
          throw std::runtime_error("trace line " + std::to_string(lineno) + ": expected 7 columns");
        pos = next + 1;
      } else if (next != std::string::npos) {
        throw std::runtime_error("trace line " + std::to_string(lineno) + ": expected 7 columns");
      }
    }
    if (!have_time || f[0] != cur_t) {
      flush_block();
      cur_t = f[0];
      have_time = true;
      if (!trace.times.empty() && cur_t <= trace.times.back())
        throw std::runtime_error("trace line " + std::to_string(lineno) +
                                 ": sample times must be strictly increasing");
    }
    block_points.push_back({f[1], f[2], f[3]});
    block_values.push_back({f[4], f[5], f[6]});
  }
  flush_block();
  if (trace.times.empty()) throw std::runtime_error("trace file has no data rows");
  return trace;
}

inline void write_trace_csv(const std::string& path, const GravityTrace& trace) {
  atomic_write(path, encode_trace_csv(trace));
}

inline GravityTrace read_trace_csv(const std::string& path) {
  return decode_trace_csv(read_file(path));
}

inline std::string encode_multipole_csv(const MultipoleExpansion& ex) {
  std::string out = "# center = (" + csv_num(ex.center.x) + ", " + csv_num(ex.center.y) + ", " +
                    csv_num(ex.center.z) + "), Lmax = " + std::to_string(ex.lmax) + "\n";
  out += "l,m,coeff\n";
  int c = 0, prev_l = -1, m = 0;
  for (const auto& [l, poly] : solid_harmonics()) {
    if (l > ex.lmax) break;
    m = (l == prev_l) ? m + 1 : -l;
    prev_l = l;
    out += std::to_string(l) + ',' + std::to_string(m) + ',' + csv_num(ex.coeff[c]) + '\n';
    ++c;
  }
  return out;
}

inline void write_multipole_csv(const std::string& path, const MultipoleExpansion& ex) {
  atomic_write(path, encode_multipole_csv(ex));
}

}  // namespace egv
