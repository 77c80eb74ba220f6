#include "io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace sghydro::io {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvBuilder::CsvBuilder(std::string_view header) : buf_(header) { buf_ += '\n'; }

CsvBuilder& CsvBuilder::field(double v) { return field(std::string_view(format_double(v))); }
CsvBuilder& CsvBuilder::field(std::int64_t v) { return field(std::string_view(std::to_string(v))); }
CsvBuilder& CsvBuilder::field(std::uint64_t v) { return field(std::string_view(std::to_string(v))); }

CsvBuilder& CsvBuilder::field(std::string_view v) {
  if (row_open_) buf_ += ',';
  buf_ += v;
  row_open_ = true;
  return *this;
}

void CsvBuilder::end_row() {
  buf_ += '\n';
  row_open_ = false;
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open " + path + " for writing: " + std::strerror(errno));
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) fail(ErrorKind::Io, "write to " + path + " failed");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path + ": " + std::strerror(errno));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) fail(ErrorKind::Io, "cannot create directory " + path + ": " + ec.message());
}

namespace {

struct LongRow {
  double t;
  std::size_t index;
  double value;
};

std::vector<LongRow> read_long_csv(const std::string& path, std::string_view expected_header) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line) || line != expected_header)
    fail(ErrorKind::Io, path + ":1: expected header '" + std::string(expected_header) + "'");
  std::vector<LongRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    LongRow r{};
    char* end = nullptr;
    const char* p = line.c_str();
    r.t = std::strtod(p, &end);
    if (end == p || *end != ',') fail(ErrorKind::Io, path + ":" + std::to_string(lineno) + ": malformed row");
    p = end + 1;
    const unsigned long long idx = std::strtoull(p, &end, 10);
    if (end == p || *end != ',') fail(ErrorKind::Io, path + ":" + std::to_string(lineno) + ": malformed row");
    r.index = static_cast<std::size_t>(idx);
    p = end + 1;
    r.value = std::strtod(p, &end);
    if (end == p || *end != '\0') fail(ErrorKind::Io, path + ":" + std::to_string(lineno) + ": malformed row");
    rows.push_back(r);
  }
  return rows;
}

template <class F>
std::vector<F> group_by_time(const std::string& path, const std::vector<LongRow>& rows, std::size_t n,
                             std::vector<double>& times) {
  std::map<double, F> by_t;
  std::map<double, std::size_t> filled;
  for (const auto& r : rows) {
    if (r.index >= n) fail(ErrorKind::Io, path + ": index " + std::to_string(r.index) + " out of range");
    auto [it, inserted] = by_t.try_emplace(r.t, F(n));
    it->second[r.index] = r.value;
    ++filled[r.t];
  }
  std::vector<F> out;
  times.clear();
  for (auto& [t, f] : by_t) {
    if (filled[t] != n) fail(ErrorKind::Io, path + ": time " + format_double(t) + " does not list every index exactly once");
    times.push_back(t);
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace

Trajectory read_trajectory_csv(const WeightedGraph& g, const std::string& density_path, const std::string& flux_path) {
  Trajectory tr;
  std::vector<double> flux_times;
  tr.rho = group_by_time<VertexFunction>(density_path, read_long_csv(density_path, "t,vertex_id,rho"), g.num_vertices(),
                                         tr.times);
  tr.flux = group_by_time<EdgeFunction>(flux_path, read_long_csv(flux_path, "t,edge_id,accumulated_flux"),
                                        g.num_edges(), flux_times);
  if (flux_times != tr.times) fail(ErrorKind::Io, "density and flux files have different time grids");
  tr.provenance = Provenance::Synthetic;
  tr.validate(g);
  return tr;
}

void write_density_csv(const std::string& path, const Trajectory& traj) {
  CsvBuilder csv("t,vertex_id,rho");
  for (std::size_t k = 0; k < traj.size(); ++k)
    for (std::size_t v = 0; v < traj.rho[k].size(); ++v) {
      csv.field(traj.times[k]).field(static_cast<std::uint64_t>(v)).field(traj.rho[k][v]);
      csv.end_row();
    }
  write_file(path, csv.str());
}

void write_flux_csv(const std::string& path, const Trajectory& traj) {
  CsvBuilder csv("t,edge_id,accumulated_flux");
  for (std::size_t k = 0; k < traj.size(); ++k)
    for (std::size_t e = 0; e < traj.flux[k].size(); ++e) {
      csv.field(traj.times[k]).field(static_cast<std::uint64_t>(e)).field(traj.flux[k][e]);
      csv.end_row();
    }
  write_file(path, csv.str());
}

}  // namespace sghydro::io
