#pragma once

// File output and the long-format CSV readers. All numbers are written with
// %.17g so that re-reading reproduces the doubles exactly.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sghydro/graph.hpp"
#include "sghydro/trajectory.hpp"

namespace sghydro::io {

std::string format_double(double v);

class CsvBuilder {
 public:
  explicit CsvBuilder(std::string_view header);
  CsvBuilder& field(double v);
  CsvBuilder& field(std::int64_t v);
  CsvBuilder& field(std::uint64_t v);
  CsvBuilder& field(std::string_view v);
  void end_row();
  const std::string& str() const { return buf_; }

 private:
  std::string buf_;
  bool row_open_ = false;
};

/// Throws Error(Io) when the file cannot be written.
void write_file(const std::string& path, std::string_view content);
/// Throws Error(Io) when the file cannot be read.
std::string read_file(const std::string& path);
/// Creates the directory and its parents.
void ensure_directory(const std::string& path);

/// Reads a trajectory from the files written by the PDE pipeline:
/// density (t,vertex_id,rho) and flux (t,edge_id,accumulated_flux).
Trajectory read_trajectory_csv(const WeightedGraph& g, const std::string& density_path, const std::string& flux_path);

void write_density_csv(const std::string& path, const Trajectory& traj);
void write_flux_csv(const std::string& path, const Trajectory& traj);

}  // namespace sghydro::io
