#pragma once

// Declarative experiment configs and the pipelines behind the CLI.
//
// A config is one JSON document. Every pipeline writes its artifacts plus
// manifest.json, which embeds the fully resolved config; feeding the
// manifest back in reproduces the artifacts byte for byte.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sghydro/field.hpp"
#include "sghydro/graph.hpp"

namespace sghydro::experiment {

using Json = nlohmann::ordered_json;

enum class Kind { BuildGraph, Simulate, Pde, Rate, Lln };
const char* kind_name(Kind k);

struct Config {
  Kind kind = Kind::BuildGraph;
  unsigned level = 2;
  double horizon = 1.0;
  double dt = 1e-3;
  double theta = 1.0;
  std::size_t record_every = 0;  // 0: automatic
  std::size_t replicas = 1;
  std::uint64_t seed = 0;
  std::vector<double> lambda_plus;
  std::vector<double> lambda_minus;
  Json field;
  Json rho0;
  std::vector<double> sample_times;
  std::string density_csv;
  std::string flux_csv;
  Json probe_field;  // null when absent
  double density_tolerance = 0.02;
  double current_rel_tolerance = 0.05;
  double delta = 0.05;

  std::vector<double> rho_bar() const;
  /// The config with all defaults filled in, in a fixed key order.
  Json resolved;
};

/// Parses a config or a manifest (its "config" member). Errors are
/// Error(Config) with messages "<source>:<line>: ...".
Config parse_config(std::string_view text, std::string_view source = "config");

/// Builds the field named by a descriptor ("zero", {"type":"harmonic",...},
/// {"type":"table",...}).
FieldSpec make_field(const Json& descriptor, const WeightedGraph& g, double horizon);

/// "ok" followed by the resolved config and derived run estimates.
std::string validate(std::string_view text, std::string_view source = "config");

/// Runs the pipeline and writes the artifacts into out_dir. Returns a short
/// summary (the manifest's "derived" block as JSON).
std::string run(std::string_view text, const std::string& out_dir, unsigned threads,
                std::string_view source = "config");

}  // namespace sghydro::experiment
