#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "sghydro/graph.hpp"

namespace sghydro {

/// Time profile g(t) multiplying a spatial shape.
enum class TimeProfile { Const, Ramp, Sine };

/// Time-dependent tilt H(t, x) with a declared bound
///   bound() >= sup_{t in [0,T], xy in E} |H_t(x) - H_t(y)|.
/// Evaluation is deterministic and thread-safe.
class FieldSpec {
 public:
  using Eval = std::function<double(double, VertexId)>;

  FieldSpec(Eval eval, double bound, std::string description);

  double operator()(double t, VertexId x) const { return eval_(t, x); }
  VertexFunction at(double t, std::size_t num_vertices) const;

  double bound() const { return bound_; }
  const std::string& description() const { return description_; }
  bool is_zero() const { return zero_; }

  /// H == 0.
  static FieldSpec zero();

  /// H(t,x) = amplitude * g(t) * h(x) with h the harmonic extension of the
  /// corner values. g = 1 (Const), t (Ramp) or sin(2 pi frequency t) (Sine).
  /// The bound is amplitude * sup_{[0,horizon]} |g| * max_e |dh|.
  static FieldSpec harmonic(const WeightedGraph& g, std::array<double, 3> corner_values, TimeProfile profile,
                            double amplitude, double frequency, double horizon);

  struct TablePoint {
    double t;
    VertexId vertex;
    double value;
  };
  /// Piecewise-linear in time per vertex; vertices without entries are 0 and
  /// each vertex is held constant outside its knot range.
  static FieldSpec table(const WeightedGraph& g, std::vector<TablePoint> points);

  /// H'(s, x) = amplitude_factor * H(s / time_factor, x).
  FieldSpec rescaled(double time_factor, double amplitude_factor) const;

 private:
  Eval eval_;
  double bound_;
  std::string description_;
  bool zero_ = false;
};

double time_profile(TimeProfile p, double frequency, double t);

}  // namespace sghydro
