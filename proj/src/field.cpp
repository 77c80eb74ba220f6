#include "sghydro/field.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace sghydro {

FieldSpec::FieldSpec(Eval eval, double bound, std::string description)
    : eval_(std::move(eval)), bound_(bound), description_(std::move(description)) {
  if (!eval_) fail(ErrorKind::InvalidArgument, "field has no evaluator");
  if (!(bound_ >= 0.0) || !std::isfinite(bound_))
    fail(ErrorKind::InvalidArgument, "field bound M_H must be finite and nonnegative");
}

VertexFunction FieldSpec::at(double t, std::size_t num_vertices) const {
  VertexFunction out(num_vertices);
  if (zero_) return out;
  for (std::size_t v = 0; v < num_vertices; ++v) out[v] = eval_(t, static_cast<VertexId>(v));
  return out;
}

FieldSpec FieldSpec::zero() {
  FieldSpec f([](double, VertexId) { return 0.0; }, 0.0, "zero");
  f.zero_ = true;
  return f;
}

double time_profile(TimeProfile p, double frequency, double t) {
  switch (p) {
    case TimeProfile::Const: return 1.0;
    case TimeProfile::Ramp: return t;
    case TimeProfile::Sine: return std::sin(2.0 * std::numbers::pi * frequency * t);
  }
  return 0.0;
}

namespace {

double max_edge_jump(const WeightedGraph& g, const VertexFunction& h) {
  double m = 0.0;
  for (const auto& e : g.edges()) m = std::max(m, std::abs(h[e.tail] - h[e.head]));
  return m;
}

const char* profile_name(TimeProfile p) {
  switch (p) {
    case TimeProfile::Const: return "const";
    case TimeProfile::Ramp: return "ramp";
    case TimeProfile::Sine: return "sine";
  }
  return "?";
}

}  // namespace

FieldSpec FieldSpec::harmonic(const WeightedGraph& g, std::array<double, 3> corner_values, TimeProfile profile,
                              double amplitude, double frequency, double horizon) {
  if (g.boundary().size() != 3) fail(ErrorKind::InvalidArgument, "harmonic field needs a graph with three boundary vertices");
  if (!std::isfinite(amplitude) || !std::isfinite(frequency) || !(horizon >= 0.0))
    fail(ErrorKind::InvalidArgument, "harmonic field: amplitude, frequency and horizon must be finite");
  auto shape = std::make_shared<const VertexFunction>(solve_harmonic(g, corner_values));
  double gmax = 1.0;
  if (profile == TimeProfile::Ramp) gmax = horizon;
  const double bound = std::abs(amplitude) * gmax * max_edge_jump(g, *shape);

  std::ostringstream d;
  d.precision(17);
  d << "harmonic(" << corner_values[0] << "," << corner_values[1] << "," << corner_values[2] << ")*" << amplitude << "*"
    << profile_name(profile);
  if (profile == TimeProfile::Sine) d << "(" << frequency << ")";

  return FieldSpec(
      [shape, profile, amplitude, frequency](double t, VertexId x) {
        return amplitude * time_profile(profile, frequency, t) * (*shape)[x];
      },
      bound, d.str());
}

FieldSpec FieldSpec::table(const WeightedGraph& g, std::vector<TablePoint> points) {
  using Knots = std::vector<std::pair<double, double>>;
  auto per_vertex = std::make_shared<std::vector<Knots>>(g.num_vertices());
  std::vector<double> times;
  for (const auto& p : points) {
    if (p.vertex >= g.num_vertices()) fail(ErrorKind::InvalidArgument, "field table: vertex out of range");
    if (!std::isfinite(p.t) || !std::isfinite(p.value)) fail(ErrorKind::InvalidArgument, "field table: non-finite entry");
    (*per_vertex)[p.vertex].emplace_back(p.t, p.value);
    times.push_back(p.t);
  }
  for (auto& k : *per_vertex) {
    std::sort(k.begin(), k.end());
    for (std::size_t i = 1; i < k.size(); ++i)
      if (k[i].first == k[i - 1].first) fail(ErrorKind::InvalidArgument, "field table: duplicate (t, vertex) entry");
  }
  auto eval = [per_vertex](double t, VertexId x) {
    const auto& k = (*per_vertex)[x];
    if (k.empty()) return 0.0;
    if (t <= k.front().first) return k.front().second;
    if (t >= k.back().first) return k.back().second;
    const auto it = std::upper_bound(k.begin(), k.end(), t, [](double s, const auto& kv) { return s < kv.first; });
    const auto& [t1, v1] = *it;
    const auto& [t0, v0] = *(it - 1);
    return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
  };

  // each vertex is piecewise linear in t, so edge differences are too and
  // their maximum sits on the union of knot times
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  if (times.empty()) times.push_back(0.0);
  double bound = 0.0;
  for (double t : times)
    for (const auto& e : g.edges()) bound = std::max(bound, std::abs(eval(t, e.tail) - eval(t, e.head)));

  return FieldSpec(eval, bound, "table(" + std::to_string(points.size()) + " points)");
}

FieldSpec FieldSpec::rescaled(double time_factor, double amplitude_factor) const {
  if (!(time_factor > 0.0)) fail(ErrorKind::InvalidArgument, "rescaled field: time factor must be positive");
  if (zero_) return zero();
  auto inner = eval_;
  std::ostringstream d;
  d.precision(17);
  d << amplitude_factor << "*[" << description_ << "](t/" << time_factor << ")";
  return FieldSpec([inner, time_factor, amplitude_factor](double s, VertexId x) {
                     return amplitude_factor * inner(s / time_factor, x);
                   },
                   std::abs(amplitude_factor) * bound_, d.str());
}

}  // namespace sghydro
