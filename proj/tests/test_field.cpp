#include <doctest.h>

#include <cmath>

#include "sghydro/field.hpp"

using namespace sghydro;

namespace {

double max_edge_jump(const WeightedGraph& g, const VertexFunction& h) {
  double m = 0.0;
  for (const auto& e : g.edges()) m = std::max(m, std::abs(h[e.head] - h[e.tail]));
  return m;
}

}  // namespace

TEST_CASE("zero field") {
  const auto f = FieldSpec::zero();
  CHECK(f.is_zero());
  CHECK(f.bound() == 0.0);
  CHECK(f(0.3, 2) == 0.0);
}

TEST_CASE("harmonic field profiles and bound") {
  const auto g = build_sg(2);
  const auto h = solve_harmonic(g, std::array{1.0, -1.0, 0.5});
  const double jump = max_edge_jump(g, h);

  const auto c = FieldSpec::harmonic(g, {1.0, -1.0, 0.5}, TimeProfile::Const, 2.0, 1.0, 3.0);
  CHECK(c(1.7, 4) == doctest::Approx(2.0 * h[4]).epsilon(1e-14));
  CHECK(c.bound() == doctest::Approx(2.0 * jump).epsilon(1e-14));

  const auto r = FieldSpec::harmonic(g, {1.0, -1.0, 0.5}, TimeProfile::Ramp, 1.0, 1.0, 3.0);
  CHECK(r(0.5, 4) == doctest::Approx(0.5 * h[4]).epsilon(1e-14));
  CHECK(r.bound() == doctest::Approx(3.0 * jump).epsilon(1e-14));

  const auto s = FieldSpec::harmonic(g, {1.0, -1.0, 0.5}, TimeProfile::Sine, 1.0, 2.0, 1.0);
  CHECK(s(0.125, 4) == doctest::Approx(std::sin(2 * M_PI * 2.0 * 0.125) * h[4]).epsilon(1e-14));
  CHECK(s.bound() >= jump * 0.999999);

  for (double t = 0.0; t <= 3.0; t += 0.05) {
    const auto ht = r.at(t, g.num_vertices());
    CHECK(max_edge_jump(g, ht) <= r.bound() + 1e-15);
  }
}

TEST_CASE("table field interpolates linearly and holds outside its knots") {
  const auto g = build_sg(1);
  const auto f = FieldSpec::table(g, {{0.0, 1, 0.0}, {1.0, 1, 2.0}, {0.5, 3, -1.0}});
  CHECK(f(0.25, 1) == doctest::Approx(0.5));
  CHECK(f(2.0, 1) == doctest::Approx(2.0));
  CHECK(f(0.0, 3) == doctest::Approx(-1.0));
  CHECK(f(0.7, 0) == 0.0);
  CHECK(f.bound() >= 2.0);
}

TEST_CASE("rescaled field") {
  const auto g = build_sg(1);
  const auto r = FieldSpec::harmonic(g, {1.0, 0.0, 0.0}, TimeProfile::Ramp, 1.0, 1.0, 1.0);
  const auto s = r.rescaled(2.0, 3.0);
  CHECK(s(1.0, 2) == doctest::Approx(3.0 * r(0.5, 2)).epsilon(1e-15));
  CHECK(time_profile(TimeProfile::Const, 1.0, 5.0) == 1.0);
}
