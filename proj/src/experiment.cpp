#include "experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <mutex>
#include <set>
#include <thread>

#include "io.hpp"
#include "sghydro/hydro.hpp"
#include "sghydro/observables.hpp"
#include "sghydro/rate.hpp"
#include "sghydro/wasep.hpp"

#ifndef SGHYDRO_VERSION
#define SGHYDRO_VERSION "unknown"
#endif

namespace sghydro::experiment {

namespace {

constexpr unsigned kMaxConfigLevel = 12;
constexpr double kDefaultReservoirRate = 50.0;
constexpr std::size_t kAutoRecords = 200;

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

std::size_t line_of_key(std::string_view text, std::string_view key) {
  const std::string needle = "\"" + std::string(key) + "\"";
  const auto pos = text.find(needle);
  return pos == std::string_view::npos ? 1 : line_of_offset(text, pos);
}

class Reader {
 public:
  Reader(const Json& obj, std::string_view text, std::string_view source) : obj_(obj), text_(text), source_(source) {}

  [[noreturn]] void error(std::string_view key, const std::string& msg) const {
    fail(ErrorKind::Config, std::string(source_) + ":" + std::to_string(line_of_key(text_, key)) + ": " + msg);
  }

  bool has(const char* key) const {
    seen_.insert(key);
    return obj_.contains(key) && !obj_.at(key).is_null();
  }
  const Json& raw(const char* key) const {
    seen_.insert(key);
    return obj_.at(key);
  }

  double number(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_number()) error(key, std::string("key '") + key + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) error(key, std::string("key '") + key + "' must be finite");
    return d;
  }

  std::uint64_t unsigned_integer(const char* key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
      error(key, std::string("key '") + key + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
  }

  std::vector<double> numbers(const char* key) const {
    const auto& v = raw(key);
    if (!v.is_array()) error(key, std::string("key '") + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) error(key, std::string("key '") + key + "' must be an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  void reject_unknown() const {
    for (const auto& [k, v] : obj_.items())
      if (!seen_.count(k)) error(k, "unknown key '" + k + "'");
  }

 private:
  const Json& obj_;
  std::string_view text_;
  std::string_view source_;
  mutable std::set<std::string> seen_;
};

Kind parse_kind(const Reader& r) {
  if (!r.has("kind")) r.error("kind", "missing required key 'kind' (one of build-graph, simulate, pde, rate, lln-experiment)");
  const auto& v = r.raw("kind");
  const std::string s = v.is_string() ? v.get<std::string>() : std::string();
  for (Kind k : {Kind::BuildGraph, Kind::Simulate, Kind::Pde, Kind::Rate, Kind::Lln})
    if (s == kind_name(k)) return k;
  r.error("kind", "key 'kind' must be one of build-graph, simulate, pde, rate, lln-experiment");
}

bool uses_reservoirs(Kind k) { return k != Kind::BuildGraph; }
bool uses_particles(Kind k) { return k == Kind::Simulate || k == Kind::Lln; }
bool uses_pde(Kind k) { return k == Kind::Pde || k == Kind::Rate || k == Kind::Lln; }

TimeProfile parse_profile(const std::string& s, bool& ok) {
  ok = true;
  if (s == "const") return TimeProfile::Const;
  if (s == "ramp") return TimeProfile::Ramp;
  if (s == "sine") return TimeProfile::Sine;
  ok = false;
  return TimeProfile::Const;
}

// Normalises a field descriptor; `complain` reports errors.
template <class Complain>
Json resolve_field(const Json& d, std::size_t num_vertices, Complain complain) {
  if (d.is_string() && d.get<std::string>() == "zero") return Json{{"type", "zero"}};
  if (!d.is_object() || !d.contains("type") || !d.at("type").is_string())
    complain("field must be \"zero\" or an object with a 'type' of zero, harmonic or table");
  const auto type = d.at("type").get<std::string>();
  if (type == "zero") {
    if (d.size() != 1) complain("field of type zero takes no parameters");
    return Json{{"type", "zero"}};
  }
  if (type == "harmonic") {
    for (const auto& [k, v] : d.items())
      if (k != "type" && k != "boundary" && k != "time" && k != "amplitude" && k != "frequency")
        complain("unknown field key '" + k + "'");
    if (!d.contains("boundary") || !d.at("boundary").is_array() || d.at("boundary").size() != 3)
      complain("harmonic field needs 'boundary': [b0, b1, b2]");
    Json b = Json::array();
    for (const auto& x : d.at("boundary")) {
      if (!x.is_number()) complain("harmonic field boundary values must be numbers");
      b.push_back(x.get<double>());
    }
    const std::string time = d.value("time", std::string("const"));
    bool ok = false;
    parse_profile(time, ok);
    if (!ok) complain("field time profile must be const, ramp or sine");
    const auto num = [&](const char* k, double def) {
      if (!d.contains(k)) return def;
      if (!d.at(k).is_number()) complain(std::string("field '") + k + "' must be a number");
      return d.at(k).get<double>();
    };
    const double amplitude = num("amplitude", 1.0);
    const double frequency = num("frequency", 1.0);
    if (!std::isfinite(amplitude) || !std::isfinite(frequency)) complain("field parameters must be finite");
    return Json{{"type", "harmonic"}, {"boundary", b}, {"time", time}, {"amplitude", amplitude}, {"frequency", frequency}};
  }
  if (type == "table") {
    if (!d.contains("points") || !d.at("points").is_array()) complain("table field needs 'points': [[t, vertex, value], ...]");
    Json pts = Json::array();
    for (const auto& p : d.at("points")) {
      if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number_unsigned() || !p[2].is_number())
        complain("table field points must be [t, vertex, value] with an integer vertex");
      if (p[1].get<std::uint64_t>() >= num_vertices)
        complain("table field vertex " + std::to_string(p[1].get<std::uint64_t>()) + " is out of range");
      pts.push_back(Json::array({p[0].get<double>(), p[1].get<std::uint64_t>(), p[2].get<double>()}));
    }
    return Json{{"type", "table"}, {"points", pts}};
  }
  complain("unknown field type '" + type + "'");
  return {};
}

VertexFunction resolve_rho0(const Config& c, const WeightedGraph& g) {
  const auto rho_bar = c.rho_bar();
  if (c.rho0.is_string()) return solve_harmonic(g, rho_bar);
  VertexFunction rho(g.num_vertices());
  if (c.rho0.is_number()) {
    rho.vec().setConstant(c.rho0.get<double>());
    for (std::size_t i = 0; i < g.boundary().size(); ++i) rho[g.boundary()[i]] = rho_bar[i];
    return rho;
  }
  for (std::size_t v = 0; v < g.num_vertices(); ++v) rho[v] = c.rho0[v].get<double>();
  return rho;
}

template <class F>
void parallel_for(std::size_t n, unsigned threads, F fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!first) first = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

template <class F>
auto stage(const char* tag, F fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("[") + tag + "] " + e.what());
  }
}

std::string join(const std::string& dir, const char* file) { return (std::filesystem::path(dir) / file).string(); }

struct Outputs {
  Json schemas = Json::object();
  Json derived = Json::object();
};

void write_manifest(const std::string& dir, const Config& c, const Outputs& o) {
  Json m;
  m["library_version"] = SGHYDRO_VERSION;
  m["config"] = c.resolved;
  m["schema_versions"] = o.schemas;
  m["derived"] = o.derived;
  io::write_file(join(dir, "manifest.json"), m.dump(1) + "\n");
}

std::size_t auto_record_every(const Config& c, double pde_horizon) {
  if (c.record_every) return c.record_every;
  const auto steps = static_cast<std::size_t>(std::ceil(pde_horizon / c.dt - 1e-9));
  return std::max<std::size_t>(1, steps / kAutoRecords);
}

BoundaryRates rates_of(const Config& c) { return {c.lambda_plus, c.lambda_minus}; }

// -- pipelines ---------------------------------------------------------------

void run_build_graph(const Config& c, const WeightedGraph& g, const std::string& dir, Outputs& o) {
  io::write_file(join(dir, "graph.json"), g.to_json());
  o.schemas["graph.json"] = "graph/1";
  o.derived["num_vertices"] = g.num_vertices();
  o.derived["num_edges"] = g.num_edges();
  (void)c;
}

void run_simulate(const Config& c, const WeightedGraph& g, const std::string& dir, unsigned threads, Outputs& o) {
  const auto field = make_field(c.field, g, c.horizon);
  const auto rates = rates_of(c);
  const auto rho0 = resolve_rho0(c, g);
  std::vector<std::vector<Snapshot>> results(c.replicas);
  std::vector<Configuration> initial(c.replicas);
  stage("simulate", [&] {
    parallel_for(c.replicas, threads, [&](std::size_t r) {
      RandomStream init(c.seed, static_cast<std::uint32_t>(r), StreamPurpose::InitialConfiguration);
      initial[r] = sample_product_bernoulli(rho0, init);
      results[r] = run(g, field, rates, initial[r], c.horizon, c.seed, static_cast<std::uint32_t>(r), c.sample_times,
                       g.acceleration());
    });
  });
  std::int64_t defect = 0;
  io::CsvBuilder dens("replica,time,vertex_id,eta");
  io::CsvBuilder curr("replica,time,edge_id,current");
  for (std::size_t r = 0; r < c.replicas; ++r)
    for (const auto& s : results[r]) {
      defect = std::max(defect, conservation_defect(g, initial[r], s.config, s.current, s.boundary_flips));
      for (std::size_t v = 0; v < g.num_vertices(); ++v) {
        dens.field(static_cast<std::uint64_t>(r)).field(s.time).field(static_cast<std::uint64_t>(v));
        dens.field(static_cast<std::uint64_t>(s.config[v]));
        dens.end_row();
      }
      for (std::size_t e = 0; e < g.num_edges(); ++e) {
        curr.field(static_cast<std::uint64_t>(r)).field(s.time).field(static_cast<std::uint64_t>(e)).field(s.current[e]);
        curr.end_row();
      }
    }
  io::write_file(join(dir, "snapshots_density.csv"), dens.str());
  io::write_file(join(dir, "snapshots_current.csv"), curr.str());
  o.schemas["snapshots_density.csv"] = "snapshot-density/1";
  o.schemas["snapshots_current.csv"] = "snapshot-current/1";
  o.derived["acceleration"] = g.acceleration();
  o.derived["envelope_rate"] = envelope_rate(g, field.bound(), rates, g.acceleration());
  o.derived["field_bound"] = field.bound();
  o.derived["rho_bar"] = c.rho_bar();
  o.derived["max_conservation_defect"] = defect;
}

PdeSolution solve_pde(const Config& c, const WeightedGraph& g, const FieldSpec& field, double horizon) {
  PdeConfig pc;
  pc.dt = c.dt;
  pc.horizon = horizon;
  pc.theta = c.theta;
  pc.record_every = auto_record_every(c, horizon);
  const auto rho0 = resolve_rho0(c, g);
  const auto rho_bar = c.rho_bar();
  return stage("pde", [&] { return solve_hydro(g, pc, field, rho0, rho_bar); });
}

void run_pde(const Config& c, const WeightedGraph& g, const std::string& dir, Outputs& o) {
  const auto field = make_field(c.field, g, c.horizon);
  const auto sol = solve_pde(c, g, field, c.horizon);
  io::write_density_csv(join(dir, "pde_density.csv"), sol.trajectory);
  io::write_flux_csv(join(dir, "pde_flux.csv"), sol.trajectory);
  o.schemas["pde_density.csv"] = "pde-density/1";
  o.schemas["pde_flux.csv"] = "pde-flux/1";
  const auto res = conservation_check(g, sol.trajectory);
  o.derived["dt_used"] = sol.dt;
  o.derived["record_every"] = auto_record_every(c, c.horizon);
  o.derived["weak_residual"] = sol.weak_residual;
  o.derived["conservation_residual_max"] = *std::max_element(res.begin(), res.end());
  if (field.is_zero()) {
    const auto rho_bar = c.rho_bar();
    const auto h = solve_harmonic(g, rho_bar);
    o.derived["steady_state_sup_distance"] = (sol.trajectory.rho.back().vec() - h.vec()).lpNorm<Eigen::Infinity>();
  }
}

void run_rate(const Config& c, const WeightedGraph& g, const std::string& dir, Outputs& o) {
  Trajectory traj;
  if (!c.density_csv.empty()) {
    traj = stage("io", [&] { return io::read_trajectory_csv(g, c.density_csv, c.flux_csv); });
  } else {
    const auto field = make_field(c.field, g, c.horizon);
    traj = solve_pde(c, g, field, c.horizon).trajectory;
  }
  const auto sym = stage("rate", [&] { return rate_symmetric(g, traj); });
  std::optional<TiltOptimum> tilt;
  if (!sym.rate.infinite) tilt = stage("rate", [&] { return optimize_tilt(g, traj); });
  auto report = Json::parse(rate_report_json(sym, tilt));
  report["provenance"] = provenance_name(traj.provenance);
  if (!c.probe_field.is_null()) {
    const auto probe = make_field(c.probe_field, g, c.horizon);
    const auto rho_bar = c.rho_bar();
    report["probe_variational"] = stage("rate", [&] { return rate_variational(g, traj, probe, rho_bar); });
    report["probe_compact"] = stage("rate", [&] { return rate_variational_compact(g, traj, probe); });
  }
  io::write_file(join(dir, "rate_report.json"), report.dump(1) + "\n");
  o.schemas["rate_report.json"] = "rate-report/1";
  o.derived["value"] = report["value"];
  o.derived["variational_vs_symmetric_ratio"] = report["variational_vs_symmetric_ratio"];
}

struct Observable {
  std::string name;
  VertexFunction f;
  bool current;
};

std::vector<Observable> lln_battery(const WeightedGraph& g) {
  const auto n = g.num_vertices();
  VertexFunction one(n, 1.0), x(n), y(n);
  for (std::size_t v = 0; v < n; ++v) {
    x[v] = g.coords()[v].x;
    y[v] = g.coords()[v].y;
  }
  const auto h0 = solve_harmonic(g, std::array{1.0, 0.0, 0.0});
  const auto h1 = solve_harmonic(g, std::array{0.0, 1.0, 0.0});
  const auto h2 = solve_harmonic(g, std::array{0.0, 0.0, 1.0});
  return {{"density:1", one, false}, {"density:x", x, false}, {"density:y", y, false},
          {"density:h0", h0, false}, {"density:h1", h1, false}, {"current:h0", h0, true},
          {"current:h1", h1, true},  {"current:h2", h2, true},  {"current:x", x, true},
          {"current:y", y, true}};
}

void run_lln(const Config& c, const WeightedGraph& g, const std::string& dir, unsigned threads, Outputs& o) {
  const auto field = make_field(c.field, g, c.horizon);
  const auto rates = rates_of(c);
  const auto scale = hydro_scaling(g);
  const auto pde_field = field.rescaled(scale.time, scale.field);
  const auto sol = solve_pde(c, g, pde_field, scale.time * c.horizon);
  const auto battery = lln_battery(g);
  const auto rho0 = resolve_rho0(c, g);

  const std::size_t nt = c.sample_times.size(), nb = battery.size();
  // values[r][t * nb + j]
  std::vector<std::vector<double>> values(c.replicas);
  stage("simulate", [&] {
    parallel_for(c.replicas, threads, [&](std::size_t r) {
      RandomStream init(c.seed, static_cast<std::uint32_t>(r), StreamPurpose::InitialConfiguration);
      const auto eta0 = sample_product_bernoulli(rho0, init);
      const auto snaps = run(g, field, rates, eta0, c.horizon, c.seed, static_cast<std::uint32_t>(r), c.sample_times,
                             g.acceleration());
      auto& out = values[r];
      for (const auto& s : snaps) {
        if (conservation_defect(g, eta0, s.config, s.current, s.boundary_flips) != 0)
          fail(ErrorKind::Numerical, "particle ledger violates mass conservation");
        for (const auto& ob : battery)
          out.push_back(ob.current ? current_pairing(g, s.current, ob.f) : density_pairing(g, s.config, ob.f));
      }
    });
  });

  io::CsvBuilder csv("observable,t,mean,stderr,reference,tolerance,within,deviation_fraction,n_replicas");
  io::CsvBuilder ref("t,vertex_id,rho");
  bool all_within = true;
  std::vector<double> column(c.replicas);
  for (std::size_t t = 0; t < nt; ++t) {
    const double s = scale.time * c.sample_times[t];
    const auto rho_ref = sol.trajectory.rho_at(s);
    const auto w_ref = sol.trajectory.flux_at(s);
    for (std::size_t v = 0; v < g.num_vertices(); ++v) {
      ref.field(c.sample_times[t]).field(static_cast<std::uint64_t>(v)).field(rho_ref[v]);
      ref.end_row();
    }
    for (std::size_t j = 0; j < nb; ++j) {
      const auto& ob = battery[j];
      const double reference = ob.current ? scale.current * edge_inner_product(g, discrete_gradient(g, ob.f), w_ref)
                                          : density_pairing(g, rho_ref, ob.f);
      for (std::size_t r = 0; r < c.replicas; ++r) column[r] = values[r][t * nb + j];
      const auto st = ensemble_stats(column, reference, c.delta);
      const double tol = ob.current ? std::max(3.0 * st.std_error, c.current_rel_tolerance * std::abs(reference))
                                    : std::max(3.0 * st.std_error, c.density_tolerance);
      const bool within = std::abs(st.mean - reference) <= tol;
      all_within = all_within && within;
      csv.field(std::string_view(ob.name)).field(c.sample_times[t]).field(st.mean).field(st.std_error);
      csv.field(reference).field(tol).field(std::string_view(within ? "1" : "0")).field(st.deviation_fraction);
      csv.field(static_cast<std::uint64_t>(st.n));
      csv.end_row();
    }
  }
  io::write_file(join(dir, "results.csv"), csv.str());
  io::write_file(join(dir, "reference_density.csv"), ref.str());
  o.schemas["results.csv"] = "lln-results/1";
  o.schemas["reference_density.csv"] = "pde-density/1";
  o.derived["kappa"] = scale.time;
  o.derived["pde_field_factor"] = scale.field;
  o.derived["pde_dt_used"] = sol.dt;
  o.derived["pde_weak_residual"] = sol.weak_residual;
  o.derived["envelope_rate"] = envelope_rate(g, field.bound(), rates, g.acceleration());
  o.derived["rho_bar"] = c.rho_bar();
  o.derived["all_within_tolerance"] = all_within;
}

}  // namespace

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::BuildGraph: return "build-graph";
    case Kind::Simulate: return "simulate";
    case Kind::Pde: return "pde";
    case Kind::Rate: return "rate";
    case Kind::Lln: return "lln-experiment";
  }
  return "?";
}

std::vector<double> Config::rho_bar() const {
  std::vector<double> out(lambda_plus.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = lambda_plus[i] / (lambda_plus[i] + lambda_minus[i]);
  return out;
}

Config parse_config(std::string_view text, std::string_view source) {
  Json doc;
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    doc = Json::object();
  } else {
    try {
      doc = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorKind::Config, std::string(source) + ":" + std::to_string(line_of_offset(text, e.byte ? e.byte - 1 : 0)) +
                                  ": invalid JSON: " + e.what());
    }
  }
  if (!doc.is_object())
    fail(ErrorKind::Config, std::string(source) + ":1: config must be a JSON object");
  if (doc.contains("config") && !doc.contains("kind")) {
    Json inner = doc.at("config");
    doc = std::move(inner);
    if (!doc.is_object()) fail(ErrorKind::Config, std::string(source) + ":1: manifest 'config' must be an object");
  }
  const Reader r(doc, text, source);
  Config c;
  c.kind = parse_kind(r);

  const auto level = r.unsigned_integer("N", 2);
  if (level > kMaxConfigLevel) r.error("N", "key 'N' must be at most " + std::to_string(kMaxConfigLevel));
  c.level = static_cast<unsigned>(level);
  const std::size_t nv = sg_vertex_count(c.level);
  Json res;
  res["kind"] = kind_name(c.kind);
  res["N"] = c.level;

  if (c.kind != Kind::BuildGraph) {
    c.horizon = r.number("T", 1.0);
    if (c.horizon < 0.0) r.error("T", "key 'T' must be >= 0");
    res["T"] = c.horizon;
    c.seed = r.unsigned_integer("seed", 0);
    res["seed"] = c.seed;
  }

  if (uses_reservoirs(c.kind)) {
    const bool lam = r.has("lambda_plus") || r.has("lambda_minus");
    if (lam) {
      if (r.has("rho_bar") || r.has("reservoir_rate"))
        r.error("lambda_plus", "give either lambda_plus/lambda_minus or rho_bar/reservoir_rate, not both");
      if (!r.has("lambda_plus") || !r.has("lambda_minus"))
        r.error(r.has("lambda_plus") ? "lambda_plus" : "lambda_minus", "lambda_plus and lambda_minus must be given together");
      c.lambda_plus = r.numbers("lambda_plus");
      c.lambda_minus = r.numbers("lambda_minus");
    } else {
      std::vector<double> rho_bar = r.has("rho_bar") ? r.numbers("rho_bar") : std::vector<double>{0.5, 0.5, 0.5};
      const double total = r.number("reservoir_rate", kDefaultReservoirRate);
      if (!(total > 0.0)) r.error("reservoir_rate", "key 'reservoir_rate' must be positive");
      if (rho_bar.size() != 3) r.error("rho_bar", "key 'rho_bar' needs one density per corner (3 values)");
      for (std::size_t i = 0; i < 3; ++i)
        if (!(rho_bar[i] > 0.0 && rho_bar[i] < 1.0))
          r.error("rho_bar", "rho_bar[" + std::to_string(i) +
                                 "] must lie strictly between 0 and 1 (reservoir rates lambda_+ = r rho_bar and "
                                 "lambda_- = r (1 - rho_bar) must be positive)");
      const auto br = BoundaryRates::from_density(rho_bar, total);
      c.lambda_plus = br.lambda_plus;
      c.lambda_minus = br.lambda_minus;
    }
    const char* which[2] = {"lambda_plus", "lambda_minus"};
    const std::vector<double>* lists[2] = {&c.lambda_plus, &c.lambda_minus};
    for (int s = 0; s < 2; ++s) {
      if (lists[s]->size() != 3) r.error(which[s], std::string("key '") + which[s] + "' needs 3 values, one per corner");
      for (std::size_t i = 0; i < 3; ++i)
        if (!((*lists[s])[i] > 0.0) || !std::isfinite((*lists[s])[i]))
          r.error(which[s], std::string(which[s]) + "[" + std::to_string(i) + "] = " +
                                io::format_double((*lists[s])[i]) + " violates positivity: reservoir rates must be > 0");
    }
    res["lambda_plus"] = c.lambda_plus;
    res["lambda_minus"] = c.lambda_minus;

    const Json fdesc = r.has("field") ? r.raw("field") : Json{{"type", "zero"}};
    c.field = resolve_field(fdesc, nv, [&](const std::string& m) { r.error("field", m); });
    res["field"] = c.field;

    if (r.has("rho0")) {
      const auto& v = r.raw("rho0");
      if (v.is_string()) {
        if (v.get<std::string>() != "harmonic") r.error("rho0", "rho0 must be \"harmonic\", a number or an array");
      } else if (v.is_number()) {
        if (!(v.get<double>() >= 0.0 && v.get<double>() <= 1.0)) r.error("rho0", "rho0 must lie in [0, 1]");
      } else if (v.is_array()) {
        if (v.size() != nv) r.error("rho0", "rho0 needs " + std::to_string(nv) + " values");
        for (const auto& x : v)
          if (!x.is_number() || !(x.get<double>() >= 0.0 && x.get<double>() <= 1.0))
            r.error("rho0", "rho0 values must be numbers in [0, 1]");
      } else {
        r.error("rho0", "rho0 must be \"harmonic\", a number or an array");
      }
      c.rho0 = v;
    } else {
      c.rho0 = "harmonic";
    }
    res["rho0"] = c.rho0;
  }

  if (uses_pde(c.kind)) {
    c.dt = r.number("dt", 1e-3);
    if (!(c.dt > 0.0)) r.error("dt", "key 'dt' must be positive");
    c.theta = r.number("theta", 1.0);
    if (!(c.theta >= 0.5 && c.theta <= 1.0)) r.error("theta", "key 'theta' must lie in [0.5, 1]");
    c.record_every = r.unsigned_integer("record_every", 0);
    res["dt"] = c.dt;
    res["theta"] = c.theta;
    res["record_every"] = c.record_every;
  }

  if (uses_particles(c.kind)) {
    c.replicas = r.unsigned_integer("replicas", c.kind == Kind::Lln ? 100 : 1);
    if (c.replicas < 1 || (c.kind == Kind::Lln && c.replicas < 2))
      r.error("replicas", c.kind == Kind::Lln ? "lln-experiment needs at least 2 replicas" : "replicas must be >= 1");
    if (c.replicas > std::numeric_limits<std::uint32_t>::max()) r.error("replicas", "too many replicas");
    c.sample_times = r.has("sample_times") ? r.numbers("sample_times") : std::vector<double>{c.horizon};
    for (std::size_t i = 0; i < c.sample_times.size(); ++i) {
      if (!(c.sample_times[i] >= 0.0 && c.sample_times[i] <= c.horizon))
        r.error("sample_times", "sample_times must lie in [0, T]");
      if (i && c.sample_times[i] <= c.sample_times[i - 1]) r.error("sample_times", "sample_times must be increasing");
    }
    if (c.sample_times.empty()) r.error("sample_times", "sample_times must not be empty");
    res["replicas"] = c.replicas;
    res["sample_times"] = c.sample_times;
  }

  if (c.kind == Kind::Lln) {
    c.density_tolerance = r.number("density_tolerance", 0.02);
    c.current_rel_tolerance = r.number("current_rel_tolerance", 0.05);
    c.delta = r.number("delta", 0.05);
    if (!(c.density_tolerance >= 0.0)) r.error("density_tolerance", "density_tolerance must be >= 0");
    if (!(c.current_rel_tolerance >= 0.0)) r.error("current_rel_tolerance", "current_rel_tolerance must be >= 0");
    if (!(c.delta > 0.0)) r.error("delta", "delta must be positive");
    res["density_tolerance"] = c.density_tolerance;
    res["current_rel_tolerance"] = c.current_rel_tolerance;
    res["delta"] = c.delta;
  }

  if (c.kind == Kind::Rate) {
    if (r.has("trajectory")) {
      const auto& t = r.raw("trajectory");
      if (!t.is_object() || !t.contains("density_csv") || !t.contains("flux_csv") || !t.at("density_csv").is_string() ||
          !t.at("flux_csv").is_string() || t.size() != 2)
        r.error("trajectory", "trajectory must be {\"density_csv\": path, \"flux_csv\": path}");
      c.density_csv = t.at("density_csv").get<std::string>();
      c.flux_csv = t.at("flux_csv").get<std::string>();
      for (const auto* p : {&c.density_csv, &c.flux_csv})
        if (!std::filesystem::is_regular_file(*p)) r.error("trajectory", "referenced file does not exist: " + *p);
      res["trajectory"] = t;
    }
    if (r.has("probe_field")) {
      c.probe_field = resolve_field(r.raw("probe_field"), nv, [&](const std::string& m) { r.error("probe_field", m); });
      res["probe_field"] = c.probe_field;
    }
  }

  r.reject_unknown();
  c.resolved = std::move(res);
  return c;
}

FieldSpec make_field(const Json& d, const WeightedGraph& g, double horizon) {
  const auto desc = resolve_field(d, g.num_vertices(), [](const std::string& m) -> void { fail(ErrorKind::Config, m); });
  const auto type = desc.at("type").get<std::string>();
  if (type == "zero") return FieldSpec::zero();
  if (type == "harmonic") {
    bool ok = false;
    const auto profile = parse_profile(desc.at("time").get<std::string>(), ok);
    const auto& b = desc.at("boundary");
    return FieldSpec::harmonic(g, {b[0].get<double>(), b[1].get<double>(), b[2].get<double>()}, profile,
                               desc.at("amplitude").get<double>(), desc.at("frequency").get<double>(), horizon);
  }
  std::vector<FieldSpec::TablePoint> pts;
  for (const auto& p : desc.at("points"))
    pts.push_back({p[0].get<double>(), static_cast<VertexId>(p[1].get<std::uint64_t>()), p[2].get<double>()});
  return FieldSpec::table(g, std::move(pts));
}

std::string validate(std::string_view text, std::string_view source) {
  const auto c = parse_config(text, source);
  std::string out = "ok\n";
  out += "kind: " + std::string(kind_name(c.kind)) + "\n";
  if (uses_pde(c.kind)) out += "dt: " + io::format_double(c.dt) + "\n";
  if (uses_particles(c.kind)) {
    const auto g = build_sg(c.level);
    const auto field = make_field(c.field, g, c.horizon);
    const double lambda = envelope_rate(g, field.bound(), rates_of(c), g.acceleration());
    out += "envelope_rate: " + io::format_double(lambda) + "\n";
    out += "estimated_events_per_replica: " + io::format_double(std::ceil(lambda * c.horizon)) + "\n";
    out += "estimated_events_total: " +
           io::format_double(std::ceil(lambda * c.horizon) * static_cast<double>(c.replicas)) + "\n";
  }
  out += "resolved: " + c.resolved.dump() + "\n";
  return out;
}

std::string run(std::string_view text, const std::string& out_dir, unsigned threads, std::string_view source) {
  const auto c = parse_config(text, source);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  io::ensure_directory(out_dir);
  const auto g = stage("graph", [&] { return build_sg(c.level); });
  Outputs o;
  switch (c.kind) {
    case Kind::BuildGraph: run_build_graph(c, g, out_dir, o); break;
    case Kind::Simulate: run_simulate(c, g, out_dir, threads, o); break;
    case Kind::Pde: run_pde(c, g, out_dir, o); break;
    case Kind::Rate: run_rate(c, g, out_dir, o); break;
    case Kind::Lln: run_lln(c, g, out_dir, threads, o); break;
  }
  o.schemas["manifest.json"] = "manifest/1";
  write_manifest(out_dir, c, o);
  return o.derived.dump() + "\n";
}

}  // namespace sghydro::experiment
