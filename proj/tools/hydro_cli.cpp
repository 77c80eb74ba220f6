// hydro: command-line driver for libsghydro experiments.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "sghydro/sghydro.h"

namespace {

using Json = nlohmann::ordered_json;

struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum Exit { kOk = 0, kInternal = 1, kConfig = 2, kNumerical = 3, kIo = 4 };

int exit_code(sgh_status s) {
  switch (s) {
    case SGH_OK: return kOk;
    case SGH_ERR_INVALID_ARGUMENT:
    case SGH_ERR_CONFIG: return kConfig;
    case SGH_ERR_NUMERICAL: return kNumerical;
    case SGH_ERR_IO: return kIo;
    default: return kInternal;
  }
}

struct Options {
  std::string command;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  unsigned threads = 0;
  std::vector<std::string> sets;
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("hydro");
  logger->set_pattern("%^%l%$: %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* lvl = std::getenv("HYDRO_LOG")) {
    const auto level = spdlog::level::from_str(lvl);
    if (level == spdlog::level::off && std::string(lvl) != "off")
      spdlog::warn("unknown HYDRO_LOG level '{}'", lvl);
    else
      spdlog::set_level(level);
  }
}

Json parse_value(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error&) {
    return text;
  }
}

// Applies key=value (dotted keys address nested objects).
void apply_set(Json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw std::invalid_argument("--set expects key=value, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  Json* node = &doc;
  std::size_t start = 0;
  for (;;) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw std::invalid_argument("--set: empty key component in '" + key + "'");
    if (!node->is_object()) throw std::invalid_argument("--set: '" + key + "' descends into a non-object");
    if (dot == std::string::npos) {
      (*node)[part] = parse_value(assignment.substr(eq + 1));
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = Json::object();
    start = dot + 1;
  }
}

// Returns the text handed to the library and the name used in messages.
std::pair<std::string, std::string> prepare_config(const Options& o) {
  std::string text;
  std::string source = o.config.empty() ? "<defaults>" : o.config;
  if (!o.config.empty()) {
    std::ifstream in(o.config, std::ios::binary);
    if (!in) throw IoFailure("cannot open config " + o.config);
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  if (o.command == "validate" && o.sets.empty() && !o.seed) return {text, source};

  const bool blank = text.find_first_not_of(" \t\r\n") == std::string::npos;
  bool edited = false;
  Json doc = Json::object();
  if (!blank) {
    try {
      doc = Json::parse(text);
    } catch (const Json::parse_error&) {
      return {text, source};  // the library reports the parse error with its line
    }
  }
  if (!doc.is_object()) return {text, source};
  Json* cfg = &doc;
  if (doc.contains("config") && !doc.contains("kind") && doc["config"].is_object()) cfg = &doc["config"];

  if (o.command != "validate") {
    if (!cfg->contains("kind")) {
      (*cfg)["kind"] = o.command;
      edited = true;
    } else if ((*cfg)["kind"] != o.command) {
      throw std::invalid_argument("config kind " + (*cfg)["kind"].dump() + " does not match subcommand '" + o.command + "'");
    }
  }
  if (o.seed) {
    (*cfg)["seed"] = *o.seed;
    edited = true;
  }
  for (const auto& s : o.sets) {
    apply_set(*cfg, s);
    edited = true;
  }
  if (!edited) return {text, source};
  return {doc.dump(2) + "\n", source + " (with overrides)"};
}

int execute(const Options& o) {
  std::pair<std::string, std::string> cfg;
  try {
    cfg = prepare_config(o);
  } catch (const std::invalid_argument& e) {
    spdlog::error("{}", e.what());
    return kConfig;
  } catch (const IoFailure& e) {
    spdlog::error("{}", e.what());
    return kIo;
  }
  const auto& [text, source] = cfg;
  char* out = nullptr;
  sgh_status st;
  if (o.command == "validate") {
    st = sgh_config_validate(text.c_str(), source.c_str(), &out);
  } else {
    spdlog::info("running {} into {}", o.command, o.out);
    st = sgh_experiment_run(text.c_str(), source.c_str(), o.out.c_str(), o.threads, &out);
  }
  if (st != SGH_OK) {
    spdlog::error("{}", sgh_last_error());
    return exit_code(st);
  }
  std::cout << out;
  sgh_string_free(out);
  spdlog::debug("libsghydro {}", sgh_version());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Exclusion processes and hydrodynamics on Sierpinski gasket graphs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(sgh_version()));
  Options o;

  const std::pair<const char*, const char*> commands[] = {
      {"build-graph", "Write the level-N graph as JSON"},
      {"simulate", "Run particle replicas and write snapshots"},
      {"pde", "Solve the hydrodynamic equation"},
      {"rate", "Evaluate the dynamical rate function on a trajectory"},
      {"lln-experiment", "Compare particle ensembles against the hydrodynamic solution"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", o.config, "JSON config or manifest")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "Override the config seed");
    sub->add_option("--out", o.out, "Output directory")->capture_default_str();
    sub->add_option("--threads", o.threads, "Worker threads for replicas (0: all hardware threads)");
    sub->add_option("--set", o.sets, "Override a config key: key=value (dotted keys for nesting)");
    sub->callback([&o, name = std::string(name)] { o.command = name; });
  }
  auto* val = app.add_subcommand("validate", "Check a config without running it");
  val->add_option("config,--config", o.config, "JSON config or manifest")->check(CLI::ExistingFile);
  val->add_option("--set", o.sets, "Override a config key: key=value");
  val->add_option("--seed", o.seed, "Override the config seed");
  val->callback([&o] { o.command = "validate"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfig;
  }
  if (o.command == "validate" && o.config.empty()) {
    spdlog::error("validate needs a config file");
    return kConfig;
  }
  return execute(o);
}
