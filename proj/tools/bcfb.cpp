// Command line front end.  Subcommands read a JSON config, write CSV to
// stdout or --out, and use three exit codes: 0 on success, 1 when a
// computation gives up (resource cap, infeasible model), 2 when the config
// itself is unusable.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bcfb/channels.hpp"
#include "bcfb/mcsim.hpp"
#include "bcfb/regions.hpp"

using namespace bcfb;
using nlohmann::json;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

// parse errors get reported with the line and column of the offending byte
json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
    if (at > text.size()) at = text.size();
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < at; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(path + ":" + std::to_string(line) + ":" +
                      std::to_string(col) + ": " + e.what());
  }
}

struct Output {
  std::ofstream file;
  std::ostream* os = &std::cout;

  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file.open(path);
    if (!file) throw ConfigError("cannot open output file: " + path);
    os = &file;
  }
  std::ostream& stream() { return *os; }
};

std::string num(double x) {
  if (x == 0.0) x = 0.0;  // drop negative-zero signs from vertex arithmetic
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

void write_header(std::ostream& os, const json& config,
                  std::optional<std::uint64_t> seed) {
  char hex[24];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(fnv1a(config.dump())));
  os << "# config " << hex << "\n";
  if (seed) os << "# seed " << *seed << "\n";
}

void write_vertices(std::ostream& os, const RateRegion3& region) {
  os << "R0,R1,R2\n";
  for (const auto& v : vertices(region))
    os << num(v[0]) << ',' << num(v[1]) << ',' << num(v[2]) << '\n';
}

// json content errors count as config errors, not computation failures
template <typename T>
T field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

template <typename T>
T parse_as(const json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

int run_region(const std::string& cfg_path, const std::string& out_path) {
  json cfg = load_config(cfg_path);
  auto aux = parse_as<AuxScheme>(field<json>(cfg, "aux"), "aux scheme");
  auto ch = parse_as<Dmbc>(field<json>(cfg, "channel"), "channel");
  RateRegion3 region;
  if (cfg.contains("update")) {
    auto upd = parse_as<UpdateScheme>(cfg.at("update"), "update scheme");
    region = feedback_inner(aux, upd, ch);
  } else {
    region = marton_region(aux, ch);
  }
  Output out(out_path);
  write_header(out.stream(), cfg, std::nullopt);
  write_vertices(out.stream(), region);
  return 0;
}

int run_fm_check(std::uint64_t seed, double tol, const std::string& out_path) {
  RngStream rng(seed);
  int draws = 10;
  int ok_m = 0, ok_d = 0, ok_c = 0;
  for (int i = 0; i < draws; ++i) {
    MartonConstants k = random_marton_constants(rng);
    if (region_equal(project_presplit(presplit_system(k)), closed_form(k), tol))
      ++ok_m;
  }
  for (int i = 0; i < draws; ++i) {
    LgwConstants k = random_lgw_constants(rng);
    if (region_equal(project_presplit(presplit_system(k)), closed_form(k), tol))
      ++ok_d;
  }
  for (int i = 0; i < draws; ++i) {
    CombinedConstants k = random_combined_constants(rng);
    if (region_equal(project_presplit(presplit_system(k)), closed_form(k), tol))
      ++ok_c;
  }
  Output out(out_path);
  json cfg{{"seed", seed}, {"tol", tol}, {"draws", draws}};
  write_header(out.stream(), cfg, seed);
  out.stream() << "family,draws,matched\n";
  out.stream() << "marton," << draws << ',' << ok_m << '\n';
  out.stream() << "descriptions," << draws << ',' << ok_d << '\n';
  out.stream() << "combined," << draws << ',' << ok_c << '\n';
  bool all = ok_m == draws && ok_d == draws && ok_c == draws;
  if (!all) std::cerr << "fm-check: projection mismatch\n";
  return all ? 0 : 1;
}

int run_dueck(const std::string& cfg_path, const std::string& out_path) {
  json cfg = load_config(cfg_path);
  auto noise = parse_as<JointPmf>(field<json>(cfg, "noise"), "noise law");
  bool with_feedback = cfg.value("feedback", true);
  RateRegion3 cap = dueck_capacity(noise, with_feedback);
  Output out(out_path);
  write_header(out.stream(), cfg, std::nullopt);
  out.stream() << "# sum_rate " << num(sum_rate_max(cap).value) << "\n";
  write_vertices(out.stream(), cap);
  return 0;
}

int run_blackwell(const std::string& cfg_path, const std::string& out_path) {
  json cfg = json::object();
  if (!cfg_path.empty()) cfg = load_config(cfg_path);
  std::vector<double> ps;
  if (cfg.contains("p_list")) {
    ps = parse_as<std::vector<double>>(cfg.at("p_list"), "p_list");
  } else {
    for (int k = 0; k <= 18; ++k) ps.push_back(0.025 * k);
  }
  int grid = cfg.value("grid_steps", 200);
  Output out(out_path);
  write_header(out.stream(), cfg, std::nullopt);
  out.stream() << "p,fb_lower,nofb_upper,fb_cutset\n";
  for (double p : ps) {
    BlackwellBounds b = blackwell_bounds(p, grid);
    out.stream() << num(p) << ',' << num(b.fb_lower) << ','
                 << num(b.nofb_upper) << ',' << num(b.fb_cutset) << '\n';
  }
  return 0;
}

void write_points(std::ostream& os, const std::vector<ExperimentPoint>& pts,
                  bool fallbacks) {
  os << (fallbacks ? "n,trials,errors,error_rate,fallbacks,fallback_rate\n"
                   : "n,trials,errors,error_rate\n");
  for (const auto& p : pts) {
    os << p.n << ',' << p.trials << ',' << p.errors << ','
       << num(p.error_rate);
    if (fallbacks) os << ',' << p.fallbacks << ',' << num(p.fallback_rate);
    os << '\n';
  }
}

int run_simulate(const std::string& cfg_path, const std::string& out_path,
                 std::optional<std::uint64_t> seed, std::optional<int> workers) {
  json cfg = load_config(cfg_path);
  auto ex = parse_as<BlockMarkovExperiment>(cfg, "block chain experiment");
  if (seed) ex.seed = *seed;
  if (workers) ex.workers = *workers;
  auto pts = run_block_markov(ex);
  Output out(out_path);
  write_header(out.stream(), cfg, ex.seed);
  write_points(out.stream(), pts, true);
  return 0;
}

int run_lemmas(const std::string& cfg_path, const std::string& out_path,
               std::optional<std::uint64_t> seed, std::optional<int> workers) {
  json cfg = load_config(cfg_path);
  auto spec = parse_as<LemmaSpec>(cfg, "lemma spec");
  if (seed) spec.seed = *seed;
  if (workers) spec.workers = *workers;
  auto pts = lemma_experiment(spec);
  Output out(out_path);
  write_header(out.stream(), cfg, spec.seed);
  write_points(out.stream(), pts, false);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rate regions and coding experiments for two-receiver "
               "broadcast channels with a return link"};
  app.require_subcommand(1);

  std::string cfg_path, out_path;
  std::uint64_t seed = 1;
  double tol = 1e-9;
  int workers = 1;

  auto* region = app.add_subcommand(
      "region", "vertices of an achievable region for a configured scheme");
  region->add_option("--config", cfg_path, "json with aux, channel, update?")
      ->required();
  region->add_option("--out", out_path, "csv destination, default stdout");

  auto* fm = app.add_subcommand(
      "fm-check", "compare projected split systems with their closed forms");
  fm->add_option("--seed", seed, "draw seed");
  fm->add_option("--tol", tol, "region comparison tolerance");
  fm->add_option("--out", out_path, "csv destination, default stdout");

  auto* dueck = app.add_subcommand(
      "dueck", "capacity region of the three-bit pipe for a noise law");
  dueck->add_option("--config", cfg_path, "json with noise, feedback?")
      ->required();
  dueck->add_option("--out", out_path, "csv destination, default stdout");

  auto* bw = app.add_subcommand(
      "blackwell", "sum-rate bounds for the ternary channel across its bias");
  bw->add_option("--config", cfg_path, "json with p_list?, grid_steps?");
  bw->add_option("--out", out_path, "csv destination, default stdout");

  auto* sim = app.add_subcommand(
      "simulate", "block chain trials on the three-bit pipe preset");
  sim->add_option("--config", cfg_path, "block chain experiment json")
      ->required();
  sim->add_option("--out", out_path, "csv destination, default stdout");
  auto* sim_seed = sim->add_option("--seed", seed, "override the config seed");
  auto* sim_workers =
      sim->add_option("--workers", workers, "override the worker count");

  auto* lem = app.add_subcommand(
      "lemmas", "existence probabilities for one covering or packing setup");
  lem->add_option("--config", cfg_path, "lemma spec json")->required();
  lem->add_option("--out", out_path, "csv destination, default stdout");
  auto* lem_seed = lem->add_option("--seed", seed, "override the config seed");
  auto* lem_workers =
      lem->add_option("--workers", workers, "override the worker count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (region->parsed()) return run_region(cfg_path, out_path);
    if (fm->parsed()) return run_fm_check(seed, tol, out_path);
    if (dueck->parsed()) return run_dueck(cfg_path, out_path);
    if (bw->parsed()) return run_blackwell(cfg_path, out_path);
    if (sim->parsed())
      return run_simulate(
          cfg_path, out_path,
          sim_seed->count() ? std::optional<std::uint64_t>(seed) : std::nullopt,
          sim_workers->count() ? std::optional<int>(workers) : std::nullopt);
    if (lem->parsed())
      return run_lemmas(
          cfg_path, out_path,
          lem_seed->count() ? std::optional<std::uint64_t>(seed) : std::nullopt,
          lem_workers->count() ? std::optional<int>(workers) : std::nullopt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ResourceCapError& e) {
    std::cerr << "resource cap: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
