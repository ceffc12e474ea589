// landscape: sample loss landscapes, compute Hessian spectra, and analyze
// grid topology from the command line. Talks to the library only through the
// C interface.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "landscape/landscape.h"

using nlohmann::json;

namespace {

enum Exit : int { kOk = 0, kInternal = 1, kInput = 2, kNumeric = 3 };

struct Failure {
  int exit_code;
  std::string message;
};

int exit_for(ll_status s) {
  switch (s) {
    case LL_OK: return kOk;
    case LL_ERR_FORMAT:
    case LL_ERR_USAGE: return kInput;
    case LL_ERR_NUMERIC: return kNumeric;
    default: return kInternal;
  }
}

void check(ll_status s) {
  if (s != LL_OK) throw Failure{exit_for(s), ll_last_error()};
}

[[noreturn]] void usage(const std::string& message) { throw Failure{kInput, message}; }

template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};

using Oracle = Handle<ll_oracle, ll_oracle_free>;
using Spectrum = Handle<ll_spectrum, ll_spectrum_free>;
using Grid = Handle<ll_grid, ll_grid_free>;
using Analysis = Handle<ll_analysis, ll_analysis_free>;

std::string take(char* s) {
  std::string out = s ? s : "";
  ll_string_free(s);
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  check(ll_write_file(path.c_str(), text.data(), text.size()));
}

// Values from --config fill only the options not given on the command line.
// Keys are long flag names without dashes; a nested object under the
// subcommand name takes precedence over top-level keys.
void merge_config(CLI::App* sub, const std::string& config_path) {
  if (config_path.empty()) return;
  std::ifstream in(config_path, std::ios::binary);
  if (!in) usage("cannot open config file '" + config_path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::exception& e) {
    usage("config file '" + config_path + "' is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) usage("config file '" + config_path + "' must hold a JSON object");
  json merged = doc;
  if (doc.contains(sub->get_name()) && doc[sub->get_name()].is_object()) merged.update(doc[sub->get_name()]);

  for (CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config" || opt->count() > 0) continue;
    if (!merged.contains(name)) continue;
    const json& v = merged[name];
    try {
      if (v.is_boolean()) {
        if (v.get<bool>()) opt->add_result("true");
        else continue;
      } else if (v.is_string()) {
        opt->add_result(v.get<std::string>());
      } else if (v.is_number_integer() || v.is_number_unsigned()) {
        opt->add_result(v.dump());
      } else if (v.is_number_float()) {
        char text[40];
        std::snprintf(text, sizeof text, "%.17g", v.get<double>());
        opt->add_result(text);
      } else {
        usage("config key '" + name + "' must be a scalar");
      }
      opt->run_callback();
    } catch (const CLI::Error& e) {
      usage("config key '" + name + "': " + e.what());
    }
  }
}

struct OracleFlags {
  std::string fn;
  std::size_t param_dim = 0;
  std::size_t basins = 6;
  std::uint64_t oracle_seed = 0;
  double spread = 1.0;
  std::string checkpoint;
  std::string dataset;

  void add(CLI::App* sub) {
    sub->add_option("--fn", fn, "Builtin loss function (see --list-fn)");
    sub->add_option("--param-dim", param_dim, "Parameter dimension for rosenbrock / gaussian-mixture");
    sub->add_option("--basins", basins, "Number of wells for gaussian-mixture")->check(CLI::PositiveNumber);
    sub->add_option("--oracle-seed", oracle_seed, "Seed for randomly generated builtins");
    sub->add_option("--spread", spread, "Well placement spread for gaussian-mixture")->check(CLI::PositiveNumber);
    sub->add_option("--checkpoint", checkpoint, "MLP checkpoint (float64 file with .json sidecar)");
    sub->add_option("--dataset", dataset, "MLP dataset JSON (defaults to the one in the checkpoint sidecar)");
  }

  void open(Oracle& oracle) const {
    if (fn.empty()) usage("--fn is required");
    json params = json::object();
    if (param_dim > 0) params["dim"] = param_dim;
    params["basins"] = basins;
    params["seed"] = oracle_seed;
    params["spread"] = spread;
    if (!checkpoint.empty()) params["checkpoint"] = checkpoint;
    if (!dataset.empty()) params["dataset"] = dataset;
    check(ll_oracle_builtin(fn.c_str(), params.dump().c_str(), oracle.out()));
  }
};

struct SpectrumFlags {
  std::size_t max_iter = 5000;
  double tol = 1e-8;
  std::string ordering = "magnitude";
  std::uint64_t seed = 0;

  void add(CLI::App* sub) {
    sub->add_option("--max-iter", max_iter, "Power-iteration cap per eigenpair")->check(CLI::PositiveNumber);
    sub->add_option("--tol", tol, "Relative convergence tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--ordering", ordering, "Eigenvalue ordering")
        ->check(CLI::IsMember({"magnitude", "algebraic"}));
    sub->add_option("--seed", seed, "Seed for starting vectors and probes");
  }

  json config(std::size_t k) const {
    return {{"k", k}, {"max_iter", max_iter}, {"tol", tol}, {"seed", seed}, {"ordering", ordering}};
  }
};

struct AnalysisFlags {
  std::string input;
  std::string adjacency = "axis";
  double simplify = 0.0;

  void add(CLI::App* sub) {
    sub->add_option("input,--input", input, "Grid file (LLG, LLG JSON or CSV)");
    sub->add_option("--adjacency", adjacency, "Grid neighbourhood")->check(CLI::IsMember({"axis", "full"}));
    sub->add_option("--simplify", simplify, "Cancel pairs with persistence below this threshold")
        ->check(CLI::NonNegativeNumber);
  }

  json options() const { return {{"adjacency", adjacency}, {"simplify", simplify}}; }

  void read(Grid& grid) const {
    if (input.empty()) usage("an input grid is required");
    check(ll_grid_read(input.c_str(), grid.out()));
  }
};

int run_sample(const OracleFlags& of, const SpectrumFlags& sf, std::size_t dims, double range, std::size_t steps,
               const std::string& scaling, std::size_t threads, const std::string& out, const std::string& format) {
  if (out.empty()) usage("--out is required");
  if (steps < 3 || steps % 2 == 0) usage("--steps must be odd and at least 3 so the grid contains alpha = 0");
  Oracle oracle;
  of.open(oracle);
  Spectrum spectrum;
  check(ll_spectrum_compute(oracle.get(), nullptr, 0, sf.config(dims).dump().c_str(), spectrum.out()));
  const json subspace = {{"n", dims}, {"range", range}, {"steps", steps}, {"scaling", scaling}, {"threads", threads}};
  Grid grid;
  check(ll_grid_sample(oracle.get(), nullptr, 0, spectrum.get(), subspace.dump().c_str(), grid.out()));
  check(ll_grid_write(grid.get(), out.c_str(), format.c_str()));
  std::printf("wrote %s (%zu points)\n", out.c_str(), ll_grid_size(grid.get()));
  return kOk;
}

int run_spectrum(const OracleFlags& of, const SpectrumFlags& sf, std::size_t k, std::size_t trace_samples,
                 const std::string& out, const std::string& vectors) {
  Oracle oracle;
  of.open(oracle);
  Spectrum spectrum;
  check(ll_spectrum_compute(oracle.get(), nullptr, 0, sf.config(k).dump().c_str(), spectrum.out()));
  if (trace_samples > 0) {
    check(ll_spectrum_trace(spectrum.get(), oracle.get(), nullptr, 0, trace_samples, sf.seed, nullptr, nullptr));
  }
  char* raw = nullptr;
  check(ll_spectrum_to_json(spectrum.get(), &raw));
  const std::string text = take(raw) + "\n";
  if (out.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    write_text(out, text);
  }
  std::string vec_path = vectors;
  if (vec_path.empty() && !out.empty()) vec_path = std::filesystem::path(out).replace_extension(".vectors").string();
  if (!vec_path.empty()) check(ll_spectrum_write_vectors(spectrum.get(), vec_path.c_str()));
  return kOk;
}

int run_analyze(const AnalysisFlags& af, const std::string& out) {
  Grid grid;
  af.read(grid);
  Analysis analysis;
  check(ll_analysis_run(grid.get(), af.options().dump().c_str(), analysis.out()));
  char* raw = nullptr;
  check(ll_analysis_report(analysis.get(), nullptr, &raw));
  const std::string text = take(raw) + "\n";
  const json report = json::parse(text);
  std::string path = out;
  if (path.empty()) path = std::filesystem::path(af.input).replace_extension(".report.json").string();
  write_text(path, text);
  std::printf("smad %.15g\n", ll_analysis_smad(analysis.get()));
  std::printf("persistence_range %.15g\n", ll_analysis_persistence_range(analysis.get()));
  std::printf("minima %zu\n", ll_analysis_minimum_count(analysis.get()));
  std::printf("finite_pairs %zu\n", ll_analysis_pair_count(analysis.get()));
  for (const auto& w : report.at("warnings")) std::fprintf(stderr, "warning: %s\n", w.get<std::string>().c_str());
  return kOk;
}

int run_smad(const AnalysisFlags& af) {
  Grid grid;
  af.read(grid);
  Analysis analysis;
  check(ll_analysis_run(grid.get(), af.options().dump().c_str(), analysis.out()));
  std::printf("%.15g\n", ll_analysis_smad(analysis.get()));
  return kOk;
}

struct RenderTargets {
  std::string barcode, mergetree, profile, contour;
  std::size_t levels = 10;
  std::size_t profile_levels = 64;
};

int run_render(const AnalysisFlags& af, const RenderTargets& t) {
  if (t.barcode.empty() && t.mergetree.empty() && t.profile.empty() && t.contour.empty()) {
    usage("render needs at least one of --barcode, --mergetree, --profile, --contour");
  }
  Grid grid;
  af.read(grid);
  if (!t.contour.empty() && ll_grid_ndim(grid.get()) != 2) {
    usage("--contour needs a 2D grid, but '" + af.input + "' has " + std::to_string(ll_grid_ndim(grid.get())) +
          " dimensions");
  }
  Analysis analysis;
  check(ll_analysis_run(grid.get(), af.options().dump().c_str(), analysis.out()));
  auto emit = [&](const char* kind, const std::string& path, std::size_t levels) {
    if (path.empty()) return;
    char* raw = nullptr;
    check(ll_analysis_render(analysis.get(), kind, json{{"levels", levels}}.dump().c_str(), &raw));
    write_text(path, take(raw));
  };
  emit("barcode", t.barcode, 0);
  emit("mergetree", t.mergetree, 0);
  emit("profile", t.profile, t.profile_levels);
  emit("contour", t.contour, t.levels);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Loss-landscape construction and topological analysis"};
  app.require_subcommand(0, 1);
  app.set_version_flag("--version", std::string(ll_version()));
  bool list_fn = false;
  app.add_flag("--list-fn", list_fn, "List builtin loss functions and exit");

  std::string config;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config, "JSON file of defaults; explicit flags win")->check(CLI::ExistingFile);
  };

  OracleFlags oracle_flags;
  SpectrumFlags spectrum_flags;
  AnalysisFlags analysis_flags;

  CLI::App* sample = app.add_subcommand("sample", "Sample a loss grid along top Hessian eigenvectors");
  std::size_t dims = 2, steps = 51, threads = 0;
  double range = 1.0;
  std::string scaling = "uniform", out, format = "llg";
  oracle_flags.add(sample);
  spectrum_flags.add(sample);
  sample->add_option("--dims", dims, "Number of eigenvector axes")->check(CLI::PositiveNumber);
  sample->add_option("--range", range, "Half-width of every axis")->check(CLI::PositiveNumber);
  sample->add_option("--steps", steps, "Points per axis (odd)");
  sample->add_option("--scaling", scaling, "Axis scaling")->check(CLI::IsMember({"uniform", "inverse-eigenvalue"}));
  sample->add_option("--threads", threads, "Worker threads (0: LANDSCAPE_THREADS or all cores)");
  sample->add_option("--out,-o", out, "Output grid path");
  sample->add_option("--format", format, "Output format")->check(CLI::IsMember({"llg", "json", "csv"}));
  add_config(sample);

  CLI::App* spectrum = app.add_subcommand("spectrum", "Top Hessian eigenpairs and trace estimate");
  std::size_t k = 3, trace_samples = 0;
  std::string vectors;
  oracle_flags.add(spectrum);
  spectrum_flags.add(spectrum);
  spectrum->add_option("--k", k, "Number of eigenpairs")->check(CLI::PositiveNumber);
  spectrum->add_option("--trace-samples", trace_samples, "Hutchinson probes (0 skips the trace)");
  spectrum->add_option("--out,-o", out, "Output JSON path (stdout when omitted)");
  spectrum->add_option("--vectors", vectors, "Eigenvector file (defaults next to --out)");
  add_config(spectrum);

  CLI::App* analyze = app.add_subcommand("analyze", "Persistence, stable manifolds and SMAD of a grid");
  analysis_flags.add(analyze);
  analyze->add_option("--out,-o", out, "Report JSON path (defaults to <input>.report.json)");
  add_config(analyze);

  CLI::App* smad = app.add_subcommand("smad", "Print the SMAD of a grid");
  analysis_flags.add(smad);
  add_config(smad);

  CLI::App* render = app.add_subcommand("render", "Render barcode, merge tree, profile or contour SVGs");
  RenderTargets targets;
  analysis_flags.add(render);
  render->add_option("--barcode", targets.barcode, "Barcode SVG path");
  render->add_option("--mergetree", targets.mergetree, "Merge tree SVG path");
  render->add_option("--profile", targets.profile, "Landscape profile SVG path");
  render->add_option("--contour", targets.contour, "Contour SVG path (2D grids only)");
  render->add_option("--levels", targets.levels, "Contour levels")->check(CLI::PositiveNumber);
  render->add_option("--profile-levels", targets.profile_levels, "Profile sampling levels")
      ->check(CLI::PositiveNumber);
  add_config(render);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInput;
  }
  if (list_fn) {
    char* raw = nullptr;
    if (ll_builtin_names(&raw) != LL_OK) return kInternal;
    std::printf("%s\n", take(raw).c_str());
    return kOk;
  }
  if (app.get_subcommands().empty()) {
    std::fputs(app.help().c_str(), stderr);
    return kInput;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    merge_config(sub, config);
    if (sub == sample) {
      return run_sample(oracle_flags, spectrum_flags, dims, range, steps, scaling, threads, out, format);
    }
    if (sub == spectrum) return run_spectrum(oracle_flags, spectrum_flags, k, trace_samples, out, vectors);
    if (sub == analyze) return run_analyze(analysis_flags, out);
    if (sub == smad) return run_smad(analysis_flags);
    if (sub == render) return run_render(analysis_flags, targets);
    return kInternal;
  } catch (const Failure& f) {
    std::fprintf(stderr, "error: %s\n", f.message.c_str());
    return f.exit_code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInternal;
  }
}
