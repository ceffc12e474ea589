#include "landscape/landscape.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include <json.hpp>

#include "landscape/builtins.hpp"
#include "landscape/error.hpp"
#include "landscape/io.hpp"
#include "landscape/metrics.hpp"
#include "landscape/mlp.hpp"
#include "landscape/oracle.hpp"
#include "landscape/sampler.hpp"
#include "landscape/spectral.hpp"
#include "landscape/topology.hpp"
#include "landscape/viz.hpp"

using nlohmann::json;

struct ll_oracle {
  std::unique_ptr<landscape::LossOracle> impl;
};

struct ll_spectrum {
  landscape::SpectralResult result;
  std::optional<landscape::TraceEstimate> trace;
};

struct ll_grid {
  landscape::LandscapeGrid grid;
};

struct ll_analysis {
  landscape::LandscapeGrid grid;
  landscape::Adjacency adjacency = landscape::Adjacency::kAxis;
  double tau = 0.0;
  landscape::SimplifiedTopology topo;
  landscape::SmadReport smad;
};

namespace {

thread_local std::string g_last_error;

ll_status fail(ll_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename Fn>
ll_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return LL_OK;
  } catch (const landscape::Error& e) {
    return fail(static_cast<ll_status>(e.code()), e.what());
  } catch (const json::exception& e) {
    return fail(LL_ERR_FORMAT, std::string("invalid JSON: ") + e.what());
  } catch (const std::bad_alloc&) {
    return fail(LL_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(LL_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(LL_ERR_INTERNAL, "unknown error");
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw landscape::UsageError(std::string(what) + " must not be null");
}

json parse_options(const char* text) {
  if (text == nullptr || *text == '\0') return json::object();
  json j = json::parse(text);
  if (!j.is_object()) throw landscape::UsageError("options must be a JSON object");
  return j;
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

landscape::ParamVector point_or_origin(const ll_oracle* oracle, const double* theta, std::size_t len) {
  if (theta == nullptr) return oracle->impl->default_origin();
  if (len != oracle->impl->dim()) {
    throw landscape::UsageError("theta has " + std::to_string(len) + " entries but the oracle has dimension " +
                                std::to_string(oracle->impl->dim()));
  }
  return landscape::ParamVector(theta, theta + len);
}

void check_length(std::size_t got, std::size_t want, const char* what) {
  if (got < want) {
    throw landscape::UsageError(std::string(what) + " buffer holds " + std::to_string(got) + " entries, needs " +
                                std::to_string(want));
  }
}

landscape::GridFormat parse_format(const std::string& name) {
  if (name == "llg") return landscape::GridFormat::kLlg;
  if (name == "json") return landscape::GridFormat::kJson;
  if (name == "csv") return landscape::GridFormat::kCsv;
  throw landscape::UsageError("unknown grid format '" + name + "' (expected llg, json or csv)");
}

landscape::EigenOrdering parse_ordering(const std::string& name) {
  if (name == "magnitude") return landscape::EigenOrdering::kMagnitude;
  if (name == "algebraic") return landscape::EigenOrdering::kAlgebraic;
  throw landscape::UsageError("unknown eigenvalue ordering '" + name + "' (expected magnitude or algebraic)");
}

}  // namespace

extern "C" {

const char* ll_version(void) { return "1.0.0"; }

const char* ll_last_error(void) { return g_last_error.c_str(); }

void ll_string_free(char* s) { std::free(s); }

ll_status ll_write_file(const char* path, const char* data, size_t len) {
  return guarded([&] {
    require(path, "path");
    if (len > 0) require(data, "data");
    landscape::write_file_atomic(path, std::string_view(data ? data : "", len));
  });
}

ll_status ll_oracle_builtin(const char* name, const char* params_json, ll_oracle** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    auto handle = std::make_unique<ll_oracle>();
    handle->impl = landscape::make_builtin(name, parse_options(params_json));
    *out = handle.release();
  });
}

void ll_oracle_free(ll_oracle* oracle) { delete oracle; }

ll_status ll_builtin_names(char** out) {
  return guarded([&] {
    require(out, "out");
    std::string joined;
    for (const auto& n : landscape::builtin_names()) {
      if (!joined.empty()) joined += ",";
      joined += n;
    }
    *out = duplicate(joined);
  });
}

size_t ll_oracle_dim(const ll_oracle* oracle) { return oracle ? oracle->impl->dim() : 0; }

ll_status ll_oracle_id(const ll_oracle* oracle, char** out) {
  return guarded([&] {
    require(oracle, "oracle");
    require(out, "out");
    *out = duplicate(oracle->impl->id());
  });
}

ll_status ll_oracle_default_origin(const ll_oracle* oracle, double* out, size_t len) {
  return guarded([&] {
    require(oracle, "oracle");
    require(out, "out");
    const auto origin = oracle->impl->default_origin();
    check_length(len, origin.size(), "origin");
    std::copy(origin.begin(), origin.end(), out);
  });
}

ll_status ll_oracle_value(const ll_oracle* oracle, const double* theta, size_t len, double* out) {
  return guarded([&] {
    require(oracle, "oracle");
    require(theta, "theta");
    require(out, "out");
    *out = landscape::eval_loss(*oracle->impl, {theta, len});
  });
}

ll_status ll_oracle_gradient(const ll_oracle* oracle, const double* theta, size_t len, double* out) {
  return guarded([&] {
    require(oracle, "oracle");
    require(theta, "theta");
    require(out, "out");
    const auto g = landscape::eval_gradient(*oracle->impl, {theta, len});
    std::copy(g.begin(), g.end(), out);
  });
}

ll_status ll_oracle_hvp(const ll_oracle* oracle, const double* theta, const double* v, size_t len, double* out) {
  return guarded([&] {
    require(oracle, "oracle");
    require(theta, "theta");
    require(v, "v");
    require(out, "out");
    const auto hv = landscape::eval_hvp(*oracle->impl, {theta, len}, {v, len});
    std::copy(hv.begin(), hv.end(), out);
  });
}

ll_status ll_mlp_train(const char* spec_json, const char* dataset_json, const char* train_json,
                       const char* checkpoint_path) {
  return guarded([&] {
    require(spec_json, "spec_json");
    require(dataset_json, "dataset_json");
    require(checkpoint_path, "checkpoint_path");
    const json spec_j = json::parse(spec_json);
    const json data_j = json::parse(dataset_json);
    const auto spec = spec_j.get<landscape::MlpSpec>();
    const auto data = data_j.get<landscape::ToyDataset>();
    const auto cfg = parse_options(train_json).get<landscape::TrainConfig>();
    const auto params = landscape::train_mlp(spec, data, cfg);
    landscape::write_checkpoint(checkpoint_path, params, spec_j, {{"dataset", data_j}, {"train", json(cfg)}});
  });
}

ll_status ll_spectrum_compute(const ll_oracle* oracle, const double* theta, size_t len, const char* config_json,
                              ll_spectrum** out) {
  return guarded([&] {
    require(oracle, "oracle");
    require(out, "out");
    const json opts = parse_options(config_json);
    landscape::SpectralConfig cfg;
    cfg.k = opts.value("k", cfg.k);
    cfg.max_iter = opts.value("max_iter", cfg.max_iter);
    cfg.tol = opts.value("tol", cfg.tol);
    cfg.seed = opts.value("seed", cfg.seed);
    if (opts.contains("ordering")) cfg.ordering = parse_ordering(opts.at("ordering").get<std::string>());
    const auto point = point_or_origin(oracle, theta, len);
    auto handle = std::make_unique<ll_spectrum>();
    handle->result = landscape::top_eigenpairs(*oracle->impl, point, cfg);
    *out = handle.release();
  });
}

void ll_spectrum_free(ll_spectrum* spectrum) { delete spectrum; }

size_t ll_spectrum_count(const ll_spectrum* spectrum) { return spectrum ? spectrum->result.eigenvalues.size() : 0; }

ll_status ll_spectrum_eigenvalues(const ll_spectrum* spectrum, double* out, size_t len) {
  return guarded([&] {
    require(spectrum, "spectrum");
    require(out, "out");
    const auto& ev = spectrum->result.eigenvalues;
    check_length(len, ev.size(), "eigenvalue");
    std::copy(ev.begin(), ev.end(), out);
  });
}

ll_status ll_spectrum_to_json(const ll_spectrum* spectrum, char** out) {
  return guarded([&] {
    require(spectrum, "spectrum");
    require(out, "out");
    json j = landscape::spectral_to_json(spectrum->result);
    if (spectrum->trace) j["trace"] = landscape::trace_to_json(*spectrum->trace);
    *out = duplicate(j.dump(2));
  });
}

ll_status ll_spectrum_write_vectors(const ll_spectrum* spectrum, const char* path) {
  return guarded([&] {
    require(spectrum, "spectrum");
    require(path, "path");
    landscape::write_eigenvectors(path, spectrum->result);
  });
}

ll_status ll_spectrum_trace(ll_spectrum* spectrum, const ll_oracle* oracle, const double* theta, size_t len,
                            size_t samples, uint64_t seed, double* estimate, double* standard_error) {
  return guarded([&] {
    require(spectrum, "spectrum");
    require(oracle, "oracle");
    const auto point = point_or_origin(oracle, theta, len);
    spectrum->trace = landscape::hutchinson_trace(*oracle->impl, point, samples, seed);
    if (estimate) *estimate = spectrum->trace->estimate;
    if (standard_error) *standard_error = spectrum->trace->standard_error;
  });
}

ll_status ll_grid_sample(const ll_oracle* oracle, const double* theta, size_t len, const ll_spectrum* spectrum,
                         const char* subspace_json, ll_grid** out) {
  return guarded([&] {
    require(oracle, "oracle");
    require(spectrum, "spectrum");
    require(out, "out");
    const json opts = parse_options(subspace_json);
    const std::size_t n = opts.value("n", std::size_t{2});
    const double range = opts.value("range", 1.0);
    const std::size_t steps = opts.value("steps", std::size_t{51});
    const auto scaling = landscape::parse_scaling(opts.value("scaling", std::string("uniform")));
    const std::size_t threads = opts.value("threads", std::size_t{0});
    auto spec = landscape::build_subspace(spectrum->result, point_or_origin(oracle, theta, len), n, range, steps,
                                          scaling);
    *out = new ll_grid{landscape::sample_grid(*oracle->impl, spec, threads)};
  });
}

ll_status ll_grid_from_values(const size_t* shape, size_t ndim, const double* values, size_t count, ll_grid** out) {
  return guarded([&] {
    require(shape, "shape");
    require(values, "values");
    require(out, "out");
    std::vector<std::size_t> s(shape, shape + ndim);
    *out = new ll_grid{landscape::LandscapeGrid::from_values(s, std::vector<double>(values, values + count))};
  });
}

ll_status ll_grid_read(const char* path, ll_grid** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new ll_grid{landscape::read_grid(path)};
  });
}

ll_status ll_grid_write(const ll_grid* grid, const char* path, const char* format) {
  return guarded([&] {
    require(grid, "grid");
    require(path, "path");
    landscape::write_grid(grid->grid, path, parse_format(format ? format : "llg"));
  });
}

void ll_grid_free(ll_grid* grid) { delete grid; }

size_t ll_grid_ndim(const ll_grid* grid) { return grid ? grid->grid.ndim() : 0; }

size_t ll_grid_size(const ll_grid* grid) { return grid ? grid->grid.size() : 0; }

ll_status ll_grid_shape(const ll_grid* grid, size_t* out, size_t len) {
  return guarded([&] {
    require(grid, "grid");
    require(out, "out");
    const auto& s = grid->grid.shape();
    check_length(len, s.size(), "shape");
    std::copy(s.begin(), s.end(), out);
  });
}

ll_status ll_grid_values(const ll_grid* grid, double* out, size_t len) {
  return guarded([&] {
    require(grid, "grid");
    require(out, "out");
    const auto& v = grid->grid.values();
    check_length(len, v.size(), "values");
    std::copy(v.begin(), v.end(), out);
  });
}

ll_status ll_analysis_run(const ll_grid* grid, const char* options_json, ll_analysis** out) {
  return guarded([&] {
    require(grid, "grid");
    require(out, "out");
    const json opts = parse_options(options_json);
    auto a = std::make_unique<ll_analysis>(ll_analysis{grid->grid, {}, 0.0, {}, {}});
    a->adjacency = landscape::parse_adjacency(opts.value("adjacency", std::string("axis")));
    a->tau = opts.value("simplify", 0.0);
    if (!(a->tau >= 0.0)) throw landscape::UsageError("simplify threshold must be non-negative");
    auto built = landscape::build_merge_tree(a->grid, a->adjacency);
    auto manifolds = landscape::stable_manifolds(a->grid, a->adjacency);
    a->topo = landscape::simplify(built.tree, built.barcode, manifolds, a->tau);
    a->smad = landscape::smad(a->topo.barcode, a->topo.manifolds, a->grid);
    *out = a.release();
  });
}

void ll_analysis_free(ll_analysis* analysis) { delete analysis; }

double ll_analysis_smad(const ll_analysis* analysis) { return analysis ? analysis->smad.smad : 0.0; }

double ll_analysis_persistence_range(const ll_analysis* analysis) {
  return analysis ? landscape::persistence_range(analysis->topo.barcode) : 0.0;
}

size_t ll_analysis_pair_count(const ll_analysis* analysis) { return analysis ? analysis->smad.pair_count : 0; }

size_t ll_analysis_minimum_count(const ll_analysis* analysis) {
  return analysis ? analysis->topo.barcode.pairs.size() : 0;
}

ll_status ll_analysis_manifolds(const ll_analysis* analysis, uint64_t* out, size_t len) {
  return guarded([&] {
    require(analysis, "analysis");
    require(out, "out");
    const auto& a = analysis->topo.manifolds.assignment;
    check_length(len, a.size(), "manifold");
    std::copy(a.begin(), a.end(), out);
  });
}

ll_status ll_analysis_report(const ll_analysis* analysis, const ll_spectrum* spectrum, char** out) {
  return guarded([&] {
    require(analysis, "analysis");
    require(out, "out");
    const landscape::SpectralResult* sr = spectrum ? &spectrum->result : nullptr;
    const landscape::TraceEstimate* tr = spectrum && spectrum->trace ? &*spectrum->trace : nullptr;
    const auto report = landscape::assemble_report(analysis->grid, analysis->topo.barcode, analysis->topo.manifolds, sr,
                                                   tr, analysis->adjacency, analysis->tau);
    *out = duplicate(landscape::report_to_json(report).dump(2));
  });
}

ll_status ll_analysis_topology_json(const ll_analysis* analysis, char** out) {
  return guarded([&] {
    require(analysis, "analysis");
    require(out, "out");
    json j;
    j["merge_tree"] = landscape::tree_to_json(analysis->topo.tree);
    j["barcode"] = landscape::barcode_to_json(analysis->topo.barcode);
    j["manifolds"] = landscape::manifolds_to_json(analysis->topo.manifolds);
    *out = duplicate(j.dump(2));
  });
}

ll_status ll_analysis_render(const ll_analysis* analysis, const char* kind, const char* options_json, char** out) {
  return guarded([&] {
    require(analysis, "analysis");
    require(kind, "kind");
    require(out, "out");
    const json opts = parse_options(options_json);
    const std::string k = kind;
    std::string svg;
    if (k == "barcode") {
      svg = landscape::render_barcode(analysis->topo.barcode);
    } else if (k == "mergetree") {
      svg = landscape::render_merge_tree(analysis->topo.tree);
    } else if (k == "profile") {
      const auto levels = opts.value("levels", landscape::kDefaultProfileLevels);
      svg = landscape::render_profile(
          landscape::layout_profile(analysis->topo.barcode, analysis->topo.manifolds, analysis->grid, levels));
    } else if (k == "contour") {
      svg = landscape::render_contour(analysis->grid, opts.value("levels", std::size_t{10}));
    } else {
      throw landscape::UsageError("unknown render kind '" + k + "' (expected barcode, mergetree, profile or contour)");
    }
    *out = duplicate(svg);
  });
}

}  // extern "C"
