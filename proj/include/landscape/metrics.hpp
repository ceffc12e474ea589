#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "landscape/sampler.hpp"
#include "landscape/spectral.hpp"
#include "landscape/topology.hpp"

namespace landscape {

inline constexpr int kReportSchemaVersion = 1;

struct SmadTerm {
  std::size_t minimum = 0;
  std::size_t saddle = 0;
  double persistence = 0.0;  // p_i
  std::size_t weight = 0;    // w_i
  double term = 0.0;         // (p_i / R) (w_i / N)
};

// Saddle-minimum average distance over the finite pairs S:
//   smad = (1/|S|) sum_i (p_i / R) (w_i / N),
// with smad = 0 when |S| = 0 or R = 0.
struct SmadReport {
  double smad = 0.0;
  std::size_t pair_count = 0;
  double range = 0.0;  // R = f_max - f_min
  std::size_t points = 0;
  std::vector<SmadTerm> contributions;
};

SmadReport smad(const Barcode& barcode, const StableManifolds& manifolds, const LandscapeGrid& grid);

// max - min over finite persistences; 0 without finite pairs.
double persistence_range(const Barcode& barcode);

struct LandscapeReport {
  int schema_version = kReportSchemaVersion;
  SmadReport smad;
  double persistence_range = 0.0;
  std::size_t bar_count = 0;
  double mean_persistence = 0.0;  // finite pairs only
  double max_persistence = 0.0;
  std::vector<PersistencePair> pairs;
  std::vector<double> eigenvalues;
  std::optional<double> lambda_max;
  std::optional<TraceEstimate> trace;
  std::string adjacency;
  double simplify_tau = 0.0;
  std::vector<std::size_t> shape;
  double f_min = 0.0;
  double f_max = 0.0;
  std::string grid_digest;
  nlohmann::json grid_meta = nlohmann::json::object();
  std::vector<std::string> warnings;
};

// Eigenvalues come from `spectral` when given, else from the grid axes.
LandscapeReport assemble_report(const LandscapeGrid& grid, const Barcode& barcode, const StableManifolds& manifolds,
                                const SpectralResult* spectral = nullptr, const TraceEstimate* trace = nullptr,
                                Adjacency adjacency = Adjacency::kAxis, double simplify_tau = 0.0);

nlohmann::json report_to_json(const LandscapeReport& report);
LandscapeReport report_from_json(const nlohmann::json& j);

}  // namespace landscape
