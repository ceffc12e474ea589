#include "landscape/metrics.hpp"

#include <algorithm>
#include <limits>

#include "landscape/error.hpp"

namespace landscape {

SmadReport smad(const Barcode& barcode, const StableManifolds& manifolds, const LandscapeGrid& grid) {
  const std::string digest = grid.digest();
  if (barcode.grid_digest != digest || manifolds.grid_digest != digest) {
    throw UsageError("barcode or stable manifolds were not computed from this grid (digest mismatch)");
  }
  SmadReport report;
  report.range = grid.value_range();
  report.points = grid.size();
  for (const auto& p : barcode.pairs) {
    if (p.essential) continue;
    SmadTerm t;
    t.minimum = p.minimum;
    t.saddle = *p.saddle;
    t.persistence = p.death - p.birth;
    t.weight = manifolds.weight(p.minimum);
    t.term = report.range > 0.0 ? (t.persistence / report.range) *
                                      (static_cast<double>(t.weight) / static_cast<double>(report.points))
                                : 0.0;
    report.contributions.push_back(t);
  }
  report.pair_count = report.contributions.size();
  if (report.pair_count > 0 && report.range > 0.0) {
    double sum = 0.0;
    for (const auto& t : report.contributions) sum += t.term;
    report.smad = sum / static_cast<double>(report.pair_count);
  }
  return report;
}

double persistence_range(const Barcode& barcode) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& p : barcode.pairs) {
    if (p.essential) continue;
    lo = std::min(lo, p.persistence);
    hi = std::max(hi, p.persistence);
  }
  return hi >= lo ? hi - lo : 0.0;
}

LandscapeReport assemble_report(const LandscapeGrid& grid, const Barcode& barcode, const StableManifolds& manifolds,
                                const SpectralResult* spectral, const TraceEstimate* trace, Adjacency adjacency,
                                double simplify_tau) {
  LandscapeReport r;
  r.smad = smad(barcode, manifolds, grid);
  r.persistence_range = persistence_range(barcode);
  r.bar_count = barcode.pairs.size();
  r.pairs = barcode.pairs;
  double sum = 0.0;
  for (const auto& p : barcode.pairs) {
    if (p.essential) continue;
    sum += p.persistence;
    r.max_persistence = std::max(r.max_persistence, p.persistence);
  }
  const std::size_t finite = barcode.finite_count();
  r.mean_persistence = finite > 0 ? sum / static_cast<double>(finite) : 0.0;

  if (spectral) {
    r.eigenvalues = spectral->eigenvalues;
  } else {
    for (const auto& a : grid.axes()) {
      if (a.eigenvalue) r.eigenvalues.push_back(*a.eigenvalue);
    }
  }
  if (!r.eigenvalues.empty()) {
    r.lambda_max = *std::max_element(r.eigenvalues.begin(), r.eigenvalues.end(),
                                     [](double a, double b) { return std::abs(a) < std::abs(b); });
  }
  if (trace) r.trace = *trace;

  r.adjacency = adjacency_name(adjacency);
  r.simplify_tau = simplify_tau;
  r.shape = grid.shape();
  r.f_min = grid.f_min();
  r.f_max = grid.f_max();
  r.grid_digest = grid.digest();
  r.grid_meta = grid.meta();
  if (grid.value_range() == 0.0) r.warnings.push_back("degenerate range R=0");
  return r;
}

// ---------------------------------------------------------------------------

namespace {

nlohmann::json optional_index(const std::optional<std::size_t>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json report_to_json(const LandscapeReport& r) {
  nlohmann::json contributions = nlohmann::json::array();
  for (const auto& t : r.smad.contributions) {
    contributions.push_back({{"minimum", t.minimum},
                             {"saddle", t.saddle},
                             {"persistence", t.persistence},
                             {"weight", t.weight},
                             {"term", t.term}});
  }
  nlohmann::json bars = nlohmann::json::array();
  for (const auto& p : r.pairs) {
    bars.push_back({{"minimum", p.minimum},
                    {"saddle", optional_index(p.saddle)},
                    {"survivor", p.survivor},
                    {"birth", p.birth},
                    {"death", p.death},
                    {"persistence", p.persistence},
                    {"essential", p.essential}});
  }
  nlohmann::json spectral = {{"eigenvalues", r.eigenvalues},
                             {"lambda_max", r.lambda_max ? nlohmann::json(*r.lambda_max) : nlohmann::json(nullptr)},
                             {"trace", r.trace ? trace_to_json(*r.trace) : nlohmann::json(nullptr)}};
  return nlohmann::json{
      {"schema_version", r.schema_version},
      {"smad", r.smad.smad},
      {"pair_count", r.smad.pair_count},
      {"R", r.smad.range},
      {"N", r.smad.points},
      {"pairs", std::move(contributions)},
      {"barcode", std::move(bars)},
      {"bar_count", r.bar_count},
      {"persistence_range",
       {{"value", r.persistence_range},
        {"definition", "max minus min of finite-pair persistence"},
        {"alternative", "global value range R"}}},
      {"mean_persistence", r.mean_persistence},
      {"max_persistence", r.max_persistence},
      {"spectral", std::move(spectral)},
      {"grid",
       {{"shape", r.shape},
        {"f_min", r.f_min},
        {"f_max", r.f_max},
        {"digest", r.grid_digest},
        {"adjacency", r.adjacency},
        {"simplify_tau", r.simplify_tau},
        {"meta", r.grid_meta}}},
      {"warnings", r.warnings}};
}

LandscapeReport report_from_json(const nlohmann::json& j) {
  LandscapeReport r;
  try {
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != kReportSchemaVersion) {
      throw FormatError("unsupported report schema_version " + std::to_string(r.schema_version));
    }
    r.smad.smad = j.at("smad").get<double>();
    r.smad.pair_count = j.at("pair_count").get<std::size_t>();
    r.smad.range = j.at("R").get<double>();
    r.smad.points = j.at("N").get<std::size_t>();
    for (const auto& t : j.at("pairs")) {
      r.smad.contributions.push_back(SmadTerm{t.at("minimum").get<std::size_t>(), t.at("saddle").get<std::size_t>(),
                                              t.at("persistence").get<double>(), t.at("weight").get<std::size_t>(),
                                              t.at("term").get<double>()});
    }
    for (const auto& b : j.at("barcode")) {
      PersistencePair p;
      p.minimum = b.at("minimum").get<std::size_t>();
      if (!b.at("saddle").is_null()) p.saddle = b.at("saddle").get<std::size_t>();
      p.survivor = b.at("survivor").get<std::size_t>();
      p.birth = b.at("birth").get<double>();
      p.death = b.at("death").get<double>();
      p.persistence = b.at("persistence").get<double>();
      p.essential = b.at("essential").get<bool>();
      r.pairs.push_back(p);
    }
    r.bar_count = j.at("bar_count").get<std::size_t>();
    r.persistence_range = j.at("persistence_range").at("value").get<double>();
    r.mean_persistence = j.at("mean_persistence").get<double>();
    r.max_persistence = j.at("max_persistence").get<double>();
    const auto& s = j.at("spectral");
    r.eigenvalues = s.at("eigenvalues").get<std::vector<double>>();
    if (!s.at("lambda_max").is_null()) r.lambda_max = s.at("lambda_max").get<double>();
    if (!s.at("trace").is_null()) {
      const auto& t = s.at("trace");
      r.trace = TraceEstimate{t.at("estimate").get<double>(), t.at("stderr").get<double>(),
                              t.at("samples").get<std::size_t>()};
    }
    const auto& g = j.at("grid");
    r.shape = g.at("shape").get<std::vector<std::size_t>>();
    r.f_min = g.at("f_min").get<double>();
    r.f_max = g.at("f_max").get<double>();
    r.grid_digest = g.at("digest").get<std::string>();
    r.adjacency = g.at("adjacency").get<std::string>();
    r.simplify_tau = g.at("simplify_tau").get<double>();
    r.grid_meta = g.at("meta");
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("invalid landscape report: ") + e.what());
  }
  return r;
}

}  // namespace landscape
