#include "landscape/builtins.hpp"

#include <cmath>
#include <cstdlib>

#include "landscape/error.hpp"
#include "landscape/io.hpp"
#include "landscape/mlp.hpp"

namespace landscape {

namespace {

constexpr std::string_view kDiagPrefix = "quadratic-diag-";

// Entries are '-'-separated; a doubled dash starts a negative entry
// ("quadratic-diag-4--1" is diag(4, -1)).
std::vector<double> parse_diagonal(const std::string& name) {
  std::vector<double> diag;
  const std::string rest = name.substr(kDiagPrefix.size());
  const char* p = rest.c_str();
  for (;;) {
    char* end = nullptr;
    const double v = std::strtod(p, &end);
    if (end == p || !std::isfinite(v)) throw UsageError("cannot parse diagonal entries in '" + name + "'");
    diag.push_back(v);
    if (*end == '\0') break;
    if (*end != '-') throw UsageError("cannot parse diagonal entries in '" + name + "'");
    p = end + 1;
  }
  return diag;
}

std::string joined_names() {
  std::string out;
  for (const auto& n : builtin_names()) out += (out.empty() ? "" : ", ") + n;
  return out;
}

}  // namespace

std::vector<std::string> builtin_names() {
  return {"quadratic", "quadratic-diag-<a>-<b>-...", "double-well", "rosenbrock", "gaussian-mixture", "mlp"};
}

std::unique_ptr<LossOracle> make_builtin(const std::string& name, const nlohmann::json& params) {
  try {
    if (name == "quadratic") {
      const double diag[] = {5.0, 2.0, 1.0};
      return std::make_unique<QuadraticOracle>(QuadraticOracle::diagonal(diag));
    }
    if (name.rfind(kDiagPrefix, 0) == 0) {
      const auto diag = parse_diagonal(name);
      return std::make_unique<QuadraticOracle>(QuadraticOracle::diagonal(diag));
    }
    if (name == "double-well") return std::make_unique<DoubleWellOracle>();
    if (name == "rosenbrock") return std::make_unique<RosenbrockOracle>(params.value("dim", std::size_t{2}));
    if (name == "gaussian-mixture") {
      return std::make_unique<GaussianMixtureOracle>(GaussianMixtureOracle::random(
          params.value("dim", std::size_t{2}), params.value("basins", std::size_t{6}),
          params.value("seed", std::uint64_t{0}), params.value("spread", 1.0)));
    }
    if (name == "mlp") {
      const std::string checkpoint = params.value("checkpoint", std::string{});
      if (checkpoint.empty()) throw UsageError("builtin 'mlp' needs a checkpoint path");
      Checkpoint cp = read_checkpoint(checkpoint);
      MlpSpec spec = cp.sidecar.at("spec").get<MlpSpec>();
      ToyDataset data;
      const std::string dataset = params.value("dataset", std::string{});
      if (!dataset.empty()) {
        data = nlohmann::json::parse(read_file(dataset)).get<ToyDataset>();
      } else if (cp.sidecar.contains("dataset")) {
        data = cp.sidecar.at("dataset").get<ToyDataset>();
      } else {
        throw UsageError("builtin 'mlp' needs a dataset (flag or checkpoint sidecar)");
      }
      return std::make_unique<MlpOracle>(std::move(spec), std::move(data), std::move(cp.params));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("invalid parameters for builtin '" + name + "': " + e.what());
  }
  throw UsageError("unknown builtin '" + name + "'; available: " + joined_names());
}

}  // namespace landscape
