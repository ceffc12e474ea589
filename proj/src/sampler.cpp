#include "landscape/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "landscape/digest.hpp"
#include "landscape/error.hpp"

namespace landscape {

double AxisSpec::coordinate(std::size_t j) const {
  if (steps == 1) return 0.0;
  // (j - c) / c negates exactly under j -> steps-1-j, so the axis is symmetric
  // and the centre of an odd axis is exactly zero.
  const double c = 0.5 * static_cast<double>(steps - 1);
  return range * ((static_cast<double>(j) - c) / c);
}

std::vector<double> AxisSpec::coordinates() const {
  std::vector<double> out(steps);
  for (std::size_t j = 0; j < steps; ++j) out[j] = coordinate(j);
  return out;
}

LandscapeGrid::LandscapeGrid(std::vector<AxisSpec> axes, std::vector<double> values, nlohmann::json meta)
    : axes_(std::move(axes)), values_(std::move(values)), meta_(std::move(meta)) {
  if (axes_.empty()) throw UsageError("grid needs at least one axis");
  std::size_t n = 1;
  for (const auto& a : axes_) {
    if (a.steps == 0) throw UsageError("grid axis must have at least one step");
    if (!(a.range > 0.0) || !std::isfinite(a.range)) throw UsageError("grid axis range must be positive and finite");
    n *= a.steps;
  }
  if (values_.size() != n) {
    throw FormatError("grid shape implies " + std::to_string(n) + " values but " + std::to_string(values_.size()) +
                      " were supplied");
  }
  if (!meta_.is_object()) throw FormatError("grid meta must be a JSON object");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw NumericError("non-finite grid value at linear index " + std::to_string(i));
    }
  }
  const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
  f_min_ = *lo;
  f_max_ = *hi;
}

LandscapeGrid LandscapeGrid::from_values(std::vector<std::size_t> shape, std::vector<double> values,
                                         nlohmann::json meta) {
  std::vector<AxisSpec> axes;
  for (std::size_t k : shape) axes.push_back(AxisSpec{1.0, k, std::nullopt});
  return LandscapeGrid(std::move(axes), std::move(values), std::move(meta));
}

std::vector<std::size_t> LandscapeGrid::shape() const {
  std::vector<std::size_t> s;
  for (const auto& a : axes_) s.push_back(a.steps);
  return s;
}

std::vector<std::size_t> LandscapeGrid::unravel(std::size_t index) const {
  std::vector<std::size_t> coords(axes_.size());
  for (std::size_t d = axes_.size(); d-- > 0;) {
    coords[d] = index % axes_[d].steps;
    index /= axes_[d].steps;
  }
  return coords;
}

std::size_t LandscapeGrid::ravel(std::span<const std::size_t> coords) const {
  std::size_t index = 0;
  for (std::size_t d = 0; d < axes_.size(); ++d) index = index * axes_[d].steps + coords[d];
  return index;
}

std::vector<double> LandscapeGrid::alpha(std::size_t index) const {
  const auto coords = unravel(index);
  std::vector<double> out(coords.size());
  for (std::size_t d = 0; d < coords.size(); ++d) out[d] = axes_[d].coordinate(coords[d]);
  return out;
}

std::string LandscapeGrid::digest() const {
  Fnv1a h;
  for (const auto& a : axes_) h.update_u64(a.steps);
  h.update(values_);
  return h.hex();
}

LandscapeGrid LandscapeGrid::affine(double a, double b) const {
  std::vector<double> v(values_);
  for (double& x : v) x = a * x + b;
  return LandscapeGrid(axes_, std::move(v), meta_);
}

// ---------------------------------------------------------------------------

void SubspaceSpec::validate() const {
  if (directions.empty()) throw UsageError("subspace needs at least one direction");
  if (directions.size() != axes.size()) throw UsageError("subspace has different direction and axis counts");
  for (std::size_t i = 0; i < directions.size(); ++i) {
    if (directions[i].size() != origin.size()) {
      throw UsageError("direction " + std::to_string(i) + " has length " + std::to_string(directions[i].size()) +
                       ", origin has " + std::to_string(origin.size()));
    }
    const auto& a = axes[i];
    if (a.steps < 3 || a.steps % 2 == 0) {
      throw UsageError("axis " + std::to_string(i) + " has " + std::to_string(a.steps) +
                       " steps; steps must be odd and >= 3 so that alpha = 0 (the unperturbed model) is sampled");
    }
    if (!(a.range > 0.0)) throw UsageError("axis range must be positive");
    for (std::size_t j = i; j < directions.size(); ++j) {
      double dot = 0.0;
      for (std::size_t t = 0; t < origin.size(); ++t) dot += directions[i][t] * directions[j][t];
      const double expected = (i == j) ? 1.0 : 0.0;
      if (std::abs(dot - expected) > 1e-8) {
        throw UsageError(i == j ? "direction " + std::to_string(i) + " is not unit length"
                                : "directions " + std::to_string(i) + " and " + std::to_string(j) + " are not orthogonal");
      }
    }
  }
  if (scaling == AxisScaling::kInverseEigenvalue) {
    for (const auto& a : axes) {
      if (!a.eigenvalue) throw UsageError("inverse-eigenvalue scaling requires eigenvalues for every axis");
    }
  }
}

SubspaceSpec build_subspace(const SpectralResult& spectral, ParamVector origin, std::size_t n, double range,
                            std::size_t steps, AxisScaling scaling) {
  if (n == 0 || n > spectral.eigenvectors.size()) {
    throw UsageError("subspace dimension " + std::to_string(n) + " exceeds the " +
                     std::to_string(spectral.eigenvectors.size()) + " available eigenvectors");
  }
  if (scaling == AxisScaling::kInverseEigenvalue && spectral.eigenvalues.size() < n) {
    throw UsageError("inverse-eigenvalue scaling requires eigenvalues");
  }
  if (!(range > 0.0)) throw UsageError("range must be positive");
  if (steps < 3 || steps % 2 == 0) {
    throw UsageError("steps = " + std::to_string(steps) +
                     " is invalid; steps must be odd and >= 3 so that alpha = 0 (the unperturbed model) is sampled");
  }
  SubspaceSpec spec;
  spec.origin = std::move(origin);
  spec.scaling = scaling;
  for (std::size_t i = 0; i < n; ++i) {
    spec.directions.push_back(spectral.eigenvectors[i]);
    AxisSpec axis{range, steps, std::nullopt};
    if (i < spectral.eigenvalues.size()) axis.eigenvalue = spectral.eigenvalues[i];
    if (scaling == AxisScaling::kInverseEigenvalue) {
      axis.range = range / std::sqrt(std::max(std::abs(spectral.eigenvalues[i]), kEigenvalueFloor));
    }
    spec.axes.push_back(axis);
  }
  spec.validate();
  return spec;
}

SubspaceSpec build_subspace(ParamVector origin, std::vector<ParamVector> directions, double range, std::size_t steps) {
  SubspaceSpec spec;
  spec.origin = std::move(origin);
  spec.directions = std::move(directions);
  spec.axes.assign(spec.directions.size(), AxisSpec{range, steps, std::nullopt});
  spec.validate();
  return spec;
}

std::size_t default_thread_count() {
  if (const char* env = std::getenv("LANDSCAPE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

LandscapeGrid sample_grid(const LossOracle& oracle, const SubspaceSpec& spec, std::size_t threads) {
  spec.validate();
  if (spec.origin.size() != oracle.dim()) {
    throw UsageError("subspace origin has length " + std::to_string(spec.origin.size()) + " but oracle '" +
                     oracle.id() + "' expects " + std::to_string(oracle.dim()));
  }
  std::size_t total = 1;
  for (const auto& a : spec.axes) total *= a.steps;

  std::vector<std::vector<double>> coords;
  for (const auto& a : spec.axes) coords.push_back(a.coordinates());

  std::vector<double> values(total, 0.0);
  const std::size_t workers = std::clamp<std::size_t>(threads == 0 ? default_thread_count() : threads, 1, total);
  std::vector<std::size_t> first_bad(workers, std::numeric_limits<std::size_t>::max());

  auto run = [&](std::size_t worker) {
    const std::size_t d = spec.origin.size();
    const std::size_t n = spec.axes.size();
    ParamVector point(d);
    std::vector<std::size_t> idx(n);
    for (std::size_t p = worker; p < total; p += workers) {
      std::size_t rest = p;
      for (std::size_t a = n; a-- > 0;) {
        idx[a] = rest % spec.axes[a].steps;
        rest /= spec.axes[a].steps;
      }
      std::copy(spec.origin.begin(), spec.origin.end(), point.begin());
      for (std::size_t a = 0; a < n; ++a) {
        const double alpha = coords[a][idx[a]];
        const auto& dir = spec.directions[a];
        for (std::size_t t = 0; t < d; ++t) point[t] += alpha * dir[t];
      }
      const double v = oracle.value(point);
      values[p] = v;
      if (!std::isfinite(v) && first_bad[worker] == std::numeric_limits<std::size_t>::max()) first_bad[worker] = p;
    }
  };

  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }

  const std::size_t bad = *std::min_element(first_bad.begin(), first_bad.end());
  if (bad != std::numeric_limits<std::size_t>::max()) {
    std::vector<double> alpha;
    std::size_t rest = bad;
    std::vector<std::size_t> idx(spec.axes.size());
    for (std::size_t a = spec.axes.size(); a-- > 0;) {
      idx[a] = rest % spec.axes[a].steps;
      rest /= spec.axes[a].steps;
    }
    for (std::size_t a = 0; a < idx.size(); ++a) alpha.push_back(coords[a][idx[a]]);
    throw NumericError("non-finite loss at alpha = " + format_point(alpha.data(), alpha.size()));
  }

  Fnv1a origin_hash;
  origin_hash.update(spec.origin);
  nlohmann::json meta = {{"oracle", oracle.id()},
                         {"origin_digest", origin_hash.hex()},
                         {"scaling", scaling_name(spec.scaling)}};
  nlohmann::json eig = nlohmann::json::array();
  bool have_eig = false;
  for (const auto& a : spec.axes) {
    if (a.eigenvalue) {
      eig.push_back(*a.eigenvalue);
      have_eig = true;
    } else {
      eig.push_back(nullptr);
    }
  }
  if (have_eig) meta["eigenvalues"] = std::move(eig);
  return LandscapeGrid(spec.axes, std::move(values), std::move(meta));
}

std::string scaling_name(AxisScaling s) { return s == AxisScaling::kUniform ? "uniform" : "inverse-eigenvalue"; }

AxisScaling parse_scaling(const std::string& name) {
  if (name == "uniform") return AxisScaling::kUniform;
  if (name == "inverse-eigenvalue") return AxisScaling::kInverseEigenvalue;
  throw UsageError("unknown scaling '" + name + "' (expected uniform or inverse-eigenvalue)");
}

}  // namespace landscape
