#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "landscape/oracle.hpp"
#include "landscape/spectral.hpp"

namespace landscape {

// One grid axis: `steps` coordinates spread evenly over [-range, range].
struct AxisSpec {
  double range = 1.0;
  std::size_t steps = 3;
  std::optional<double> eigenvalue;

  double coordinate(std::size_t j) const;
  std::vector<double> coordinates() const;
};

// Scalar field on a Cartesian grid. Values are flat row-major with the last
// axis fastest. Construction rejects non-finite values.
class LandscapeGrid {
 public:
  LandscapeGrid(std::vector<AxisSpec> axes, std::vector<double> values,
                nlohmann::json meta = nlohmann::json::object());

  // Unit-range axes for externally supplied values.
  static LandscapeGrid from_values(std::vector<std::size_t> shape, std::vector<double> values,
                                   nlohmann::json meta = nlohmann::json::object());

  std::size_t ndim() const { return axes_.size(); }
  std::size_t size() const { return values_.size(); }
  std::vector<std::size_t> shape() const;
  const std::vector<AxisSpec>& axes() const { return axes_; }
  const std::vector<double>& values() const { return values_; }
  double value(std::size_t index) const { return values_[index]; }
  const nlohmann::json& meta() const { return meta_; }
  nlohmann::json& meta() { return meta_; }

  double f_min() const { return f_min_; }
  double f_max() const { return f_max_; }
  double value_range() const { return f_max_ - f_min_; }

  std::vector<std::size_t> unravel(std::size_t index) const;
  std::size_t ravel(std::span<const std::size_t> coords) const;
  std::vector<double> alpha(std::size_t index) const;

  // Digest of shape and values; ties topology results back to their grid.
  std::string digest() const;

  // Copy with values mapped through f -> a * f + b (a > 0 keeps the topology).
  LandscapeGrid affine(double a, double b) const;

 private:
  std::vector<AxisSpec> axes_;
  std::vector<double> values_;
  nlohmann::json meta_;
  double f_min_ = 0.0;
  double f_max_ = 0.0;
};

enum class AxisScaling { kUniform, kInverseEigenvalue };

// theta + sum_i alpha_i delta_i with alpha_i on axes[i].
struct SubspaceSpec {
  ParamVector origin;
  std::vector<ParamVector> directions;
  std::vector<AxisSpec> axes;
  AxisScaling scaling = AxisScaling::kUniform;

  // Directions unit and pairwise orthogonal within 1e-8; steps odd >= 3.
  void validate() const;
};

inline constexpr double kEigenvalueFloor = 1e-8;

// Uses the first n eigenvectors of `spectral`. Inverse-eigenvalue scaling
// sets r_i = r / sqrt(max(|lambda_i|, 1e-8)).
SubspaceSpec build_subspace(const SpectralResult& spectral, ParamVector origin, std::size_t n, double range,
                            std::size_t steps, AxisScaling scaling = AxisScaling::kUniform);

SubspaceSpec build_subspace(ParamVector origin, std::vector<ParamVector> directions, double range, std::size_t steps);

// Thread count for grid evaluation: LANDSCAPE_THREADS if set, otherwise the
// hardware concurrency.
std::size_t default_thread_count();

// Evaluates the loss at every grid point (exactly prod(steps) oracle calls).
// Output is independent of `threads`. threads = 0 picks default_thread_count().
LandscapeGrid sample_grid(const LossOracle& oracle, const SubspaceSpec& spec, std::size_t threads = 0);

std::string scaling_name(AxisScaling s);
AxisScaling parse_scaling(const std::string& name);

}  // namespace landscape
