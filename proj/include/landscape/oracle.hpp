#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace landscape {

using ParamVector = std::vector<double>;

// Loss function contract: value, gradient and Hessian-vector product at a
// flat parameter vector. Implementations are immutable after construction and
// may be evaluated concurrently.
class LossOracle {
 public:
  virtual ~LossOracle() = default;

  virtual std::size_t dim() const = 0;
  virtual std::string id() const = 0;

  virtual double value(std::span<const double> theta) const = 0;
  virtual ParamVector gradient(std::span<const double> theta) const = 0;

  // Defaults to a central difference of the gradient along v / |v| with
  // step 1e-4 * max(1, |theta|_inf), rescaled by |v|.
  virtual ParamVector hvp(std::span<const double> theta, std::span<const double> v) const;

  // A natural expansion point: the analytic minimizer where one exists,
  // otherwise the zero vector or a trained checkpoint.
  virtual ParamVector default_origin() const { return ParamVector(dim(), 0.0); }
};

// Checked entry points. Dimension mismatches raise UsageError; a non-finite
// result raises NumericError naming the offending point.
double eval_loss(const LossOracle& oracle, std::span<const double> theta);
ParamVector eval_gradient(const LossOracle& oracle, std::span<const double> theta);
ParamVector eval_hvp(const LossOracle& oracle, std::span<const double> theta, std::span<const double> v);

ParamVector central_difference_hvp(const LossOracle& oracle, std::span<const double> theta,
                                   std::span<const double> v);

// 0.5 * theta^T A theta with symmetric A (row-major, d x d). HVP is exact.
class QuadraticOracle final : public LossOracle {
 public:
  QuadraticOracle(std::vector<double> matrix, std::size_t dim);
  static QuadraticOracle diagonal(std::span<const double> diag);

  std::size_t dim() const override { return dim_; }
  std::string id() const override;
  double value(std::span<const double> theta) const override;
  ParamVector gradient(std::span<const double> theta) const override;
  ParamVector hvp(std::span<const double> theta, std::span<const double> v) const override;

  const std::vector<double>& matrix() const { return matrix_; }

 private:
  ParamVector multiply(std::span<const double> x) const;

  std::vector<double> matrix_;
  std::size_t dim_;
};

// (x^2 - 1)^2 on a single parameter; minima at x = +-1, barrier at 0.
class DoubleWellOracle final : public LossOracle {
 public:
  std::size_t dim() const override { return 1; }
  std::string id() const override { return "double-well"; }
  double value(std::span<const double> theta) const override;
  ParamVector gradient(std::span<const double> theta) const override;
  ParamVector hvp(std::span<const double> theta, std::span<const double> v) const override;
  ParamVector default_origin() const override { return {1.0}; }
};

// sum_i 100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2, minimum at the all-ones vector.
class RosenbrockOracle final : public LossOracle {
 public:
  explicit RosenbrockOracle(std::size_t dim);
  std::size_t dim() const override { return dim_; }
  std::string id() const override;
  double value(std::span<const double> theta) const override;
  ParamVector gradient(std::span<const double> theta) const override;
  ParamVector hvp(std::span<const double> theta, std::span<const double> v) const override;
  ParamVector default_origin() const override { return ParamVector(dim_, 1.0); }

 private:
  std::size_t dim_;
};

struct GaussianWell {
  ParamVector center;
  double depth = 0.0;
  double width = 1.0;
};

// |theta|^2 / 2 - sum_j depth_j exp(-|theta - c_j|^2 / (2 width_j^2)).
class GaussianMixtureOracle final : public LossOracle {
 public:
  GaussianMixtureOracle(std::size_t dim, std::vector<GaussianWell> wells, std::uint64_t seed = 0);

  // Draws `count` wells with centers uniform in [-spread, spread]^dim and
  // depth/width uniform in the given ranges. Deterministic for a fixed seed.
  static GaussianMixtureOracle random(std::size_t dim, std::size_t count, std::uint64_t seed,
                                      double spread = 1.0, double depth_lo = 0.2, double depth_hi = 0.6,
                                      double width_lo = 0.08, double width_hi = 0.2);

  std::size_t dim() const override { return dim_; }
  std::string id() const override;
  double value(std::span<const double> theta) const override;
  ParamVector gradient(std::span<const double> theta) const override;
  ParamVector hvp(std::span<const double> theta, std::span<const double> v) const override;

  const std::vector<GaussianWell>& wells() const { return wells_; }

 private:
  std::size_t dim_;
  std::vector<GaussianWell> wells_;
  std::uint64_t seed_;
};

}  // namespace landscape
