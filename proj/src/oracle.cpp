#include "landscape/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "landscape/digest.hpp"
#include "landscape/error.hpp"
#include "landscape/random.hpp"

namespace landscape {

namespace {

void check_dim(const LossOracle& oracle, std::size_t got, const char* what) {
  if (got != oracle.dim()) {
    throw UsageError(std::string(what) + " has length " + std::to_string(got) + " but oracle '" + oracle.id() +
                     "' expects " + std::to_string(oracle.dim()));
  }
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::string shortest(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

}  // namespace

ParamVector central_difference_hvp(const LossOracle& oracle, std::span<const double> theta,
                                   std::span<const double> v) {
  const std::size_t d = theta.size();
  const double vnorm = norm2(v);
  if (vnorm == 0.0) return ParamVector(d, 0.0);

  double inf_norm = 0.0;
  for (double x : theta) inf_norm = std::max(inf_norm, std::abs(x));
  const double eps = 1e-4 * std::max(1.0, inf_norm);

  ParamVector plus(theta.begin(), theta.end());
  ParamVector minus(theta.begin(), theta.end());
  for (std::size_t i = 0; i < d; ++i) {
    const double step = eps * (v[i] / vnorm);
    plus[i] += step;
    minus[i] -= step;
  }
  const ParamVector gp = oracle.gradient(plus);
  const ParamVector gm = oracle.gradient(minus);
  ParamVector out(d);
  const double scale = vnorm / (2.0 * eps);
  for (std::size_t i = 0; i < d; ++i) out[i] = (gp[i] - gm[i]) * scale;
  return out;
}

ParamVector LossOracle::hvp(std::span<const double> theta, std::span<const double> v) const {
  return central_difference_hvp(*this, theta, v);
}

double eval_loss(const LossOracle& oracle, std::span<const double> theta) {
  check_dim(oracle, theta.size(), "parameter vector");
  const double value = oracle.value(theta);
  if (!std::isfinite(value)) {
    throw NumericError("non-finite loss at theta = " + format_point(theta.data(), theta.size()));
  }
  return value;
}

ParamVector eval_gradient(const LossOracle& oracle, std::span<const double> theta) {
  check_dim(oracle, theta.size(), "parameter vector");
  ParamVector g = oracle.gradient(theta);
  if (!all_finite(g)) {
    throw NumericError("non-finite gradient at theta = " + format_point(theta.data(), theta.size()));
  }
  return g;
}

ParamVector eval_hvp(const LossOracle& oracle, std::span<const double> theta, std::span<const double> v) {
  check_dim(oracle, theta.size(), "parameter vector");
  check_dim(oracle, v.size(), "direction vector");
  if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) return ParamVector(v.size(), 0.0);
  ParamVector hv = oracle.hvp(theta, v);
  if (!all_finite(hv)) {
    throw NumericError("non-finite Hessian-vector product at theta = " + format_point(theta.data(), theta.size()));
  }
  return hv;
}

// ---------------------------------------------------------------------------

QuadraticOracle::QuadraticOracle(std::vector<double> matrix, std::size_t dim)
    : matrix_(std::move(matrix)), dim_(dim) {
  if (dim_ == 0) throw UsageError("quadratic oracle needs dim >= 1");
  if (matrix_.size() != dim_ * dim_) {
    throw UsageError("quadratic matrix has " + std::to_string(matrix_.size()) + " entries, expected " +
                     std::to_string(dim_ * dim_));
  }
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = i + 1; j < dim_; ++j) {
      if (matrix_[i * dim_ + j] != matrix_[j * dim_ + i]) {
        throw UsageError("quadratic matrix is not symmetric at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
      }
    }
  }
  if (!all_finite(matrix_)) throw NumericError("quadratic matrix has non-finite entries");
}

QuadraticOracle QuadraticOracle::diagonal(std::span<const double> diag) {
  const std::size_t d = diag.size();
  std::vector<double> m(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) m[i * d + i] = diag[i];
  return QuadraticOracle(std::move(m), d);
}

std::string QuadraticOracle::id() const {
  bool diagonal = true;
  for (std::size_t i = 0; i < dim_ && diagonal; ++i) {
    for (std::size_t j = 0; j < dim_; ++j) {
      if (i != j && matrix_[i * dim_ + j] != 0.0) {
        diagonal = false;
        break;
      }
    }
  }
  if (diagonal && dim_ <= 8) {
    std::string name = "quadratic-diag";
    for (std::size_t i = 0; i < dim_; ++i) name += "-" + shortest(matrix_[i * dim_ + i]);
    return name;
  }
  Fnv1a h;
  h.update(matrix_);
  return "quadratic-" + std::to_string(dim_) + "-" + h.hex();
}

ParamVector QuadraticOracle::multiply(std::span<const double> x) const {
  ParamVector out(dim_, 0.0);
  for (std::size_t i = 0; i < dim_; ++i) {
    double s = 0.0;
    const double* row = matrix_.data() + i * dim_;
    for (std::size_t j = 0; j < dim_; ++j) s += row[j] * x[j];
    out[i] = s;
  }
  return out;
}

double QuadraticOracle::value(std::span<const double> theta) const {
  const ParamVector ax = multiply(theta);
  double s = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) s += theta[i] * ax[i];
  return 0.5 * s;
}

ParamVector QuadraticOracle::gradient(std::span<const double> theta) const { return multiply(theta); }

ParamVector QuadraticOracle::hvp(std::span<const double>, std::span<const double> v) const { return multiply(v); }

// ---------------------------------------------------------------------------

double DoubleWellOracle::value(std::span<const double> theta) const {
  const double s = theta[0] * theta[0] - 1.0;
  return s * s;
}

ParamVector DoubleWellOracle::gradient(std::span<const double> theta) const {
  const double x = theta[0];
  return {4.0 * x * (x * x - 1.0)};
}

ParamVector DoubleWellOracle::hvp(std::span<const double> theta, std::span<const double> v) const {
  const double x = theta[0];
  return {(12.0 * x * x - 4.0) * v[0]};
}

// ---------------------------------------------------------------------------

RosenbrockOracle::RosenbrockOracle(std::size_t dim) : dim_(dim) {
  if (dim_ < 2) throw UsageError("rosenbrock needs dim >= 2");
}

std::string RosenbrockOracle::id() const { return "rosenbrock-" + std::to_string(dim_); }

double RosenbrockOracle::value(std::span<const double> theta) const {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < dim_; ++i) {
    const double a = theta[i + 1] - theta[i] * theta[i];
    const double b = 1.0 - theta[i];
    s += 100.0 * a * a + b * b;
  }
  return s;
}

ParamVector RosenbrockOracle::gradient(std::span<const double> theta) const {
  ParamVector g(dim_, 0.0);
  for (std::size_t i = 0; i + 1 < dim_; ++i) {
    const double a = theta[i + 1] - theta[i] * theta[i];
    g[i] += -400.0 * theta[i] * a - 2.0 * (1.0 - theta[i]);
    g[i + 1] += 200.0 * a;
  }
  return g;
}

ParamVector RosenbrockOracle::hvp(std::span<const double> theta, std::span<const double> v) const {
  ParamVector hv(dim_, 0.0);
  for (std::size_t i = 0; i + 1 < dim_; ++i) {
    const double x = theta[i], y = theta[i + 1];
    const double hxx = 1200.0 * x * x - 400.0 * y + 2.0;
    const double hxy = -400.0 * x;
    hv[i] += hxx * v[i] + hxy * v[i + 1];
    hv[i + 1] += hxy * v[i] + 200.0 * v[i + 1];
  }
  return hv;
}

// ---------------------------------------------------------------------------

GaussianMixtureOracle::GaussianMixtureOracle(std::size_t dim, std::vector<GaussianWell> wells, std::uint64_t seed)
    : dim_(dim), wells_(std::move(wells)), seed_(seed) {
  if (dim_ == 0) throw UsageError("gaussian mixture needs dim >= 1");
  for (const auto& w : wells_) {
    if (w.center.size() != dim_) throw UsageError("gaussian well center has wrong dimension");
    if (!(w.width > 0.0)) throw UsageError("gaussian well width must be positive");
  }
}

GaussianMixtureOracle GaussianMixtureOracle::random(std::size_t dim, std::size_t count, std::uint64_t seed,
                                                    double spread, double depth_lo, double depth_hi,
                                                    double width_lo, double width_hi) {
  Rng rng(seed);
  std::vector<GaussianWell> wells(count);
  for (auto& w : wells) {
    w.center.resize(dim);
    for (auto& c : w.center) c = rng.uniform(-spread, spread);
    w.depth = rng.uniform(depth_lo, depth_hi);
    w.width = rng.uniform(width_lo, width_hi);
  }
  return GaussianMixtureOracle(dim, std::move(wells), seed);
}

std::string GaussianMixtureOracle::id() const {
  Fnv1a h;
  for (const auto& w : wells_) {
    h.update(w.center);
    h.update(&w.depth, sizeof w.depth);
    h.update(&w.width, sizeof w.width);
  }
  return "gaussian-mixture-" + std::to_string(dim_) + "-" + std::to_string(wells_.size()) + "-seed" +
         std::to_string(seed_) + "-" + h.hex().substr(0, 8);
}

double GaussianMixtureOracle::value(std::span<const double> theta) const {
  double s = 0.0;
  for (double x : theta) s += x * x;
  double out = 0.5 * s;
  for (const auto& w : wells_) {
    double r2 = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      const double d = theta[i] - w.center[i];
      r2 += d * d;
    }
    out -= w.depth * std::exp(-r2 / (2.0 * w.width * w.width));
  }
  return out;
}

ParamVector GaussianMixtureOracle::gradient(std::span<const double> theta) const {
  ParamVector g(theta.begin(), theta.end());
  for (const auto& w : wells_) {
    double r2 = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      const double d = theta[i] - w.center[i];
      r2 += d * d;
    }
    const double s2 = w.width * w.width;
    const double coef = w.depth * std::exp(-r2 / (2.0 * s2)) / s2;
    for (std::size_t i = 0; i < dim_; ++i) g[i] += coef * (theta[i] - w.center[i]);
  }
  return g;
}

// Each well contributes depth e / s2 (I - d d^T / s2) with d = theta - c.
ParamVector GaussianMixtureOracle::hvp(std::span<const double> theta, std::span<const double> v) const {
  ParamVector hv(v.begin(), v.end());
  for (const auto& w : wells_) {
    double r2 = 0.0, dv = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      const double d = theta[i] - w.center[i];
      r2 += d * d;
      dv += d * v[i];
    }
    const double s2 = w.width * w.width;
    const double coef = w.depth * std::exp(-r2 / (2.0 * s2)) / s2;
    for (std::size_t i = 0; i < dim_; ++i) hv[i] += coef * (v[i] - (theta[i] - w.center[i]) * dv / s2);
  }
  return hv;
}

}  // namespace landscape
