#include "landscape/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "landscape/error.hpp"
#include "landscape/random.hpp"

namespace landscape {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void scale(ParamVector& v, double s) {
  for (double& x : v) x *= s;
}

// Two passes of classical Gram-Schmidt keep the deflated iterate orthogonal
// to machine precision even after many iterations.
void orthogonalize(ParamVector& v, const std::vector<ParamVector>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : basis) {
      const double c = dot(v, b);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
    }
  }
}

void fix_sign(ParamVector& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  }
  if (v[best] < 0.0) scale(v, -1.0);
}

ParamVector random_unit(Rng& rng, std::size_t d) {
  ParamVector v(d);
  for (double& x : v) x = rng.normal();
  scale(v, 1.0 / norm(v));
  return v;
}

void validate(const LossOracle& oracle, std::span<const double> theta, const SpectralConfig& cfg) {
  if (theta.size() != oracle.dim()) {
    throw UsageError("parameter vector has length " + std::to_string(theta.size()) + ", oracle expects " +
                     std::to_string(oracle.dim()));
  }
  if (cfg.k < 1 || cfg.k > oracle.dim()) {
    throw UsageError("spectral k must lie in [1, " + std::to_string(oracle.dim()) + "], got " + std::to_string(cfg.k));
  }
  if (!(cfg.tol > 0.0)) throw UsageError("spectral tolerance must be positive");
  if (cfg.max_iter == 0) throw UsageError("spectral max_iter must be positive");
}

struct PowerOutcome {
  ParamVector vector;
  double eigenvalue = 0.0;
  double residual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  bool degenerate = false;
};

// Power iteration on (H + shift I) restricted to the complement of `basis`.
// The reported eigenvalue is the Rayleigh quotient of H itself.
PowerOutcome power_iterate(const LossOracle& oracle, std::span<const double> theta, const SpectralConfig& cfg,
                           const std::vector<ParamVector>& basis, double shift, Rng& rng) {
  const std::size_t d = oracle.dim();
  PowerOutcome out;
  out.vector = random_unit(rng, d);
  orthogonalize(out.vector, basis);
  double n0 = norm(out.vector);
  if (n0 == 0.0) {
    out.degenerate = true;
    return out;
  }
  scale(out.vector, 1.0 / n0);

  // Once accepted, the pair keeps iterating while the residual still falls, so
  // later deflated pairs are not limited by this vector's error.
  double previous = 0.0;
  PowerOutcome accepted;
  for (std::size_t it = 1; it <= cfg.max_iter; ++it) {
    ParamVector hv = eval_hvp(oracle, theta, out.vector);
    const double lambda = dot(out.vector, hv);
    ParamVector r = hv;
    for (std::size_t i = 0; i < d; ++i) r[i] -= lambda * out.vector[i];
    out.eigenvalue = lambda;
    out.residual = norm(r);
    out.iterations = it;

    const double tolerance = cfg.tol * std::max(1.0, std::abs(lambda));
    if (norm(hv) == 0.0) {
      out.degenerate = true;
      out.converged = true;
      out.eigenvalue = 0.0;
      out.residual = 0.0;
      return out;
    }
    if (accepted.converged) {
      if (out.residual >= 0.999 * accepted.residual) return accepted;
      accepted = out;
      accepted.converged = true;
      if (out.residual <= 1e-3 * tolerance) return accepted;
    } else if (it > 1 && std::abs(lambda - previous) <= tolerance && out.residual <= tolerance) {
      accepted = out;
      accepted.converged = true;
    }
    previous = lambda;

    for (std::size_t i = 0; i < d; ++i) hv[i] += shift * out.vector[i];
    orthogonalize(hv, basis);
    const double nh = norm(hv);
    if (nh == 0.0) {
      // Shifted operator annihilates the iterate: it is an eigenvector with eigenvalue -shift.
      if (accepted.converged) return accepted;
      out.converged = out.residual <= tolerance;
      return out;
    }
    scale(hv, 1.0 / nh);
    out.vector = std::move(hv);
  }
  return accepted.converged ? accepted : out;
}

}  // namespace

bool SpectralResult::all_converged() const {
  return std::all_of(converged.begin(), converged.end(), [](bool c) { return c; });
}

SpectralResult top_eigenpairs(const LossOracle& oracle, std::span<const double> theta, const SpectralConfig& cfg) {
  validate(oracle, theta, cfg);
  Rng rng(cfg.seed);

  double shift = 0.0;
  if (cfg.ordering == EigenOrdering::kAlgebraic) {
    // Shifting by the spectral radius makes the largest algebraic eigenvalue dominant.
    Rng probe(cfg.seed ^ 0x5bd1e995ULL);
    const auto dominant = power_iterate(oracle, theta, cfg, {}, 0.0, probe);
    shift = std::abs(dominant.eigenvalue);
  }

  SpectralResult result;
  result.dim = oracle.dim();
  result.ordering = cfg.ordering;
  bool any_degenerate = false;
  for (std::size_t pair = 0; pair < cfg.k; ++pair) {
    PowerOutcome p = power_iterate(oracle, theta, cfg, result.eigenvectors, shift, rng);
    any_degenerate = any_degenerate || p.degenerate;
    orthogonalize(p.vector, result.eigenvectors);
    scale(p.vector, 1.0 / norm(p.vector));
    fix_sign(p.vector);
    result.eigenvalues.push_back(p.eigenvalue);
    result.eigenvectors.push_back(std::move(p.vector));
    result.iterations.push_back(p.iterations);
    result.residuals.push_back(p.residual);
    result.converged.push_back(p.converged);
  }
  result.degenerate = any_degenerate;

  // Deflation finds pairs in roughly the requested order; enforce it exactly.
  std::vector<std::size_t> order(cfg.k);
  for (std::size_t i = 0; i < cfg.k; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double la = result.eigenvalues[a], lb = result.eigenvalues[b];
    return cfg.ordering == EigenOrdering::kMagnitude ? std::abs(la) > std::abs(lb) : la > lb;
  });
  SpectralResult sorted = result;
  for (std::size_t i = 0; i < cfg.k; ++i) {
    sorted.eigenvalues[i] = result.eigenvalues[order[i]];
    sorted.eigenvectors[i] = result.eigenvectors[order[i]];
    sorted.iterations[i] = result.iterations[order[i]];
    sorted.residuals[i] = result.residuals[order[i]];
    sorted.converged[i] = result.converged[order[i]];
  }
  return sorted;
}

double max_eigenvalue(const LossOracle& oracle, std::span<const double> theta, const SpectralConfig& cfg,
                      bool* degenerate) {
  SpectralConfig one = cfg;
  one.k = 1;
  validate(oracle, theta, one);
  Rng rng(cfg.seed);
  const PowerOutcome p = power_iterate(oracle, theta, one, {}, 0.0, rng);
  if (degenerate) *degenerate = p.degenerate;
  return p.eigenvalue;
}

TraceEstimate hutchinson_trace(const LossOracle& oracle, std::span<const double> theta, std::size_t samples,
                               std::uint64_t seed) {
  if (samples < 1) throw UsageError("hutchinson trace needs at least one sample");
  if (theta.size() != oracle.dim()) throw UsageError("parameter vector length does not match oracle dimension");
  Rng rng(seed);
  const std::size_t d = oracle.dim();
  std::vector<double> draws(samples);
  ParamVector z(d);
  for (std::size_t s = 0; s < samples; ++s) {
    for (double& x : z) x = rng.rademacher();
    draws[s] = dot(z, eval_hvp(oracle, theta, z));
  }
  double mean = 0.0;
  for (double x : draws) mean += x;
  mean /= static_cast<double>(samples);
  double var = 0.0;
  if (samples > 1) {
    for (double x : draws) var += (x - mean) * (x - mean);
    var /= static_cast<double>(samples - 1);
  }
  TraceEstimate t;
  t.estimate = mean;
  t.standard_error = std::sqrt(var / static_cast<double>(samples));
  t.samples = samples;
  return t;
}

nlohmann::json spectral_to_json(const SpectralResult& r) {
  nlohmann::json conv = nlohmann::json::array();
  for (bool c : r.converged) conv.push_back(c);
  return nlohmann::json{{"dim", r.dim},
                        {"ordering", r.ordering == EigenOrdering::kMagnitude ? "magnitude" : "algebraic"},
                        {"eigenvalues", r.eigenvalues},
                        {"residuals", r.residuals},
                        {"iterations", r.iterations},
                        {"converged", std::move(conv)},
                        {"degenerate", r.degenerate}};
}

nlohmann::json trace_to_json(const TraceEstimate& t) {
  return nlohmann::json{{"estimate", t.estimate}, {"stderr", t.standard_error}, {"samples", t.samples}};
}

}  // namespace landscape
