#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "landscape/oracle.hpp"

namespace landscape {

enum class EigenOrdering { kMagnitude, kAlgebraic };

struct SpectralConfig {
  std::size_t k = 2;
  std::size_t max_iter = 5000;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  EigenOrdering ordering = EigenOrdering::kMagnitude;
};

// Eigenpairs of the Hessian at theta, probed only through HVPs.
// Each eigenvector is unit length with its largest-magnitude entry positive.
struct SpectralResult {
  std::size_t dim = 0;
  EigenOrdering ordering = EigenOrdering::kMagnitude;
  std::vector<double> eigenvalues;
  std::vector<ParamVector> eigenvectors;
  std::vector<std::size_t> iterations;
  std::vector<double> residuals;  // |H v - lambda v|
  std::vector<bool> converged;
  bool degenerate = false;  // Hessian vanished on the probed subspace

  bool all_converged() const;
};

struct TraceEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

// Power iteration with deflation: every iterate is re-orthogonalized against
// the eigenvectors already accepted. A pair is accepted once both the
// Rayleigh-quotient change and the residual drop below tol * max(1, |lambda|);
// otherwise it is returned after max_iter with converged = false.
SpectralResult top_eigenpairs(const LossOracle& oracle, std::span<const double> theta, const SpectralConfig& cfg);

// Signed eigenvalue of largest magnitude (power iteration, no deflation).
// `degenerate` is set when the Hessian vanishes along the iterate.
double max_eigenvalue(const LossOracle& oracle, std::span<const double> theta, const SpectralConfig& cfg,
                      bool* degenerate = nullptr);

// Hutchinson estimator: mean of z^T H z over Rademacher z; stderr is the
// sample standard deviation over sqrt(samples).
TraceEstimate hutchinson_trace(const LossOracle& oracle, std::span<const double> theta, std::size_t samples,
                               std::uint64_t seed);

// {eigenvalues, residuals, iterations, converged, degenerate, ordering, dim}
nlohmann::json spectral_to_json(const SpectralResult& result);
nlohmann::json trace_to_json(const TraceEstimate& trace);

}  // namespace landscape
