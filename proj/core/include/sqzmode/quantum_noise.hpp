#pragma once

#include <string>
#include <vector>

namespace sqzmode::noise {

/// Quadrature variance in dB relative to shot noise (negative = squeezed).
struct SqueezingLevel {
  double variance_db = 0.0;
  double uncertainty_db = 0.0;

  double linear() const;
};

struct LossStage {
  std::string label;
  double eta = 1.0;
  double eta_uncertainty = 0.0;
};

struct NoiseBudget {
  SqueezingLevel input;
  std::vector<LossStage> stages;
  double total_eta = 1.0;
  double total_eta_uncertainty = 0.0;
  SqueezingLevel predicted_output;
};

struct Verdict {
  bool consistent = true;
  double difference_db = 0.0;  // |measured - predicted|
  double bound_db = 0.0;       // root-sum-square of both uncertainties
  double excess_db = 0.0;      // difference beyond the bound, 0 when consistent
};

/// Beam-splitter loss: eta var_in + (1 - eta), shot noise normalized to 1.
double loss_variance(double var_in, double eta);

double db_from_linear(double variance);
double linear_from_db(double db);

/// Output level after a single loss eta, with first-order propagation of
/// the input and eta uncertainties.
SqueezingLevel predict(const SqueezingLevel& input, double eta, double eta_uncertainty = 0.0);

/// Multiplies the stage transmissions (in sorted order, so the stage order
/// cannot change the bits), applies one loss and propagates uncertainty.
NoiseBudget budget(const SqueezingLevel& input, std::vector<LossStage> stages);

/// Consistent iff |measured - predicted| <= sqrt(sigma_m^2 + sigma_p^2).
Verdict excess_noise_verdict(const SqueezingLevel& measured, const SqueezingLevel& predicted);

}  // namespace sqzmode::noise
