#include "sqzmode/quantum_noise.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "sqzmode/error.hpp"

namespace sqzmode::noise {
namespace {

void check_eta(double eta, const std::string& label) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidArgument("transmission of " + label + " must lie in [0, 1]");
}

}  // namespace

double SqueezingLevel::linear() const { return linear_from_db(variance_db); }

double loss_variance(double var_in, double eta) {
  if (!(var_in > 0.0) || !std::isfinite(var_in)) throw InvalidArgument("input variance must be finite and > 0");
  check_eta(eta, "loss");
  return eta * var_in + (1.0 - eta);
}

double db_from_linear(double variance) {
  if (!(variance > 0.0) || !std::isfinite(variance)) throw InvalidArgument("variance must be finite and > 0");
  return 10.0 * std::log10(variance);
}

double linear_from_db(double db) {
  if (!std::isfinite(db)) throw InvalidArgument("dB value must be finite");
  return std::pow(10.0, db / 10.0);
}

SqueezingLevel predict(const SqueezingLevel& input, double eta, double eta_uncertainty) {
  if (!(input.uncertainty_db >= 0.0) || !(eta_uncertainty >= 0.0)) {
    throw InvalidArgument("uncertainties must be >= 0");
  }
  const double v_in = input.linear();
  const double v_out = loss_variance(v_in, eta);
  const double ln10 = std::log(10.0);
  const double sigma_vin = v_in * ln10 / 10.0 * input.uncertainty_db;
  const double sigma_v = std::hypot(eta * sigma_vin, (v_in - 1.0) * eta_uncertainty);
  return SqueezingLevel{db_from_linear(v_out), 10.0 / ln10 * sigma_v / v_out};
}

NoiseBudget budget(const SqueezingLevel& input, std::vector<LossStage> stages) {
  for (const auto& s : stages) {
    check_eta(s.eta, s.label);
    if (!(s.eta_uncertainty >= 0.0)) throw InvalidArgument("uncertainty of " + s.label + " must be >= 0");
  }
  std::vector<std::pair<double, double>> sorted;
  for (const auto& s : stages) sorted.emplace_back(s.eta, s.eta_uncertainty);
  std::sort(sorted.begin(), sorted.end());
  double total = 1.0;
  for (const auto& [eta, sigma] : sorted) total *= eta;

  // d(total)/d(eta_i) is the product of the other stages.
  double sq = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    double others = 1.0;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
      if (k != i) others *= sorted[k].first;
    }
    const double term = others * sorted[i].second;
    sq += term * term;
  }

  NoiseBudget b;
  b.input = input;
  b.stages = std::move(stages);
  b.total_eta = total;
  b.total_eta_uncertainty = std::sqrt(sq);
  b.predicted_output = predict(input, total, b.total_eta_uncertainty);
  return b;
}

Verdict excess_noise_verdict(const SqueezingLevel& measured, const SqueezingLevel& predicted) {
  if (!std::isfinite(measured.variance_db) || !std::isfinite(predicted.variance_db) ||
      !std::isfinite(measured.uncertainty_db) || !std::isfinite(predicted.uncertainty_db)) {
    throw InvalidArgument("squeezing levels must be finite");
  }
  Verdict v;
  v.difference_db = std::abs(measured.variance_db - predicted.variance_db);
  v.bound_db = std::hypot(measured.uncertainty_db, predicted.uncertainty_db);
  v.consistent = v.difference_db <= v.bound_db;
  v.excess_db = v.consistent ? 0.0 : v.difference_db - v.bound_db;
  return v;
}

}  // namespace sqzmode::noise
