#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sqzmode/analysis.hpp"
#include "sqzmode/config.hpp"
#include "sqzmode/field.hpp"
#include "sqzmode/hologram.hpp"
#include "sqzmode/quantum_noise.hpp"

namespace sqzmode::app {

struct ModeResult {
  std::string mode_id;
  bool ok = true;
  std::string error;

  double eta_order = 0.0;   // first-order band power / input power
  double eta_iris = 0.0;    // power through the iris / input power
  double eta_total = 0.0;   // all power reaching the detection window
  double eta_far_field = 0.0;  // far-field order +1 power / input power
  double eta_grating = 0.0;    // eta_far_field / (eta_d eta_r)
  double first_order_x = 0.0;  // expected lambda z / period, metres
  Vec2 iris_center;
  double iris_radius = 0.0;
  double beam_radius = 0.0;  // second-moment radius of the first order

  double fidelity = 0.0;
  int rings = 0;
  bool rings_low_confidence = false;
  bool central_null = false;
  std::optional<int> expected_rings;
  std::optional<bool> expected_null;
  bool topology_ok = true;
  analysis::FitResult fit;

  noise::NoiseBudget budget;
  std::optional<MeasuredValue> measured;
  std::optional<noise::Verdict> verdict;

  std::vector<std::string> warnings;
  std::vector<std::filesystem::path> artifacts;
};

/// Fields and images behind a ModeResult.
struct Simulation {
  ModeResult result;
  ModeSetup setup;
  holo::Hologram hologram;
  ComplexField detection;   // full detection-plane field
  ComplexField reference;   // ideal target through the same optics
  RealImage crop;           // iris-masked intensity around the first order
  RealImage reference_crop;
  analysis::LineSection section;
  ModeSpec detection_spec;  // target as expected at the detection plane
};

/// Runs source -> SLM -> propagation -> iris -> analysis -> noise budget for
/// one mode. `measured` entries are matched by mode id. When `output_dir` is
/// set, the hologram, intensity images and section fit are written there and
/// listed in result.artifacts. Throws on any failure.
Simulation simulate_mode(const ExperimentConfig& config, const ModeToken& mode,
                         const std::vector<MeasuredValue>& measured = {},
                         const std::filesystem::path& base_dir = {},
                         const std::optional<std::filesystem::path>& output_dir = std::nullopt);

struct PipelineReport {
  std::string config_hash;
  std::vector<ModeResult> rows;
  std::vector<std::filesystem::path> manifest;
};

/// simulate_mode over config.modes, config.jobs rows at a time. Rows keep
/// the config order; a failing row records its error and the rest continue.
PipelineReport run_pipeline(const ExperimentConfig& config, const std::vector<MeasuredValue>& measured = {},
                            const std::filesystem::path& base_dir = {},
                            const std::optional<std::filesystem::path>& output_dir = std::nullopt);

/// Loss stages for a mode whose efficiency has not been simulated.
std::vector<noise::LossStage> configured_stages(const ExperimentConfig& config);
/// Loss stages around a simulated first-order efficiency.
std::vector<noise::LossStage> simulated_stages(const ExperimentConfig& config, double eta_order);

struct NoiseRow {
  std::string mode_id;
  noise::NoiseBudget budget;
  std::optional<MeasuredValue> measured;
  std::optional<noise::Verdict> verdict;
};

/// Budget per measured row (using the row's eta when present, the
/// configured stages otherwise), or a single row for config.mode.
std::vector<NoiseRow> run_noise(const ExperimentConfig& config, const std::vector<MeasuredValue>& measured);

// Report writers. Output is a pure function of the inputs: fixed precision,
// no timestamps.
std::string pipeline_csv(const PipelineReport& report);
std::string pipeline_markdown(const PipelineReport& report);
std::string noise_csv(const std::vector<NoiseRow>& rows);
std::string noise_markdown(const std::vector<NoiseRow>& rows, const std::string& config_hash);

/// Writes `text` to `path`, throwing IoError on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace sqzmode::app
