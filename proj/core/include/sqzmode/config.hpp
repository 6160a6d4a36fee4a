#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sqzmode/hologram.hpp"
#include "sqzmode/modes.hpp"

namespace sqzmode::app {

/// Target-plane choice per mode. `automatic` encodes Bessel-Gauss modes
/// directly and everything else in the Fourier plane.
enum class PlaneChoice { automatic, direct, fourier };

/// Mode written as in the config: "Gauss", "LG(p,l)", "BG(n)", "Arbitrary(path)".
/// Waists and wavenumbers come from the [mode] section, not from this text.
struct ModeToken {
  enum class Family { gauss, laguerre_gauss, bessel_gauss, arbitrary };
  Family family = Family::gauss;
  int a = 0;  // p or n
  int b = 0;  // l
  std::string path;

  std::string text() const;
  friend bool operator==(const ModeToken&, const ModeToken&) = default;
};

ModeToken parse_mode_token(const std::string& text);

/// Every physical quantity in SI units. Optional values left empty take the
/// derived defaults documented per field.
struct ExperimentConfig {
  // [source]
  double source_waist = 1.32e-3;
  double input_squeezing_db = -3.0;
  double input_squeezing_uncertainty_db = 0.3;

  // [slm]
  holo::SlmGeometry slm{};
  double eta_d = 0.90;
  double eta_d_uncertainty = 0.03;
  double eta_r = 0.61;
  double eta_r_uncertainty = 0.02;
  double crosstalk_sigma_px = 0.70;

  // [hologram]
  std::optional<int> grating_period_px = 35;        // empty: no grating
  std::optional<double> lens_focal_length;          // empty: 0.45 m fourier, 1.0 m direct
  bool lens_enabled = true;                         // "lens_focal_length = none"
  std::optional<double> aperture_radius_px = 540.0; // empty: no aperture

  // [mode]
  ModeToken mode{ModeToken::Family::laguerre_gauss, 1, 1, {}};
  PlaneChoice target_plane = PlaneChoice::automatic;
  std::optional<double> target_waist;  // fourier targets; default lambda f / (pi w_in / 2)
  std::optional<double> bessel_waist;  // default: source waist
  std::optional<double> bessel_kr;     // default: 2 j_{0,1} / bessel waist

  // [propagation]
  double distance = 0.45;
  int padding_factor = 2;
  bool band_limit = true;

  // [grid]
  std::size_t grid_n = 1024;
  double grid_spacing = 8e-6;

  // [iris]
  bool iris_enabled = true;
  std::optional<double> iris_radius;  // default: min(3 w, order spacing / 2)

  // [noise] stage list used when no simulated efficiency is available.
  // With `noise_efficiency` set it replaces the eta_d, eta_r, eta_g chain.
  double grating_efficiency = 0.91;
  double grating_efficiency_uncertainty = 0.03;
  std::optional<double> noise_efficiency;
  double noise_efficiency_uncertainty = 0.0;

  // [pipeline]
  std::vector<ModeToken> modes;  // default: the 9 LG + 3 BG set
  int jobs = 1;

  // [output]
  std::filesystem::path output_dir = "out";

  void validate() const;
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

std::vector<ModeToken> default_mode_set();

ExperimentConfig default_config();

/// Parses "[section]" / "key = value" text; '#' starts a comment. Unknown
/// sections or keys, missing units on lengths and malformed numbers throw
/// ConfigError naming the line.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical text: every key, fixed order, explicit units. Lengths use a
/// readable unit when that reproduces the double exactly, metres otherwise,
/// so parse(serialize(c)) == c field for field.
std::string serialize_config(const ExperimentConfig& config);

/// FNV-1a 64-bit hash of the canonical text, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

/// Resolved per-mode optics derived from the config.
struct ModeSetup {
  ModeSpec spec;             // target in the plane the hologram encodes
  holo::TargetPlane plane;
  double focal_length;       // infinity when the lens layer is off
};

/// Builds the ModeSpec for a token under the config's waist defaults. Loads
/// arbitrary images from disk (relative paths resolve against `base_dir`).
ModeSetup resolve_mode(const ExperimentConfig& config, const ModeToken& token,
                       const std::filesystem::path& base_dir = {});

/// Parses a length such as "1.32 mm"; a unit is required.
double parse_length(const std::string& text);

struct MeasuredValue {
  std::string mode_id;
  double squeezing_db = 0.0;
  double uncertainty_db = 0.0;
  std::optional<double> eta;
};

/// CSV with columns mode, squeezing_db, uncertainty_db and an optional eta.
/// A header row is recognised and skipped. Throws ConfigError on bad rows.
std::vector<MeasuredValue> load_measured(const std::filesystem::path& path);

}  // namespace sqzmode::app
