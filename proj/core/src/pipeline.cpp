#include "sqzmode/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

#include "sqzmode/error.hpp"
#include "sqzmode/image_io.hpp"
#include "sqzmode/propagation.hpp"

namespace sqzmode::app {
namespace {

std::size_t pixel_of(double c, double pitch, std::size_t count, bool& inside) {
  const double f = std::floor(c / pitch + static_cast<double>(count / 2) + 0.5);
  inside = f >= 0.0 && f < static_cast<double>(count);
  return inside ? static_cast<std::size_t>(f) : 0;
}

// Per-pixel panel values looked up at each sample of `grid`.
ComplexField sample_panel(const std::vector<Complex>& panel, const holo::SlmGeometry& g, const GridSpec& grid,
                          double wavelength) {
  ComplexField out(grid, wavelength);
  for (std::size_t j = 0; j < grid.ny; ++j) {
    bool in_v = false;
    const std::size_t v = pixel_of(grid.y(j), g.pixel_pitch, g.height_px, in_v);
    if (!in_v) continue;
    for (std::size_t i = 0; i < grid.nx; ++i) {
      bool in_u = false;
      const std::size_t u = pixel_of(grid.x(i), g.pixel_pitch, g.width_px, in_u);
      if (in_u) out.at(i, j) = panel[v * g.width_px + u];
    }
  }
  return out;
}

// Square window of the image centred on the sample nearest `center`.
RealImage crop_image(const RealImage& image, Vec2 center, double half_width) {
  const GridSpec& g = image.grid;
  const auto h = static_cast<long>(std::ceil(half_width / g.dx)) + 1;
  const long ci = std::lround((center.x - g.center.x) / g.dx) + static_cast<long>(g.nx / 2);
  const long cj = std::lround((center.y - g.center.y) / g.dy) + static_cast<long>(g.ny / 2);
  const long i0 = std::max(0L, ci - h);
  const long i1 = std::min(static_cast<long>(g.nx) - 1, ci + h);
  const long j0 = std::max(0L, cj - h);
  const long j1 = std::min(static_cast<long>(g.ny) - 1, cj + h);
  GridSpec sub{static_cast<std::size_t>(i1 - i0 + 1), static_cast<std::size_t>(j1 - j0 + 1), g.dx, g.dy, {}};
  // Place the sub-grid so that its samples coincide with the parent's.
  sub.center = Vec2{g.x(static_cast<std::size_t>(i0) + sub.nx / 2), g.y(static_cast<std::size_t>(j0) + sub.ny / 2)};
  RealImage out(sub);
  for (std::size_t j = 0; j < sub.ny; ++j) {
    for (std::size_t i = 0; i < sub.nx; ++i) {
      out.at(i, j) = image.at(static_cast<std::size_t>(i0) + i, static_cast<std::size_t>(j0) + j);
    }
  }
  return out;
}

ModeSpec magnified(const ModeSpec& spec, double m) {
  if (const auto* lg = std::get_if<LaguerreGauss>(&spec)) return LaguerreGauss{lg->p, lg->l, lg->w0 * m};
  if (const auto* bg = std::get_if<BesselGauss>(&spec)) return BesselGauss{bg->n, bg->k_r / m, bg->w0 * m};
  if (const auto* ga = std::get_if<Gauss>(&spec)) return Gauss{ga->w0 * m};
  auto a = std::get<ArbitraryIntensity>(spec);
  a.w0 *= m;
  return a;
}

const MeasuredValue* find_measured(const std::vector<MeasuredValue>& measured, const std::string& id) {
  for (const auto& m : measured) {
    if (m.mode_id == id) return &m;
  }
  return nullptr;
}

}  // namespace

std::vector<noise::LossStage> configured_stages(const ExperimentConfig& c) {
  if (c.noise_efficiency) return {{"efficiency", *c.noise_efficiency, c.noise_efficiency_uncertainty}};
  return {{"eta_d", c.eta_d, c.eta_d_uncertainty},
          {"eta_r", c.eta_r, c.eta_r_uncertainty},
          {"eta_g", c.grating_efficiency, c.grating_efficiency_uncertainty}};
}

std::vector<noise::LossStage> simulated_stages(const ExperimentConfig& c, double eta_order) {
  const double device = c.eta_d * c.eta_r;
  if (!(device > 0.0)) return {{"conversion", std::clamp(eta_order, 0.0, 1.0), 0.0}};
  return {{"eta_d", c.eta_d, c.eta_d_uncertainty},
          {"eta_r", c.eta_r, c.eta_r_uncertainty},
          {"conversion", std::clamp(eta_order / device, 0.0, 1.0), 0.0}};
}

Simulation simulate_mode(const ExperimentConfig& config, const ModeToken& mode, const std::vector<MeasuredValue>& measured,
                         const std::filesystem::path& base_dir, const std::optional<std::filesystem::path>& output_dir) {
  config.validate();
  const ModeSetup setup = resolve_mode(config, mode, base_dir);
  const holo::SlmGeometry& geo = config.slm;
  const double lambda = geo.design_wavelength;
  const bool lens_on = std::isfinite(setup.focal_length);
  // Fourier targets are scaled for the configured (or default) focal length
  // even when the lens layer is switched off.
  const double scale_focal = lens_on ? setup.focal_length : config.lens_focal_length.value_or(0.45);

  const auto mode_phase = holo::mode_phase_pattern(setup.spec, geo, setup.plane, scale_focal);
  const auto grating = config.grating_period_px ? holo::blazed_grating(*config.grating_period_px, geo)
                                                : holo::PhaseMap::zeros(geo);
  const auto lens = lens_on ? holo::lens_phase(setup.focal_length, geo) : holo::PhaseMap::zeros(geo);
  const auto aperture = config.aperture_radius_px ? holo::circular_aperture(*config.aperture_radius_px, geo)
                                                  : holo::ApertureMask::all_ones(geo);
  auto hologram = std::make_shared<holo::Hologram>(holo::compose(mode_phase, grating, lens, aperture));

  optics::SlmModel slm;
  slm.hologram = hologram;
  slm.eta_d = config.eta_d;
  slm.eta_r = config.eta_r;
  slm.eta_d_uncertainty = config.eta_d_uncertainty;
  slm.eta_r_uncertainty = config.eta_r_uncertainty;
  slm.crosstalk_sigma_px = config.crosstalk_sigma_px;

  ModeResult r;
  r.mode_id = describe(setup.spec);
  const GridSpec grid = GridSpec::square(config.grid_n, config.grid_spacing);
  Diagnostics diag;
  const ComplexField input = evaluate_mode(Gauss{config.source_waist}, grid, lambda, &diag);
  const double p_in = power(input);

  optics::PropagationPlan plan;
  plan.distance = config.distance;
  plan.padding_factor = config.padding_factor;
  plan.band_limit = config.band_limit;
  optics::PropagationReport prop_report;
  const ComplexField slm_out = optics::apply_slm(input, slm);
  ComplexField detection = optics::angular_spectrum(slm_out, plan, &prop_report);
  for (auto& w : prop_report.warnings) diag.warn("detection: " + w);

  // Ideal target with a continuous carrier and lens, through the same optics.
  auto ref_panel = holo::slm_plane_target(setup.spec, geo, setup.plane, scale_focal);
  if (config.grating_period_px || lens_on) {
    for (std::size_t v = 0; v < geo.height_px; ++v) {
      const double y = geo.y(v);
      for (std::size_t u = 0; u < geo.width_px; ++u) {
        double phi = 0.0;
        if (config.grating_period_px) phi += kTwoPi * static_cast<double>(u) / *config.grating_period_px;
        if (lens_on) {
          const double x = geo.x(u);
          phi -= kPi * (x * x + y * y) / (lambda * setup.focal_length);
        }
        ref_panel[v * geo.width_px + u] *= std::polar(1.0, phi);
      }
    }
  }
  ComplexField reference = optics::angular_spectrum(sample_panel(ref_panel, geo, grid, lambda), plan);

  // First-order geometry.
  const double period = config.grating_period_px ? *config.grating_period_px * geo.pixel_pitch : 0.0;
  r.first_order_x = period > 0.0 ? lambda * config.distance / period : 0.0;
  const double half_spacing =
      period > 0.0 ? 0.5 * r.first_order_x : 0.5 * std::max(grid.extent_x(), grid.extent_y()) * std::sqrt(2.0);

  r.eta_total = power(detection) / p_in;
  r.eta_order = period > 0.0 ? optics::power_in_band(detection, r.first_order_x, half_spacing) / p_in : r.eta_total;
  r.eta_far_field = period > 0.0 ? optics::far_field_order_power(slm_out, period, 1, config.padding_factor) / p_in
                                 : power(slm_out) / p_in;
  r.eta_grating = config.eta_d * config.eta_r > 0.0 ? r.eta_far_field / (config.eta_d * config.eta_r) : 0.0;

  const RealImage intensity = optics::intensity_image(detection);
  const Vec2 order_center{r.first_order_x, 0.0};
  r.iris_center = optics::centroid(intensity, order_center, half_spacing);
  r.beam_radius = optics::second_moment_radius(intensity, r.iris_center, half_spacing);
  r.iris_radius = config.iris_radius.value_or(std::min(3.0 * r.beam_radius, half_spacing));
  const ComplexField selected =
      config.iris_enabled ? optics::select_order(detection, r.iris_center, r.iris_radius) : detection;
  r.eta_iris = power(selected) / p_in;
  r.fidelity = analysis::fidelity(reference, selected);

  // Target expected in the detection plane: the encoded mode itself for
  // Fourier-plane targets, the geometrically scaled mode for direct ones.
  ModeSpec detection_spec = setup.spec;
  if (setup.plane == holo::TargetPlane::direct && lens_on) {
    const double m = std::abs(1.0 - config.distance / setup.focal_length);
    if (m > 1e-3) detection_spec = magnified(setup.spec, m);
  }

  // Structure of the selected order.
  const double crop_half = std::min(r.iris_radius, half_spacing);
  RealImage crop = crop_image(optics::intensity_image(selected), r.iris_center, crop_half);
  RealImage reference_crop = crop_image(optics::intensity_image(reference), r.iris_center, crop_half);
  const auto ring_count = analysis::count_rings(crop, std::nullopt, crop_half);
  r.rings = ring_count.rings;
  r.rings_low_confidence = ring_count.low_confidence;
  r.central_null = analysis::central_null(crop);
  if (const auto* lg = std::get_if<LaguerreGauss>(&setup.spec)) {
    r.expected_rings = lg->p;
    r.expected_null = lg->l != 0;
  } else if (const auto* bg = std::get_if<BesselGauss>(&setup.spec)) {
    // Dark rings of the scaled target inside the same window.
    RealImage ideal(crop.grid);
    for (std::size_t j = 0; j < ideal.grid.ny; ++j) {
      for (std::size_t i = 0; i < ideal.grid.nx; ++i) {
        ideal.at(i, j) = std::norm(
            sample_mode(detection_spec, ideal.grid.x(i) - r.iris_center.x, ideal.grid.y(j) - r.iris_center.y));
      }
    }
    r.expected_rings = analysis::count_rings(ideal, r.iris_center, crop_half).rings;
    r.expected_null = bg->n != 0;
  } else if (std::holds_alternative<Gauss>(setup.spec)) {
    r.expected_rings = 0;
    r.expected_null = false;
  }
  r.topology_ok = (!r.expected_rings || *r.expected_rings == r.rings) &&
                   (!r.expected_null || *r.expected_null == r.central_null);

  // Line section through the selected order.
  analysis::LineSection section = analysis::extract_cross_section(crop, 0.0);
  r.fit = analysis::fit_profile(section, detection_spec);

  r.budget = noise::budget(noise::SqueezingLevel{config.input_squeezing_db, config.input_squeezing_uncertainty_db},
                           simulated_stages(config, r.eta_order));
  if (const auto* m = find_measured(measured, r.mode_id)) {
    r.measured = *m;
    r.verdict = noise::excess_noise_verdict(noise::SqueezingLevel{m->squeezing_db, m->uncertainty_db},
                                            r.budget.predicted_output);
  }
  r.warnings = diag.warnings;

  if (output_dir) {
    std::filesystem::create_directories(*output_dir);
    const std::string stem = file_stem(setup.spec);
    const std::filesystem::path holo_name = stem + "_hologram.pgm";
    const std::filesystem::path pgm_name = stem + "_intensity.pgm";
    const std::filesystem::path png_name = stem + "_intensity.png";
    const std::filesystem::path csv_name = stem + "_section.csv";
    holo::export_pgm(*hologram, *output_dir / holo_name);
    const auto gray = to_gray(crop.values, crop.grid.nx, crop.grid.ny, 16);
    write_pgm(*output_dir / pgm_name, gray);
    write_png(*output_dir / png_name, gray);
    analysis::write_fit_csv(*output_dir / csv_name, section, detection_spec, r.fit);
    r.artifacts = {holo_name, pgm_name, png_name, csv_name};
  }

  return Simulation{std::move(r),        setup,          *hologram,          std::move(detection), std::move(reference),
                    std::move(crop),     std::move(reference_crop), std::move(section), detection_spec};
}

PipelineReport run_pipeline(const ExperimentConfig& config, const std::vector<MeasuredValue>& measured,
                            const std::filesystem::path& base_dir, const std::optional<std::filesystem::path>& output_dir) {
  config.validate();
  PipelineReport report;
  report.config_hash = config_hash(config);
  report.rows.resize(config.modes.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < config.modes.size(); k = next++) {
      ModeResult& row = report.rows[k];
      try {
        row = simulate_mode(config, config.modes[k], measured, base_dir, output_dir).result;
      } catch (const std::exception& e) {
        row = ModeResult{};
        row.mode_id = config.modes[k].text();
        row.ok = false;
        row.error = e.what();
      }
    }
  };
  const auto jobs = std::min<std::size_t>(static_cast<std::size_t>(config.jobs), config.modes.size());
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < jobs; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  for (const auto& row : report.rows) {
    report.manifest.insert(report.manifest.end(), row.artifacts.begin(), row.artifacts.end());
  }
  return report;
}

std::vector<NoiseRow> run_noise(const ExperimentConfig& config, const std::vector<MeasuredValue>& measured) {
  config.validate();
  const noise::SqueezingLevel input{config.input_squeezing_db, config.input_squeezing_uncertainty_db};
  std::vector<NoiseRow> rows;
  if (measured.empty()) {
    rows.push_back(NoiseRow{config.mode.text(), noise::budget(input, configured_stages(config)), std::nullopt, std::nullopt});
    return rows;
  }
  for (const auto& m : measured) {
    NoiseRow row;
    row.mode_id = m.mode_id;
    row.budget = m.eta ? noise::budget(input, {{"measured_eta", *m.eta, 0.0}}) : noise::budget(input, configured_stages(config));
    row.measured = m;
    row.verdict = noise::excess_noise_verdict(noise::SqueezingLevel{m.squeezing_db, m.uncertainty_db},
                                              row.budget.predicted_output);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace sqzmode::app
