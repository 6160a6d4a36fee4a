#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "sqzmode/analysis.hpp"
#include "sqzmode/config.hpp"
#include "sqzmode/error.hpp"
#include "sqzmode/hologram.hpp"
#include "sqzmode/image_io.hpp"
#include "sqzmode/pipeline.hpp"

namespace fs = std::filesystem;
using namespace sqzmode;

namespace {

enum ExitCode { kOk = 0, kUnexpected = 1, kConfig = 2, kPhysics = 3, kIo = 4 };

struct Options {
  std::string config_path;
  std::string out_dir;
  std::string measured_path;
  std::string mode;
  std::string image_path;
  std::string pixel_size;
};

struct Context {
  app::ExperimentConfig config;
  fs::path base_dir;
  fs::path out;
  std::vector<fs::path> manifest;

  void record(const fs::path& name) { manifest.push_back(name); }
  fs::path at(const fs::path& name) const { return out / name; }

  // Writes the canonical config and the manifest, which lists itself.
  void finish() {
    app::write_text(at("config.ini"), app::serialize_config(config));
    record("config.ini");
    record("manifest.txt");
    std::string text = fmt::format("# config_hash={}\n", app::config_hash(config));
    for (const auto& p : manifest) text += p.string() + "\n";
    app::write_text(at("manifest.txt"), text);
  }
};

Context make_context(const Options& o) {
  Context ctx;
  if (!o.config_path.empty()) {
    ctx.config = app::load_config(o.config_path);
    ctx.base_dir = fs::path(o.config_path).parent_path();
  } else {
    ctx.config = app::default_config();
  }
  if (!o.mode.empty()) {
    ctx.config.mode = app::parse_mode_token(o.mode);
    ctx.config.modes = {ctx.config.mode};
  }
  if (!o.out_dir.empty()) ctx.config.output_dir = o.out_dir;
  ctx.config.validate();
  ctx.out = ctx.config.output_dir;
  fs::create_directories(ctx.out);
  return ctx;
}

std::vector<app::MeasuredValue> measured_values(const Options& o) {
  if (o.measured_path.empty()) return {};
  return app::load_measured(o.measured_path);
}

int cmd_holo(const Options& o) {
  Context ctx = make_context(o);
  const auto& c = ctx.config;
  const auto setup = app::resolve_mode(c, c.mode, ctx.base_dir);
  const bool lens_on = std::isfinite(setup.focal_length);
  const double scale_focal = lens_on ? setup.focal_length : c.lens_focal_length.value_or(0.45);
  const auto mode = holo::mode_phase_pattern(setup.spec, c.slm, setup.plane, scale_focal);
  const auto grating =
      c.grating_period_px ? holo::blazed_grating(*c.grating_period_px, c.slm) : holo::PhaseMap::zeros(c.slm);
  const auto lens = lens_on ? holo::lens_phase(setup.focal_length, c.slm) : holo::PhaseMap::zeros(c.slm);
  const auto aperture = c.aperture_radius_px ? holo::circular_aperture(*c.aperture_radius_px, c.slm)
                                             : holo::ApertureMask::all_ones(c.slm);
  const auto h = holo::compose(mode, grating, lens, aperture);

  const std::string stem = file_stem(setup.spec);
  holo::export_pgm(h, ctx.at(stem + "_hologram.pgm"));
  ctx.record(stem + "_hologram.pgm");
  holo::export_png(h, ctx.at(stem + "_hologram.png"));
  ctx.record(stem + "_hologram.png");

  std::string layers;
  layers += "mode=" + describe(setup.spec) + "\n";
  layers += std::string("target_plane=") + (setup.plane == holo::TargetPlane::fourier ? "fourier" : "direct") + "\n";
  layers += fmt::format("waist_m={}\n", format_double(mode_waist(setup.spec)));
  layers += c.grating_period_px ? fmt::format("period_px={}\n", *c.grating_period_px) : "period_px=none\n";
  layers += lens_on ? fmt::format("lens_focal_length_m={}\n", format_double(setup.focal_length))
                    : "lens_focal_length_m=none\n";
  layers += c.aperture_radius_px ? fmt::format("aperture_radius_px={}\n", format_double(*c.aperture_radius_px))
                                 : "aperture_radius_px=none\n";
  layers += fmt::format("aperture_pixels={}\n", aperture.count());
  layers += fmt::format("width_px={}\nheight_px={}\nphase_levels={}\n", c.slm.width_px, c.slm.height_px,
                        c.slm.phase_levels);
  app::write_text(ctx.at(stem + "_layers.txt"), layers);
  ctx.record(stem + "_layers.txt");
  ctx.finish();
  std::cout << layers;
  return kOk;
}

int cmd_sim(const Options& o) {
  Context ctx = make_context(o);
  const auto sim = app::simulate_mode(ctx.config, ctx.config.mode, measured_values(o), ctx.base_dir, ctx.out);
  app::PipelineReport report{app::config_hash(ctx.config), {sim.result}, sim.result.artifacts};
  for (const auto& a : sim.result.artifacts) ctx.record(a);
  app::write_text(ctx.at("sim.csv"), app::pipeline_csv(report));
  ctx.record("sim.csv");
  ctx.finish();
  const auto& r = sim.result;
  std::cout << fmt::format("{}: eta={:.4f} eta_iris={:.4f} fidelity={:.4f} rings={} central_null={}\n", r.mode_id,
                           r.eta_order, r.eta_iris, r.fidelity, r.rings, r.central_null ? "yes" : "no");
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  return kOk;
}

int cmd_noise(const Options& o) {
  Context ctx = make_context(o);
  const auto rows = app::run_noise(ctx.config, measured_values(o));
  app::write_text(ctx.at("noise.csv"), app::noise_csv(rows));
  ctx.record("noise.csv");
  const auto md = app::noise_markdown(rows, app::config_hash(ctx.config));
  app::write_text(ctx.at("noise.md"), md);
  ctx.record("noise.md");
  ctx.finish();
  std::cout << md;
  return kOk;
}

int cmd_pipeline(const Options& o) {
  Context ctx = make_context(o);
  const auto report = app::run_pipeline(ctx.config, measured_values(o), ctx.base_dir, ctx.out);
  for (const auto& a : report.manifest) ctx.record(a);
  app::write_text(ctx.at("report.csv"), app::pipeline_csv(report));
  ctx.record("report.csv");
  const auto md = app::pipeline_markdown(report);
  app::write_text(ctx.at("report.md"), md);
  ctx.record("report.md");
  ctx.finish();
  std::cout << md;
  for (const auto& r : report.rows) {
    for (const auto& w : r.warnings) std::cerr << "warning: " << r.mode_id << ": " << w << '\n';
  }
  return kOk;
}

int cmd_fit(const Options& o) {
  Context ctx = make_context(o);
  analysis::LineSection section;
  ModeSpec spec;
  if (o.image_path.empty()) {
    auto sim = app::simulate_mode(ctx.config, ctx.config.mode, {}, ctx.base_dir);
    section = std::move(sim.section);
    spec = sim.detection_spec;
  } else {
    const auto image = to_intensity(read_gray_image(o.image_path));
    const double pixel = o.pixel_size.empty() ? ctx.config.grid_spacing : app::parse_length(o.pixel_size);
    RealImage real(GridSpec{image.width, image.height, pixel, pixel, {}}, image.values);
    section = analysis::extract_cross_section(real, 0.0);
    spec = app::resolve_mode(ctx.config, ctx.config.mode, ctx.base_dir).spec;
  }
  const auto fit = analysis::fit_profile(section, spec);
  analysis::write_fit_csv(ctx.at("fit.csv"), section, spec, fit);
  ctx.record("fit.csv");
  ctx.finish();
  std::cout << fmt::format("{}: width={:.6e} m center={:.6e} m scale={:.6e} residual={:.3e} iterations={} {}\n",
                           describe(spec), fit.width, fit.center, fit.scale, fit.residual, fit.iterations,
                           fit.converged ? "converged" : "NOT converged");
  return fit.converged ? kOk : kUnexpected;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config_path, "Experiment config file")->check(CLI::ExistingFile);
  sub->add_option("--out", o.out_dir, "Output directory (overrides [output] dir)");
  sub->add_option("--mode", o.mode, "Mode override, e.g. 'LG(1,1)', 'BG(1)', 'Gauss', 'Arbitrary(img.pgm)'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Phase-only SLM mode conversion and squeezing budget simulator"};
  cli.require_subcommand(1);
  Options o;

  auto* holo_cmd = cli.add_subcommand("holo", "Compile and export the SLM hologram");
  add_common(holo_cmd, o);
  auto* sim_cmd = cli.add_subcommand("sim", "Simulate one mode to the detection plane");
  add_common(sim_cmd, o);
  sim_cmd->add_option("--measured", o.measured_path, "Measured squeezing CSV")->check(CLI::ExistingFile);
  auto* noise_cmd = cli.add_subcommand("noise", "Predict output squeezing from the loss budget");
  add_common(noise_cmd, o);
  noise_cmd->add_option("--measured", o.measured_path, "Measured squeezing CSV")->check(CLI::ExistingFile);
  auto* pipe_cmd = cli.add_subcommand("pipeline", "Simulate every configured mode and build the report");
  add_common(pipe_cmd, o);
  pipe_cmd->add_option("--measured", o.measured_path, "Measured squeezing CSV")->check(CLI::ExistingFile);
  auto* fit_cmd = cli.add_subcommand("fit", "Fit the mode profile to a line section");
  add_common(fit_cmd, o);
  fit_cmd->add_option("--image", o.image_path, "Intensity image (PGM/PNG); simulated when omitted")
      ->check(CLI::ExistingFile);
  fit_cmd->add_option("--pixel-size", o.pixel_size, "Image pixel size, e.g. '8 um'");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*holo_cmd) return cmd_holo(o);
    if (*sim_cmd) return cmd_sim(o);
    if (*noise_cmd) return cmd_noise(o);
    if (*pipe_cmd) return cmd_pipeline(o);
    if (*fit_cmd) return cmd_fit(o);
  } catch (const PhysicsGuardError& e) {
    std::cerr << "physics guard: " << e.what() << '\n';
    return kPhysics;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUnexpected;
  }
  return kUnexpected;
}
