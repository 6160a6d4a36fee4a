#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "sqzmode/config.hpp"
#include "sqzmode/error.hpp"
#include "sqzmode/special_functions.hpp"

using namespace sqzmode;
using namespace sqzmode::app;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("sqzmode_test_config_" + name);
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST(Config, Defaults) {
  const ExperimentConfig c = default_config();
  EXPECT_EQ(c.source_waist, 1.32e-3);
  EXPECT_EQ(c.slm.width_px, 1920u);
  EXPECT_EQ(c.slm.height_px, 1080u);
  EXPECT_EQ(c.slm.pixel_pitch, 8e-6);
  EXPECT_EQ(c.slm.phase_levels, 256);
  EXPECT_EQ(c.slm.design_wavelength, 1558e-9);
  EXPECT_EQ(c.eta_d, 0.90);
  EXPECT_EQ(c.eta_r, 0.61);
  EXPECT_EQ(c.crosstalk_sigma_px, 0.70);
  EXPECT_EQ(c.grating_period_px, 35);
  EXPECT_EQ(c.distance, 0.45);
  EXPECT_EQ(c.input_squeezing_db, -3.0);
  EXPECT_EQ(c.jobs, 1);
  EXPECT_EQ(c.modes.size(), 12u);
  EXPECT_EQ(c.modes, default_mode_set());
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, DefaultModeSetIsNineLGAndThreeBG) {
  const auto modes = default_mode_set();
  int lg = 0, bg = 0;
  for (const auto& m : modes) {
    lg += m.family == ModeToken::Family::laguerre_gauss;
    bg += m.family == ModeToken::Family::bessel_gauss;
  }
  EXPECT_EQ(lg, 9);
  EXPECT_EQ(bg, 3);
}

TEST(Config, EmptyTextGivesDefaults) { EXPECT_EQ(parse_config(""), default_config()); }

TEST(Config, LengthUnits) {
  EXPECT_EQ(parse_length("1.32 mm"), 1.32e-3);
  EXPECT_EQ(parse_length("1558 nm"), 1558e-9);
  EXPECT_EQ(parse_length("8 um"), 8e-6);
  EXPECT_EQ(parse_length("8 µm"), 8e-6);
  EXPECT_EQ(parse_length("0.45 m"), 0.45);
  EXPECT_EQ(parse_length("45 cm"), 0.45);
  EXPECT_EQ(parse_length("45cm"), 0.45);
  EXPECT_THROW(parse_length("1.32"), ConfigError);
  EXPECT_THROW(parse_length("1.32 furlong"), ConfigError);
  EXPECT_THROW(parse_length("abc mm"), ConfigError);
}

TEST(Config, ParsesSectionsAndComments) {
  const ExperimentConfig c = parse_config(
      "# comment\n"
      "[source]\n"
      "waist = 2 mm   # trailing\n"
      "squeezing = -4.5 dB\n"
      "[hologram]\n"
      "grating_period = 20 px\n"
      "lens_focal_length = none\n"
      "[mode]\n"
      "spec = BG(2)\n"
      "[pipeline]\n"
      "modes = LG(0,1); Gauss\n"
      "jobs = 2\n");
  EXPECT_EQ(c.source_waist, 2e-3);
  EXPECT_EQ(c.input_squeezing_db, -4.5);
  EXPECT_EQ(c.grating_period_px, 20);
  EXPECT_FALSE(c.lens_enabled);
  EXPECT_EQ(c.mode, parse_mode_token("BG(2)"));
  ASSERT_EQ(c.modes.size(), 2u);
  EXPECT_EQ(c.modes[1].family, ModeToken::Family::gauss);
  EXPECT_EQ(c.jobs, 2);
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_config("[source]\nwaist = 1.32\n"), ConfigError);
  EXPECT_THROW(parse_config("[source]\ncolour = blue\n"), ConfigError);
  EXPECT_THROW(parse_config("[nosuch]\nwaist = 1 mm\n"), ConfigError);
  EXPECT_THROW(parse_config("[source\n"), ConfigError);
  EXPECT_THROW(parse_config("[source]\nwaist\n"), ConfigError);
  EXPECT_THROW(parse_config("[source]\nsqueezing = -3\n"), ConfigError);
  EXPECT_THROW(parse_config("[slm]\neta_d = 1.5\n"), ConfigError);
  EXPECT_THROW(parse_config("[hologram]\ngrating_period = 1 px\n"), ConfigError);
  EXPECT_THROW(parse_config("[propagation]\ndistance = -1 m\n"), ConfigError);
  EXPECT_THROW(parse_config("[pipeline]\njobs = 0\n"), ConfigError);
  EXPECT_THROW(parse_config("[pipeline]\njobs = 1.5\n"), ConfigError);
  try {
    parse_config("[source]\n\nwaist = 3\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  EXPECT_THROW(load_config("/nonexistent/sqzmode.ini"), IoError);
}

TEST(Config, SerializeRoundTripIsFixedPoint) {
  const ExperimentConfig d = default_config();
  const std::string text = serialize_config(d);
  EXPECT_NE(text.find("wavelength = 1558 nm"), std::string::npos);
  EXPECT_NE(text.find("waist = 1.32 mm"), std::string::npos);
  EXPECT_EQ(parse_config(text), d);
  EXPECT_EQ(serialize_config(parse_config(text)), text);
}

TEST(Config, RandomRoundTrips) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int t = 0; t < 200; ++t) {
    ExperimentConfig c = default_config();
    c.source_waist = u(rng) * 1e-3;
    c.slm.design_wavelength = u(rng) * 1e-7;
    c.distance = u(rng) / 10;
    c.eta_d = u(rng) / 10;
    c.grid_spacing = u(rng) * 1e-6;
    c.target_waist = u(rng) * 1e-4;
    c.bessel_kr = u(rng) * 1e3;
    c.iris_radius = t % 2 ? std::optional<double>(u(rng) * 1e-4) : std::nullopt;
    c.lens_enabled = t % 3 != 0;
    c.grating_period_px = t % 5 ? std::optional<int>(2 + t % 40) : std::nullopt;
    const ExperimentConfig back = parse_config(serialize_config(c));
    EXPECT_EQ(back, c) << serialize_config(c);
    EXPECT_EQ(config_hash(back), config_hash(c));
  }
}

TEST(Config, HashIsStableAndSensitive) {
  const ExperimentConfig d = default_config();
  const std::string h = config_hash(d);
  EXPECT_EQ(h.size(), 16u);
  EXPECT_EQ(h, config_hash(default_config()));
  // Formatting and comments do not matter, values do.
  EXPECT_EQ(config_hash(parse_config("[source]\n  waist =   1320 um # same\n")), h);
  ExperimentConfig changed = d;
  changed.distance = 0.46;
  EXPECT_NE(config_hash(changed), h);
  changed = d;
  changed.modes.pop_back();
  EXPECT_NE(config_hash(changed), h);
}

TEST(ModeTokens, ParseAndPrint) {
  EXPECT_EQ(parse_mode_token("LG(1,1)").text(), "LG(1,1)");
  EXPECT_EQ(parse_mode_token(" lg( 3 , -2 ) ").text(), "LG(3,-2)");
  EXPECT_EQ(parse_mode_token("BG(2)").text(), "BG(2)");
  EXPECT_EQ(parse_mode_token("gauss").text(), "Gauss");
  EXPECT_EQ(parse_mode_token("Arbitrary(img/a.png)").path, "img/a.png");
  for (const char* bad : {"LG(1)", "LG(-1,0)", "BG(-1)", "BG(1,2)", "HG(1,1)", "LG(1,1", "Gauss(1)", "Arbitrary()",
                          "LG(a,b)"}) {
    EXPECT_THROW(parse_mode_token(bad), ConfigError) << bad;
  }
}

TEST(ModeResolution, DerivedWaists) {
  const ExperimentConfig c = default_config();
  const ModeSetup lg = resolve_mode(c, parse_mode_token("LG(1,1)"));
  EXPECT_EQ(lg.plane, holo::TargetPlane::fourier);
  EXPECT_EQ(lg.focal_length, 0.45);
  const double expected = 1558e-9 * 0.45 / (M_PI * 0.66e-3);
  EXPECT_NEAR(std::get<LaguerreGauss>(lg.spec).w0, expected, 1e-12 * expected);

  const ModeSetup bg = resolve_mode(c, parse_mode_token("BG(0)"));
  EXPECT_EQ(bg.plane, holo::TargetPlane::direct);
  EXPECT_EQ(bg.focal_length, 1.0);
  const auto& b = std::get<BesselGauss>(bg.spec);
  EXPECT_EQ(b.w0, 1.32e-3);
  EXPECT_NEAR(b.k_r, 2 * kBesselJ0FirstZero / 1.32e-3, 1e-9);

  ExperimentConfig no_lens = c;
  no_lens.lens_enabled = false;
  EXPECT_TRUE(std::isinf(resolve_mode(no_lens, parse_mode_token("Gauss")).focal_length));
  EXPECT_THROW(resolve_mode(c, parse_mode_token("Arbitrary(/nonexistent.png)")), IoError);
}

TEST(Measured, ParsesQuotedIdsAndHeader) {
  const auto path = write_temp("ok.csv",
                               "mode,squeezing_db,uncertainty_db,eta\n"
                               "\"LG(1,1)\",-1.34,0.32,0.52\n"
                               "BG(0),-1.17,0.31\n");
  const auto rows = load_measured(path);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].mode_id, "LG(1,1)");
  EXPECT_EQ(rows[0].squeezing_db, -1.34);
  EXPECT_EQ(rows[0].uncertainty_db, 0.32);
  EXPECT_EQ(rows[0].eta, 0.52);
  EXPECT_EQ(rows[1].mode_id, "BG(0)");
  EXPECT_FALSE(rows[1].eta.has_value());
}

TEST(Measured, Errors) {
  EXPECT_THROW(load_measured(write_temp("cols.csv", "BG(0),-1\n")), ConfigError);
  EXPECT_THROW(load_measured(write_temp("num.csv", "BG(0),-1,x\n")), ConfigError);
  EXPECT_THROW(load_measured(write_temp("neg.csv", "BG(0),-1,-0.1\n")), ConfigError);
  EXPECT_THROW(load_measured(write_temp("eta.csv", "BG(0),-1,0.1,1.2\n")), ConfigError);
  EXPECT_THROW(load_measured(write_temp("mode.csv", "XX(0),-1,0.1\n")), ConfigError);
  EXPECT_THROW(load_measured("/nonexistent/measured.csv"), IoError);
}

TEST(Measured, ShippedTables) {
  const auto all = load_measured(std::filesystem::path(SQZMODE_DATA) / "measured_all.csv");
  EXPECT_EQ(all.size(), 12u);
  EXPECT_EQ(load_measured(std::filesystem::path(SQZMODE_DATA) / "measured_lg.csv").size(), 9u);
  EXPECT_EQ(load_measured(std::filesystem::path(SQZMODE_DATA) / "measured_bg.csv").size(), 3u);
}
