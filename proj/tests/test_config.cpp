#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "bos/config.hpp"

using namespace bos;

namespace {

std::string config_error(const std::string& text,
                         const std::vector<std::pair<std::string, std::string>>& ov = {}) {
  try {
    parse_config(text, ov);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Config);
    return e.what();
  }
  FAIL("expected a config error");
  return {};
}

}  // namespace

TEST_CASE("defaults") {
  const RunConfig c = parse_config("");
  CHECK(c.grid == GridSpec(512, 512));
  CHECK(c.carrier.fx == 0.125);
  CHECK(c.demod.window_sigma == 10.0);
  CHECK(c.demod.band_x.first == doctest::Approx(0.025));
  CHECK(c.demod.band_x.second == doctest::Approx(0.225));
  CHECK(c.demod.step == 0.005);
  CHECK(c.cwt.scales.size() == 32);
  CHECK(c.cwt.threshold_fraction == 0.01);
  CHECK(c.cwt.threshold_mode == ThresholdMode::Magnitude);
  CHECK(c.unwrap);
}

TEST_CASE("parsing, comments and overrides") {
  const std::string text =
      "# header\n"
      "grid.width = 64   # trailing\n"
      "  grid.height=32\r\n"
      "\n"
      "carrier.fx = 0.2\n"
      "cwt.scales = log:1,10,5\n"
      "phantom.rib = 4,4,8,8\n"
      "demod.far_field = 0,0,4,4\n";
  const RunConfig c = parse_config(text, {{"grid.height", "48"}, {"cwt.threshold_mode", "peak_clip"}});
  CHECK(c.grid == GridSpec(64, 48));
  CHECK(c.demod.band_x.first == doctest::Approx(0.1));
  CHECK(c.demod.band_x.second == doctest::Approx(0.3));
  REQUIRE(c.cwt.scales.size() == 5);
  CHECK(c.cwt.scales.front() == doctest::Approx(1.0));
  CHECK(c.cwt.scales.back() == doctest::Approx(10.0));
  CHECK(c.phantom.rib == Rect{4, 4, 8, 8});
  CHECK(c.unwrap_options.far_field == Rect{0, 0, 4, 4});
  CHECK(c.cwt.threshold_mode == ThresholdMode::PeakClip);

  const RunConfig explicit_band = parse_config("demod.band_x = 0.05,0.15\ncarrier.fx = 0.3\n");
  CHECK(explicit_band.demod.band_x.first == 0.05);
}

TEST_CASE("unknown keys and bad values are config errors naming the key") {
  CHECK(config_error("grid.widht = 5\n").find("grid.widht") != std::string::npos);
  CHECK(config_error("", {{"bogus.key", "1"}}).find("bogus.key") != std::string::npos);
  CHECK(config_error("carrier.fx = fast\n").find("carrier.fx") != std::string::npos);
  CHECK(config_error("grid.width = 0\n").find("grid.width") != std::string::npos);
  CHECK(config_error("just words\n").find("line 1") != std::string::npos);
  config_error("carrier.fx = 0.7\n");
  config_error("cwt.scales = 3,1\n");
  config_error("cwt.scales = 0,1\n");
  config_error("demod.band_x = 0.3,0.1\n");
  config_error("phantom.rib = 500,500,40,40\n");
  config_error("input.reference = a.pgm\n");
  CHECK_THROWS_AS(split_setting("novalue"), Error);
  CHECK(split_setting(" a.b =  c ") == std::pair<std::string, std::string>{"a.b", "c"});
}

TEST_CASE("resolved echo round-trips and lists every key") {
  RunConfig c = parse_config(
      "grid.width = 96\nphantom.kind = rib_step\nphantom.rib = 80,40,16,16\nnoise.sigma = "
      "0.1\nnoise.seed = 123456789012\ncarrier.fx = 0.1234567890123\ncwt.scales = "
      "default\ndemod.far_field = 0,0,10,10\nmeta.delta_t_label = dT=5C\n");
  const std::string echo = resolved_config(c);
  CHECK(echo.find("# noise.rng: mt19937_64+box-muller") != std::string::npos);
  CHECK(echo.find("carrier.fx = 0.1234567890123\n") != std::string::npos);
  const RunConfig again = parse_config(echo);
  CHECK(resolved_config(again) == echo);
  CHECK(again.noise.seed == 123456789012ULL);
  CHECK(again.cwt.scales == c.cwt.scales);
  for (const std::string& key : config_keys()) {
    if (key == "phantom.file" || key.starts_with("input.")) continue;
    CHECK_MESSAGE(echo.find("\n" + key + " = ") != std::string::npos, key);
  }
}
