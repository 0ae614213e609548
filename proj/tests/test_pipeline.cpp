#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <set>
#include <sstream>
#include <unistd.h>

#include "bos/io.hpp"
#include "bos/pipeline.hpp"

using namespace bos;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = fs::path(BOS_SOURCE_DIR) / "configs";

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("bos_pipe_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  return d;
}

std::set<std::string> listing(const fs::path& dir) {
  std::set<std::string> names;
  for (const auto& e : fs::directory_iterator(dir)) names.insert(e.path().filename().string());
  return names;
}

std::size_t count_suffix(const std::set<std::string>& names, const std::string& suffix) {
  std::size_t n = 0;
  for (const auto& s : names) n += s.ends_with(suffix);
  return n;
}

std::string text_of(const fs::path& p) {
  const auto b = read_bytes(p);
  return {b.begin(), b.end()};
}

}  // namespace

TEST_CASE("small config produces the documented outputs") {
  const fs::path dir = scratch("small");
  const RunConfig cfg = load_config(kConfigs / "small.cfg",
                                    {{"output.dir", dir.string()}, {"meta.delta_t_label", "dT=5C"}});
  std::ostringstream err;
  REQUIRE(cmd_pipeline(cfg, err) == 0);
  const auto names = listing(dir);
  CHECK(names.count("phase.fgrid") == 1);
  CHECK(names.count("manifest.txt") == 1);
  CHECK(names.count("config.resolved.txt") == 1);
  CHECK(count_suffix(names, ".fgrid") == 1 + 4);
  CHECK(count_suffix(names, ".ppm") == 1 + 4);
  CHECK(count_suffix(names, ".ppm.txt") == 1 + 4);
  CHECK(count_suffix(names, "_contours.csv") == 1 + 4);
  CHECK(names.count("plane_03.fgrid") == 1);
  for (const auto& n : names) CHECK_MESSAGE(n.find(".tmp") == std::string::npos, n);

  const std::string manifest = text_of(dir / "manifest.txt");
  CHECK(manifest.find("planes 4\n") != std::string::npos);
  CHECK(manifest.find("plane 1 3 plane_01.fgrid\n") != std::string::npos);
  CHECK(manifest.find("threshold_fraction 0.01\n") != std::string::npos);
  CHECK(manifest.find("delta_t_label dT=5C\n") != std::string::npos);

  const Field phase = read_image(dir / "phase.fgrid");
  CHECK(phase.grid() == GridSpec(128, 128));
  REQUIRE(phase.has_mask());
  CHECK_FALSE(phase.valid(120, 60));  // inside the rib
  CHECK(phase(120, 60) == 0.0);

  // The echo reproduces the run configuration.
  CHECK(resolved_config(load_config(dir / "config.resolved.txt")) == resolved_config(cfg));
  fs::remove_all(dir);
}

TEST_CASE("reruns are byte identical") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  std::ostringstream err;
  REQUIRE(cmd_pipeline(load_config(kConfigs / "small.cfg", {{"output.dir", a.string()}}), err) == 0);
  REQUIRE(cmd_pipeline(load_config(kConfigs / "small.cfg", {{"output.dir", b.string()}}), err) == 0);
  const auto names = listing(a);
  CHECK(names == listing(b));
  for (const auto& n : names)
    if (n.ends_with(".fgrid") || n.ends_with(".csv") || n.ends_with(".ppm"))
      CHECK_MESSAGE(read_bytes(a / n) == read_bytes(b / n), n);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("bundled default config writes one phase and 32 planes") {
  const fs::path dir = scratch("default");
  const RunConfig cfg = load_config(kConfigs / "default.cfg",
                                    {{"output.dir", dir.string()}, {"output.heatmaps", "false"}});
  CHECK(cfg.grid == GridSpec(512, 512));
  std::ostringstream err;
  REQUIRE(cmd_pipeline(cfg, err) == 0);
  const auto names = listing(dir);
  CHECK(names.count("phase.fgrid") == 1);
  CHECK(count_suffix(names, ".fgrid") == 33);
  CHECK(names.count("plane_31.fgrid") == 1);
  CHECK(names.count("manifest.txt") == 1);
  CHECK(count_suffix(names, "_contours.csv") == 33);
  fs::remove_all(dir);
}

TEST_CASE("stage failures carry the stage tag and exit code") {
  std::ostringstream err;
  RunConfig cfg = parse_config("input.reference = /nonexistent/ref.pgm\ninput.deformed = /nonexistent/def.pgm\n");
  cfg.output_dir = scratch("fail_load").string();
  CHECK(cmd_pipeline(cfg, err) == 3);
  CHECK(err.str().find("[stage load]") != std::string::npos);
  fs::remove_all(cfg.output_dir);

  err.str("");
  cfg = parse_config("grid.width = 32\ngrid.height = 32\nphantom.rib = 0,0,32,32\ndemod.window_sigma = 3\n");
  cfg.output_dir = scratch("fail_unwrap").string();
  CHECK(cmd_pipeline(cfg, err) == 4);
  CHECK(err.str().find("[stage unwrap]") != std::string::npos);
  CHECK(err.str().find("NoValidSeed") != std::string::npos);
  fs::remove_all(cfg.output_dir);

  err.str("");
  cfg = parse_config("grid.width = 4\ngrid.height = 4\nphantom.kind = constant\n");
  cfg.output_dir = scratch("fail_synth").string();
  CHECK(cmd_pipeline(cfg, err) == 4);
  CHECK(err.str().find("[stage synth]") != std::string::npos);
  fs::remove_all(cfg.output_dir);

  CHECK(exit_code_for(Error(Errc::Config, "x")) == 2);
  CHECK(exit_code_for(Error(Errc::TruncatedPayload, "x")) == 3);
  CHECK(exit_code_for(Error(Errc::AllMasked, "x")) == 4);
}

TEST_CASE("fringes loaded from files demodulate like synthesized ones") {
  const fs::path dir = scratch("files");
  fs::create_directories(dir);
  const RunConfig syn = load_config(kConfigs / "small.cfg");
  const Fringes f = synthesize(syn);
  write_field(f.pair.reference, dir / "ref.fgrid");
  write_field(f.pair.deformed, dir / "def.fgrid");
  const RunConfig from_files =
      load_config(kConfigs / "small.cfg", {{"input.reference", (dir / "ref.fgrid").string()},
                                           {"input.deformed", (dir / "def.fgrid").string()}});
  const PhaseMap<double> a = demodulate_pair(f.pair, syn);
  const PhaseMap<double> b = demodulate_pair(load_fringes(from_files), from_files);
  CHECK((a.field.values() == b.field.values()).all());
  fs::remove_all(dir);
}
