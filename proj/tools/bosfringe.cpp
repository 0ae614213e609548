// bosfringe: batch driver for fringe demodulation and multi-scale wavelet
// analysis. Subcommands: synth, demod, cwt, render, pipeline.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "bos/config.hpp"
#include "bos/io.hpp"
#include "bos/pipeline.hpp"
#include "bos/render.hpp"

namespace fs = std::filesystem;
using namespace bos;

namespace {

struct Common {
  std::string config;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config, "key = value configuration file");
  cmd->add_option("-s,--set", c.sets, "override a configuration key (key=value), repeatable");
}

RunConfig resolve(const Common& c, std::vector<std::pair<std::string, std::string>> extra = {}) {
  std::vector<std::pair<std::string, std::string>> overrides;
  for (const std::string& s : c.sets) overrides.push_back(split_setting(s));
  overrides.insert(overrides.end(), extra.begin(), extra.end());
  return c.config.empty() ? parse_config("", overrides) : load_config(c.config, overrides);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::Io, "cannot create directory " + dir.string());
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fringe demodulation and multi-scale wavelet analysis"};
  app.require_subcommand(1);

  Common synth_opts;
  std::string synth_out = "fringes";
  auto* synth = app.add_subcommand("synth", "generate reference/deformed fringes from a phantom");
  add_common(synth, synth_opts);
  synth->add_option("-o,--out-dir", synth_out, "writes reference.fgrid, deformed.fgrid, truth.fgrid");

  Common demod_opts;
  std::string ref_path, def_path, demod_out = "phase.fgrid";
  bool wrapped_only = false;
  auto* demod = app.add_subcommand("demod", "windowed Fourier ridge demodulation of a fringe pair");
  add_common(demod, demod_opts);
  demod->add_option("-r,--reference", ref_path, "reference fringe image (FGRID or PGM)")->required();
  demod->add_option("-d,--deformed", def_path, "deformed fringe image (FGRID or PGM)")->required();
  demod->add_option("-o,--out", demod_out, "output phase FGRID");
  demod->add_flag("--wrapped", wrapped_only, "skip unwrapping");

  Common cwt_opts;
  std::string cwt_phase, cwt_out = "cwt";
  auto* cwt = app.add_subcommand("cwt", "Mexican-hat wavelet sweep of a phase map");
  add_common(cwt, cwt_opts);
  cwt->add_option("-p,--phase", cwt_phase, "phase FGRID")->required();
  cwt->add_option("-o,--out-dir", cwt_out, "directory for plane files and manifest");

  std::string render_in, heatmap_out, contour_out;
  int levels = 8;
  auto* render = app.add_subcommand("render", "heatmap (PPM) and/or contour CSV of a field");
  render->add_option("-f,--field", render_in, "input FGRID or PGM")->required();
  render->add_option("--heatmap", heatmap_out, "PPM output (annotation goes to <path>.txt)");
  render->add_option("--contours", contour_out, "contour CSV output");
  render->add_option("-n,--levels", levels, "number of contour levels")->check(CLI::NonNegativeNumber);

  Common pipe_opts;
  std::string pipe_out;
  auto* pipeline = app.add_subcommand("pipeline", "synthesize/load, demodulate, sweep and render");
  add_common(pipeline, pipe_opts);
  pipeline->add_option("-o,--out-dir", pipe_out, "overrides output.dir");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (*synth) {
    return guarded([&] {
      const RunConfig cfg = resolve(synth_opts);
      const Fringes f = synthesize(cfg);
      const fs::path dir = synth_out;
      ensure_dir(dir);
      write_field(f.pair.reference, dir / "reference.fgrid");
      write_field(f.pair.deformed, dir / "deformed.fgrid");
      write_field(f.truth.field, dir / "truth.fgrid");
      write_text_atomic(dir / "config.resolved.txt", resolved_config(cfg));
    });
  }
  if (*demod) {
    return guarded([&] {
      RunConfig cfg = resolve(demod_opts, {{"input.reference", ref_path}, {"input.deformed", def_path}});
      if (wrapped_only) cfg.unwrap = false;
      const PhaseMap<double> phase = demodulate_pair(load_fringes(cfg), cfg);
      write_field(phase.field, demod_out);
    });
  }
  if (*cwt) {
    return guarded([&] {
      RunConfig cfg = resolve(cwt_opts);
      PhaseMap<double> phase;
      phase.field = read_image(cwt_phase);
      phase.field.finalize();
      const WaveletStack<double> stack = cwt_sweep(phase, cfg.cwt);
      for (const std::string& w : stack.warnings) std::cerr << "warning: " << w << "\n";
      const fs::path dir = cwt_out;
      ensure_dir(dir);
      write_text_atomic(dir / "config.resolved.txt", resolved_config(cfg));
      write_stack(stack, cfg, dir);
    });
  }
  if (*render) {
    return guarded([&] {
      const Field f = read_image(render_in);
      if (heatmap_out.empty() && contour_out.empty())
        throw Error(Errc::Config, "render needs --heatmap and/or --contours");
      if (!heatmap_out.empty()) write_render(f, heatmap_out, RenderStyle::Heatmap);
      if (!contour_out.empty()) write_render(f, contour_out, RenderStyle::Contours, levels);
    });
  }
  if (*pipeline) {
    std::vector<std::pair<std::string, std::string>> extra;
    if (!pipe_out.empty()) extra.emplace_back("output.dir", pipe_out);
    RunConfig cfg;
    try {
      cfg = resolve(pipe_opts, extra);
    } catch (const Error& e) {
      std::cerr << "error: " << StageError(Stage::Config, e).what() << "\n";
      return exit_code_for(e);
    }
    return cmd_pipeline(cfg, std::cerr);
  }
  return 0;
}
