#include "bos/pipeline.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "bos/io.hpp"
#include "bos/render.hpp"

namespace bos {
namespace {

template <typename Fn>
auto staged(Stage stage, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e);
  }
}

std::string num(double d) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, d);
  return std::string(buf, end);
}

}  // namespace

const char* stage_name(Stage s) {
  switch (s) {
    case Stage::Config: return "config";
    case Stage::Synth: return "synth";
    case Stage::Load: return "load";
    case Stage::Demod: return "demod";
    case Stage::Unwrap: return "unwrap";
    case Stage::Cwt: return "cwt";
    case Stage::Render: return "render";
    case Stage::Write: return "write";
  }
  return "?";
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::Config: return 2;
    case Errc::Io:
    case Errc::UnsupportedFormat:
    case Errc::CorruptHeader:
    case Errc::CorruptPayload:
    case Errc::TruncatedPayload: return 3;
    default: return 4;
  }
}

std::string plane_stem(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "plane_%02zu", index);
  return buf;
}

std::string plane_file_name(std::size_t index) { return plane_stem(index) + ".fgrid"; }

Fringes synthesize(const RunConfig& cfg) {
  return staged(Stage::Synth, [&] {
    Fringes f;
    f.truth = make_phase<double>(cfg.phantom, cfg.grid);
    f.pair = make_fringes(f.truth, cfg.carrier, cfg.noise);
    return f;
  });
}

FringePair<double> load_fringes(const RunConfig& cfg) {
  return staged(Stage::Load, [&] {
    FringePair<double> p;
    p.reference = read_image(cfg.input_reference);
    p.deformed = read_image(cfg.input_deformed);
    p.reference.finalize();
    p.deformed.finalize();
    require_same_grid(p.reference, p.deformed);
    p.carrier = cfg.carrier;
    return p;
  });
}

PhaseMap<double> demodulate_pair(const FringePair<double>& fringes, const RunConfig& cfg) {
  const auto [ref, def] = staged(Stage::Demod, [&] {
    return std::pair(demodulate(fringes.reference, cfg.demod),
                     demodulate(fringes.deformed, cfg.demod));
  });
  PhaseMap<double> rel = staged(Stage::Demod, [&] { return relative_phase(def, ref); });
  if (cfg.unwrap) {
    rel = staged(Stage::Unwrap, [&] {
      const Field q = ridge_quality(def, ref);
      return unwrap(rel, &q, cfg.unwrap_options);
    });
  }
  if (!cfg.delta_t_label.empty()) rel.meta["delta_t_label"] = cfg.delta_t_label;
  return rel;
}

void render_field(const Field& f, const RunConfig& cfg, const std::filesystem::path& dir,
                  const std::string& stem) {
  staged(Stage::Render, [&] {
    if (cfg.heatmaps) write_render(f, dir / (stem + ".ppm"), RenderStyle::Heatmap);
    if (cfg.contours)
      write_render(f, dir / (stem + "_contours.csv"), RenderStyle::Contours, cfg.contour_levels);
    return 0;
  });
}

void write_stack(const WaveletStack<double>& stack, const RunConfig& cfg,
                 const std::filesystem::path& dir) {
  staged(Stage::Write, [&] {
    std::ostringstream m;
    m << "# wavelet stack manifest\n";
    m << "planes " << stack.planes.size() << "\n";
    m << "normalized " << (stack.normalized ? 1 : 0) << "\n";
    m << "thresholded " << (stack.thresholded ? 1 : 0) << "\n";
    m << "threshold_fraction " << num(cfg.cwt.threshold_fraction) << "\n";
    m << "threshold_mode "
      << (cfg.cwt.threshold_mode == ThresholdMode::Magnitude ? "magnitude" : "peak_clip") << "\n";
    m << "boundary " << (cfg.cwt.boundary == Boundary::Replicate ? "replicate" : "periodic")
      << "\n";
    m << "wavelet mexican_hat\n";
    m << "config config.resolved.txt\n";
    if (!cfg.delta_t_label.empty()) m << "delta_t_label " << cfg.delta_t_label << "\n";
    for (const std::string& w : stack.warnings) m << "warning " << w << "\n";
    for (std::size_t i = 0; i < stack.planes.size(); ++i) {
      const std::string name = plane_file_name(i);
      write_field(stack.planes[i], dir / name);
      m << "plane " << i << " " << num(stack.scales[i]) << " " << name << "\n";
    }
    write_text_atomic(dir / "manifest.txt", m.str());
    return 0;
  });
  for (std::size_t i = 0; i < stack.planes.size(); ++i)
    render_field(stack.planes[i], cfg, dir, plane_stem(i));
}

PipelineResult run_pipeline(const RunConfig& cfg) {
  const std::filesystem::path dir = cfg.output_dir;
  staged(Stage::Write, [&] {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(Errc::Io, "cannot create output directory " + dir.string());
    write_text_atomic(dir / "config.resolved.txt", resolved_config(cfg));
    return 0;
  });

  const FringePair<double> fringes =
      cfg.uses_input_files() ? load_fringes(cfg) : synthesize(cfg).pair;

  PipelineResult r;
  r.phase = demodulate_pair(fringes, cfg);
  staged(Stage::Write, [&] {
    write_field(r.phase.field, dir / "phase.fgrid");
    return 0;
  });
  render_field(r.phase.field, cfg, dir, "phase");

  r.stack = staged(Stage::Cwt, [&] { return cwt_sweep(r.phase, cfg.cwt); });
  write_stack(r.stack, cfg, dir);
  return r;
}

int cmd_pipeline(const RunConfig& cfg, std::ostream& err) {
  try {
    const PipelineResult r = run_pipeline(cfg);
    for (const std::string& w : r.stack.warnings) err << "warning: " << w << "\n";
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace bos
