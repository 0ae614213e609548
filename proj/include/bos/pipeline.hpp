#ifndef BOS_PIPELINE_HPP
#define BOS_PIPELINE_HPP

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "bos/config.hpp"
#include "bos/cwt.hpp"
#include "bos/synth.hpp"
#include "bos/wft.hpp"

namespace bos {

enum class Stage { Config, Synth, Load, Demod, Unwrap, Cwt, Render, Write };

const char* stage_name(Stage s);

/// An Error tagged with the pipeline stage that raised it.
class StageError : public Error {
 public:
  StageError(Stage stage, const Error& cause)
      : Error(cause.code(), std::string("[stage ") + stage_name(stage) + "] " + cause.what()),
        stage_(stage) {}
  Stage stage() const noexcept { return stage_; }

 private:
  Stage stage_;
};

/// 0 success, 2 configuration, 3 I/O, 4 numeric stage.
int exit_code_for(const Error& e);

struct Fringes {
  FringePair<double> pair;
  PhaseMap<double> truth;  // empty grid when loaded from files
};

Fringes synthesize(const RunConfig& cfg);
FringePair<double> load_fringes(const RunConfig& cfg);

/// Demodulates both images, forms the relative phase and (optionally)
/// unwraps it with ridge-amplitude quality.
PhaseMap<double> demodulate_pair(const FringePair<double>& fringes, const RunConfig& cfg);

/// One FGRID per plane, a manifest, and renders when enabled.
void write_stack(const WaveletStack<double>& stack, const RunConfig& cfg,
                 const std::filesystem::path& dir);

void render_field(const Field& f, const RunConfig& cfg, const std::filesystem::path& dir,
                  const std::string& stem);

struct PipelineResult {
  PhaseMap<double> phase;
  WaveletStack<double> stack;
};

/// synthesize/load -> demodulate -> unwrap -> CWT sweep -> normalize/threshold
/// -> write. Output directory receives phase.fgrid, plane_NN.fgrid,
/// manifest.txt, config.resolved.txt and renders. Throws StageError.
PipelineResult run_pipeline(const RunConfig& cfg);

/// run_pipeline with diagnostics on `err`; returns the process exit code.
int cmd_pipeline(const RunConfig& cfg, std::ostream& err);

std::string plane_stem(std::size_t index);
std::string plane_file_name(std::size_t index);

}  // namespace bos

#endif  // BOS_PIPELINE_HPP
