#ifndef BOS_CONFIG_HPP
#define BOS_CONFIG_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bos/core.hpp"
#include "bos/cwt.hpp"
#include "bos/synth.hpp"
#include "bos/wft.hpp"

namespace bos {

/// Fully-resolved run parameters. Text form is one `key = value` per line,
/// `#` starts a comment; unknown keys are rejected.
struct RunConfig {
  GridSpec grid{512, 512};
  PhantomSpec phantom;
  CarrierSpec carrier;
  NoiseSpec noise;
  std::string input_reference;  // when both inputs are set they replace the phantom
  std::string input_deformed;
  DemodParams demod;
  bool unwrap = true;
  UnwrapOptions unwrap_options;
  CwtParams cwt;
  std::string output_dir = "out";
  int contour_levels = 8;
  bool heatmaps = true;
  bool contours = true;
  std::string delta_t_label;

  bool uses_input_files() const { return !input_reference.empty() || !input_deformed.empty(); }
};

/// Every accepted key, in echo order.
const std::vector<std::string>& config_keys();

/// Applies `key = value` settings in order on top of the defaults. The x
/// search band follows the carrier (fx +/- 0.1) unless demod.band_x is given.
RunConfig parse_config(std::string_view text,
                       const std::vector<std::pair<std::string, std::string>>& overrides = {});

RunConfig load_config(const std::filesystem::path& path,
                      const std::vector<std::pair<std::string, std::string>>& overrides = {});

/// Splits "key=value" (whitespace around either side is trimmed).
std::pair<std::string, std::string> split_setting(std::string_view setting);

/// Echo with every default materialized; parsing the echo reproduces `cfg`.
std::string resolved_config(const RunConfig& cfg);

}  // namespace bos

#endif  // BOS_CONFIG_HPP
