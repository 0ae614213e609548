#include "bos/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "bos/io.hpp"

namespace bos {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_value(const std::string& key, std::string_view value, const char* want) {
  throw Error(Errc::Config, "key '" + key + "': cannot read '" + std::string(value) + "' as " + want);
}

double to_double(const std::string& key, std::string_view v) {
  v = trim(v);
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty()) bad_value(key, v, "a number");
  return out;
}

long long to_int(const std::string& key, std::string_view v) {
  v = trim(v);
  long long out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty()) bad_value(key, v, "an integer");
  return out;
}

std::uint64_t to_u64(const std::string& key, std::string_view v) {
  v = trim(v);
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty())
    bad_value(key, v, "an unsigned integer");
  return out;
}

bool to_bool(const std::string& key, std::string_view v) {
  v = trim(v);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, v, "a boolean");
}

std::vector<double> to_list(const std::string& key, std::string_view v) {
  std::vector<double> out;
  while (true) {
    const std::size_t comma = v.find(',');
    out.push_back(to_double(key, v.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

std::pair<double, double> to_pair(const std::string& key, std::string_view v) {
  const std::vector<double> l = to_list(key, v);
  if (l.size() != 2) bad_value(key, v, "two comma-separated numbers");
  return {l[0], l[1]};
}

std::optional<Rect> to_rect(const std::string& key, std::string_view v) {
  if (trim(v) == "none") return std::nullopt;
  const std::vector<double> l = to_list(key, v);
  if (l.size() != 4) bad_value(key, v, "x,y,width,height");
  for (double d : l)
    if (d != std::floor(d)) bad_value(key, v, "integer pixel coordinates");
  return Rect{Index(l[0]), Index(l[1]), Index(l[2]), Index(l[3])};
}

/// Shortest text that parses back to the same double.
std::string num(double d) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, d);
  return std::string(buf, end);
}

std::string rect_str(const std::optional<Rect>& r) {
  if (!r) return "none";
  return std::to_string(r->x) + "," + std::to_string(r->y) + "," + std::to_string(r->width) + "," +
         std::to_string(r->height);
}

const char* kind_name(PhantomKind k) {
  switch (k) {
    case PhantomKind::Constant: return "constant";
    case PhantomKind::GaussianPlume: return "gaussian_plume";
    case PhantomKind::RibStep: return "rib_step";
    case PhantomKind::Ramp: return "ramp";
    case PhantomKind::FromFile: return "from_file";
  }
  return "?";
}

void apply(RunConfig& c, const std::string& key, std::string_view value, bool& band_x_set) {
  const std::string_view v = trim(value);
  if (key == "grid.width") {
    c.grid = GridSpec(to_int(key, v), c.grid.height);
  } else if (key == "grid.height") {
    c.grid = GridSpec(c.grid.width, to_int(key, v));
  } else if (key == "phantom.kind") {
    static const std::map<std::string_view, PhantomKind> kinds = {
        {"constant", PhantomKind::Constant}, {"gaussian_plume", PhantomKind::GaussianPlume},
        {"rib_step", PhantomKind::RibStep},  {"ramp", PhantomKind::Ramp},
        {"from_file", PhantomKind::FromFile}};
    const auto it = kinds.find(v);
    if (it == kinds.end()) bad_value(key, v, "a phantom kind");
    c.phantom.kind = it->second;
  } else if (key == "phantom.peak") {
    c.phantom.peak = to_double(key, v);
  } else if (key == "phantom.center") {
    std::tie(c.phantom.center_x, c.phantom.center_y) = to_pair(key, v);
  } else if (key == "phantom.sigma") {
    std::tie(c.phantom.sigma_x, c.phantom.sigma_y) = to_pair(key, v);
  } else if (key == "phantom.rib") {
    c.phantom.rib = to_rect(key, v);
  } else if (key == "phantom.file") {
    c.phantom.file_path = std::string(v);
  } else if (key == "carrier.fx") {
    c.carrier.fx = to_double(key, v);
  } else if (key == "carrier.amplitude") {
    c.carrier.amplitude = to_double(key, v);
  } else if (key == "noise.sigma") {
    c.noise.sigma = to_double(key, v);
  } else if (key == "noise.seed") {
    c.noise.seed = to_u64(key, v);
  } else if (key == "input.reference") {
    c.input_reference = std::string(v);
  } else if (key == "input.deformed") {
    c.input_deformed = std::string(v);
  } else if (key == "demod.window_sigma") {
    c.demod.window_sigma = to_double(key, v);
  } else if (key == "demod.band_x") {
    c.demod.band_x = to_pair(key, v);
    band_x_set = true;
  } else if (key == "demod.band_y") {
    c.demod.band_y = to_pair(key, v);
  } else if (key == "demod.step") {
    c.demod.step = to_double(key, v);
  } else if (key == "demod.unwrap") {
    c.unwrap = to_bool(key, v);
  } else if (key == "demod.far_field") {
    c.unwrap_options.far_field = to_rect(key, v);
  } else if (key == "cwt.scales") {
    if (v == "default") {
      c.cwt.scales = CwtParams::default_scales();
    } else if (v.starts_with("log:")) {
      const std::vector<double> l = to_list(key, v.substr(4));
      if (l.size() != 3 || l[2] != std::floor(l[2])) bad_value(key, v, "log:min,max,count");
      c.cwt.scales = CwtParams::log_spaced(l[0], l[1], int(l[2]));
    } else {
      c.cwt.scales = to_list(key, v);
    }
  } else if (key == "cwt.threshold_fraction") {
    c.cwt.threshold_fraction = to_double(key, v);
  } else if (key == "cwt.threshold_mode") {
    if (v == "magnitude")
      c.cwt.threshold_mode = ThresholdMode::Magnitude;
    else if (v == "peak_clip")
      c.cwt.threshold_mode = ThresholdMode::PeakClip;
    else
      bad_value(key, v, "magnitude|peak_clip");
  } else if (key == "cwt.normalize") {
    c.cwt.normalize = to_bool(key, v);
  } else if (key == "cwt.threshold") {
    c.cwt.threshold = to_bool(key, v);
  } else if (key == "cwt.boundary") {
    if (v == "replicate")
      c.cwt.boundary = Boundary::Replicate;
    else if (v == "periodic")
      c.cwt.boundary = Boundary::Periodic;
    else
      bad_value(key, v, "replicate|periodic");
  } else if (key == "output.dir") {
    c.output_dir = std::string(v);
  } else if (key == "output.contour_levels") {
    c.contour_levels = int(to_int(key, v));
  } else if (key == "output.heatmaps") {
    c.heatmaps = to_bool(key, v);
  } else if (key == "output.contours") {
    c.contours = to_bool(key, v);
  } else if (key == "meta.delta_t_label") {
    c.delta_t_label = std::string(v);
  } else {
    throw Error(Errc::Config, "unknown key '" + key + "'");
  }
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "grid.width",         "grid.height",      "phantom.kind",       "phantom.peak",
      "phantom.center",     "phantom.sigma",    "phantom.rib",        "phantom.file",
      "carrier.fx",         "carrier.amplitude", "noise.sigma",       "noise.seed",
      "input.reference",    "input.deformed",   "demod.window_sigma", "demod.band_x",
      "demod.band_y",       "demod.step",       "demod.unwrap",       "demod.far_field",
      "cwt.scales",         "cwt.threshold_fraction", "cwt.threshold_mode", "cwt.normalize",
      "cwt.threshold",      "cwt.boundary",     "output.dir",         "output.contour_levels",
      "output.heatmaps",    "output.contours",  "meta.delta_t_label"};
  return keys;
}

std::pair<std::string, std::string> split_setting(std::string_view setting) {
  const std::size_t eq = setting.find('=');
  if (eq == std::string_view::npos)
    throw Error(Errc::Config, "expected key=value, got '" + std::string(setting) + "'");
  return {std::string(trim(setting.substr(0, eq))), std::string(trim(setting.substr(eq + 1)))};
}

RunConfig parse_config(std::string_view text,
                       const std::vector<std::pair<std::string, std::string>>& overrides) {
  std::vector<std::pair<std::string, std::string>> settings;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.find('=') == std::string_view::npos)
      throw Error(Errc::Config, "line " + std::to_string(line_no) + ": expected key = value");
    settings.push_back(split_setting(line));
  }
  settings.insert(settings.end(), overrides.begin(), overrides.end());

  RunConfig cfg;
  bool band_x_set = false;
  for (const auto& [key, value] : settings) {
    try {
      apply(cfg, key, value, band_x_set);
    } catch (const Error& e) {
      if (e.code() == Errc::Config) throw;
      throw Error(Errc::Config, "key '" + key + "': " + e.what());
    }
  }
  if (!band_x_set) cfg.demod.band_x = DemodParams::for_carrier(cfg.carrier.fx).band_x;

  try {
    cfg.carrier.validate();
    cfg.demod.validate();
    cfg.cwt.validate();
    if (!cfg.uses_input_files()) cfg.phantom.validate(cfg.grid);
  } catch (const Error& e) {
    throw Error(Errc::Config, e.what());
  }
  if (cfg.uses_input_files() && (cfg.input_reference.empty() || cfg.input_deformed.empty()))
    throw Error(Errc::Config, "input.reference and input.deformed must be given together");
  if (!(cfg.noise.sigma >= 0.0)) throw Error(Errc::Config, "noise.sigma must be non-negative");
  if (cfg.contour_levels < 0) throw Error(Errc::Config, "output.contour_levels must be >= 0");
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path,
                      const std::vector<std::pair<std::string, std::string>>& overrides) {
  std::vector<std::uint8_t> bytes;
  try {
    bytes = read_bytes(path);
  } catch (const Error& e) {
    throw Error(Errc::Config, e.what());
  }
  return parse_config(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()),
                      overrides);
}

std::string resolved_config(const RunConfig& c) {
  std::ostringstream os;
  os << "# resolved configuration (all defaults materialized)\n";
  os << "# noise.rng: " << GaussianStream::kAlgorithm << "\n";
  os << "grid.width = " << c.grid.width << "\n";
  os << "grid.height = " << c.grid.height << "\n";
  os << "phantom.kind = " << kind_name(c.phantom.kind) << "\n";
  os << "phantom.peak = " << num(c.phantom.peak) << "\n";
  os << "phantom.center = " << num(c.phantom.center_x) << "," << num(c.phantom.center_y) << "\n";
  os << "phantom.sigma = " << num(c.phantom.sigma_x) << "," << num(c.phantom.sigma_y) << "\n";
  os << "phantom.rib = " << rect_str(c.phantom.rib) << "\n";
  if (!c.phantom.file_path.empty()) os << "phantom.file = " << c.phantom.file_path << "\n";
  os << "carrier.fx = " << num(c.carrier.fx) << "\n";
  os << "carrier.amplitude = " << num(c.carrier.amplitude) << "\n";
  os << "noise.sigma = " << num(c.noise.sigma) << "\n";
  os << "noise.seed = " << c.noise.seed << "\n";
  if (!c.input_reference.empty()) os << "input.reference = " << c.input_reference << "\n";
  if (!c.input_deformed.empty()) os << "input.deformed = " << c.input_deformed << "\n";
  os << "demod.window_sigma = " << num(c.demod.window_sigma) << "\n";
  os << "demod.band_x = " << num(c.demod.band_x.first) << "," << num(c.demod.band_x.second) << "\n";
  os << "demod.band_y = " << num(c.demod.band_y.first) << "," << num(c.demod.band_y.second) << "\n";
  os << "demod.step = " << num(c.demod.step) << "\n";
  os << "demod.unwrap = " << (c.unwrap ? "true" : "false") << "\n";
  os << "demod.far_field = " << rect_str(c.unwrap_options.far_field) << "\n";
  os << "cwt.scales = ";
  for (std::size_t i = 0; i < c.cwt.scales.size(); ++i)
    os << (i ? "," : "") << num(c.cwt.scales[i]);
  os << "\n";
  os << "cwt.threshold_fraction = " << num(c.cwt.threshold_fraction) << "\n";
  os << "cwt.threshold_mode = "
     << (c.cwt.threshold_mode == ThresholdMode::Magnitude ? "magnitude" : "peak_clip") << "\n";
  os << "cwt.normalize = " << (c.cwt.normalize ? "true" : "false") << "\n";
  os << "cwt.threshold = " << (c.cwt.threshold ? "true" : "false") << "\n";
  os << "cwt.boundary = " << (c.cwt.boundary == Boundary::Replicate ? "replicate" : "periodic")
     << "\n";
  os << "output.dir = " << c.output_dir << "\n";
  os << "output.contour_levels = " << c.contour_levels << "\n";
  os << "output.heatmaps = " << (c.heatmaps ? "true" : "false") << "\n";
  os << "output.contours = " << (c.contours ? "true" : "false") << "\n";
  if (!c.delta_t_label.empty()) os << "meta.delta_t_label = " << c.delta_t_label << "\n";
  return os.str();
}

}  // namespace bos
