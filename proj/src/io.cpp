#include "bos/io.hpp"

#include <bit>
#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unistd.h>

namespace bos {
namespace {

std::string at(std::size_t offset) { return " at byte offset " + std::to_string(offset); }

std::string fgrid_header(Index w, Index h, bool has_mask) {
  return "FGRID 1 " + std::to_string(w) + " " + std::to_string(h) + " " + (has_mask ? "1" : "0") +
         "\n";
}

bool parse_positive(std::string_view s, Index& out) {
  if (s.empty() || s.front() == '0' || s.front() == '+' || s.front() == '-') return false;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size() && out > 0;
}

/// Finalizes a decoded field when doing so changes no bits.
void finalize_if_clean(Field& f) {
  const Field& cf = f;
  if (!cf.values().allFinite()) return;
  if (cf.has_mask() && (!(*cf.mask()) && (cf.values() != 0.0)).any()) return;
  f.finalize();
}

}  // namespace

std::vector<std::uint8_t> encode_fgrid(const Field& f) {
  const std::string header = fgrid_header(f.width(), f.height(), f.has_mask());
  const std::size_t n = static_cast<std::size_t>(f.grid().size());
  std::vector<std::uint8_t> out;
  out.reserve(header.size() + 8 * n + (f.has_mask() ? n : 0));
  out.insert(out.end(), header.begin(), header.end());
  const double* v = f.values().data();
  for (std::size_t i = 0; i < n; ++i) {
    const auto bits = std::bit_cast<std::uint64_t>(v[i]);
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
  }
  if (f.has_mask()) {
    const bool* m = f.mask()->data();
    for (std::size_t i = 0; i < n; ++i) out.push_back(m[i] ? 1 : 0);
  }
  return out;
}

Field decode_fgrid(std::span<const std::uint8_t> bytes) {
  std::size_t eol = 0;
  while (eol < bytes.size() && eol < 128 && bytes[eol] != '\n') ++eol;
  if (eol >= bytes.size() || bytes[eol] != '\n')
    throw Error(Errc::CorruptHeader, "FGRID header is not newline-terminated" + at(eol));
  const std::string line(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(eol));

  std::vector<std::string_view> tok;
  for (std::size_t pos = 0; pos <= line.size();) {
    const std::size_t sp = std::min(line.find(' ', pos), line.size());
    tok.emplace_back(line.data() + pos, sp - pos);
    pos = sp + 1;
  }
  if (tok.size() != 5 || tok[0] != "FGRID")
    throw Error(Errc::CorruptHeader, "malformed FGRID header" + at(0));
  if (tok[1] != "1") throw Error(Errc::UnsupportedFormat, "unknown FGRID version" + at(6));
  Index w = 0, h = 0;
  if (!parse_positive(tok[2], w) || !parse_positive(tok[3], h) ||
      (tok[4] != "0" && tok[4] != "1"))
    throw Error(Errc::CorruptHeader, "bad FGRID dimensions or mask flag" + at(8));
  const bool has_mask = tok[4] == "1";

  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  const std::size_t values_at = eol + 1;
  const std::size_t mask_at = values_at + 8 * n;
  const std::size_t end = mask_at + (has_mask ? n : 0);
  if (bytes.size() < end)
    throw Error(Errc::TruncatedPayload, "FGRID payload ends early, expected " +
                                            std::to_string(end) + " bytes" + at(bytes.size()));
  if (bytes.size() > end)
    throw Error(Errc::CorruptPayload, "trailing bytes after FGRID payload" + at(end));

  GridSpec grid(w, h);
  Field::Values values(h, w);
  double* v = values.data();
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b)
      bits |= static_cast<std::uint64_t>(bytes[values_at + 8 * i + b]) << (8 * b);
    v[i] = std::bit_cast<double>(bits);
  }
  std::optional<Mask> mask;
  if (has_mask) {
    mask = Mask(h, w);
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint8_t b = bytes[mask_at + i];
      if (b > 1) throw Error(Errc::CorruptPayload, "mask byte is not 0 or 1" + at(mask_at + i));
      mask->data()[i] = b == 1;
    }
  }
  Field out(grid, std::move(values), std::move(mask));
  finalize_if_clean(out);
  return out;
}

Field decode_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
    throw Error(Errc::UnsupportedFormat, "not a binary PGM (P5)" + at(0));
  std::size_t pos = 2;
  auto is_space = [](std::uint8_t c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
  };
  auto next_number = [&](const char* what) -> Index {
    for (;;) {
      while (pos < bytes.size() && is_space(bytes[pos])) ++pos;
      if (pos < bytes.size() && bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        continue;
      }
      break;
    }
    const std::size_t start = pos;
    Index value = 0;
    while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
      value = value * 10 + (bytes[pos] - '0');
      if (value > (Index(1) << 31)) break;
      ++pos;
    }
    if (pos == start || pos >= bytes.size() || !is_space(bytes[pos]) || value <= 0)
      throw Error(Errc::CorruptHeader, std::string("bad PGM ") + what + at(start));
    return value;
  };
  const Index w = next_number("width");
  const Index h = next_number("height");
  const std::size_t maxval_at = pos;
  const Index maxval = next_number("maxval");
  if (maxval > 65535) throw Error(Errc::CorruptHeader, "PGM maxval exceeds 65535" + at(maxval_at));
  ++pos;  // single whitespace byte before the raster

  const std::size_t bps = maxval > 255 ? 2 : 1;
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (bytes.size() < pos + n * bps)
    throw Error(Errc::TruncatedPayload, "PGM raster ends early, expected " +
                                            std::to_string(pos + n * bps) + " bytes" +
                                            at(bytes.size()));
  Field::Values values(h, w);
  const double scale = static_cast<double>(maxval);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t o = pos + i * bps;
    const unsigned sample = bps == 2 ? (unsigned(bytes[o]) << 8) | bytes[o + 1] : bytes[o];
    values.data()[i] = static_cast<double>(sample) / scale;
  }
  Field out(GridSpec(w, h), std::move(values));
  out.finalize();
  return out;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(Errc::Io, "read failed for " + path.string());
  return data;
}

Field read_image(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_bytes(path);
  static constexpr std::string_view kFgrid = "FGRID ";
  if (bytes.size() >= kFgrid.size() && std::equal(kFgrid.begin(), kFgrid.end(), bytes.begin()))
    return decode_fgrid(bytes);
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') return decode_pgm(bytes);
  throw Error(Errc::UnsupportedFormat, path.string() + " is neither FGRID nor binary PGM" + at(0));
}

void write_bytes_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot create " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(Errc::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(Errc::Io, "cannot move output into place: " + path.string());
  }
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  write_bytes_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

void write_field(const Field& f, const std::filesystem::path& path) {
  write_bytes_atomic(path, encode_fgrid(f));
}

}  // namespace bos
