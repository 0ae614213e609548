#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cstring>
#include <filesystem>
#include <limits>
#include <string>
#include <unistd.h>

#include "bos/io.hpp"

using namespace bos;
namespace fs = std::filesystem;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("bos_io_" + name + "_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::Io;
}

std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

bool same_bits(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid()) || a.has_mask() != b.has_mask()) return false;
  if (std::memcmp(a.values().data(), b.values().data(), sizeof(double) * a.grid().size()) != 0)
    return false;
  return !a.has_mask() || (*a.mask() == *b.mask()).all();
}

Field awkward_field() {
  Field::Values v(3, 4);
  v << 0.0, -0.0, std::numeric_limits<double>::denorm_min(), -std::numeric_limits<double>::denorm_min(),
      std::numeric_limits<double>::max(), -std::numeric_limits<double>::max(),
      std::numeric_limits<double>::min(), 1e-310, -1e308, 0.1, -2.5, 3.0;
  return Field(GridSpec(4, 3), v);
}

}  // namespace

TEST_CASE("8-bit PGM scales by maxval") {
  std::vector<std::uint8_t> b = bytes_of("P5\n# comment\n2 2\n255\n");
  for (std::uint8_t px : {0, 255, 128, 64}) b.push_back(px);
  const Field f = decode_pgm(b);
  CHECK(f.width() == 2);
  CHECK(f.height() == 2);
  CHECK(f(0, 0) == 0.0);
  CHECK(f(1, 0) == 1.0);
  CHECK(f(0, 1) == 128.0 / 255.0);
  CHECK(f(1, 1) == 64.0 / 255.0);
  CHECK_FALSE(f.has_mask());
}

TEST_CASE("16-bit PGM is big-endian") {
  std::vector<std::uint8_t> b = bytes_of("P5 3 1 1000\n");
  for (unsigned s : {0u, 1000u, 258u}) {
    b.push_back(static_cast<std::uint8_t>(s >> 8));
    b.push_back(static_cast<std::uint8_t>(s & 0xff));
  }
  const Field f = decode_pgm(b);
  CHECK(f(0, 0) == 0.0);
  CHECK(f(1, 0) == 1.0);
  CHECK(f(2, 0) == 258.0 / 1000.0);
}

TEST_CASE("PGM errors name byte offsets") {
  CHECK(code_of([] { decode_pgm(bytes_of("P2 1 1 255\n0")); }) == Errc::UnsupportedFormat);
  CHECK(code_of([] { decode_pgm(bytes_of("P5 x 1 255\n0")); }) == Errc::CorruptHeader);
  CHECK(message_of([] { decode_pgm(bytes_of("P5 x 1 255\n0")); }).find("offset 3") !=
        std::string::npos);
  CHECK(code_of([] { decode_pgm(bytes_of("P5 2 2 255\nabc")); }) == Errc::TruncatedPayload);
  CHECK(message_of([] { decode_pgm(bytes_of("P5 2 2 255\nabc")); }).find("offset 14") !=
        std::string::npos);
  CHECK(code_of([] { decode_pgm(bytes_of("P5 1 1 70000\n00")); }) == Errc::CorruptHeader);
}

TEST_CASE("FGRID layout") {
  Field f(GridSpec(2, 1), Field::Values::Constant(1, 2, 1.0), Mask::Constant(1, 2, true));
  const auto b = encode_fgrid(f);
  const std::string header = "FGRID 1 2 1 1\n";
  REQUIRE(b.size() == header.size() + 16 + 2);
  CHECK(std::string(b.begin(), b.begin() + header.size()) == header);
  // 1.0 = 0x3FF0000000000000, little-endian
  CHECK(b[header.size() + 6] == 0xF0);
  CHECK(b[header.size() + 7] == 0x3F);
  CHECK(b[header.size() + 16] == 1);
}

TEST_CASE("FGRID round trip is bit exact") {
  const Field f = awkward_field();
  const Field g = decode_fgrid(encode_fgrid(f));
  CHECK(same_bits(f, g));
  CHECK(std::signbit(g(1, 0)));

  Mask m = Mask::Constant(3, 4, true);
  m(0, 1) = false;  // holds -0
  m(2, 2) = false;  // holds -2.5, not clean
  const Field masked(GridSpec(4, 3), f.values(), m);
  const Field h = decode_fgrid(encode_fgrid(masked));
  CHECK(same_bits(masked, h));
  CHECK_FALSE(h.finalized());

  const fs::path dir = scratch_dir("roundtrip");
  write_field(masked, dir / "f.fgrid");
  CHECK(same_bits(masked, read_image(dir / "f.fgrid")));
  for (const auto& e : fs::directory_iterator(dir)) CHECK(e.path().filename() == "f.fgrid");
  fs::remove_all(dir);
}

TEST_CASE("FGRID decoding errors") {
  const Field f(GridSpec(2, 2), Field::Values::Zero(2, 2), Mask::Constant(2, 2, true));
  const auto good = encode_fgrid(f);  // 14 header + 32 + 4

  auto truncated = good;
  truncated.resize(30);
  CHECK(code_of([&] { decode_fgrid(truncated); }) == Errc::TruncatedPayload);
  CHECK(message_of([&] { decode_fgrid(truncated); }).find("offset 30") != std::string::npos);

  auto trailing = good;
  trailing.push_back(0);
  CHECK(code_of([&] { decode_fgrid(trailing); }) == Errc::CorruptPayload);
  CHECK(message_of([&] { decode_fgrid(trailing); }).find("offset 50") != std::string::npos);

  auto bad_mask = good;
  bad_mask[47] = 7;
  CHECK(code_of([&] { decode_fgrid(bad_mask); }) == Errc::CorruptPayload);
  CHECK(message_of([&] { decode_fgrid(bad_mask); }).find("offset 47") != std::string::npos);

  CHECK(code_of([] { decode_fgrid(bytes_of("FGRID 2 1 1 0\n01234567")); }) ==
        Errc::UnsupportedFormat);
  CHECK(code_of([] { decode_fgrid(bytes_of("FGRID 1 0 1 0\n")); }) == Errc::CorruptHeader);
  CHECK(code_of([] { decode_fgrid(bytes_of("FGRID 1 1 1 2\n01234567")); }) ==
        Errc::CorruptHeader);
  CHECK(code_of([] { decode_fgrid(bytes_of("FGRID  1 1 1 0\n01234567")); }) ==
        Errc::CorruptHeader);
  CHECK(code_of([] { decode_fgrid(bytes_of("FGRID 1 1 1 0")); }) == Errc::CorruptHeader);
}

TEST_CASE("read_image dispatch and file errors") {
  const fs::path dir = scratch_dir("dispatch");
  const std::string junk = "GIF89a";
  write_text_atomic(dir / "x.gif", junk);
  CHECK(code_of([&] { read_image(dir / "x.gif"); }) == Errc::UnsupportedFormat);
  CHECK(code_of([&] { read_image(dir / "missing.fgrid"); }) == Errc::Io);
  std::string pgm = "P5 1 1 255\n";
  pgm.push_back('\x80');
  write_text_atomic(dir / "p.pgm", pgm);
  CHECK(read_image(dir / "p.pgm")(0, 0) == 128.0 / 255.0);
  CHECK(code_of([&] { write_text_atomic(dir / "no" / "such" / "file", "x"); }) == Errc::Io);
  fs::remove_all(dir);
}
