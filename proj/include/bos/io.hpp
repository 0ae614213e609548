#ifndef BOS_IO_HPP
#define BOS_IO_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "bos/core.hpp"

namespace bos {

// FGRID: lossless interchange for signed real fields.
//   header  "FGRID 1 <width> <height> <has_mask>\n"   (ASCII, single spaces)
//   values  width*height IEEE-754 binary64, little-endian, row-major
//   mask    width*height bytes of 0/1, present iff has_mask == 1

std::vector<std::uint8_t> encode_fgrid(const Field& f);
Field decode_fgrid(std::span<const std::uint8_t> bytes);

/// Binary PGM (P5), 8- or 16-bit; samples scaled to [0, 1] by maxval.
Field decode_pgm(std::span<const std::uint8_t> bytes);

/// Dispatches on the file magic: FGRID or P5.
Field read_image(const std::filesystem::path& path);

void write_field(const Field& f, const std::filesystem::path& path);

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);

/// Writes through a sibling temporary file and renames it into place.
void write_bytes_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace bos

#endif  // BOS_IO_HPP
