#ifndef BOS_ERROR_HPP
#define BOS_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace bos {

enum class Errc {
  AllMasked,
  GridMismatch,
  GridTooSmall,
  NonFinite,
  BadSpec,
  BadFrequency,
  EmptyBand,
  NoValidSeed,
  BadScale,
  UnsupportedFormat,
  CorruptHeader,
  CorruptPayload,
  TruncatedPayload,
  Io,
  Config,
};

constexpr std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::AllMasked: return "AllMasked";
    case Errc::GridMismatch: return "GridMismatch";
    case Errc::GridTooSmall: return "GridTooSmall";
    case Errc::NonFinite: return "NonFinite";
    case Errc::BadSpec: return "BadSpec";
    case Errc::BadFrequency: return "BadFrequency";
    case Errc::EmptyBand: return "EmptyBand";
    case Errc::NoValidSeed: return "NoValidSeed";
    case Errc::BadScale: return "BadScale";
    case Errc::UnsupportedFormat: return "UnsupportedFormat";
    case Errc::CorruptHeader: return "CorruptHeader";
    case Errc::CorruptPayload: return "CorruptPayload";
    case Errc::TruncatedPayload: return "TruncatedPayload";
    case Errc::Io: return "IoError";
    case Errc::Config: return "ConfigError";
  }
  return "Unknown";
}

/// Every failure in the library surfaces as this exception; `code()` is the
/// machine-readable kind, `what()` carries the human diagnostic.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace bos

#endif  // BOS_ERROR_HPP
