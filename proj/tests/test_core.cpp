#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "bos/core.hpp"
#include "oracles.hpp"

using namespace bos;

TEST_CASE("masked_extrema on a constant field") {
  Field f(GridSpec(8, 8), Field::Values::Constant(8, 8, 4.0));
  f.finalize();
  const auto [lo, hi] = masked_extrema(f);
  CHECK(lo == 4.0);
  CHECK(hi == 4.0);
}

TEST_CASE("masked_extrema ignores masked pixels") {
  Field::Values v = Field::Values::Zero(8, 8);
  Mask m = Mask::Constant(8, 8, false);
  v(0, 0) = -1;
  v(0, 1) = 0;
  v(0, 2) = 7;
  v(0, 3) = 100;
  m(0, 0) = m(0, 1) = m(0, 2) = true;
  Field f(GridSpec(8, 8), v, m);
  const auto [lo, hi] = masked_extrema(f);
  CHECK(lo == -1.0);
  CHECK(hi == 7.0);
}

TEST_CASE("masked_extrema matches an exhaustive scan") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const oracle::Raster r = oracle::random_raster(8, 8, 100 + trial, -5.0, 5.0);
    Mask m(8, 8);
    for (Index i = 0; i < 64; ++i) m.data()[i] = (rng() & 1) != 0;
    m(3, 3) = true;
    Field f(GridSpec(8, 8), r, m);
    double lo = 1e300, hi = -1e300;
    for (Index y = 0; y < 8; ++y)
      for (Index x = 0; x < 8; ++x)
        if (m(y, x)) {
          lo = std::min(lo, r(y, x));
          hi = std::max(hi, r(y, x));
        }
    const auto [got_lo, got_hi] = masked_extrema(f);
    CHECK(got_lo == lo);
    CHECK(got_hi == hi);
  }
}

TEST_CASE("masked_extrema on an all-masked field throws AllMasked") {
  Field f(GridSpec(8, 8), Field::Values::Ones(8, 8), Mask::Constant(8, 8, false));
  try {
    masked_extrema(f);
    FAIL("expected AllMasked");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::AllMasked);
  }
}

TEST_CASE("apply_mask identity, degenerate and rectangle cases") {
  const GridSpec g(16, 12);
  Field::Values ramp(12, 16);
  for (Index y = 0; y < 12; ++y)
    for (Index x = 0; x < 16; ++x) ramp(y, x) = 1.0 + x + 0.5 * y;
  const Field f(g, ramp);

  SUBCASE("all-true mask is the identity") {
    const Field out = apply_mask(f, Mask::Constant(12, 16, true));
    CHECK((out.values() == f.values()).all());
    CHECK(out.valid_count() == g.size());
  }
  SUBCASE("all-false mask zeroes everything and downstream sees AllMasked") {
    const Field out = apply_mask(f, Mask::Constant(12, 16, false));
    CHECK((out.values() == 0.0).all());
    CHECK_THROWS_AS(masked_extrema(out), Error);
  }
  SUBCASE("rib rectangle matches a per-pixel loop") {
    const Rect rib{10, 4, 5, 6};
    const Field out = apply_mask(f, rect_mask(g, rib, false));
    for (Index y = 0; y < 12; ++y)
      for (Index x = 0; x < 16; ++x) {
        const bool in_rib = x >= 10 && x < 15 && y >= 4 && y < 10;
        CHECK(out(x, y) == (in_rib ? 0.0 : ramp(y, x)));
        CHECK(out.valid(x, y) == !in_rib);
      }
  }
}

TEST_CASE("apply_mask is idempotent and combines with an existing mask") {
  const GridSpec g(9, 9);
  const oracle::Raster r = oracle::random_raster(9, 9, 5, -1, 1);
  Mask existing = Mask::Constant(9, 9, true);
  existing(0, 0) = false;
  const Field f(g, r, existing);
  const Mask m = rect_mask(g, Rect{2, 2, 3, 3}, false);
  const Field once = apply_mask(f, m);
  const Field twice = apply_mask(once, m);
  CHECK((once.values() == twice.values()).all());
  CHECK((*once.mask() == *twice.mask()).all());
  CHECK_FALSE(once.valid(0, 0));
  CHECK_FALSE(once.valid(3, 3));
  CHECK(once.valid(8, 8));

  const auto [lo, hi] = masked_extrema(once);
  double want_lo = 1e300, want_hi = -1e300;
  for (Index y = 0; y < 9; ++y)
    for (Index x = 0; x < 9; ++x)
      if (existing(y, x) && m(y, x)) {
        want_lo = std::min(want_lo, r(y, x));
        want_hi = std::max(want_hi, r(y, x));
      }
  CHECK(lo == want_lo);
  CHECK(hi == want_hi);
}

TEST_CASE("apply_mask rejects a mismatched mask") {
  const Field f(GridSpec(8, 8));
  try {
    apply_mask(f, Mask::Constant(8, 9, true));
    FAIL("expected GridMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::GridMismatch);
  }
}

TEST_CASE("finalize zeroes masked pixels and rejects non-finite values") {
  Mask m = Mask::Constant(8, 8, true);
  m(1, 1) = false;
  Field f(GridSpec(8, 8), Field::Values::Constant(8, 8, 3.0), m);
  f.finalize();
  CHECK(f(1, 1) == 0.0);
  CHECK(f(2, 2) == 3.0);
  CHECK(f.finalized());

  Field bad(GridSpec(8, 8), Field::Values::Constant(8, 8, std::nan("")));
  CHECK_THROWS_AS(bad.finalize(), Error);
}

TEST_CASE("grid and carrier validation") {
  CHECK_THROWS_AS(GridSpec(0, 4), Error);
  CHECK_NOTHROW(GridSpec(2, 2));
  CHECK_THROWS_AS(require_processing_grid(GridSpec(7, 64)), Error);
  CHECK_NOTHROW(require_processing_grid(GridSpec(8, 8)));
  CHECK_THROWS_AS((CarrierSpec{0.5, 1.0}.validate()), Error);
  CHECK_THROWS_AS((CarrierSpec{0.1, 0.0}.validate()), Error);
  CHECK_NOTHROW((CarrierSpec{0.125, 1.0}.validate()));
}

TEST_CASE("wrap_phase maps onto (-pi, pi]") {
  CHECK(wrap_phase(std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(wrap_phase(-std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(wrap_phase(6.0) == doctest::Approx(6.0 - 2 * std::numbers::pi));
  const oracle::Raster r = oracle::random_raster(1, 2000, 9, -50, 50);
  for (Index i = 0; i < r.size(); ++i) {
    const double w = wrap_phase(r(0, i));
    CHECK(w > -std::numbers::pi);
    CHECK(w <= std::numbers::pi);
    CHECK(w == doctest::Approx(oracle::wrap(r(0, i))).epsilon(1e-12));
  }
}
