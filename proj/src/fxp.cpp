#include "neurocore/fxp.hpp"

#include <cmath>

#include "neurocore/error.hpp"

namespace neurocore::fxp {

namespace {

void require_same_format(Fixed a, Fixed b, const char* op) {
  if (a.format() != b.format()) {
    throw Error(ErrorCode::invalid_argument,
                std::string(op) + ": format mismatch " + to_string(a.format()) +
                    " vs " + to_string(b.format()));
  }
}

std::int64_t shift_right_floor(std::int64_t raw, int n) noexcept {
  if (n >= 63) return raw < 0 ? -1 : 0;
  return raw >> n;  // arithmetic on signed values since C++20
}

std::int64_t shift_left_saturating(std::int64_t raw, int n,
                                   FixedFormat fmt) noexcept {
  if (raw == 0) return 0;
  // |raw| < 2^32, so anything past 32 bits of shift saturates.
  if (n >= 32) return raw < 0 ? fmt.min_raw() : fmt.max_raw();
  return saturate(raw * (std::int64_t{1} << n), fmt);
}

std::int64_t shift_right_nearest(std::int64_t raw, int n) noexcept {
  if (n == 0) return raw;
  if (n >= 62) return 0;
  const std::int64_t half = std::int64_t{1} << (n - 1);
  const std::int64_t mag = raw < 0 ? -raw : raw;
  const std::int64_t q = (mag + half) >> n;
  return raw < 0 ? -q : q;
}

}  // namespace

std::string to_string(FixedFormat fmt) {
  return "{" + std::to_string(fmt.width) + "," + std::to_string(fmt.frac_bits) +
         "}";
}

FixedFormat checked(FixedFormat fmt) {
  if (!fmt.valid()) {
    throw Error(ErrorCode::invalid_argument,
                "invalid fixed-point format " + to_string(fmt));
  }
  return fmt;
}

Fixed encode(double x, FixedFormat fmt) {
  checked(fmt);
  if (!std::isfinite(x)) {
    throw Error(ErrorCode::numeric, "cannot encode non-finite value");
  }
  const double scaled = std::ldexp(x, fmt.frac_bits);
  // Clamp before the integer conversion; the range check below is exact for
  // anything inside +-2^40.
  const double limit = std::ldexp(1.0, 40);
  if (scaled >= limit) return Fixed::from_raw(fmt.max_raw(), fmt);
  if (scaled <= -limit) return Fixed::from_raw(fmt.min_raw(), fmt);
  return Fixed::from_raw(std::llround(scaled), fmt);
}

double decode(Fixed x) noexcept {
  return std::ldexp(static_cast<double>(x.raw()), -x.format().frac_bits);
}

Fixed sat_add(Fixed a, Fixed b) {
  require_same_format(a, b, "sat_add");
  return Fixed::from_raw(std::int64_t{a.raw()} + b.raw(), a.format());
}

Fixed sat_sub(Fixed a, Fixed b) {
  require_same_format(a, b, "sat_sub");
  return Fixed::from_raw(std::int64_t{a.raw()} - b.raw(), a.format());
}

Fixed sat_neg(Fixed a) noexcept {
  return Fixed::from_raw(-std::int64_t{a.raw()}, a.format());
}

Fixed mul_rescale(Fixed a, Fixed b) noexcept {
  const std::int64_t product = std::int64_t{a.raw()} * b.raw();
  return Fixed::from_raw(shift_right_floor(product, b.format().frac_bits),
                         a.format());
}

Fixed shr(Fixed a, int n) {
  if (n < 0) throw Error(ErrorCode::invalid_argument, "shr: negative shift");
  return Fixed::from_raw(shift_right_floor(a.raw(), n), a.format());
}

Fixed shl(Fixed a, int n) {
  if (n < 0) throw Error(ErrorCode::invalid_argument, "shl: negative shift");
  return Fixed::from_raw(shift_left_saturating(a.raw(), n, a.format()),
                         a.format());
}

Fixed convert(Fixed a, FixedFormat fmt) noexcept {
  const int diff = fmt.frac_bits - a.format().frac_bits;
  if (diff >= 0) {
    return Fixed::from_raw(shift_left_saturating(a.raw(), diff, fmt), fmt);
  }
  return Fixed::from_raw(shift_right_floor(a.raw(), -diff), fmt);
}

Fixed round_to(Fixed a, FixedFormat fmt) noexcept {
  return requantize(a.raw(), a.format().frac_bits, fmt);
}

Fixed requantize(std::int64_t raw, int frac_bits, FixedFormat fmt) noexcept {
  const int diff = fmt.frac_bits - frac_bits;
  if (diff >= 0) {
    if (raw == 0) return Fixed::from_raw(0, fmt);
    if (diff >= 62 || (raw < 0 ? -raw : raw) > (std::int64_t{1} << (62 - diff))) {
      return Fixed::from_raw(raw < 0 ? fmt.min_raw() : fmt.max_raw(), fmt);
    }
    return Fixed::from_raw(raw * (std::int64_t{1} << diff), fmt);
  }
  return Fixed::from_raw(shift_right_nearest(raw, -diff), fmt);
}

int compare(Fixed a, Fixed b) noexcept {
  const int fa = a.format().frac_bits;
  const int fb = b.format().frac_bits;
  // Both raws fit in 32 bits and fraction bits are < 32, so aligning to the
  // finer grid stays inside 64 bits.
  std::int64_t ra = a.raw();
  std::int64_t rb = b.raw();
  if (fa < fb) ra *= std::int64_t{1} << (fb - fa);
  if (fb < fa) rb *= std::int64_t{1} << (fa - fb);
  return (ra > rb) - (ra < rb);
}

}  // namespace neurocore::fxp
