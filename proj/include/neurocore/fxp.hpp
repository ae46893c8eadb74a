#pragma once

// Saturating signed fixed-point arithmetic with explicit widths, matching the
// neurocore datapath: encode rounds to nearest (ties away from zero), every
// runtime rescale is an arithmetic right shift (floor), and every result is
// clamped to its format instead of wrapping.

#include <cstdint>
#include <string>

namespace neurocore::fxp {

struct FixedFormat {
  int width = 24;      // total bits including sign, 1..32
  int frac_bits = 12;  // 0..width-1

  constexpr bool valid() const noexcept {
    return width >= 1 && width <= 32 && frac_bits >= 0 && frac_bits < width;
  }
  constexpr std::int64_t min_raw() const noexcept {
    return -(std::int64_t{1} << (width - 1));
  }
  constexpr std::int64_t max_raw() const noexcept {
    return (std::int64_t{1} << (width - 1)) - 1;
  }

  friend constexpr bool operator==(FixedFormat, FixedFormat) = default;
};

std::string to_string(FixedFormat fmt);

/// Throws Error(invalid_argument) when fmt violates the width/fraction bounds.
FixedFormat checked(FixedFormat fmt);

constexpr std::int64_t saturate(std::int64_t raw, FixedFormat fmt) noexcept {
  if (raw < fmt.min_raw()) return fmt.min_raw();
  if (raw > fmt.max_raw()) return fmt.max_raw();
  return raw;
}

class Fixed {
 public:
  constexpr Fixed() = default;

  /// Saturates raw into fmt.
  static constexpr Fixed from_raw(std::int64_t raw, FixedFormat fmt) noexcept {
    Fixed f;
    f.raw_ = static_cast<std::int32_t>(saturate(raw, fmt));
    f.fmt_ = fmt;
    return f;
  }

  constexpr std::int32_t raw() const noexcept { return raw_; }
  constexpr FixedFormat format() const noexcept { return fmt_; }

  friend constexpr bool operator==(Fixed, Fixed) = default;

 private:
  std::int32_t raw_ = 0;
  FixedFormat fmt_{};
};

Fixed encode(double x, FixedFormat fmt);
double decode(Fixed x) noexcept;

/// Operands must share a format.
Fixed sat_add(Fixed a, Fixed b);
Fixed sat_sub(Fixed a, Fixed b);
Fixed sat_neg(Fixed a) noexcept;

/// a * b with a 64-bit product, shifted right (floor) by b's fraction bits.
/// The result keeps a's format; with equal fraction bits this is the plain
/// Q-format multiply.
Fixed mul_rescale(Fixed a, Fixed b) noexcept;

/// Arithmetic right shift, floor semantics on negatives.
Fixed shr(Fixed a, int n);
/// Left shift with saturation.
Fixed shl(Fixed a, int n);

/// Moves a into fmt by shifting over the fraction-bit difference (left shift
/// when gaining fraction bits, floor right shift when losing them).
Fixed convert(Fixed a, FixedFormat fmt) noexcept;

/// Same as convert, but rounds to nearest (ties away from zero) when
/// fraction bits are dropped.
Fixed round_to(Fixed a, FixedFormat fmt) noexcept;

/// Rounds a wide raw value with `frac_bits` fraction bits to nearest (ties
/// away from zero) on fmt's grid, then saturates.
Fixed requantize(std::int64_t raw, int frac_bits, FixedFormat fmt) noexcept;

/// Three-way compare of the represented values; formats may differ.
int compare(Fixed a, Fixed b) noexcept;

namespace formats {
// Compartment state fields.
inline constexpr FixedFormat V{24, 12};
inline constexpr FixedFormat U{24, 12};
inline constexpr FixedFormat AB{16, 12};
inline constexpr FixedFormat CD{24, 12};
inline constexpr FixedFormat ISYN{24, 12};
inline constexpr FixedFormat ICONST{16, 12};
inline constexpr FixedFormat DDOP{16, 12};
// Dendrite accumulator: 3 fraction bits; the width is not fixed by the
// hardware description, 16 is the default.
inline constexpr FixedFormat DA{16, 3};
// Microcode registers and group constants.
inline constexpr FixedFormat REG{32, 12};
inline constexpr FixedFormat PARAM{16, 12};
inline constexpr FixedFormat FINE{32, 24};
// Synaptic weights as stored per synapse.
inline constexpr FixedFormat WEIGHT{24, 12};
}  // namespace formats

}  // namespace neurocore::fxp
