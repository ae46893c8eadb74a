#pragma once

// Packed compartment state. Three 64-bit words hold the Izhikevich variables
// and per-neuron parameters as raw fixed-point bit fields:
//
//   word 0: a[0..16)  b[16..32)  i_syn[32..56)
//   word 1: c[0..24)  d[24..48)  delta_dop[48..64)
//   word 2: v[0..24)  u[24..48)  i_const[48..64)

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "neurocore/fxp.hpp"

namespace neurocore {

enum class Field : std::uint8_t { a, b, i_syn, c, d, delta_dop, v, u, i_const };

inline constexpr std::size_t kFieldCount = 9;
inline constexpr std::size_t kStateWordCount = 3;

struct FieldLayout {
  std::string_view name;
  int word;
  int offset;
  fxp::FixedFormat format;
};

const FieldLayout& layout(Field f) noexcept;
std::optional<Field> field_from_name(std::string_view name) noexcept;

struct CompartmentWords {
  std::array<std::uint64_t, kStateWordCount> word{};

  friend constexpr bool operator==(const CompartmentWords&,
                                   const CompartmentWords&) = default;
};

/// Unpacked raw field values, indexed by Field.
struct CompartmentFields {
  std::array<std::int32_t, kFieldCount> raw{};

  std::int32_t& operator[](Field f) noexcept {
    return raw[static_cast<std::size_t>(f)];
  }
  std::int32_t operator[](Field f) const noexcept {
    return raw[static_cast<std::size_t>(f)];
  }
  fxp::Fixed fixed(Field f) const noexcept {
    return fxp::Fixed::from_raw((*this)[f], layout(f).format);
  }

  friend constexpr bool operator==(const CompartmentFields&,
                                   const CompartmentFields&) = default;
};

/// Throws Error(invalid_argument) if any raw does not fit its field width.
CompartmentWords pack(const CompartmentFields& fields);
CompartmentFields unpack(const CompartmentWords& words) noexcept;

}  // namespace neurocore
