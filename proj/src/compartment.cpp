#include "neurocore/compartment.hpp"

#include <string>

#include "neurocore/error.hpp"

namespace neurocore {

namespace {

namespace f = fxp::formats;

constexpr std::array<FieldLayout, kFieldCount> kLayout{{
    {"a", 0, 0, f::AB},
    {"b", 0, 16, f::AB},
    {"isyn", 0, 32, f::ISYN},
    {"c", 1, 0, f::CD},
    {"d", 1, 24, f::CD},
    {"ddop", 1, 48, f::DDOP},
    {"v", 2, 0, f::V},
    {"u", 2, 24, f::U},
    {"iconst", 2, 48, f::ICONST},
}};

constexpr std::uint64_t mask(int width) {
  return width == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
}

}  // namespace

const FieldLayout& layout(Field f) noexcept {
  return kLayout[static_cast<std::size_t>(f)];
}

std::optional<Field> field_from_name(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kFieldCount; ++i) {
    if (kLayout[i].name == name) return static_cast<Field>(i);
  }
  return std::nullopt;
}

CompartmentWords pack(const CompartmentFields& fields) {
  CompartmentWords out;
  for (std::size_t i = 0; i < kFieldCount; ++i) {
    const FieldLayout& l = kLayout[i];
    const std::int64_t raw = fields.raw[i];
    if (raw < l.format.min_raw() || raw > l.format.max_raw()) {
      throw Error(ErrorCode::invalid_argument,
                  "field " + std::string(l.name) + " raw " +
                      std::to_string(raw) + " does not fit " +
                      std::to_string(l.format.width) + " bits");
    }
    const auto bits = static_cast<std::uint64_t>(raw) & mask(l.format.width);
    out.word[l.word] |= bits << l.offset;
  }
  return out;
}

CompartmentFields unpack(const CompartmentWords& words) noexcept {
  CompartmentFields out;
  for (std::size_t i = 0; i < kFieldCount; ++i) {
    const FieldLayout& l = kLayout[i];
    const int w = l.format.width;
    const std::uint64_t bits = (words.word[l.word] >> l.offset) & mask(w);
    // Sign-extend from bit w-1.
    const std::uint64_t sign = std::uint64_t{1} << (w - 1);
    out.raw[i] = static_cast<std::int32_t>(
        static_cast<std::int64_t>((bits ^ sign)) - static_cast<std::int64_t>(sign));
  }
  return out;
}

}  // namespace neurocore
