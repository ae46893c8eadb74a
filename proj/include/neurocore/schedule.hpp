#pragma once

// Block-structured microcode for the neurocore. A schedule is an ordered list
// of blocks; each block may touch the fields of at most one compartment
// state word, and values cross between words only through registers.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "neurocore/compartment.hpp"
#include "neurocore/fxp.hpp"

namespace neurocore::microcode {

enum class Opcode : std::uint8_t { mov, add, sub, mul, shr, shl, cmpgt, movif };

/// Group-level constants, shared by every neuron of a population.
enum class Constant : std::uint8_t {
  alpha,     // synaptic decay 1 - dt/tau
  beta,      // dopamine sensitivity
  v_peak,    // spike cut
  k004,      // 0.04, quadratic coefficient (fine format)
  k5,        // 5
  k140,      // 140, or 0 when the constant term is disabled
  one,       // 1.0
  round_dt,  // half an LSB of the dt shift
};
inline constexpr std::size_t kConstantCount = 8;

enum class Input : std::uint8_t { da, i_ext };
inline constexpr std::size_t kInputCount = 2;

inline constexpr int kRegisterCount = 16;

struct Operand {
  enum class Kind : std::uint8_t {
    none,
    field,
    reg,
    constant,
    input,
    flag,
    immediate
  };

  Kind kind = Kind::none;
  std::uint8_t index = 0;

  static constexpr Operand of(Field f) {
    return {Kind::field, static_cast<std::uint8_t>(f)};
  }
  static constexpr Operand reg(int n) {
    return {Kind::reg, static_cast<std::uint8_t>(n)};
  }
  static constexpr Operand of(Constant c) {
    return {Kind::constant, static_cast<std::uint8_t>(c)};
  }
  static constexpr Operand of(Input i) {
    return {Kind::input, static_cast<std::uint8_t>(i)};
  }
  static constexpr Operand flag() { return {Kind::flag, 0}; }
  static constexpr Operand imm(int n) {
    return {Kind::immediate, static_cast<std::uint8_t>(n)};
  }

  friend constexpr bool operator==(Operand, Operand) = default;
};

struct Instruction {
  Opcode op = Opcode::mov;
  Operand dst;
  Operand lhs;
  Operand rhs;

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

struct Block {
  std::string name;
  std::optional<int> state_word;  // nullopt: register-only block
  std::vector<Instruction> ops;

  std::vector<Field> reads() const;
  std::vector<Field> writes() const;
  /// Sorted word indices touched by field operands plus the declared word.
  std::vector<int> words() const;

  friend bool operator==(const Block&, const Block&) = default;
};

struct BlockSchedule {
  std::vector<Block> blocks;

  friend bool operator==(const BlockSchedule&, const BlockSchedule&) = default;
};

struct Violation {
  std::string block;
  std::vector<int> words;
};

std::vector<Violation> validate_schedule(const BlockSchedule& schedule);

/// Line-oriented key-value text:
///
///   block = <name>
///   word = 0|1|2|none
///   op = <opcode> <dst>, <src>[, <src>]
///   end
///
/// Lines starting with '#' are comments. Throws Error(unknown_field) for an
/// unrecognized operand identifier and Error(parse) for malformed lines; both
/// messages carry the line number.
BlockSchedule parse_schedule(std::string_view text);
std::string serialize(const BlockSchedule& schedule);

std::string to_string(Operand operand);
std::string to_string(const Instruction& instruction);

/// The shipped Izhikevich neuron program.
std::string_view izhikevich_schedule_text() noexcept;
const BlockSchedule& izhikevich_schedule();

struct ExecContext {
  std::array<fxp::Fixed, kConstantCount> constants{};
  std::array<fxp::Fixed, kInputCount> inputs{};
};

/// Runs every block in order against the unpacked fields. Returns the final
/// state of the compare flag.
bool execute(const BlockSchedule& schedule, CompartmentFields& fields,
             const ExecContext& ctx);

}  // namespace neurocore::microcode
