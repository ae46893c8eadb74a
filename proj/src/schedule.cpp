#include "neurocore/schedule.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

#include "neurocore/error.hpp"

namespace neurocore::microcode {

namespace {

using fxp::Fixed;
namespace fmt = fxp::formats;

constexpr std::array<std::string_view, 8> kOpcodeNames{
    "mov", "add", "sub", "mul", "shr", "shl", "cmpgt", "movif"};
constexpr std::array<std::string_view, kConstantCount> kConstantNames{
    "alpha", "beta", "vpeak", "k004", "k5", "k140", "one", "rnd"};
constexpr std::array<std::string_view, kInputCount> kInputNames{"da", "iext"};

constexpr std::string_view kIzhikevichText = R"(# Izhikevich neuron, discrete Euler form, dt = 1/8 ms.
# Each block touches at most one compartment state word.

# Synaptic current: i_syn <- alpha * i_syn + DA (DA aligned from Q3 to Q12)
block = blk0_syn
word = 0
op = mov r0, da
op = mul r1, isyn, alpha
op = add r1, r1, r0
op = mov isyn, r1
op = mov r1, isyn
end

block = blk1_ab
word = 0
op = mov r2, a
op = mov r3, b
end

# Reset values and dopamine gain 1 + beta * ddop
block = blk2_cd
word = 1
op = mov r4, c
op = mov r5, d
op = mul r6, ddop, beta
op = add r6, r6, one
end

block = blk3_gain
word = none
op = mul r1, r1, r6
end

block = blk4_load
word = 2
op = mov r7, v
op = mov r8, u
op = add r1, r1, iconst
end

block = blk5_input
word = none
op = add r1, r1, iext
op = cmpgt flag, r7, vpeak
end

# dv = 0.04 v^2 + 5 v + 140 - u + I
block = blk6_dv
word = none
op = mul r9, r7, r7
op = mul r9, r9, k004
op = mul r10, r7, k5
op = add r9, r9, r10
op = add r9, r9, k140
op = sub r9, r9, r8
op = add r9, r9, r1
op = add r9, r9, rnd
op = shr r9, r9, 3
op = add r9, r7, r9
end

# du = a (b v - u)
block = blk7_du
word = none
op = mul r10, r7, r3
op = sub r10, r10, r8
op = mul r10, r10, r2
op = add r10, r10, rnd
op = shr r10, r10, 3
op = add r10, r8, r10
end

# v > v_peak: v <- c, u <- u + d
block = blk8_reset
word = none
op = add r11, r8, r5
op = movif r9, r4
op = movif r10, r11
end

block = blk9_store
word = 2
op = mov v, r9
op = mov u, r10
end
)";

[[noreturn]] void fail(ErrorCode code, std::size_t line, const std::string& msg) {
  throw Error(code, "line " + std::to_string(line) + ": " + msg);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <std::size_t N>
std::optional<std::size_t> lookup(const std::array<std::string_view, N>& names,
                                  std::string_view key) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == key) return i;
  }
  return std::nullopt;
}

std::optional<int> parse_int(std::string_view s) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

Operand parse_operand(std::string_view tok, std::size_t line) {
  if (tok.empty()) fail(ErrorCode::parse, line, "empty operand");
  if (tok == "flag") return Operand::flag();
  if (auto f = field_from_name(tok)) return Operand::of(*f);
  if (auto c = lookup(kConstantNames, tok)) {
    return Operand::of(static_cast<Constant>(*c));
  }
  if (auto i = lookup(kInputNames, tok)) {
    return Operand::of(static_cast<Input>(*i));
  }
  if (tok.size() >= 2 && tok[0] == 'r') {
    if (auto n = parse_int(tok.substr(1)); n && *n >= 0 && *n < kRegisterCount) {
      return Operand::reg(*n);
    }
  }
  if (auto n = parse_int(tok); n && *n >= 0 && *n < 64) return Operand::imm(*n);
  fail(ErrorCode::unknown_field, line,
       "unknown field identifier '" + std::string(tok) + "'");
}

bool is_value(Operand o) {
  using K = Operand::Kind;
  return o.kind == K::field || o.kind == K::reg || o.kind == K::constant ||
         o.kind == K::input;
}

bool is_writable(Operand o) {
  using K = Operand::Kind;
  return o.kind == K::field || o.kind == K::reg;
}

void check_shape(const Instruction& ins, std::size_t line) {
  using K = Operand::Kind;
  const bool binary = ins.rhs.kind != K::none;
  switch (ins.op) {
    case Opcode::mov:
    case Opcode::movif:
      if (binary || !is_writable(ins.dst) || !is_value(ins.lhs)) {
        fail(ErrorCode::parse, line, "expected '<dst>, <src>'");
      }
      return;
    case Opcode::add:
    case Opcode::sub:
    case Opcode::mul:
      if (!binary || !is_writable(ins.dst) || !is_value(ins.lhs) ||
          !is_value(ins.rhs)) {
        fail(ErrorCode::parse, line, "expected '<dst>, <src>, <src>'");
      }
      return;
    case Opcode::shr:
    case Opcode::shl:
      if (!binary || !is_writable(ins.dst) || !is_value(ins.lhs) ||
          ins.rhs.kind != K::immediate) {
        fail(ErrorCode::parse, line, "expected '<dst>, <src>, <bits>'");
      }
      return;
    case Opcode::cmpgt:
      if (!binary || ins.dst.kind != K::flag || !is_value(ins.lhs) ||
          !is_value(ins.rhs)) {
        fail(ErrorCode::parse, line, "expected 'flag, <src>, <src>'");
      }
      return;
  }
}

Instruction parse_instruction(std::string_view text, std::size_t line) {
  text = trim(text);
  const auto space = text.find_first_of(" \t");
  const std::string_view mnemonic = text.substr(0, space);
  auto opcode = lookup(kOpcodeNames, mnemonic);
  if (!opcode) {
    fail(ErrorCode::parse, line, "unknown opcode '" + std::string(mnemonic) + "'");
  }
  std::vector<Operand> operands;
  if (space != std::string_view::npos) {
    std::string_view rest = text.substr(space + 1);
    while (true) {
      const auto comma = rest.find(',');
      operands.push_back(parse_operand(trim(rest.substr(0, comma)), line));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  }
  if (operands.size() < 2 || operands.size() > 3) {
    fail(ErrorCode::parse, line, "expected 2 or 3 operands");
  }
  Instruction ins{static_cast<Opcode>(*opcode), operands[0], operands[1],
                  operands.size() == 3 ? operands[2] : Operand{}};
  check_shape(ins, line);
  return ins;
}

void collect_fields(const Instruction& ins, bool want_writes,
                    std::vector<Field>& out) {
  auto add = [&](Operand o) {
    if (o.kind != Operand::Kind::field) return;
    const auto f = static_cast<Field>(o.index);
    if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
  };
  if (want_writes) {
    add(ins.dst);
  } else {
    add(ins.lhs);
    add(ins.rhs);
  }
}

}  // namespace

std::vector<Field> Block::reads() const {
  std::vector<Field> out;
  for (const auto& ins : ops) collect_fields(ins, false, out);
  return out;
}

std::vector<Field> Block::writes() const {
  std::vector<Field> out;
  for (const auto& ins : ops) collect_fields(ins, true, out);
  return out;
}

std::vector<int> Block::words() const {
  std::set<int> words;
  if (state_word) words.insert(*state_word);
  for (Field f : reads()) words.insert(layout(f).word);
  for (Field f : writes()) words.insert(layout(f).word);
  return {words.begin(), words.end()};
}

std::vector<Violation> validate_schedule(const BlockSchedule& schedule) {
  std::vector<Violation> out;
  for (const auto& block : schedule.blocks) {
    auto words = block.words();
    if (words.size() > 1) out.push_back({block.name, std::move(words)});
  }
  return out;
}

BlockSchedule parse_schedule(std::string_view text) {
  BlockSchedule schedule;
  std::optional<Block> current;
  std::size_t line_no = 0;
  std::size_t block_line = 0;

  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    if (line == "end") {
      if (!current) fail(ErrorCode::parse, line_no, "'end' outside a block");
      schedule.blocks.push_back(std::move(*current));
      current.reset();
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorCode::parse, line_no, "expected 'key = value'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));

    if (key == "block") {
      if (current) fail(ErrorCode::parse, line_no, "nested block (missing 'end')");
      if (value.empty()) fail(ErrorCode::parse, line_no, "block needs a name");
      current = Block{std::string(value), std::nullopt, {}};
      block_line = line_no;
      continue;
    }
    if (!current) {
      fail(ErrorCode::parse, line_no,
           "'" + std::string(key) + "' outside a block");
    }
    if (key == "word") {
      if (value == "none") {
        current->state_word.reset();
      } else if (auto w = parse_int(value);
                 w && *w >= 0 && *w < static_cast<int>(kStateWordCount)) {
        current->state_word = *w;
      } else {
        fail(ErrorCode::parse, line_no, "word must be 0, 1, 2 or none");
      }
    } else if (key == "op") {
      current->ops.push_back(parse_instruction(value, line_no));
    } else {
      fail(ErrorCode::parse, line_no, "unknown key '" + std::string(key) + "'");
    }
  }
  if (current) fail(ErrorCode::parse, block_line, "block without 'end'");
  return schedule;
}

std::string to_string(Operand o) {
  using K = Operand::Kind;
  switch (o.kind) {
    case K::none:
      return "";
    case K::field:
      return std::string(layout(static_cast<Field>(o.index)).name);
    case K::reg:
      return "r" + std::to_string(o.index);
    case K::constant:
      return std::string(kConstantNames[o.index]);
    case K::input:
      return std::string(kInputNames[o.index]);
    case K::flag:
      return "flag";
    case K::immediate:
      return std::to_string(o.index);
  }
  return "";
}

std::string to_string(const Instruction& ins) {
  std::string s(kOpcodeNames[static_cast<std::size_t>(ins.op)]);
  s += ' ' + to_string(ins.dst) + ", " + to_string(ins.lhs);
  if (ins.rhs.kind != Operand::Kind::none) s += ", " + to_string(ins.rhs);
  return s;
}

std::string serialize(const BlockSchedule& schedule) {
  std::ostringstream out;
  for (const auto& block : schedule.blocks) {
    out << "block = " << block.name << '\n';
    out << "word = "
        << (block.state_word ? std::to_string(*block.state_word) : "none")
        << '\n';
    for (const auto& ins : block.ops) out << "op = " << to_string(ins) << '\n';
    out << "end\n";
  }
  return out.str();
}

std::string_view izhikevich_schedule_text() noexcept { return kIzhikevichText; }

const BlockSchedule& izhikevich_schedule() {
  static const BlockSchedule schedule = parse_schedule(kIzhikevichText);
  return schedule;
}

bool execute(const BlockSchedule& schedule, CompartmentFields& fields,
             const ExecContext& ctx) {
  using K = Operand::Kind;
  std::array<Fixed, kRegisterCount> regs;
  regs.fill(Fixed::from_raw(0, fmt::REG));
  bool flag = false;

  auto read = [&](Operand o) -> Fixed {
    switch (o.kind) {
      case K::field:
        return fields.fixed(static_cast<Field>(o.index));
      case K::reg:
        return regs[o.index];
      case K::constant:
        return ctx.constants[o.index];
      case K::input:
        return ctx.inputs[o.index];
      default:
        return Fixed::from_raw(0, fmt::REG);
    }
  };
  auto write = [&](Operand o, Fixed value) {
    if (o.kind == K::field) {
      const auto f = static_cast<Field>(o.index);
      fields[f] = fxp::convert(value, layout(f).format).raw();
    } else {
      regs[o.index] = fxp::convert(value, fmt::REG);
    }
  };
  auto reg_value = [&](Operand o) { return fxp::convert(read(o), fmt::REG); };

  for (const auto& block : schedule.blocks) {
    for (const auto& ins : block.ops) {
      switch (ins.op) {
        case Opcode::mov:
          write(ins.dst, read(ins.lhs));
          break;
        case Opcode::movif:
          if (flag) write(ins.dst, read(ins.lhs));
          break;
        case Opcode::add:
          write(ins.dst, fxp::sat_add(reg_value(ins.lhs), reg_value(ins.rhs)));
          break;
        case Opcode::sub:
          write(ins.dst, fxp::sat_sub(reg_value(ins.lhs), reg_value(ins.rhs)));
          break;
        case Opcode::mul:
          write(ins.dst, fxp::mul_rescale(reg_value(ins.lhs), read(ins.rhs)));
          break;
        case Opcode::shr:
          write(ins.dst, fxp::shr(reg_value(ins.lhs), ins.rhs.index));
          break;
        case Opcode::shl:
          write(ins.dst, fxp::shl(reg_value(ins.lhs), ins.rhs.index));
          break;
        case Opcode::cmpgt:
          flag = fxp::compare(read(ins.lhs), read(ins.rhs)) > 0;
          break;
      }
    }
  }
  return flag;
}

}  // namespace neurocore::microcode
