#include <cmath>
#include <random>

#include "doctest.h"
#include "neurocore/compartment.hpp"
#include "neurocore/error.hpp"
#include "neurocore/neuron.hpp"
#include "neurocore/regimes.hpp"
#include "neurocore/schedule.hpp"

using namespace neurocore;
using namespace neurocore::microcode;
namespace F = neurocore::fxp::formats;

namespace {

NeuronParams rs() { return regimes::regular_spiking(); }

CompartmentFields random_fields(std::mt19937_64& rng) {
  CompartmentFields f;
  for (std::size_t i = 0; i < kFieldCount; ++i) {
    const auto fmt = layout(static_cast<Field>(i)).format;
    f.raw[i] = static_cast<std::int32_t>(
        std::uniform_int_distribution<std::int64_t>(fmt.min_raw(),
                                                    fmt.max_raw())(rng));
  }
  return f;
}

fxp::Fixed da(std::int64_t raw) { return fxp::Fixed::from_raw(raw, F::DA); }

}  // namespace

TEST_CASE("compartment layout matches the state word table") {
  struct Row {
    Field f;
    int word, offset, width;
  };
  const Row rows[] = {{Field::a, 0, 0, 16},     {Field::b, 0, 16, 16},
                      {Field::i_syn, 0, 32, 24}, {Field::c, 1, 0, 24},
                      {Field::d, 1, 24, 24},     {Field::delta_dop, 1, 48, 16},
                      {Field::v, 2, 0, 24},      {Field::u, 2, 24, 24},
                      {Field::i_const, 2, 48, 16}};
  for (const auto& r : rows) {
    CAPTURE(layout(r.f).name);
    CHECK(layout(r.f).word == r.word);
    CHECK(layout(r.f).offset == r.offset);
    CHECK(layout(r.f).format.width == r.width);
    CHECK(layout(r.f).format.frac_bits == 12);
    CHECK(field_from_name(layout(r.f).name) == r.f);
  }
  CHECK_FALSE(field_from_name("w").has_value());
}

TEST_CASE("pack/unpack round trip") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100000; ++i) {
    const CompartmentFields f = random_fields(rng);
    REQUIRE(unpack(pack(f)) == f);
  }
}

TEST_CASE("pack bit placement") {
  CompartmentFields f;
  f[Field::v] = -266240;
  f[Field::a] = 819;
  const CompartmentWords w = pack(f);
  CHECK((w.word[2] & 0xFFFFFF) == (static_cast<std::uint64_t>(-266240) & 0xFFFFFF));
  CHECK((w.word[2] >> 24) == 0);
  CHECK(w.word[0] == 819);
  CHECK(unpack(w)[Field::v] == -266240);
  f[Field::a] = 40000;  // outside 16 bits
  CHECK_THROWS_AS(pack(f), Error);
}

TEST_CASE("validator examples") {
  BlockSchedule mixed = parse_schedule(
      "block = mixed\nword = 2\nop = mov r0, v\nop = mov r1, c\nend\n");
  auto violations = validate_schedule(mixed);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].block == "mixed");
  CHECK(violations[0].words == std::vector<int>{1, 2});

  BlockSchedule single = parse_schedule(
      "block = ok\nword = 2\nop = mov r0, v\nop = mov r1, u\n"
      "op = mov r2, iconst\nend\n");
  CHECK(validate_schedule(single).empty());
  CHECK(validate_schedule(BlockSchedule{}).empty());

  // A block may not touch a word other than the one it declares.
  BlockSchedule wrong_word =
      parse_schedule("block = w\nword = 0\nop = mov r0, v\nend\n");
  REQUIRE(validate_schedule(wrong_word).size() == 1);
  CHECK(validate_schedule(wrong_word)[0].words == std::vector<int>{0, 2});
}

TEST_CASE("shipped schedule is valid and round-trips through text") {
  const BlockSchedule& s = izhikevich_schedule();
  CHECK(validate_schedule(s).empty());
  CHECK(parse_schedule(serialize(s)) == s);
  for (const auto& b : s.blocks) CHECK(b.words().size() <= 1);
}

TEST_CASE("schedule parse errors") {
  CHECK_THROWS_AS(parse_schedule("block = x\nword = 0\nop = mov r0, w\nend\n"),
                  Error);
  try {
    parse_schedule("block = x\nword = 0\nop = mov r0, w\nend\n");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::unknown_field);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_schedule("block = x\nop = frob r0, r1\nend\n"), Error);
  CHECK_THROWS_AS(parse_schedule("block = x\nop = mov r0, r1\n"), Error);
  CHECK_THROWS_AS(parse_schedule("op = mov r0, r1\n"), Error);
}

TEST_CASE("DA input is aligned from 3 to 12 fraction bits") {
  // Direct microcode check.
  BlockSchedule s = parse_schedule(
      "block = align\nword = 0\nop = mov r0, da\nop = mov isyn, r0\nend\n");
  CompartmentFields f;
  ExecContext ctx;
  ctx.inputs[static_cast<std::size_t>(Input::da)] = da(8);
  execute(s, f, ctx);
  CHECK(f[Field::i_syn] == 4096);

  // Through the full neuron program: i_syn starts at 0 so i_syn' = DA.
  const auto words = encode_compartment(rs(), initial_state(rs()));
  const auto out = step_fixed(words, da(8), GroupConstants::make(0.0));
  CHECK(unpack(out.state)[Field::i_syn] == 4096);
}

TEST_CASE("dt stage is a shift by three") {
  BlockSchedule s = parse_schedule(
      "block = dt\nword = 2\nop = mov r0, v\nop = shr r0, r0, 3\n"
      "op = mov v, r0\nend\n");
  CompartmentFields f;
  f[Field::v] = 4096;
  execute(s, f, ExecContext{});
  CHECK(f[Field::v] == 512);
  CHECK(kDtShift == 3);
  CHECK(std::ldexp(1.0, -kDtShift) == kDtMs);
}

TEST_CASE("step_float examples") {
  SUBCASE("equilibrium") {
    const auto r = step_float(rs(), {-70.0, -14.0, 0.0, 0.0}, 0.0);
    CHECK(r.state.v == doctest::Approx(-70.0).epsilon(1e-12));
    CHECK(r.state.u == doctest::Approx(-14.0).epsilon(1e-12));
    CHECK_FALSE(r.spiked);
  }
  SUBCASE("reset") {
    NeuronParams p = rs();
    const auto r = step_float(p, {31.0, -10.0, 0.0, 0.0}, 0.0);
    CHECK(r.spiked);
    CHECK(r.state.v == -65.0);
    CHECK(r.state.u == -2.0);
  }
  SUBCASE("hand-evaluated Euler step") {
    const auto r = step_float(rs(), {-60.0, -12.0, 0.0, 0.0}, 10.0);
    CHECK(r.state.v == doctest::Approx(-59.25));
    CHECK(r.state.u == doctest::Approx(-12.0));
    CHECK_FALSE(r.spiked);
  }
}

TEST_CASE("params validation") {
  NeuronParams p = rs();
  CHECK_NOTHROW(p.validate());
  p.a = 0.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = rs();
  p.v_peak = -70.0;
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("fixed equilibrium holds within one LSB for 1000 steps") {
  const auto constants = GroupConstants::make(0.0);
  auto words = encode_compartment(rs(), {-70.0, -14.0, 0.0, 0.0});
  const auto v0 = unpack(words)[Field::v];
  const auto u0 = unpack(words)[Field::u];
  for (int i = 0; i < 1000; ++i) {
    const auto r = step_fixed(words, da(0), constants);
    REQUIRE_FALSE(r.spiked);
    words = r.state;
    REQUIRE(std::abs(unpack(words)[Field::v] - v0) <= 1);
    REQUIRE(std::abs(unpack(words)[Field::u] - u0) <= 1);
  }
}

TEST_CASE("fixed reset rule: v = c and u += d exactly") {
  const NeuronParams p = rs();
  const auto constants = GroupConstants::make(0.0);
  auto words = encode_compartment(p, {31.0, -10.0, 0.0, 0.0});
  const auto before = unpack(words);
  const auto r = step_fixed(words, da(0), constants);
  CHECK(r.spiked);
  const auto after = unpack(r.state);
  CHECK(after[Field::v] == before[Field::c]);
  CHECK(after[Field::u] == before[Field::u] + before[Field::d]);

  // Same invariant along a driven trajectory.
  words = encode_compartment(p, initial_state(p));
  int spikes = 0;
  for (int i = 0; i < 8000; ++i) {
    const auto prev = unpack(words);
    const auto step = step_fixed(words, da(0), constants, fxp::encode(10.0, F::REG));
    if (step.spiked) {
      ++spikes;
      REQUIRE(prev[Field::v] > fxp::encode(30.0, F::V).raw());
      REQUIRE(unpack(step.state)[Field::v] == prev[Field::c]);
      REQUIRE(unpack(step.state)[Field::u] == prev[Field::u] + prev[Field::d]);
    }
    words = step.state;
  }
  CHECK(spikes > 0);
}

TEST_CASE("fixed state stays in range under arbitrary input") {
  std::mt19937_64 rng(5);
  const auto constants = GroupConstants::make(0.6);
  std::uniform_int_distribution<std::int64_t> input(F::DA.min_raw(), F::DA.max_raw());
  for (const auto& p : {regimes::regular_spiking(), regimes::fast_spiking(),
                        regimes::chattering()}) {
    auto words = encode_compartment(p, initial_state(p));
    for (int i = 0; i < 20000; ++i) {
      words = step_fixed(words, da(input(rng)), constants).state;
      const auto f = unpack(words);
      for (Field fld : {Field::v, Field::u, Field::i_syn}) {
        const auto fmt = layout(fld).format;
        REQUIRE(f[fld] >= fmt.min_raw());
        REQUIRE(f[fld] <= fmt.max_raw());
      }
    }
  }
}

TEST_CASE("fixed backend tracks the float oracle before the first spike") {
  for (const auto& p : {regimes::regular_spiking(), regimes::fast_spiking()}) {
    const auto agree = compare_backends(p, 10.0, 8000);
    REQUIRE(agree.float_first_spike >= 0);
    REQUIRE(agree.fixed_first_spike >= 0);
    CHECK(std::abs(agree.float_first_spike - agree.fixed_first_spike) <= 2);
    CHECK(agree.max_abs_dv_before_spike <= 0.25);
  }
}

TEST_CASE("dropping the constant term removes tonic firing") {
  const auto with = simulate_neuron(rs(), Backend::fixed, constant_current(10.0),
                                    8000, true);
  const auto without = simulate_neuron(rs(), Backend::fixed,
                                       constant_current(10.0), 8000, false);
  CHECK(with.spikes.size() > 10);
  CHECK(without.spikes.size() < with.spikes.size());
}
