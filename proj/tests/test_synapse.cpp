#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "neurocore/error.hpp"
#include "neurocore/synapse.hpp"

using namespace neurocore;
namespace F = neurocore::fxp::formats;

namespace {

Synapse syn(double w) { return Synapse::make({0, 0}, {1, 0}, w); }

}  // namespace

TEST_CASE("accumulate examples") {
  CHECK(accumulate({}).raw() == 0);
  const std::vector<Synapse> two = {syn(5.0), syn(5.0)};
  CHECK(accumulate(two).raw() == 80);
  CHECK(fxp::decode(accumulate(two)) == 10.0);
  const std::vector<Synapse> noise = {syn(0.05)};
  CHECK(accumulate(noise).raw() == 0);
  CHECK(accumulate_float(noise) == doctest::Approx(0.05));
  // The sum, not each weight, is quantized: three noise spikes survive.
  const std::vector<Synapse> three = {syn(0.05), syn(0.05), syn(0.05)};
  CHECK(accumulate(three).raw() == 1);
  // A finer accumulator grid keeps a single noise spike.
  CHECK(accumulate(noise, fxp::FixedFormat{24, 12}).raw() == 205);
}

TEST_CASE("weights that quantize to zero are rejected") {
  CHECK_THROWS_AS(syn(1e-6), Error);
  CHECK_NOTHROW(syn(0.0));
  CHECK_THROWS_AS(syn(std::nan("")), Error);
}

TEST_CASE("accumulate is order independent") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> w(-8.0, 8.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Synapse> s;
    for (int i = 0; i < 50; ++i) s.push_back(syn(w(rng)));
    const auto ref = accumulate(s);
    std::shuffle(s.begin(), s.end(), rng);
    REQUIRE(accumulate(s) == ref);
  }
}

TEST_CASE("synaptic decay") {
  const auto alpha = decay_alpha();
  CHECK(fxp::decode(alpha) == doctest::Approx(119.0 / 120.0).epsilon(1e-3));
  CHECK(alpha.raw() == 4062);
  CHECK_THROWS_AS(decay_alpha(0.0), Error);

  const auto zero_isyn = fxp::Fixed::from_raw(0, F::ISYN);
  CHECK(isyn_step(zero_isyn, alpha, fxp::Fixed::from_raw(0, F::DA)).raw() == 0);
  const std::vector<Synapse> one = {syn(5.0)};
  CHECK(isyn_step(zero_isyn, alpha, accumulate(one)) == fxp::encode(5.0, F::ISYN));
  CHECK(isyn_step_float(0.0, 119.0 / 120.0, 5.0) == 5.0);
}

TEST_CASE("free decay is an n-fold multiply and tracks alpha^n") {
  const auto alpha = decay_alpha();
  const auto zero = fxp::Fixed::from_raw(0, F::DA);
  auto x = fxp::encode(20.0, F::ISYN);
  auto manual = x;
  const double a = fxp::decode(alpha);
  for (int n = 1; n <= 500; ++n) {
    x = isyn_step(x, alpha, zero);
    manual = fxp::convert(
        fxp::mul_rescale(fxp::convert(manual, F::REG), alpha), F::ISYN);
    REQUIRE(x == manual);
    REQUIRE(std::abs(fxp::decode(x) - 20.0 * std::pow(a, n)) <=
            n * std::ldexp(1.0, -12));
  }
}

TEST_CASE("dopamine modulation") {
  const auto q = [](double x) { return fxp::encode(x, F::PARAM); };
  const auto i_const = fxp::encode(0.0, F::ICONST);
  const auto i_syn = fxp::encode(10.0, F::ISYN);
  CHECK(fxp::decode(modulated_current(i_const, i_syn, q(0.6), q(1.0))) ==
        doctest::Approx(16.0).epsilon(1e-3));
  CHECK(fxp::decode(modulated_current(i_const, i_syn, q(-0.6), q(1.0))) ==
        doctest::Approx(4.0).epsilon(1e-3));
  for (double dd : {-1.0, 0.0, 1.0}) {
    CHECK(fxp::decode(modulated_current(fxp::encode(5.0, F::ICONST), i_syn, q(0.0),
                                        q(dd))) == 15.0);
  }
  CHECK(modulated_current_float(0.0, 10.0, 0.6, 1.0) == doctest::Approx(16.0));
  CHECK(modulated_current_float(0.0, 10.0, -0.6, 1.0) == doctest::Approx(4.0));

  // Strictly monotone in delta_dop with the sign of beta.
  double prev_pos = -1e9, prev_neg = 1e9;
  for (int k = -8; k <= 8; ++k) {
    const auto dd = q(k / 8.0);
    const double pos = fxp::decode(modulated_current(i_const, i_syn, q(0.6), dd));
    const double neg = fxp::decode(modulated_current(i_const, i_syn, q(-0.6), dd));
    CHECK(pos > prev_pos);
    CHECK(neg < prev_neg);
    prev_pos = pos;
    prev_neg = neg;
  }
}

TEST_CASE("Poisson sources") {
  PoissonSource src(15.0, 100, 7);
  CHECK(src.probability() == doctest::Approx(0.001875));
  CHECK_THROWS_AS(PoissonSource(-1.0, 1, 0), Error);
  CHECK_THROWS_AS(PoissonSource(9000.0, 1, 0).probability(), Error);

  PoissonSource silent(0.0, 100, 8);
  for (std::int64_t t = 0; t < 8000; ++t) REQUIRE(silent.step(1, t).empty());

  // 10 s at 15 Hz: each neuron within 4 sigma of 150 spikes.
  const std::int64_t steps = 80000;
  const double p = src.probability();
  const double mean = steps * p;
  const double sigma = std::sqrt(steps * p * (1.0 - p));
  std::vector<int> counts(100, 0);
  for (std::int64_t t = 0; t < steps; ++t) {
    for (auto i : src.step(42, t)) ++counts[i];
  }
  for (int c : counts) CHECK(std::abs(c - mean) <= 4.0 * sigma);

  // Same seed, same sequence; different seed, different sequence.
  bool differs = false;
  for (std::int64_t t = 0; t < 2000; ++t) {
    REQUIRE(src.step(42, t) == src.step(42, t));
    differs = differs || src.step(42, t) != src.step(43, t);
  }
  CHECK(differs);
}
