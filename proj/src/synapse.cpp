#include "neurocore/synapse.hpp"

#include <cmath>
#include <string>

#include "neurocore/error.hpp"
#include "neurocore/rng.hpp"

namespace neurocore {

namespace fmt = fxp::formats;
using fxp::Fixed;

Synapse Synapse::make(NeuronRef pre, NeuronRef post, double weight) {
  if (!std::isfinite(weight)) {
    throw Error(ErrorCode::invalid_argument, "synaptic weight must be finite");
  }
  const Fixed q = fxp::encode(weight, fmt::WEIGHT);
  if (weight != 0.0 && q.raw() == 0) {
    throw Error(ErrorCode::invalid_argument,
                "weight " + std::to_string(weight) + " quantizes to zero");
  }
  return {pre, post, weight, q};
}

Fixed accumulate(std::span<const Synapse> firing, fxp::FixedFormat da_format) {
  fxp::checked(da_format);
  DendriteAccumulator acc;
  for (const auto& s : firing) acc.add(s);
  return acc.value(da_format);
}

double accumulate_float(std::span<const Synapse> firing) noexcept {
  double sum = 0.0;
  for (const auto& s : firing) sum += s.weight;
  return sum;
}

Fixed DendriteAccumulator::value(fxp::FixedFormat da_format) const noexcept {
  return fxp::requantize(raw_sum_, fmt::WEIGHT.frac_bits, da_format);
}

Fixed decay_alpha(double tau_ms, double dt_ms) {
  if (!(tau_ms > 0.0) || !(dt_ms > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "tau and dt must be > 0");
  }
  return fxp::encode(1.0 - dt_ms / tau_ms, fmt::PARAM);
}

Fixed isyn_step(Fixed i_syn, Fixed alpha, Fixed acc) {
  const Fixed decayed = fxp::mul_rescale(fxp::convert(i_syn, fmt::REG), alpha);
  const Fixed sum = fxp::sat_add(decayed, fxp::convert(acc, fmt::REG));
  return fxp::convert(sum, i_syn.format());
}

double isyn_step_float(double i_syn, double alpha, double acc) noexcept {
  return alpha * i_syn + acc;
}

Fixed modulated_current(Fixed i_const, Fixed i_syn, Fixed beta,
                        Fixed delta_dop) {
  static const Fixed one = fxp::encode(1.0, fmt::REG);
  const Fixed gain = fxp::sat_add(
      fxp::mul_rescale(fxp::convert(delta_dop, fmt::REG), beta), one);
  const Fixed synaptic = fxp::mul_rescale(fxp::convert(i_syn, fmt::REG), gain);
  return fxp::sat_add(synaptic, fxp::convert(i_const, fmt::REG));
}

double modulated_current_float(double i_const, double i_syn, double beta,
                               double delta_dop) noexcept {
  return i_const + i_syn * (1.0 + beta * delta_dop);
}

PoissonSource::PoissonSource(double rate_hz, std::uint32_t size,
                             std::uint64_t stream_id)
    : rate_hz_(rate_hz), size_(size), stream_id_(stream_id) {
  if (!std::isfinite(rate_hz) || rate_hz < 0.0) {
    throw Error(ErrorCode::invalid_argument, "Poisson rate must be >= 0");
  }
}

double PoissonSource::probability(double dt_ms) const {
  const double p = rate_hz_ * dt_ms / 1000.0;
  if (p > 1.0) {
    throw Error(ErrorCode::invalid_argument,
                "Poisson rate too high for the timestep (rate*dt > 1)");
  }
  return p;
}

bool PoissonSource::fires(std::uint64_t seed, std::int64_t step,
                          std::uint32_t neuron, double p) const noexcept {
  if (p <= 0.0) return false;
  return rng::uniform(seed, stream_id_, neuron,
                      static_cast<std::uint64_t>(step)) < p;
}

std::vector<std::uint32_t> PoissonSource::step(std::uint64_t seed,
                                               std::int64_t step,
                                               double dt_ms) const {
  const double p = probability(dt_ms);
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < size_; ++i) {
    if (fires(seed, step, i, p)) out.push_back(i);
  }
  return out;
}

}  // namespace neurocore
