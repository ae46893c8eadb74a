#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "neurocore/fxp.hpp"
#include "neurocore/neuron.hpp"

namespace neurocore {

struct NeuronRef {
  std::uint32_t population = 0;
  std::uint32_t neuron = 0;

  friend constexpr bool operator==(NeuronRef, NeuronRef) = default;
};

struct Synapse {
  NeuronRef pre;
  NeuronRef post;
  double weight = 0.0;
  fxp::Fixed weight_q;  // weight on the Q12 grid

  /// Throws Error(invalid_argument) if a nonzero weight quantizes to zero or
  /// the weight is not finite.
  static Synapse make(NeuronRef pre, NeuronRef post, double weight);
};

/// Sum of the Q12 weights of the given firing synapses, rounded to nearest on
/// the dendrite accumulator grid and saturated. Integer summation, so the
/// order of `firing` does not matter.
fxp::Fixed accumulate(std::span<const Synapse> firing,
                      fxp::FixedFormat da_format = fxp::formats::DA);
double accumulate_float(std::span<const Synapse> firing) noexcept;

/// Running dendrite accumulator for one post neuron. Holds the exact Q12 sum
/// and the real-valued sum; read and clear once per step.
class DendriteAccumulator {
 public:
  void add(const Synapse& s) noexcept {
    raw_sum_ += s.weight_q.raw();
    real_sum_ += s.weight;
  }
  void add_raw(std::int64_t raw_q12, double real) noexcept {
    raw_sum_ += raw_q12;
    real_sum_ += real;
  }
  fxp::Fixed value(fxp::FixedFormat da_format = fxp::formats::DA) const noexcept;
  double real_value() const noexcept { return real_sum_; }
  void reset() noexcept {
    raw_sum_ = 0;
    real_sum_ = 0.0;
  }

 private:
  std::int64_t raw_sum_ = 0;
  double real_sum_ = 0.0;
};

/// alpha = 1 - dt/tau on the Q12 parameter grid.
fxp::Fixed decay_alpha(double tau_ms = kTauSynMs, double dt_ms = kDtMs);

/// i_syn' = alpha * i_syn + acc, with acc aligned from the accumulator grid to
/// Q12 by left shift. Result keeps i_syn's format.
fxp::Fixed isyn_step(fxp::Fixed i_syn, fxp::Fixed alpha, fxp::Fixed acc);
double isyn_step_float(double i_syn, double alpha, double acc) noexcept;

/// I = i_const + i_syn * (1 + beta * delta_dop), computed in register format.
fxp::Fixed modulated_current(fxp::Fixed i_const, fxp::Fixed i_syn,
                             fxp::Fixed beta, fxp::Fixed delta_dop);
double modulated_current_float(double i_const, double i_syn, double beta,
                               double delta_dop) noexcept;

/// Independent Bernoulli spiking at rate_hz per neuron. Draws come from a
/// counter-based stream keyed by (seed, stream id, neuron, step), so any
/// step can be replayed in isolation.
class PoissonSource {
 public:
  PoissonSource(double rate_hz, std::uint32_t size, std::uint64_t stream_id);

  double rate_hz() const noexcept { return rate_hz_; }
  std::uint32_t size() const noexcept { return size_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Throws Error(invalid_argument) when rate * dt exceeds 1.
  double probability(double dt_ms = kDtMs) const;

  std::vector<std::uint32_t> step(std::uint64_t seed, std::int64_t step,
                                  double dt_ms = kDtMs) const;
  bool fires(std::uint64_t seed, std::int64_t step, std::uint32_t neuron,
             double p) const noexcept;

 private:
  double rate_hz_;
  std::uint32_t size_;
  std::uint64_t stream_id_;
};

}  // namespace neurocore
