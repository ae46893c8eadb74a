#pragma once

// Izhikevich neuron in two interchangeable forms: a double-precision Euler
// reference and the fixed-point microcode pipeline.

#include "neurocore/compartment.hpp"
#include "neurocore/fxp.hpp"
#include "neurocore/schedule.hpp"

namespace neurocore {

inline constexpr double kDtMs = 0.125;
inline constexpr int kDtShift = 3;
inline constexpr double kTauSynMs = 15.0;

struct NeuronParams {
  double a = 0.02;
  double b = 0.2;
  double c = -65.0;
  double d = 8.0;
  double v_peak = 30.0;
  double beta = 0.0;
  double i_const = 0.0;

  /// Throws Error(invalid_argument) unless a > 0 and v_peak > c.
  void validate() const;

  friend bool operator==(const NeuronParams&, const NeuronParams&) = default;
};

struct NeuronState {
  double v = -65.0;
  double u = -13.0;
  double i_syn = 0.0;
  double delta_dop = 0.0;

  friend bool operator==(const NeuronState&, const NeuronState&) = default;
};

/// Resting start used throughout: v = c, u = b * c.
NeuronState initial_state(const NeuronParams& p) noexcept;

template <typename State>
struct StepResult {
  State state;
  bool spiked = false;
};

/// One Euler step. A neuron whose incoming v is above v_peak fires: v is set
/// to c and u to u + d in place of the update. `include_140` drops the
/// constant term of the quadratic when false.
/// Throws Error(numeric) if the state is or becomes non-finite.
StepResult<NeuronState> step_float(const NeuronParams& p, const NeuronState& s,
                                   double current, double dt = kDtMs,
                                   bool include_140 = true);

/// Constants shared by a neuron group on the fixed-point path.
struct GroupConstants {
  fxp::Fixed alpha;
  fxp::Fixed beta;
  fxp::Fixed v_peak;
  bool include_140 = true;

  static GroupConstants make(double beta, double v_peak = 30.0,
                             double tau_ms = kTauSynMs, double dt_ms = kDtMs,
                             bool include_140 = true);

  microcode::ExecContext context(fxp::Fixed da_input, fxp::Fixed i_ext) const;
};

/// Encodes parameters and state into compartment words.
CompartmentWords encode_compartment(const NeuronParams& p, const NeuronState& s);
/// Decodes v, u, i_syn, delta_dop.
NeuronState decode_state(const CompartmentWords& words) noexcept;

/// Runs the shipped Izhikevich schedule once. `da_input` is the dendrite
/// accumulator value (3 fraction bits), `i_ext` an optional register-level
/// stimulus current.
StepResult<CompartmentWords> step_fixed(
    const CompartmentWords& words, fxp::Fixed da_input,
    const GroupConstants& constants,
    fxp::Fixed i_ext = fxp::Fixed::from_raw(0, fxp::formats::REG));

}  // namespace neurocore
