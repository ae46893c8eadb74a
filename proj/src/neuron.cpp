#include "neurocore/neuron.hpp"

#include <cmath>

#include "neurocore/error.hpp"

namespace neurocore {

namespace fmt = fxp::formats;
using microcode::Constant;
using microcode::Input;

void NeuronParams::validate() const {
  if (!(a > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "neuron parameter a must be > 0");
  }
  if (!(v_peak > c)) {
    throw Error(ErrorCode::invalid_argument, "v_peak must exceed reset c");
  }
}

NeuronState initial_state(const NeuronParams& p) noexcept {
  return {p.c, p.b * p.c, 0.0, 0.0};
}

StepResult<NeuronState> step_float(const NeuronParams& p, const NeuronState& s,
                                   double current, double dt,
                                   bool include_140) {
  if (!(dt > 0.0)) throw Error(ErrorCode::invalid_argument, "dt must be > 0");
  if (!std::isfinite(s.v) || !std::isfinite(s.u) || !std::isfinite(current)) {
    throw Error(ErrorCode::numeric, "non-finite neuron state");
  }
  StepResult<NeuronState> out{s, false};
  if (s.v > p.v_peak) {
    out.state.v = p.c;
    out.state.u = s.u + p.d;
    out.spiked = true;
    return out;
  }
  const double k = include_140 ? 140.0 : 0.0;
  out.state.v = s.v + (0.04 * s.v * s.v + 5.0 * s.v + k - s.u + current) * dt;
  out.state.u = s.u + p.a * (p.b * s.v - s.u) * dt;
  if (!std::isfinite(out.state.v) || !std::isfinite(out.state.u)) {
    throw Error(ErrorCode::numeric, "neuron state diverged");
  }
  return out;
}

GroupConstants GroupConstants::make(double beta, double v_peak, double tau_ms,
                                    double dt_ms, bool include_140) {
  if (!(tau_ms > 0.0) || !(dt_ms > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "tau and dt must be > 0");
  }
  GroupConstants g;
  g.alpha = fxp::encode(1.0 - dt_ms / tau_ms, fmt::PARAM);
  g.beta = fxp::encode(beta, fmt::PARAM);
  g.v_peak = fxp::encode(v_peak, fmt::V);
  g.include_140 = include_140;
  return g;
}

microcode::ExecContext GroupConstants::context(fxp::Fixed da_input,
                                               fxp::Fixed i_ext) const {
  microcode::ExecContext ctx;
  auto set = [&](Constant c, fxp::Fixed v) {
    ctx.constants[static_cast<std::size_t>(c)] = v;
  };
  set(Constant::alpha, alpha);
  set(Constant::beta, beta);
  set(Constant::v_peak, v_peak);
  static const fxp::Fixed k004 = fxp::encode(0.04, fmt::FINE);
  static const fxp::Fixed k5 = fxp::encode(5.0, fmt::REG);
  static const fxp::Fixed k140 = fxp::encode(140.0, fmt::REG);
  static const fxp::Fixed one = fxp::encode(1.0, fmt::REG);
  set(Constant::k004, k004);
  set(Constant::k5, k5);
  set(Constant::k140, include_140 ? k140 : fxp::Fixed::from_raw(0, fmt::REG));
  set(Constant::one, one);
  set(Constant::round_dt,
      fxp::Fixed::from_raw(std::int64_t{1} << (kDtShift - 1), fmt::REG));
  ctx.inputs[static_cast<std::size_t>(Input::da)] = da_input;
  ctx.inputs[static_cast<std::size_t>(Input::i_ext)] = i_ext;
  return ctx;
}

CompartmentWords encode_compartment(const NeuronParams& p,
                                    const NeuronState& s) {
  CompartmentFields f;
  auto put = [&](Field field, double x) {
    f[field] = fxp::encode(x, layout(field).format).raw();
  };
  put(Field::a, p.a);
  put(Field::b, p.b);
  put(Field::c, p.c);
  put(Field::d, p.d);
  put(Field::i_const, p.i_const);
  put(Field::v, s.v);
  put(Field::u, s.u);
  put(Field::i_syn, s.i_syn);
  put(Field::delta_dop, s.delta_dop);
  return pack(f);
}

NeuronState decode_state(const CompartmentWords& words) noexcept {
  const CompartmentFields f = unpack(words);
  return {fxp::decode(f.fixed(Field::v)), fxp::decode(f.fixed(Field::u)),
          fxp::decode(f.fixed(Field::i_syn)),
          fxp::decode(f.fixed(Field::delta_dop))};
}

StepResult<CompartmentWords> step_fixed(const CompartmentWords& words,
                                        fxp::Fixed da_input,
                                        const GroupConstants& constants,
                                        fxp::Fixed i_ext) {
  CompartmentFields fields = unpack(words);
  const bool spiked = microcode::execute(microcode::izhikevich_schedule(),
                                         fields,
                                         constants.context(da_input, i_ext));
  return {pack(fields), spiked};
}

}  // namespace neurocore
