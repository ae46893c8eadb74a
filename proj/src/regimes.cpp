#include "neurocore/regimes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "neurocore/analysis.hpp"
#include "neurocore/error.hpp"

namespace neurocore {

namespace fmt = fxp::formats;

namespace {

std::int64_t steps_for(double ms) {
  return static_cast<std::int64_t>(std::llround(ms / kDtMs));
}

std::string format(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

}  // namespace

Trace simulate_neuron(const NeuronParams& params, Backend backend,
                      const Stimulus& stimulus, std::int64_t steps,
                      bool include_140) {
  params.validate();
  Trace out;
  out.v.reserve(static_cast<std::size_t>(steps));
  out.current.reserve(static_cast<std::size_t>(steps));
  const NeuronState start = initial_state(params);
  if (backend == Backend::floating) {
    NeuronState s = start;
    for (std::int64_t t = 0; t < steps; ++t) {
      const double i = stimulus(t);
      auto r = step_float(params, s, i + params.i_const, kDtMs, include_140);
      s = r.state;
      if (r.spiked) out.spikes.push_back(t);
      out.v.push_back(s.v);
      out.current.push_back(i);
    }
    return out;
  }
  const GroupConstants constants = GroupConstants::make(
      params.beta, params.v_peak, kTauSynMs, kDtMs, include_140);
  const fxp::Fixed no_input = fxp::Fixed::from_raw(0, fmt::DA);
  CompartmentWords words = encode_compartment(params, start);
  for (std::int64_t t = 0; t < steps; ++t) {
    const double i = stimulus(t);
    auto r = step_fixed(words, no_input, constants, fxp::encode(i, fmt::REG));
    words = r.state;
    if (r.spiked) out.spikes.push_back(t);
    out.v.push_back(decode_state(words).v);
    out.current.push_back(i);
  }
  return out;
}

Stimulus constant_current(double current) {
  return [current](std::int64_t) { return current; };
}

namespace regimes {
NeuronParams regular_spiking() { return {0.02, 0.2, -65.0, 8.0}; }
NeuronParams fast_spiking() { return {0.1, 0.2, -65.0, 2.0}; }
NeuronParams intrinsically_bursting() { return {0.02, 0.2, -55.0, 4.0}; }
NeuronParams chattering() { return {0.02, 0.2, -50.0, 2.0}; }
NeuronParams low_threshold_spiking() { return {0.02, 0.25, -65.0, 2.0}; }
NeuronParams thalamo_cortical() { return {0.02, 0.25, -65.0, 0.05}; }
}  // namespace regimes

std::vector<RegimeSpec> canonical_regimes() {
  using namespace regimes;
  const auto steps = steps_for(kDurationMs);
  const auto hold = steps_for(kReboundHoldMs);
  return {
      {"regular_spiking", regular_spiking(), constant_current(kTestCurrent),
       steps, RegimeCheck::tonic},
      {"fast_spiking", fast_spiking(), constant_current(kTestCurrent), steps,
       RegimeCheck::fast},
      {"intrinsically_bursting", intrinsically_bursting(),
       constant_current(kTestCurrent), steps, RegimeCheck::bursting},
      {"chattering", chattering(), constant_current(kTestCurrent), steps,
       RegimeCheck::bursting},
      {"low_threshold_spiking", low_threshold_spiking(),
       constant_current(kLowThresholdCurrent), steps,
       RegimeCheck::low_threshold},
      {"rebound_thalamo_cortical", thalamo_cortical(),
       [hold](std::int64_t t) { return t < hold ? kReboundCurrent : 0.0; },
       steps_for(kReboundTotalMs), RegimeCheck::rebound},
  };
}

std::vector<double> isis_ms(const std::vector<std::int64_t>& spikes,
                            double after_ms, double dt_ms) {
  std::vector<double> out;
  std::optional<std::int64_t> prev;
  for (auto s : spikes) {
    if (static_cast<double>(s) * dt_ms < after_ms) continue;
    if (prev) out.push_back(static_cast<double>(s - *prev) * dt_ms);
    prev = s;
  }
  return out;
}

double isi_cv(const std::vector<double>& isis) {
  if (isis.size() < 2) return 0.0;
  const double mean =
      std::accumulate(isis.begin(), isis.end(), 0.0) / static_cast<double>(isis.size());
  double var = 0.0;
  for (double x : isis) var += (x - mean) * (x - mean);
  var /= static_cast<double>(isis.size());
  return std::sqrt(var) / mean;
}

RegimeVerdict check_regime(const RegimeSpec& spec, Backend backend) {
  using namespace regimes;
  RegimeVerdict v;
  v.regime = spec.name;
  v.backend = backend;
  const Trace trace = simulate_neuron(spec.params, backend, spec.stimulus, spec.steps);
  v.spikes = trace.spikes.size();
  const double duration_s = static_cast<double>(spec.steps) * kDtMs / 1000.0;

  switch (spec.check) {
    case RegimeCheck::tonic: {
      const auto isis = isis_ms(trace.spikes, kTonicTransientMs);
      const double cv = isi_cv(isis);
      v.passed = isis.size() >= 3 && cv < kTonicMaxCv;
      v.detail = "ISI CV " + format("%.4f", cv) + " over " +
                 std::to_string(isis.size()) + " intervals";
      break;
    }
    case RegimeCheck::fast: {
      const Trace rs = simulate_neuron(regular_spiking(), backend, spec.stimulus,
                                       spec.steps);
      const double rate = static_cast<double>(trace.spikes.size()) / duration_s;
      const double rs_rate = static_cast<double>(rs.spikes.size()) / duration_s;
      v.passed = rate > kFastRateRatio * rs_rate;
      v.detail = "rate " + format("%.1f", rate) + " Hz vs RS " +
                 format("%.1f", rs_rate) + " Hz";
      break;
    }
    case RegimeCheck::bursting: {
      const auto isis = isis_ms(trace.spikes);
      std::size_t intra = 0, inter = 0, other = 0;
      for (double x : isis) {
        if (x < kBurstIntraMaxMs) {
          ++intra;
        } else if (x > kBurstInterMinMs) {
          ++inter;
        } else {
          ++other;
        }
      }
      v.passed = intra > 0 && inter > 0 && other == 0;
      v.detail = std::to_string(intra) + " intra-burst, " +
                 std::to_string(inter) + " inter-burst, " +
                 std::to_string(other) + " unclassified ISIs";
      break;
    }
    case RegimeCheck::low_threshold: {
      const Trace rs = simulate_neuron(regular_spiking(), backend, spec.stimulus,
                                       spec.steps);
      v.passed = !trace.spikes.empty() && rs.spikes.empty();
      v.detail = std::to_string(trace.spikes.size()) + " spikes vs RS " +
                 std::to_string(rs.spikes.size()) + " at I=" +
                 format("%.1f", kLowThresholdCurrent);
      break;
    }
    case RegimeCheck::rebound: {
      const auto release = steps_for(kReboundHoldMs);
      const auto window_end = release + steps_for(kReboundWindowMs);
      std::size_t during = 0, after = 0;
      for (auto s : trace.spikes) {
        if (s < release) ++during;
        if (s >= release && s < window_end) ++after;
      }
      v.passed = during == 0 && after >= 1;
      v.detail = std::to_string(during) + " spikes while hyperpolarized, " +
                 std::to_string(after) + " within " +
                 format("%.0f", kReboundWindowMs) + " ms of release";
      break;
    }
  }
  return v;
}

std::string regimes_report(const std::vector<RegimeVerdict>& verdicts) {
  std::ostringstream out;
  for (const auto& v : verdicts) {
    char line[160];
    std::snprintf(line, sizeof line, "%-26s %-6s %-4s %4zu spikes  ",
                  v.regime.c_str(), std::string(to_string(v.backend)).c_str(),
                  v.passed ? "PASS" : "FAIL", v.spikes);
    out << line << v.detail << '\n';
  }
  return out.str();
}

std::string trace_csv(const Trace& trace, double dt_ms) {
  std::string out = "step,time_ms,current,v\n";
  char buf[128];
  for (std::size_t t = 0; t < trace.v.size(); ++t) {
    std::snprintf(buf, sizeof buf, "%zu,%.3f,%.6f,%.6f\n", t,
                  static_cast<double>(t) * dt_ms, trace.current[t], trace.v[t]);
    out += buf;
  }
  return out;
}

std::vector<ErrtRow> errt_comparison() {
  using namespace regimes;
  const auto steps = steps_for(kDurationMs);
  std::vector<ErrtRow> rows;
  for (const auto& [name, params] :
       {std::pair{"RS", regular_spiking()}, std::pair{"FS", fast_spiking()}}) {
    ErrtRow row;
    row.regime = name;
    row.float_spikes = simulate_neuron(params, Backend::floating,
                                       constant_current(kTestCurrent), steps)
                           .spikes;
    row.fixed_spikes = simulate_neuron(params, Backend::fixed,
                                       constant_current(kTestCurrent), steps)
                           .spikes;
    row.errt_percent = errt(SpikeTrain::from_steps(row.float_spikes),
                            SpikeTrain::from_steps(row.fixed_spikes));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string errt_report(const std::vector<ErrtRow>& rows) {
  std::ostringstream out;
  out << "ERRt, float reference vs fixed point (I=" << regimes::kTestCurrent
      << ", " << regimes::kDurationMs << " ms, dt=" << kDtMs << " ms)\n";
  for (const auto& r : rows) {
    char line[200];
    auto t = [](const std::vector<std::int64_t>& s, std::size_t i) {
      return i < s.size() ? static_cast<double>(s[i]) * kDtMs : -1.0;
    };
    std::snprintf(line, sizeof line,
                  "%s: %.3f%%  (float t1=%.3f t2=%.3f ms, fixed t1=%.3f "
                  "t2=%.3f ms)\n",
                  r.regime.c_str(), r.errt_percent, t(r.float_spikes, 0),
                  t(r.float_spikes, 1), t(r.fixed_spikes, 0),
                  t(r.fixed_spikes, 1));
    out << line;
  }
  return out.str();
}

BackendAgreement compare_backends(const NeuronParams& params, double current,
                                  std::int64_t steps) {
  const Trace f = simulate_neuron(params, Backend::floating,
                                  constant_current(current), steps);
  const Trace x = simulate_neuron(params, Backend::fixed,
                                  constant_current(current), steps);
  BackendAgreement out;
  if (!f.spikes.empty()) out.float_first_spike = f.spikes.front();
  if (!x.spikes.empty()) out.fixed_first_spike = x.spikes.front();
  std::int64_t limit = steps;
  if (!f.spikes.empty()) limit = std::min(limit, f.spikes.front());
  if (!x.spikes.empty()) limit = std::min(limit, x.spikes.front());
  // Values recorded after step t are the state entering step t + 1; the
  // state that crosses v_peak is the last pre-spike sample.
  for (std::int64_t t = 0; t + 1 < limit; ++t) {
    out.max_abs_dv_before_spike =
        std::max(out.max_abs_dv_before_spike,
                 std::abs(f.v[static_cast<std::size_t>(t)] -
                          x.v[static_cast<std::size_t>(t)]));
  }
  return out;
}

}  // namespace neurocore
