#pragma once

// Single-neuron experiments: stimulus-driven traces on either backend, the
// canonical firing-regime catalogue with ISI-based detectors, and the
// float-vs-fixed spike-timing comparison.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "neurocore/network.hpp"
#include "neurocore/neuron.hpp"

namespace neurocore {

using Stimulus = std::function<double(std::int64_t step)>;

struct Trace {
  std::vector<double> v;
  std::vector<double> current;
  std::vector<std::int64_t> spikes;
};

/// Starts from initial_state(params) and injects stimulus(step) as external
/// current each step.
Trace simulate_neuron(const NeuronParams& params, Backend backend,
                      const Stimulus& stimulus, std::int64_t steps,
                      bool include_140 = true);

Stimulus constant_current(double current);

enum class RegimeCheck { tonic, fast, bursting, low_threshold, rebound };

struct RegimeSpec {
  std::string name;
  NeuronParams params;
  Stimulus stimulus;
  std::int64_t steps = 0;
  RegimeCheck check = RegimeCheck::tonic;
};

namespace regimes {
inline constexpr double kTestCurrent = 10.0;
inline constexpr double kDurationMs = 1000.0;
inline constexpr double kTonicTransientMs = 100.0;
inline constexpr double kTonicMaxCv = 0.1;
inline constexpr double kFastRateRatio = 2.0;
inline constexpr double kBurstIntraMaxMs = 10.0;
inline constexpr double kBurstInterMinMs = 20.0;
inline constexpr double kLowThresholdCurrent = 3.0;
inline constexpr double kReboundHoldMs = 200.0;
inline constexpr double kReboundCurrent = -10.0;
inline constexpr double kReboundWindowMs = 100.0;
inline constexpr double kReboundTotalMs = 500.0;

NeuronParams regular_spiking();
NeuronParams fast_spiking();
NeuronParams intrinsically_bursting();
NeuronParams chattering();
NeuronParams low_threshold_spiking();
NeuronParams thalamo_cortical();
}  // namespace regimes

/// RS, FS, IB, CH, LTS and thalamo-cortical rebound, in that order.
std::vector<RegimeSpec> canonical_regimes();

struct RegimeVerdict {
  std::string regime;
  Backend backend = Backend::fixed;
  bool passed = false;
  std::string detail;
  std::size_t spikes = 0;
};

RegimeVerdict check_regime(const RegimeSpec& spec, Backend backend);
std::string regimes_report(const std::vector<RegimeVerdict>& verdicts);
std::string trace_csv(const Trace& trace, double dt_ms = kDtMs);

double isi_cv(const std::vector<double>& isis);
std::vector<double> isis_ms(const std::vector<std::int64_t>& spikes,
                            double after_ms = 0.0, double dt_ms = kDtMs);

struct ErrtRow {
  std::string regime;
  std::vector<std::int64_t> float_spikes;
  std::vector<std::int64_t> fixed_spikes;
  double errt_percent = 0.0;
};

/// RS and FS at the test current for the full test duration.
std::vector<ErrtRow> errt_comparison();
std::string errt_report(const std::vector<ErrtRow>& rows);

struct BackendAgreement {
  std::int64_t float_first_spike = -1;
  std::int64_t fixed_first_spike = -1;
  double max_abs_dv_before_spike = 0.0;  // mV
};

BackendAgreement compare_backends(const NeuronParams& params, double current,
                                  std::int64_t steps);

}  // namespace neurocore
