#pragma once

// Basal ganglia circuit and the Go/No-Go experiment: the same network is run
// at baseline, raised and lowered dopamine, and the output-nucleus firing is
// compared across conditions.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "neurocore/network.hpp"

namespace neurocore {

struct PopulationDef {
  std::string name;
  NeuronParams params;

  friend bool operator==(const PopulationDef&, const PopulationDef&) = default;
};

struct GeneratorDef {
  std::string name;
  double rate_hz = 0.0;
  std::optional<std::uint32_t> size;  // falls back to generator_size

  friend bool operator==(const GeneratorDef&, const GeneratorDef&) = default;
};

/// Connection target that expands to every neuron group.
inline constexpr std::string_view kAllPopulations = "ALL";

struct BgConfig {
  std::uint32_t population_size = 100;
  std::uint32_t generator_size = 100;
  double duration_ms = 1000.0;
  double transient_ms = 200.0;
  std::uint64_t seed = 1;
  Backend backend = Backend::fixed;
  int threads = 1;
  double dopamine_baseline = 0.0;
  double dopamine_high = 1.0;
  double dopamine_low = -1.0;
  fxp::FixedFormat da_format = fxp::formats::DA;

  std::vector<PopulationDef> populations;
  std::vector<GeneratorDef> generators;
  std::vector<ConnectionSpec> connections;

  /// Throws Error(config) on out-of-range values or dangling references.
  void validate() const;
  std::int64_t steps() const noexcept;
  /// Connections with "ALL" targets expanded, in file order.
  std::vector<ConnectionSpec> expanded_connections() const;

  friend bool operator==(const BgConfig&, const BgConfig&) = default;
};

/// Shipped default configuration (config/bg_default.cfg).
BgConfig default_bg_config();

Network build_bg(const BgConfig& cfg);
void set_dopamine(Network& net, double delta_dop);

struct PopulationRate {
  std::string population;
  double mean_rate_hz = 0.0;
  std::size_t spike_count = 0;  // inside the analysis window
};

struct ConditionResult {
  std::string condition;  // baseline | high | low
  double delta_dop = 0.0;
  SpikeRecord record;
  std::vector<PopulationRate> rates;  // neuron groups only

  /// Throws Error(invalid_argument) for an unknown population.
  const PopulationRate& rate(std::string_view population) const;
};

ConditionResult run_condition(const BgConfig& cfg, const std::string& condition,
                              double delta_dop);
/// Baseline, high and low dopamine, each on a freshly built network.
std::vector<ConditionResult> run_gonogo(const BgConfig& cfg);

/// {"metadata": {seed, backend, duration_ms, ...},
///  "conditions": {condition: {population: {mean_rate_hz, spike_count}}}}
std::string gonogo_summary_json(const BgConfig& cfg,
                                const std::vector<ConditionResult>& results);

/// Writes <out>/<condition>/raster.csv, raster.svg and <out>/summary.json.
void write_gonogo_outputs(const BgConfig& cfg,
                          const std::vector<ConditionResult>& results,
                          const std::filesystem::path& out_dir);

}  // namespace neurocore
