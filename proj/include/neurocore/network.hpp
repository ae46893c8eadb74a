#pragma once

// Populations, probabilistic connectivity and the phase-ordered engine.
//
// Each call to Network::step runs, in order:
//   1. delivery of the previous step's spikes into dendrite accumulators
//      (one-step axonal delay, pulled per post neuron);
//   2. Poisson source draws;
//   3. Izhikevich updates (fixed-point microcode or float reference);
//   4. collection of this step's spikes.
// Phases are barriers; inside a phase, work is split across neurons only, so
// results do not depend on the thread count.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "neurocore/fxp.hpp"
#include "neurocore/neuron.hpp"
#include "neurocore/synapse.hpp"

namespace neurocore {

enum class Backend { fixed, floating };

std::string_view to_string(Backend b) noexcept;
std::optional<Backend> backend_from_string(std::string_view s) noexcept;

enum class PopulationKind { izhikevich, poisson };

struct ConnectionSpec {
  std::string pre;
  std::string post;
  double weight = 0.0;
  double prob = 0.0;

  friend bool operator==(const ConnectionSpec&, const ConnectionSpec&) = default;
};

/// Includes each (i, j) pair independently with probability spec.prob;
/// self-pairs are skipped when pre and post are the same population.
/// `stream` selects an independent random stream for this connection.
/// Throws Error(config) when prob lies outside [0, 1].
std::vector<Synapse> build_connections(const ConnectionSpec& spec,
                                       std::uint32_t pre_population,
                                       std::uint32_t pre_size,
                                       std::uint32_t post_population,
                                       std::uint32_t post_size,
                                       std::uint64_t seed, std::uint64_t stream);

struct SpikeEvent {
  std::int64_t step = 0;
  std::uint32_t population = 0;
  std::uint32_t neuron = 0;

  friend constexpr bool operator==(const SpikeEvent&, const SpikeEvent&) = default;
};

struct PopulationInfo {
  std::string name;
  std::uint32_t size = 0;

  friend bool operator==(const PopulationInfo&, const PopulationInfo&) = default;
};

struct SpikeRecord {
  std::vector<PopulationInfo> populations;
  std::vector<SpikeEvent> events;  // non-decreasing in step

  std::optional<std::uint32_t> find(std::string_view name) const noexcept;
  std::size_t count(std::uint32_t population) const noexcept;

  friend bool operator==(const SpikeRecord&, const SpikeRecord&) = default;
};

struct NetworkOptions {
  Backend backend = Backend::fixed;
  std::uint64_t seed = 1;
  double dt_ms = kDtMs;
  double tau_syn_ms = kTauSynMs;
  fxp::FixedFormat da_format = fxp::formats::DA;
  bool include_140 = true;
  int threads = 1;
};

class Network {
 public:
  explicit Network(NetworkOptions options = {});
  ~Network();
  Network(Network&&) noexcept;
  Network& operator=(Network&&) noexcept;
  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  const NetworkOptions& options() const noexcept;

  /// Homogeneous population starting from initial_state(params).
  std::uint32_t add_population(const std::string& name, std::uint32_t size,
                               const NeuronParams& params);
  /// Per-neuron parameters; beta and v_peak are group constants and must be
  /// uniform across the population.
  std::uint32_t add_population(const std::string& name,
                               std::vector<NeuronParams> params);
  std::uint32_t add_poisson_source(const std::string& name, std::uint32_t size,
                                   double rate_hz);

  /// Builds and stores the synapses of one connection; returns their count.
  std::size_t connect(const ConnectionSpec& spec);

  void set_delta_dop(double delta_dop);
  double delta_dop() const noexcept;

  /// Extra current injected into every neuron of an Izhikevich population.
  void set_bias_current(std::uint32_t population, double current);

  void set_state(std::uint32_t population, std::uint32_t neuron,
                 const NeuronState& state);
  /// Decoded state for the fixed backend.
  NeuronState state(std::uint32_t population, std::uint32_t neuron) const;
  CompartmentWords compartment(std::uint32_t population,
                               std::uint32_t neuron) const;
  /// Accumulator value consumed by the neuron at the most recent step
  /// (accumulator grid for the fixed backend, real sum for float).
  fxp::Fixed last_input(std::uint32_t population, std::uint32_t neuron) const;
  double last_input_real(std::uint32_t population, std::uint32_t neuron) const;

  std::uint32_t population_count() const noexcept;
  std::optional<std::uint32_t> find(std::string_view name) const noexcept;
  const PopulationInfo& population(std::uint32_t index) const;
  PopulationKind kind(std::uint32_t index) const;
  std::vector<PopulationInfo> populations() const;

  const std::vector<Synapse>& synapses() const noexcept;
  std::size_t synapse_count() const noexcept;
  std::int64_t step_index() const noexcept;

  const std::vector<SpikeEvent>& step();

  /// Runs `steps` steps, keeping events from the named populations (all when
  /// `record` is empty). Throws Error(config) for an unknown name.
  SpikeRecord run(std::int64_t steps,
                  const std::vector<std::string>& record = {});

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace neurocore
