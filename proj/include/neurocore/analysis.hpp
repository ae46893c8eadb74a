#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "neurocore/network.hpp"

namespace neurocore {

/// Spike times in ms, strictly increasing.
class SpikeTrain {
 public:
  SpikeTrain() = default;
  /// Throws Error(invalid_argument) if times are not strictly increasing.
  explicit SpikeTrain(std::vector<double> times_ms);
  static SpikeTrain from_steps(const std::vector<std::int64_t>& steps,
                               double dt_ms = kDtMs);

  const std::vector<double>& times() const noexcept { return times_; }
  std::size_t size() const noexcept { return times_.size(); }

 private:
  std::vector<double> times_;
};

/// Relative error (percent) of the first inter-spike interval of `test`
/// against `reference`, with the first spikes aligned.
/// Throws Error(insufficient_spikes) with fewer than two spikes in either
/// train and Error(degenerate_reference) for a zero reference interval.
double errt(const SpikeTrain& reference, const SpikeTrain& test);

/// Variant over the mean of all consecutive gaps the two trains share.
/// Diagnostic only.
double errt_mean_gaps(const SpikeTrain& reference, const SpikeTrain& test);

/// Spikes in [start_ms, end_ms) per second.
double firing_rate(const SpikeTrain& train, double start_ms, double end_ms);

SpikeTrain neuron_train(const SpikeRecord& record, std::uint32_t population,
                        std::uint32_t neuron, double dt_ms = kDtMs);

/// Mean over the population's neurons of the per-neuron rate.
double population_rate(const SpikeRecord& record, std::uint32_t population,
                       double start_ms, double end_ms, double dt_ms = kDtMs);

/// CSV with header `step,time_ms,population,neuron`, LF line endings.
std::string raster_csv(const SpikeRecord& record, double dt_ms = kDtMs);
/// Parses raster_csv output. Populations are taken from `populations` when
/// given, otherwise discovered in order of appearance with size max index + 1.
SpikeRecord parse_raster_csv(const std::string& text,
                             std::vector<PopulationInfo> populations = {});
std::string raster_svg(const SpikeRecord& record, double duration_ms,
                       double dt_ms = kDtMs);

/// Writes both files. Throws Error(io) on failure.
void export_raster(const SpikeRecord& record, const std::filesystem::path& csv,
                   const std::filesystem::path& svg, double duration_ms,
                   double dt_ms = kDtMs);
SpikeRecord read_raster_csv(const std::filesystem::path& csv,
                            std::vector<PopulationInfo> populations = {});

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace neurocore
