#include "neurocore/network.hpp"

#include <algorithm>
#include <cmath>

#include <tbb/blocked_range.h>
#include <tbb/global_control.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include "neurocore/error.hpp"
#include "neurocore/rng.hpp"

namespace neurocore {

namespace fmt = fxp::formats;
using fxp::Fixed;

namespace {

// Disjoint stream domains for the counter-based generator.
constexpr std::uint64_t kConnectionStreams = 1ULL << 40;
constexpr std::uint64_t kSourceStreams = 2ULL << 40;

}  // namespace

std::string_view to_string(Backend b) noexcept {
  return b == Backend::fixed ? "fixed" : "float";
}

std::optional<Backend> backend_from_string(std::string_view s) noexcept {
  if (s == "fixed") return Backend::fixed;
  if (s == "float") return Backend::floating;
  return std::nullopt;
}

std::vector<Synapse> build_connections(const ConnectionSpec& spec,
                                       std::uint32_t pre_population,
                                       std::uint32_t pre_size,
                                       std::uint32_t post_population,
                                       std::uint32_t post_size,
                                       std::uint64_t seed, std::uint64_t stream) {
  if (!(spec.prob >= 0.0 && spec.prob <= 1.0)) {
    throw Error(ErrorCode::config, "connection " + spec.pre + " -> " +
                                       spec.post + ": probability " +
                                       std::to_string(spec.prob) +
                                       " outside [0, 1]");
  }
  if (pre_size == 0 || post_size == 0) {
    throw Error(ErrorCode::config, "connection " + spec.pre + " -> " +
                                       spec.post + ": empty population");
  }
  const bool same = spec.pre == spec.post;
  std::vector<Synapse> out;
  if (spec.prob == 0.0) return out;
  out.reserve(static_cast<std::size_t>(
      std::ceil(spec.prob * pre_size * post_size)));
  for (std::uint32_t i = 0; i < pre_size; ++i) {
    for (std::uint32_t j = 0; j < post_size; ++j) {
      if (same && i == j) continue;
      if (rng::uniform(seed, kConnectionStreams + stream, i, j) < spec.prob) {
        out.push_back(Synapse::make({pre_population, i}, {post_population, j},
                                    spec.weight));
      }
    }
  }
  return out;
}

std::optional<std::uint32_t> SpikeRecord::find(
    std::string_view name) const noexcept {
  for (std::size_t i = 0; i < populations.size(); ++i) {
    if (populations[i].name == name) return static_cast<std::uint32_t>(i);
  }
  return std::nullopt;
}

std::size_t SpikeRecord::count(std::uint32_t population) const noexcept {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [&](const SpikeEvent& e) {
        return e.population == population;
      }));
}

struct Network::Impl {
  struct Segment {
    std::uint32_t pre_population;
    std::uint32_t begin;
    std::uint32_t end;
  };

  // Incoming synapses of one post population, grouped per post neuron and
  // then per pre population.
  struct Incoming {
    std::vector<std::uint32_t> segment_offsets;  // size + 1
    std::vector<Segment> segments;
    std::vector<std::uint32_t> pre_neuron;
    std::vector<std::int32_t> weight_raw;
    std::vector<double> weight;
  };

  struct Population {
    PopulationInfo info;
    PopulationKind kind = PopulationKind::izhikevich;
    std::vector<NeuronParams> params;
    std::vector<CompartmentWords> words;
    std::vector<NeuronState> states;
    GroupConstants constants;
    std::optional<PoissonSource> source;
    double bias = 0.0;
    std::vector<DendriteAccumulator> acc;
    std::vector<Fixed> last_da;
    std::vector<double> last_real;
    std::vector<std::uint8_t> fired;
    std::vector<std::uint8_t> fired_prev;
    bool any_prev = false;
    Incoming incoming;
  };

  NetworkOptions options;
  std::vector<Population> pops;
  std::vector<Synapse> synapses;
  std::size_t connection_count = 0;
  bool finalized = false;
  double delta_dop = 0.0;
  double alpha_real = 0.0;
  std::int64_t step = 0;
  std::vector<SpikeEvent> events;
  std::unique_ptr<tbb::global_control> parallelism;
  std::unique_ptr<tbb::task_arena> arena;

  explicit Impl(NetworkOptions o) : options(o) {
    fxp::checked(options.da_format);
    if (!(options.dt_ms > 0.0) || !(options.tau_syn_ms > 0.0)) {
      throw Error(ErrorCode::invalid_argument, "dt and tau must be > 0");
    }
    if (options.threads < 1) {
      throw Error(ErrorCode::invalid_argument, "thread count must be >= 1");
    }
    alpha_real = 1.0 - options.dt_ms / options.tau_syn_ms;
    if (options.threads > 1) {
      // Lift the default worker cap so the requested count is honoured even
      // on hosts with fewer cores.
      parallelism = std::make_unique<tbb::global_control>(
          tbb::global_control::max_allowed_parallelism,
          static_cast<std::size_t>(options.threads));
      arena = std::make_unique<tbb::task_arena>(options.threads);
    }
  }

  template <typename Fn>
  void for_each_neuron(std::uint32_t n, Fn&& fn) {
    if (!arena) {
      for (std::uint32_t i = 0; i < n; ++i) fn(i);
      return;
    }
    arena->execute([&] {
      tbb::parallel_for(tbb::blocked_range<std::uint32_t>(0, n, 16),
                        [&](const tbb::blocked_range<std::uint32_t>& r) {
                          for (auto i = r.begin(); i != r.end(); ++i) fn(i);
                        });
    });
  }

  Population& izh(std::uint32_t index) {
    if (index >= pops.size()) {
      throw Error(ErrorCode::invalid_argument, "population index out of range");
    }
    Population& p = pops[index];
    if (p.kind != PopulationKind::izhikevich) {
      throw Error(ErrorCode::invalid_argument,
                  p.info.name + " is not an Izhikevich population");
    }
    return p;
  }

  void check_neuron(const Population& p, std::uint32_t neuron) const {
    if (neuron >= p.info.size) {
      throw Error(ErrorCode::invalid_argument,
                  "neuron index out of range for " + p.info.name);
    }
  }

  void check_new_name(const std::string& name) const {
    if (name.empty()) {
      throw Error(ErrorCode::config, "population name must not be empty");
    }
    for (const auto& p : pops) {
      if (p.info.name == name) {
        throw Error(ErrorCode::config, "duplicate population " + name);
      }
    }
    if (finalized) {
      throw Error(ErrorCode::config,
                  "cannot add populations after the network has started");
    }
  }

  void finalize() {
    if (finalized) return;
    std::vector<std::vector<const Synapse*>> by_post(pops.size());
    for (const auto& s : synapses) by_post[s.post.population].push_back(&s);
    for (std::size_t p = 0; p < pops.size(); ++p) {
      auto& list = by_post[p];
      std::stable_sort(list.begin(), list.end(),
                       [](const Synapse* x, const Synapse* y) {
                         if (x->post.neuron != y->post.neuron) {
                           return x->post.neuron < y->post.neuron;
                         }
                         if (x->pre.population != y->pre.population) {
                           return x->pre.population < y->pre.population;
                         }
                         return x->pre.neuron < y->pre.neuron;
                       });
      Incoming& in = pops[p].incoming;
      in.segment_offsets.assign(pops[p].info.size + 1, 0);
      std::size_t k = 0;
      for (std::uint32_t j = 0; j < pops[p].info.size; ++j) {
        in.segment_offsets[j] = static_cast<std::uint32_t>(in.segments.size());
        while (k < list.size() && list[k]->post.neuron == j) {
          Segment seg{list[k]->pre.population,
                      static_cast<std::uint32_t>(in.pre_neuron.size()), 0};
          while (k < list.size() && list[k]->post.neuron == j &&
                 list[k]->pre.population == seg.pre_population) {
            in.pre_neuron.push_back(list[k]->pre.neuron);
            in.weight_raw.push_back(list[k]->weight_q.raw());
            in.weight.push_back(list[k]->weight);
            ++k;
          }
          seg.end = static_cast<std::uint32_t>(in.pre_neuron.size());
          in.segments.push_back(seg);
        }
      }
      in.segment_offsets[pops[p].info.size] =
          static_cast<std::uint32_t>(in.segments.size());
    }
    finalized = true;
  }

  void deliver(Population& post) {
    const Incoming& in = post.incoming;
    for_each_neuron(post.info.size, [&](std::uint32_t j) {
      DendriteAccumulator& acc = post.acc[j];
      for (auto s = in.segment_offsets[j]; s < in.segment_offsets[j + 1]; ++s) {
        const Segment& seg = in.segments[s];
        const Population& pre = pops[seg.pre_population];
        if (!pre.any_prev) continue;
        for (auto k = seg.begin; k < seg.end; ++k) {
          if (pre.fired_prev[in.pre_neuron[k]]) {
            acc.add_raw(in.weight_raw[k], in.weight[k]);
          }
        }
      }
    });
  }

  void update(Population& p) {
    const bool fixed = options.backend == Backend::fixed;
    const Fixed bias = fxp::encode(p.bias, fmt::REG);
    for_each_neuron(p.info.size, [&](std::uint32_t j) {
      DendriteAccumulator& acc = p.acc[j];
      bool spiked = false;
      if (fixed) {
        const Fixed da = acc.value(options.da_format);
        p.last_da[j] = da;
        p.last_real[j] = acc.real_value();
        auto r = step_fixed(p.words[j], da, p.constants, bias);
        p.words[j] = r.state;
        spiked = r.spiked;
      } else {
        p.last_da[j] = acc.value(options.da_format);
        p.last_real[j] = acc.real_value();
        NeuronState s = p.states[j];
        const NeuronParams& prm = p.params[j];
        s.i_syn = isyn_step_float(s.i_syn, alpha_real, acc.real_value());
        const double current =
            modulated_current_float(prm.i_const, s.i_syn, prm.beta,
                                    s.delta_dop) +
            p.bias;
        auto r = step_float(prm, s, current, options.dt_ms, options.include_140);
        p.states[j] = r.state;
        spiked = r.spiked;
      }
      acc.reset();
      p.fired[j] = spiked ? 1 : 0;
    });
  }

  const std::vector<SpikeEvent>& advance() {
    finalize();
    // 1. delivery of step-1 spikes
    for (auto& p : pops) {
      if (p.kind == PopulationKind::izhikevich) deliver(p);
    }
    // 2. Poisson draws
    for (auto& p : pops) {
      if (p.kind != PopulationKind::poisson) continue;
      const double prob = p.source->probability(options.dt_ms);
      for (std::uint32_t j = 0; j < p.info.size; ++j) {
        p.fired[j] = p.source->fires(options.seed, step, j, prob) ? 1 : 0;
      }
    }
    // 3. neuron updates
    for (auto& p : pops) {
      if (p.kind == PopulationKind::izhikevich) update(p);
    }
    // 4. collection
    events.clear();
    for (std::uint32_t pi = 0; pi < pops.size(); ++pi) {
      Population& p = pops[pi];
      p.any_prev = false;
      for (std::uint32_t j = 0; j < p.info.size; ++j) {
        if (p.fired[j]) {
          events.push_back({step, pi, j});
          p.any_prev = true;
        }
      }
      std::swap(p.fired, p.fired_prev);
    }
    ++step;
    return events;
  }
};

Network::Network(NetworkOptions options)
    : impl_(std::make_unique<Impl>(options)) {}
Network::~Network() = default;
Network::Network(Network&&) noexcept = default;
Network& Network::operator=(Network&&) noexcept = default;

const NetworkOptions& Network::options() const noexcept {
  return impl_->options;
}

std::uint32_t Network::add_population(const std::string& name,
                                      std::uint32_t size,
                                      const NeuronParams& params) {
  if (size == 0) {
    throw Error(ErrorCode::config, "population " + name + " must be non-empty");
  }
  return add_population(name, std::vector<NeuronParams>(size, params));
}

std::uint32_t Network::add_population(const std::string& name,
                                      std::vector<NeuronParams> params) {
  impl_->check_new_name(name);
  if (params.empty()) {
    throw Error(ErrorCode::config, "population " + name + " must be non-empty");
  }
  for (const auto& p : params) {
    p.validate();
    if (p.beta != params.front().beta || p.v_peak != params.front().v_peak) {
      throw Error(ErrorCode::config,
                  "population " + name +
                      ": beta and v_peak must be uniform within a group");
    }
  }
  Impl::Population pop;
  const auto n = static_cast<std::uint32_t>(params.size());
  pop.info = {name, n};
  pop.kind = PopulationKind::izhikevich;
  pop.constants = GroupConstants::make(
      params.front().beta, params.front().v_peak, impl_->options.tau_syn_ms,
      impl_->options.dt_ms, impl_->options.include_140);
  for (const auto& p : params) {
    NeuronState s = initial_state(p);
    s.delta_dop = impl_->delta_dop;
    pop.states.push_back(s);
    pop.words.push_back(encode_compartment(p, s));
  }
  pop.params = std::move(params);
  pop.acc.resize(n);
  pop.last_da.assign(n, Fixed::from_raw(0, impl_->options.da_format));
  pop.last_real.assign(n, 0.0);
  pop.fired.assign(n, 0);
  pop.fired_prev.assign(n, 0);
  impl_->pops.push_back(std::move(pop));
  return static_cast<std::uint32_t>(impl_->pops.size() - 1);
}

std::uint32_t Network::add_poisson_source(const std::string& name,
                                          std::uint32_t size, double rate_hz) {
  impl_->check_new_name(name);
  if (size == 0) {
    throw Error(ErrorCode::config, "generator " + name + " must be non-empty");
  }
  const auto index = static_cast<std::uint32_t>(impl_->pops.size());
  Impl::Population pop;
  pop.info = {name, size};
  pop.kind = PopulationKind::poisson;
  pop.source.emplace(rate_hz, size, kSourceStreams + index);
  pop.source->probability(impl_->options.dt_ms);
  pop.fired.assign(size, 0);
  pop.fired_prev.assign(size, 0);
  impl_->pops.push_back(std::move(pop));
  return index;
}

std::size_t Network::connect(const ConnectionSpec& spec) {
  if (impl_->finalized) {
    throw Error(ErrorCode::config,
                "cannot add connections after the network has started");
  }
  auto pre = find(spec.pre);
  auto post = find(spec.post);
  if (!pre) throw Error(ErrorCode::config, "unknown population " + spec.pre);
  if (!post) throw Error(ErrorCode::config, "unknown population " + spec.post);
  if (impl_->pops[*post].kind != PopulationKind::izhikevich) {
    throw Error(ErrorCode::config,
                "connection target " + spec.post + " is a generator");
  }
  auto built = build_connections(spec, *pre, impl_->pops[*pre].info.size, *post,
                                 impl_->pops[*post].info.size,
                                 impl_->options.seed, impl_->connection_count++);
  impl_->synapses.insert(impl_->synapses.end(), built.begin(), built.end());
  return built.size();
}

void Network::set_delta_dop(double delta_dop) {
  const Fixed q = fxp::encode(delta_dop, fmt::DDOP);
  impl_->delta_dop = delta_dop;
  for (auto& p : impl_->pops) {
    if (p.kind != PopulationKind::izhikevich) continue;
    for (std::uint32_t j = 0; j < p.info.size; ++j) {
      p.states[j].delta_dop = delta_dop;
      CompartmentFields f = unpack(p.words[j]);
      f[Field::delta_dop] = q.raw();
      p.words[j] = pack(f);
    }
  }
}

double Network::delta_dop() const noexcept { return impl_->delta_dop; }

void Network::set_bias_current(std::uint32_t population, double current) {
  if (!std::isfinite(current)) {
    throw Error(ErrorCode::invalid_argument, "bias current must be finite");
  }
  impl_->izh(population).bias = current;
}

void Network::set_state(std::uint32_t population, std::uint32_t neuron,
                        const NeuronState& state) {
  auto& p = impl_->izh(population);
  impl_->check_neuron(p, neuron);
  p.states[neuron] = state;
  p.words[neuron] = encode_compartment(p.params[neuron], state);
}

NeuronState Network::state(std::uint32_t population,
                           std::uint32_t neuron) const {
  auto& p = impl_->izh(population);
  impl_->check_neuron(p, neuron);
  if (impl_->options.backend == Backend::fixed) {
    return decode_state(p.words[neuron]);
  }
  return p.states[neuron];
}

CompartmentWords Network::compartment(std::uint32_t population,
                                      std::uint32_t neuron) const {
  auto& p = impl_->izh(population);
  impl_->check_neuron(p, neuron);
  return p.words[neuron];
}

Fixed Network::last_input(std::uint32_t population, std::uint32_t neuron) const {
  auto& p = impl_->izh(population);
  impl_->check_neuron(p, neuron);
  return p.last_da[neuron];
}

double Network::last_input_real(std::uint32_t population,
                                std::uint32_t neuron) const {
  auto& p = impl_->izh(population);
  impl_->check_neuron(p, neuron);
  return p.last_real[neuron];
}

std::uint32_t Network::population_count() const noexcept {
  return static_cast<std::uint32_t>(impl_->pops.size());
}

std::optional<std::uint32_t> Network::find(std::string_view name) const noexcept {
  for (std::size_t i = 0; i < impl_->pops.size(); ++i) {
    if (impl_->pops[i].info.name == name) return static_cast<std::uint32_t>(i);
  }
  return std::nullopt;
}

const PopulationInfo& Network::population(std::uint32_t index) const {
  if (index >= impl_->pops.size()) {
    throw Error(ErrorCode::invalid_argument, "population index out of range");
  }
  return impl_->pops[index].info;
}

PopulationKind Network::kind(std::uint32_t index) const {
  if (index >= impl_->pops.size()) {
    throw Error(ErrorCode::invalid_argument, "population index out of range");
  }
  return impl_->pops[index].kind;
}

std::vector<PopulationInfo> Network::populations() const {
  std::vector<PopulationInfo> out;
  for (const auto& p : impl_->pops) out.push_back(p.info);
  return out;
}

const std::vector<Synapse>& Network::synapses() const noexcept {
  return impl_->synapses;
}

std::size_t Network::synapse_count() const noexcept {
  return impl_->synapses.size();
}

std::int64_t Network::step_index() const noexcept { return impl_->step; }

const std::vector<SpikeEvent>& Network::step() { return impl_->advance(); }

SpikeRecord Network::run(std::int64_t steps,
                         const std::vector<std::string>& record) {
  if (steps < 0) throw Error(ErrorCode::invalid_argument, "steps must be >= 0");
  std::vector<std::uint8_t> keep(impl_->pops.size(), record.empty() ? 1 : 0);
  for (const auto& name : record) {
    auto idx = find(name);
    if (!idx) throw Error(ErrorCode::config, "unknown population " + name);
    keep[*idx] = 1;
  }
  SpikeRecord out;
  out.populations = populations();
  for (std::int64_t t = 0; t < steps; ++t) {
    for (const auto& e : step()) {
      if (keep[e.population]) out.events.push_back(e);
    }
  }
  return out;
}

}  // namespace neurocore
