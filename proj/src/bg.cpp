#include "neurocore/bg.hpp"

#include <cmath>
#include <set>

#include "json.hpp"

#include "neurocore/analysis.hpp"
#include "neurocore/error.hpp"

namespace neurocore {

void BgConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::config, msg); };
  if (!(duration_ms > 0.0)) fail("duration_ms must be > 0");
  if (!(transient_ms >= 0.0) || !(transient_ms < duration_ms)) {
    fail("transient_ms must lie in [0, duration_ms)");
  }
  if (population_size == 0) fail("population_size must be > 0");
  if (generator_size == 0) fail("generator_size must be > 0");
  if (threads < 1) fail("threads must be >= 1");
  if (!da_format.valid()) fail("invalid dendrite accumulator format");
  for (double d : {dopamine_baseline, dopamine_high, dopamine_low}) {
    if (!std::isfinite(d)) fail("dopamine levels must be finite");
  }
  std::set<std::string> names;
  std::set<std::string> neuron_groups;
  for (const auto& p : populations) {
    if (!names.insert(p.name).second) fail("duplicate group " + p.name);
    neuron_groups.insert(p.name);
    try {
      p.params.validate();
    } catch (const Error& e) {
      fail("population " + p.name + ": " + e.what());
    }
  }
  for (const auto& g : generators) {
    if (!names.insert(g.name).second) fail("duplicate group " + g.name);
    if (!(g.rate_hz >= 0.0) || g.rate_hz * kDtMs / 1000.0 > 1.0) {
      fail("generator " + g.name + ": rate out of range");
    }
  }
  for (const auto& c : connections) {
    if (!names.count(c.pre)) fail("connection references unknown group " + c.pre);
    if (c.post != kAllPopulations && !neuron_groups.count(c.post)) {
      fail("connection target " + c.post + " is not a neuron group");
    }
    if (!(c.prob >= 0.0 && c.prob <= 1.0)) {
      fail("connection " + c.pre + " -> " + c.post + ": probability outside [0, 1]");
    }
  }
}

std::int64_t BgConfig::steps() const noexcept {
  return static_cast<std::int64_t>(std::llround(duration_ms / kDtMs));
}

std::vector<ConnectionSpec> BgConfig::expanded_connections() const {
  std::vector<ConnectionSpec> out;
  for (const auto& c : connections) {
    if (c.post != kAllPopulations) {
      out.push_back(c);
      continue;
    }
    for (const auto& p : populations) out.push_back({c.pre, p.name, c.weight, c.prob});
  }
  return out;
}

Network build_bg(const BgConfig& cfg) {
  cfg.validate();
  NetworkOptions opt;
  opt.backend = cfg.backend;
  opt.seed = cfg.seed;
  opt.threads = cfg.threads;
  opt.da_format = cfg.da_format;
  Network net(opt);
  for (const auto& p : cfg.populations) {
    net.add_population(p.name, cfg.population_size, p.params);
  }
  for (const auto& g : cfg.generators) {
    net.add_poisson_source(g.name, g.size.value_or(cfg.generator_size), g.rate_hz);
  }
  for (const auto& c : cfg.expanded_connections()) net.connect(c);
  set_dopamine(net, cfg.dopamine_baseline);
  return net;
}

void set_dopamine(Network& net, double delta_dop) {
  if (!std::isfinite(delta_dop)) {
    throw Error(ErrorCode::invalid_argument, "dopamine level must be finite");
  }
  net.set_delta_dop(delta_dop);
}

const PopulationRate& ConditionResult::rate(std::string_view population) const {
  for (const auto& r : rates) {
    if (r.population == population) return r;
  }
  throw Error(ErrorCode::invalid_argument,
              "no rate for population " + std::string(population));
}

ConditionResult run_condition(const BgConfig& cfg, const std::string& condition,
                              double delta_dop) {
  Network net = build_bg(cfg);
  set_dopamine(net, delta_dop);
  ConditionResult out;
  out.condition = condition;
  out.delta_dop = delta_dop;
  out.record = net.run(cfg.steps());
  for (const auto& p : cfg.populations) {
    const auto idx = *out.record.find(p.name);
    PopulationRate r;
    r.population = p.name;
    r.mean_rate_hz = population_rate(out.record, idx, cfg.transient_ms,
                                     cfg.duration_ms);
    for (const auto& e : out.record.events) {
      const double t = static_cast<double>(e.step) * kDtMs;
      if (e.population == idx && t >= cfg.transient_ms && t < cfg.duration_ms) {
        ++r.spike_count;
      }
    }
    out.rates.push_back(r);
  }
  return out;
}

std::vector<ConditionResult> run_gonogo(const BgConfig& cfg) {
  std::vector<ConditionResult> out;
  out.push_back(run_condition(cfg, "baseline", cfg.dopamine_baseline));
  out.push_back(run_condition(cfg, "high", cfg.dopamine_high));
  out.push_back(run_condition(cfg, "low", cfg.dopamine_low));
  return out;
}

std::string gonogo_summary_json(const BgConfig& cfg,
                                const std::vector<ConditionResult>& results) {
  nlohmann::ordered_json j;
  j["metadata"] = {{"seed", cfg.seed},
                   {"backend", std::string(to_string(cfg.backend))},
                   {"duration_ms", cfg.duration_ms},
                   {"transient_ms", cfg.transient_ms},
                   {"population_size", cfg.population_size},
                   {"generator_size", cfg.generator_size}};
  nlohmann::ordered_json dopamine = nlohmann::ordered_json::object();
  for (const auto& r : results) dopamine[r.condition] = r.delta_dop;
  j["metadata"]["delta_dop"] = dopamine;
  nlohmann::ordered_json conditions = nlohmann::ordered_json::object();
  for (const auto& r : results) {
    nlohmann::ordered_json c = nlohmann::ordered_json::object();
    for (const auto& rate : r.rates) {
      c[rate.population] = {{"mean_rate_hz", rate.mean_rate_hz},
                            {"spike_count", rate.spike_count}};
    }
    conditions[r.condition] = c;
  }
  j["conditions"] = conditions;
  return j.dump(2) + "\n";
}

void write_gonogo_outputs(const BgConfig& cfg,
                          const std::vector<ConditionResult>& results,
                          const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create " + out_dir.string());
  for (const auto& r : results) {
    const auto dir = out_dir / r.condition;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::io, "cannot create " + dir.string());
    export_raster(r.record, dir / "raster.csv", dir / "raster.svg",
                  cfg.duration_ms);
  }
  write_text_file(out_dir / "summary.json", gonogo_summary_json(cfg, results));
}

}  // namespace neurocore
