#include "neurocore/neurocore.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <sstream>
#include <string>

#include "neurocore/analysis.hpp"
#include "neurocore/bg.hpp"
#include "neurocore/config.hpp"
#include "neurocore/error.hpp"
#include "neurocore/network.hpp"
#include "neurocore/regimes.hpp"
#include "neurocore/schedule.hpp"

struct nc_config {
  neurocore::BgConfig cfg;
};

struct nc_network {
  neurocore::Network net;
};

struct nc_record {
  neurocore::SpikeRecord record;
};

struct nc_gonogo {
  neurocore::BgConfig cfg;
  std::vector<neurocore::ConditionResult> results;
};

namespace {

thread_local std::string g_last_error;

nc_status to_status(neurocore::ErrorCode code) {
  using neurocore::ErrorCode;
  switch (code) {
    case ErrorCode::invalid_argument:
      return NC_ERR_INVALID_ARGUMENT;
    case ErrorCode::parse:
      return NC_ERR_PARSE;
    case ErrorCode::io:
      return NC_ERR_IO;
    case ErrorCode::numeric:
      return NC_ERR_NUMERIC;
    case ErrorCode::insufficient_spikes:
      return NC_ERR_INSUFFICIENT_SPIKES;
    case ErrorCode::degenerate_reference:
      return NC_ERR_DEGENERATE_REFERENCE;
    case ErrorCode::unknown_field:
      return NC_ERR_UNKNOWN_FIELD;
    case ErrorCode::config:
      return NC_ERR_CONFIG;
  }
  return NC_ERR_INTERNAL;
}

template <typename Fn>
nc_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return NC_OK;
  } catch (const neurocore::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return NC_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return NC_ERR_INTERNAL;
  }
}

nc_status null_argument(const char* what) {
  g_last_error = std::string("null argument: ") + what;
  return NC_ERR_INVALID_ARGUMENT;
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

#define NC_REQUIRE(ptr)                          \
  do {                                           \
    if ((ptr) == nullptr) return null_argument(#ptr); \
  } while (0)

extern "C" {

const char* nc_last_error(void) { return g_last_error.c_str(); }

const char* nc_status_name(nc_status status) {
  switch (status) {
    case NC_OK:
      return "ok";
    case NC_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case NC_ERR_PARSE:
      return "parse error";
    case NC_ERR_CONFIG:
      return "config error";
    case NC_ERR_IO:
      return "i/o error";
    case NC_ERR_NUMERIC:
      return "numeric error";
    case NC_ERR_INSUFFICIENT_SPIKES:
      return "insufficient spikes";
    case NC_ERR_DEGENERATE_REFERENCE:
      return "degenerate reference";
    case NC_ERR_UNKNOWN_FIELD:
      return "unknown field";
    case NC_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

void nc_string_free(char* s) { std::free(s); }

nc_status nc_config_default(nc_config** out) {
  NC_REQUIRE(out);
  return guarded([&] { *out = new nc_config{neurocore::default_bg_config()}; });
}

nc_status nc_config_load(const char* path, nc_config** out) {
  NC_REQUIRE(path);
  NC_REQUIRE(out);
  return guarded([&] { *out = new nc_config{neurocore::load_config(path)}; });
}

nc_status nc_config_parse(const char* text, nc_config** out) {
  NC_REQUIRE(text);
  NC_REQUIRE(out);
  return guarded([&] { *out = new nc_config{neurocore::parse_config(text)}; });
}

void nc_config_free(nc_config* cfg) { delete cfg; }

nc_status nc_config_set_seed(nc_config* cfg, uint64_t seed) {
  NC_REQUIRE(cfg);
  cfg->cfg.seed = seed;
  return NC_OK;
}

nc_status nc_config_set_backend(nc_config* cfg, nc_backend backend) {
  NC_REQUIRE(cfg);
  if (backend != NC_BACKEND_FIXED && backend != NC_BACKEND_FLOAT) {
    g_last_error = "unknown backend";
    return NC_ERR_INVALID_ARGUMENT;
  }
  cfg->cfg.backend = backend == NC_BACKEND_FIXED ? neurocore::Backend::fixed
                                                 : neurocore::Backend::floating;
  return NC_OK;
}

nc_status nc_config_set_duration_ms(nc_config* cfg, double duration_ms) {
  NC_REQUIRE(cfg);
  return guarded([&] {
    neurocore::BgConfig next = cfg->cfg;
    next.duration_ms = duration_ms;
    // Short runs keep an analysis window: the transient shrinks to half.
    if (duration_ms > 0.0 && next.transient_ms >= duration_ms) {
      next.transient_ms = duration_ms / 2.0;
    }
    next.validate();
    cfg->cfg = std::move(next);
  });
}

nc_status nc_config_set_threads(nc_config* cfg, int threads) {
  NC_REQUIRE(cfg);
  return guarded([&] {
    neurocore::BgConfig next = cfg->cfg;
    next.threads = threads;
    next.validate();
    cfg->cfg = std::move(next);
  });
}

nc_status nc_config_get_seed(const nc_config* cfg, uint64_t* seed) {
  NC_REQUIRE(cfg);
  NC_REQUIRE(seed);
  *seed = cfg->cfg.seed;
  return NC_OK;
}

nc_status nc_config_get_duration_ms(const nc_config* cfg, double* ms) {
  NC_REQUIRE(cfg);
  NC_REQUIRE(ms);
  *ms = cfg->cfg.duration_ms;
  return NC_OK;
}

nc_status nc_network_build_bg(const nc_config* cfg, nc_network** out) {
  NC_REQUIRE(cfg);
  NC_REQUIRE(out);
  return guarded([&] { *out = new nc_network{neurocore::build_bg(cfg->cfg)}; });
}

void nc_network_free(nc_network* net) { delete net; }

nc_status nc_network_set_dopamine(nc_network* net, double delta_dop) {
  NC_REQUIRE(net);
  return guarded([&] { neurocore::set_dopamine(net->net, delta_dop); });
}

nc_status nc_network_synapse_count(const nc_network* net, size_t* count) {
  NC_REQUIRE(net);
  NC_REQUIRE(count);
  *count = net->net.synapse_count();
  return NC_OK;
}

nc_status nc_network_population_count(const nc_network* net, size_t* count) {
  NC_REQUIRE(net);
  NC_REQUIRE(count);
  *count = net->net.population_count();
  return NC_OK;
}

nc_status nc_network_step(nc_network* net, size_t* spikes) {
  NC_REQUIRE(net);
  return guarded([&] {
    const auto& events = net->net.step();
    if (spikes) *spikes = events.size();
  });
}

nc_status nc_network_run(nc_network* net, int64_t steps, nc_record** out) {
  NC_REQUIRE(net);
  NC_REQUIRE(out);
  return guarded([&] { *out = new nc_record{net->net.run(steps)}; });
}

void nc_record_free(nc_record* rec) { delete rec; }

nc_status nc_record_size(const nc_record* rec, size_t* count) {
  NC_REQUIRE(rec);
  NC_REQUIRE(count);
  *count = rec->record.events.size();
  return NC_OK;
}

nc_status nc_record_event(const nc_record* rec, size_t index, int64_t* step,
                          const char** population, uint32_t* neuron) {
  NC_REQUIRE(rec);
  if (index >= rec->record.events.size()) {
    g_last_error = "event index out of range";
    return NC_ERR_INVALID_ARGUMENT;
  }
  const auto& e = rec->record.events[index];
  if (step) *step = e.step;
  if (population) *population = rec->record.populations[e.population].name.c_str();
  if (neuron) *neuron = e.neuron;
  return NC_OK;
}

nc_status nc_record_export(const nc_record* rec, const char* csv_path,
                           const char* svg_path, double duration_ms) {
  NC_REQUIRE(rec);
  NC_REQUIRE(csv_path);
  NC_REQUIRE(svg_path);
  return guarded([&] {
    neurocore::export_raster(rec->record, csv_path, svg_path, duration_ms);
  });
}

nc_status nc_gonogo_run(const nc_config* cfg, nc_gonogo** out) {
  NC_REQUIRE(cfg);
  NC_REQUIRE(out);
  return guarded([&] {
    *out = new nc_gonogo{cfg->cfg, neurocore::run_gonogo(cfg->cfg)};
  });
}

void nc_gonogo_free(nc_gonogo* result) { delete result; }

nc_status nc_gonogo_rate(const nc_gonogo* result, const char* condition,
                         const char* population, double* mean_rate_hz,
                         size_t* spike_count) {
  NC_REQUIRE(result);
  NC_REQUIRE(condition);
  NC_REQUIRE(population);
  return guarded([&] {
    for (const auto& r : result->results) {
      if (r.condition != condition) continue;
      const auto& rate = r.rate(population);
      if (mean_rate_hz) *mean_rate_hz = rate.mean_rate_hz;
      if (spike_count) *spike_count = rate.spike_count;
      return;
    }
    throw neurocore::Error(neurocore::ErrorCode::invalid_argument,
                           std::string("unknown condition ") + condition);
  });
}

nc_status nc_gonogo_summary_json(const nc_gonogo* result, char** json) {
  NC_REQUIRE(result);
  NC_REQUIRE(json);
  return guarded([&] {
    *json = copy_string(neurocore::gonogo_summary_json(result->cfg, result->results));
  });
}

nc_status nc_gonogo_write(const nc_gonogo* result, const char* out_dir) {
  NC_REQUIRE(result);
  NC_REQUIRE(out_dir);
  return guarded([&] {
    neurocore::write_gonogo_outputs(result->cfg, result->results, out_dir);
  });
}

nc_status nc_regimes_run(const char* out_dir, char** report, int* all_passed) {
  NC_REQUIRE(report);
  return guarded([&] {
    using neurocore::Backend;
    std::vector<neurocore::RegimeVerdict> verdicts;
    if (out_dir) std::filesystem::create_directories(out_dir);
    for (const auto& spec : neurocore::canonical_regimes()) {
      for (Backend b : {Backend::floating, Backend::fixed}) {
        verdicts.push_back(neurocore::check_regime(spec, b));
        if (out_dir) {
          const auto trace =
              neurocore::simulate_neuron(spec.params, b, spec.stimulus, spec.steps);
          const auto file = std::filesystem::path(out_dir) /
                            (spec.name + "_" + std::string(neurocore::to_string(b)) +
                             ".csv");
          neurocore::write_text_file(file, neurocore::trace_csv(trace));
        }
      }
    }
    bool ok = true;
    for (const auto& v : verdicts) ok = ok && v.passed;
    const std::string text = neurocore::regimes_report(verdicts);
    if (out_dir) {
      neurocore::write_text_file(std::filesystem::path(out_dir) / "regimes_report.txt",
                                 text);
    }
    *report = copy_string(text);
    if (all_passed) *all_passed = ok ? 1 : 0;
  });
}

nc_status nc_errt_report(char** report, double* rs_percent, double* fs_percent) {
  NC_REQUIRE(report);
  return guarded([&] {
    const auto rows = neurocore::errt_comparison();
    for (const auto& r : rows) {
      if (r.regime == "RS" && rs_percent) *rs_percent = r.errt_percent;
      if (r.regime == "FS" && fs_percent) *fs_percent = r.errt_percent;
    }
    *report = copy_string(neurocore::errt_report(rows));
  });
}

nc_status nc_errt(const double* reference_ms, size_t reference_len,
                  const double* test_ms, size_t test_len, double* percent) {
  NC_REQUIRE(percent);
  if (reference_len > 0) NC_REQUIRE(reference_ms);
  if (test_len > 0) NC_REQUIRE(test_ms);
  return guarded([&] {
    neurocore::SpikeTrain ref(
        std::vector<double>(reference_ms, reference_ms + reference_len));
    neurocore::SpikeTrain test(std::vector<double>(test_ms, test_ms + test_len));
    *percent = neurocore::errt(ref, test);
  });
}

nc_status nc_schedule_canonical_text(char** text) {
  NC_REQUIRE(text);
  return guarded([&] {
    *text = copy_string(std::string(neurocore::microcode::izhikevich_schedule_text()));
  });
}

nc_status nc_schedule_validate(const char* text, char** report,
                               size_t* violations) {
  NC_REQUIRE(report);
  return guarded([&] {
    namespace mc = neurocore::microcode;
    const mc::BlockSchedule schedule =
        text ? mc::parse_schedule(text) : mc::izhikevich_schedule();
    const auto found = mc::validate_schedule(schedule);
    std::ostringstream out;
    for (const auto& v : found) {
      out << "block " << v.block << " touches words {";
      for (std::size_t i = 0; i < v.words.size(); ++i) {
        out << (i ? "," : "") << v.words[i];
      }
      out << "}\n";
    }
    *report = copy_string(out.str());
    if (violations) *violations = found.size();
  });
}

}  // extern "C"
