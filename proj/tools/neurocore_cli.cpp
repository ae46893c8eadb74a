// neurocore command-line front end. Talks to the library only through the C
// API.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "neurocore/neurocore.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct OwnedString {
  char* p = nullptr;
  ~OwnedString() { nc_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

int report(nc_status status, const char* what) {
  std::cerr << "neurocore: " << what << ": " << nc_status_name(status) << ": "
            << nc_last_error() << '\n';
  return status == NC_ERR_PARSE || status == NC_ERR_CONFIG ? kExitUsage
                                                           : kExitRuntime;
}

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

struct GonogoOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string backend;
  std::optional<double> duration_ms;
  std::optional<int> threads;
  std::string out;
};

int run_gonogo(const GonogoOptions& opt) {
  nc_config* cfg = nullptr;
  nc_status st = opt.config.empty() ? nc_config_default(&cfg)
                                    : nc_config_load(opt.config.c_str(), &cfg);
  if (st != NC_OK) return report(st, "loading config");
  std::unique_ptr<nc_config, decltype(&nc_config_free)> cfg_guard(cfg,
                                                                  nc_config_free);

  std::optional<std::uint64_t> seed = opt.seed;
  if (!seed) {
    if (auto s = env("NEUROCORE_SEED")) {
      try {
        std::size_t used = 0;
        seed = std::stoull(*s, &used);
        if (used != s->size()) throw std::invalid_argument(*s);
      } catch (const std::exception&) {
        std::cerr << "neurocore: NEUROCORE_SEED is not an integer: " << *s << '\n';
        return kExitUsage;
      }
    }
  }
  if (seed) nc_config_set_seed(cfg, *seed);
  if (!opt.backend.empty()) {
    nc_config_set_backend(cfg, opt.backend == "float" ? NC_BACKEND_FLOAT
                                                      : NC_BACKEND_FIXED);
  }
  if (opt.duration_ms) {
    if ((st = nc_config_set_duration_ms(cfg, *opt.duration_ms)) != NC_OK) {
      report(st, "--duration-ms");
      return kExitUsage;
    }
  }
  if (opt.threads) {
    if ((st = nc_config_set_threads(cfg, *opt.threads)) != NC_OK) {
      report(st, "--threads");
      return kExitUsage;
    }
  }
  std::string out = opt.out;
  if (out.empty()) out = env("NEUROCORE_OUT").value_or("neurocore_out");

  nc_gonogo* result = nullptr;
  if ((st = nc_gonogo_run(cfg, &result)) != NC_OK) return report(st, "gonogo");
  std::unique_ptr<nc_gonogo, decltype(&nc_gonogo_free)> result_guard(
      result, nc_gonogo_free);
  if ((st = nc_gonogo_write(result, out.c_str())) != NC_OK) {
    return report(st, "writing outputs");
  }
  OwnedString json;
  if ((st = nc_gonogo_summary_json(result, &json.p)) != NC_OK) {
    return report(st, "summary");
  }
  std::cout << json.str();
  return kExitOk;
}

int run_regimes(const std::string& out_dir) {
  OwnedString text;
  int all_passed = 0;
  const std::string dir = out_dir.empty()
                              ? env("NEUROCORE_OUT").value_or("neurocore_out") +
                                    "/regimes"
                              : out_dir;
  nc_status st = nc_regimes_run(dir.c_str(), &text.p, &all_passed);
  if (st != NC_OK) return report(st, "regimes");
  std::cout << text.str();
  return all_passed ? kExitOk : kExitRuntime;
}

int run_errt() {
  OwnedString text;
  nc_status st = nc_errt_report(&text.p, nullptr, nullptr);
  if (st != NC_OK) return report(st, "errt");
  std::cout << text.str();
  return kExitOk;
}

int run_validate(const std::string& path, bool print) {
  std::string text;
  if (!path.empty()) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      std::cerr << "neurocore: cannot open schedule " << path << '\n';
      return kExitUsage;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  if (print) {
    if (path.empty()) {
      OwnedString canonical;
      if (nc_schedule_canonical_text(&canonical.p) == NC_OK) {
        std::cout << canonical.str();
      }
    } else {
      std::cout << text;
    }
  }
  OwnedString violations;
  std::size_t count = 0;
  nc_status st = nc_schedule_validate(path.empty() ? nullptr : text.c_str(),
                                      &violations.p, &count);
  if (st != NC_OK) {
    std::cerr << "neurocore: " << (path.empty() ? "schedule" : path) << ": "
              << nc_last_error() << '\n';
    return kExitUsage;
  }
  std::cout << violations.str() << count << " violation(s)\n";
  return count == 0 ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neurocore emulator: fixed-point Izhikevich neurons and the "
               "basal ganglia Go/No-Go network"};
  app.require_subcommand(1);

  auto* regimes = app.add_subcommand(
      "regimes", "Run the firing-regime catalogue on both backends");
  std::string regimes_out;
  regimes->add_option("--out", regimes_out, "Directory for trace CSVs");

  auto* errt = app.add_subcommand(
      "errt", "Compare float and fixed spike timing for RS and FS neurons");

  auto* gonogo = app.add_subcommand(
      "gonogo", "Run the Go/No-Go task at baseline, high and low dopamine");
  GonogoOptions g;
  gonogo->add_option("--config", g.config, "Run configuration file")
      ->check(CLI::ExistingFile);
  gonogo->add_option("--seed", g.seed, "Random seed (env NEUROCORE_SEED)");
  gonogo->add_option("--backend", g.backend, "Neuron backend")
      ->check(CLI::IsMember({"fixed", "float"}));
  gonogo->add_option("--duration-ms", g.duration_ms, "Simulated time per condition")
      ->check(CLI::PositiveNumber);
  gonogo->add_option("--threads", g.threads, "Engine threads")
      ->check(CLI::Range(1, 1024));
  gonogo->add_option("--out", g.out, "Output directory (env NEUROCORE_OUT)");

  auto* validate = app.add_subcommand(
      "validate-schedule", "Check the one-state-word-per-block rule");
  std::string schedule_path;
  bool print = false;
  validate->add_option("--schedule", schedule_path,
                       "Schedule file (default: the shipped neuron program)");
  validate->add_flag("--print", print, "Print the schedule before validating");

  if (argc > 1 && argv[1][0] != '-') {
    if (app.get_subcommand_no_throw(argv[1]) == nullptr) {
      std::cerr << "neurocore: unknown subcommand '" << argv[1] << "'\n\n"
                << app.help();
      return kExitUsage;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "neurocore: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  if (*regimes) return run_regimes(regimes_out);
  if (*errt) return run_errt();
  if (*gonogo) return run_gonogo(g);
  if (*validate) return run_validate(schedule_path, print);
  std::cerr << app.help();
  return kExitUsage;
}
