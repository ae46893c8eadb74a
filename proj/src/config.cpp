#include "neurocore/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "neurocore/default_config.inc"
#include "neurocore/error.hpp"

namespace neurocore {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

class Parser {
 public:
  Parser(std::string_view text, std::string source)
      : text_(text), source_(std::move(source)) {}

  BgConfig run() {
    cfg_.populations.clear();
    cfg_.generators.clear();
    cfg_.connections.clear();
    while (!text_.empty()) {
      const auto nl = text_.find('\n');
      const std::string_view raw = text_.substr(0, nl);
      text_ = nl == std::string_view::npos ? std::string_view{}
                                           : text_.substr(nl + 1);
      ++line_;
      const std::string_view line = trim(raw);
      if (line.empty() || line.front() == '#') continue;
      if (line.front() == '[') {
        section(line);
      } else {
        entry(line);
      }
    }
    close_section();
    try {
      cfg_.validate();
    } catch (const Error& e) {
      throw Error(ErrorCode::config, source_ + ": " + e.what());
    }
    return cfg_;
  }

 private:
  enum class Section { none, simulation, population, generator, connections };

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::parse,
                source_ + ":" + std::to_string(line_) + ": " + msg);
  }

  double number(std::string_view s) const {
    s = trim(s);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
      fail("expected a number, got '" + std::string(s) + "'");
    }
    return value;
  }

  std::uint64_t integer(std::string_view s) const {
    s = trim(s);
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
      fail("expected a non-negative integer, got '" + std::string(s) + "'");
    }
    return value;
  }

  std::uint32_t count(std::string_view s) const {
    const auto v = integer(s);
    if (v == 0 || v > 1'000'000) fail("count out of range (1..1000000)");
    return static_cast<std::uint32_t>(v);
  }

  void close_section() {
    const char* const* required = nullptr;
    static const char* const kPopulationKeys[] = {"a", "b", "c", "d", nullptr};
    static const char* const kGeneratorKeys[] = {"rate_hz", nullptr};
    if (current_ == Section::population) required = kPopulationKeys;
    if (current_ == Section::generator) required = kGeneratorKeys;
    for (; required && *required; ++required) {
      if (!seen_.count(*required)) {
        throw Error(ErrorCode::parse, source_ + ":" +
                                          std::to_string(section_line_) +
                                          ": section is missing '" +
                                          *required + "'");
      }
    }
    seen_.clear();
  }

  void section(std::string_view line) {
    if (line.back() != ']') fail("unterminated section header");
    close_section();
    section_line_ = line_;
    const std::string_view body = trim(line.substr(1, line.size() - 2));
    const auto space = body.find_first_of(" \t");
    const std::string_view kind = body.substr(0, space);
    const std::string name = space == std::string_view::npos
                                 ? std::string()
                                 : std::string(trim(body.substr(space + 1)));
    if (kind == "simulation" || kind == "connections") {
      if (!name.empty()) fail("section [" + std::string(kind) + "] takes no name");
      current_ = kind == "simulation" ? Section::simulation : Section::connections;
      return;
    }
    if (kind == "population" || kind == "generator") {
      if (name.empty()) fail("section [" + std::string(kind) + "] needs a name");
      if (name.find(',') != std::string::npos) fail("names must not contain ','");
      if (!names_.insert({name, line_}).second) {
        fail("duplicate group name " + name);
      }
      if (kind == "population") {
        current_ = Section::population;
        cfg_.populations.push_back({name, NeuronParams{}});
      } else {
        current_ = Section::generator;
        cfg_.generators.push_back({name, 0.0, std::nullopt});
      }
      return;
    }
    fail("unknown section [" + std::string(kind) + "]");
  }

  void entry(std::string_view line) {
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail("expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    switch (current_) {
      case Section::none:
        fail("entry outside a section");
      case Section::simulation:
        simulation(key, value);
        return;
      case Section::population:
        population(key, value);
        return;
      case Section::generator:
        generator(key, value);
        return;
      case Section::connections:
        connection(key, value);
        return;
    }
  }

  void simulation(const std::string& key, std::string_view value) {
    if (key == "seed") {
      cfg_.seed = integer(value);
    } else if (key == "duration_ms") {
      cfg_.duration_ms = number(value);
    } else if (key == "transient_ms") {
      cfg_.transient_ms = number(value);
    } else if (key == "backend") {
      auto b = backend_from_string(value);
      if (!b) fail("backend must be 'fixed' or 'float'");
      cfg_.backend = *b;
    } else if (key == "threads") {
      const auto t = integer(value);
      if (t == 0 || t > 1024) fail("threads out of range (1..1024)");
      cfg_.threads = static_cast<int>(t);
    } else if (key == "population_size") {
      cfg_.population_size = count(value);
    } else if (key == "generator_size") {
      cfg_.generator_size = count(value);
    } else if (key == "dopamine_baseline") {
      cfg_.dopamine_baseline = number(value);
    } else if (key == "dopamine_high") {
      cfg_.dopamine_high = number(value);
    } else if (key == "dopamine_low") {
      cfg_.dopamine_low = number(value);
    } else if (key == "da_width") {
      cfg_.da_format.width = static_cast<int>(integer(value));
    } else if (key == "da_frac_bits") {
      cfg_.da_format.frac_bits = static_cast<int>(integer(value));
    } else {
      fail("unknown simulation key '" + key + "'");
    }
  }

  void population(const std::string& key, std::string_view value) {
    NeuronParams& p = cfg_.populations.back().params;
    static const std::map<std::string, double NeuronParams::*> kFields{
        {"a", &NeuronParams::a},         {"b", &NeuronParams::b},
        {"c", &NeuronParams::c},         {"d", &NeuronParams::d},
        {"i_const", &NeuronParams::i_const}, {"beta", &NeuronParams::beta},
        {"v_peak", &NeuronParams::v_peak}};
    auto it = kFields.find(key);
    if (it == kFields.end()) fail("unknown population key '" + key + "'");
    p.*(it->second) = number(value);
    seen_[key] = line_;
  }

  void generator(const std::string& key, std::string_view value) {
    GeneratorDef& g = cfg_.generators.back();
    if (key == "rate_hz") {
      g.rate_hz = number(value);
      if (!(g.rate_hz >= 0.0)) fail("rate_hz must be >= 0");
      seen_[key] = line_;
    } else if (key == "size") {
      g.size = count(value);
    } else {
      fail("unknown generator key '" + key + "'");
    }
  }

  void connection(const std::string& key, std::string_view value) {
    const auto arrow = key.find("->");
    if (arrow == std::string::npos) fail("expected 'PRE -> POST = weight, prob'");
    ConnectionSpec spec;
    spec.pre = std::string(trim(std::string_view(key).substr(0, arrow)));
    spec.post = std::string(trim(std::string_view(key).substr(arrow + 2)));
    if (spec.pre.empty() || spec.post.empty()) fail("empty connection endpoint");
    const auto comma = value.find(',');
    if (comma == std::string_view::npos) fail("expected 'weight, prob'");
    spec.weight = number(value.substr(0, comma));
    spec.prob = number(value.substr(comma + 1));
    if (!(spec.prob >= 0.0 && spec.prob <= 1.0)) {
      fail("connection probability outside [0, 1]");
    }
    cfg_.connections.push_back(std::move(spec));
  }

  std::string_view text_;
  std::string source_;
  std::size_t line_ = 0;
  std::size_t section_line_ = 0;
  Section current_ = Section::none;
  BgConfig cfg_;
  std::map<std::string, std::size_t> names_;
  std::map<std::string, std::size_t> seen_;
};

}  // namespace

BgConfig parse_config(std::string_view text, const std::string& source) {
  return Parser(text, source).run();
}

BgConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string_view default_config_text() noexcept { return kDefaultConfigText; }

BgConfig default_bg_config() {
  static const BgConfig cfg = parse_config(kDefaultConfigText, "bg_default.cfg");
  return cfg;
}

}  // namespace neurocore
