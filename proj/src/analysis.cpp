#include "neurocore/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "neurocore/error.hpp"

namespace neurocore {

SpikeTrain::SpikeTrain(std::vector<double> times_ms) : times_(std::move(times_ms)) {
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1])) {
      throw Error(ErrorCode::invalid_argument,
                  "spike times must be strictly increasing");
    }
  }
}

SpikeTrain SpikeTrain::from_steps(const std::vector<std::int64_t>& steps,
                                  double dt_ms) {
  std::vector<double> t;
  t.reserve(steps.size());
  for (auto s : steps) t.push_back(static_cast<double>(s) * dt_ms);
  return SpikeTrain(std::move(t));
}

double errt(const SpikeTrain& reference, const SpikeTrain& test) {
  if (reference.size() < 2 || test.size() < 2) {
    throw Error(ErrorCode::insufficient_spikes,
                "ERRt needs at least two spikes in each train");
  }
  const double ref_gap = reference.times()[1] - reference.times()[0];
  const double test_gap = test.times()[1] - test.times()[0];
  if (ref_gap == 0.0) {
    throw Error(ErrorCode::degenerate_reference, "reference interval is zero");
  }
  return std::abs((test_gap - ref_gap) / ref_gap) * 100.0;
}

double errt_mean_gaps(const SpikeTrain& reference, const SpikeTrain& test) {
  const std::size_t n = std::min(reference.size(), test.size());
  if (n < 2) {
    throw Error(ErrorCode::insufficient_spikes,
                "ERRt needs at least two spikes in each train");
  }
  double sum = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double ref_gap = reference.times()[i] - reference.times()[i - 1];
    const double test_gap = test.times()[i] - test.times()[i - 1];
    sum += std::abs((test_gap - ref_gap) / ref_gap);
  }
  return sum / static_cast<double>(n - 1) * 100.0;
}

double firing_rate(const SpikeTrain& train, double start_ms, double end_ms) {
  if (!(start_ms < end_ms)) {
    throw Error(ErrorCode::invalid_argument, "rate window must have start < end");
  }
  const auto& t = train.times();
  const auto lo = std::lower_bound(t.begin(), t.end(), start_ms);
  const auto hi = std::lower_bound(t.begin(), t.end(), end_ms);
  return static_cast<double>(hi - lo) / ((end_ms - start_ms) / 1000.0);
}

SpikeTrain neuron_train(const SpikeRecord& record, std::uint32_t population,
                        std::uint32_t neuron, double dt_ms) {
  std::vector<std::int64_t> steps;
  for (const auto& e : record.events) {
    if (e.population == population && e.neuron == neuron) steps.push_back(e.step);
  }
  return SpikeTrain::from_steps(steps, dt_ms);
}

double population_rate(const SpikeRecord& record, std::uint32_t population,
                       double start_ms, double end_ms, double dt_ms) {
  if (population >= record.populations.size()) {
    throw Error(ErrorCode::invalid_argument, "population index out of range");
  }
  if (!(start_ms < end_ms)) {
    throw Error(ErrorCode::invalid_argument, "rate window must have start < end");
  }
  const std::uint32_t size = record.populations[population].size;
  if (size == 0) return 0.0;
  // Mean of per-neuron rates over a shared window is the pooled count
  // divided by size and window length.
  std::size_t count = 0;
  for (const auto& e : record.events) {
    if (e.population != population) continue;
    const double t = static_cast<double>(e.step) * dt_ms;
    if (t >= start_ms && t < end_ms) ++count;
  }
  return static_cast<double>(count) / size / ((end_ms - start_ms) / 1000.0);
}

std::string raster_csv(const SpikeRecord& record, double dt_ms) {
  std::string out = "step,time_ms,population,neuron\n";
  char buf[64];
  for (const auto& e : record.events) {
    if (e.population >= record.populations.size()) {
      throw Error(ErrorCode::invalid_argument, "event population out of range");
    }
    std::snprintf(buf, sizeof buf, "%.3f",
                  static_cast<double>(e.step) * dt_ms);
    out += std::to_string(e.step);
    out += ',';
    out += buf;
    out += ',';
    out += record.populations[e.population].name;
    out += ',';
    out += std::to_string(e.neuron);
    out += '\n';
  }
  return out;
}

SpikeRecord parse_raster_csv(const std::string& text,
                             std::vector<PopulationInfo> populations) {
  SpikeRecord rec;
  const bool discover = populations.empty();
  rec.populations = std::move(populations);
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorCode::parse,
                "raster csv line " + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line != "step,time_ms,population,neuron") fail("unexpected header");
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) cols.push_back(col);
    if (cols.size() != 4) fail("expected 4 columns");
    SpikeEvent e;
    try {
      e.step = std::stoll(cols[0]);
      const long long neuron = std::stoll(cols[3]);
      if (neuron < 0) fail("negative neuron index");
      e.neuron = static_cast<std::uint32_t>(neuron);
    } catch (const std::logic_error&) {
      fail("bad integer");
    }
    auto idx = rec.find(cols[2]);
    if (!idx) {
      if (!discover) fail("unknown population " + cols[2]);
      rec.populations.push_back({cols[2], 0});
      idx = static_cast<std::uint32_t>(rec.populations.size() - 1);
    }
    if (discover) {
      auto& size = rec.populations[*idx].size;
      size = std::max(size, e.neuron + 1);
    }
    e.population = *idx;
    if (!rec.events.empty() && e.step < rec.events.back().step) {
      fail("events out of order");
    }
    rec.events.push_back(e);
  }
  if (line_no == 0) fail("missing header");
  return rec;
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace

std::string raster_svg(const SpikeRecord& record, double duration_ms,
                       double dt_ms) {
  constexpr double kLeft = 90.0, kRight = 20.0, kTop = 20.0, kBottom = 40.0;
  constexpr double kWidth = 900.0, kBandGap = 10.0, kRowHeight = 1.5;

  std::vector<double> band_top;
  double y = kTop;
  for (const auto& p : record.populations) {
    band_top.push_back(y);
    y += std::max<double>(p.size, 1) * kRowHeight + kBandGap;
  }
  const double plot_bottom = y;
  const double height = plot_bottom + kBottom;
  const double span = duration_ms > 0.0 ? duration_ms : 1.0;
  const double plot_w = kWidth - kLeft - kRight;
  auto x_of = [&](double t) { return kLeft + t / span * plot_w; };

  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(2);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << height << "\" font-family=\"sans-serif\" "
      << "font-size=\"11\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // axes
  out << "<line x1=\"" << kLeft << "\" y1=\"" << plot_bottom << "\" x2=\""
      << kWidth - kRight << "\" y2=\"" << plot_bottom
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
      << "\" y2=\"" << plot_bottom << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double t = span * i / 5.0;
    out << "<text x=\"" << x_of(t) << "\" y=\"" << plot_bottom + 15
        << "\" text-anchor=\"middle\">" << t << "</text>\n";
  }
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << height - 8
      << "\" text-anchor=\"middle\">time (ms)</text>\n";
  for (std::size_t i = 0; i < record.populations.size(); ++i) {
    const double mid =
        band_top[i] + std::max<double>(record.populations[i].size, 1) *
                          kRowHeight / 2;
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << mid
        << "\" text-anchor=\"end\">" << xml_escape(record.populations[i].name)
        << "</text>\n";
  }
  out << "<g fill=\"black\">\n";
  for (const auto& e : record.events) {
    if (e.population >= record.populations.size()) continue;
    const double t = static_cast<double>(e.step) * dt_ms;
    out << "<rect x=\"" << x_of(t) << "\" y=\""
        << band_top[e.population] + e.neuron * kRowHeight
        << "\" width=\"1\" height=\"" << kRowHeight << "\"/>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot open " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::io, "failed writing " + path.string());
}

void export_raster(const SpikeRecord& record, const std::filesystem::path& csv,
                   const std::filesystem::path& svg, double duration_ms,
                   double dt_ms) {
  write_text_file(csv, raster_csv(record, dt_ms));
  write_text_file(svg, raster_svg(record, duration_ms, dt_ms));
}

SpikeRecord read_raster_csv(const std::filesystem::path& csv,
                            std::vector<PopulationInfo> populations) {
  std::ifstream in(csv, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + csv.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_raster_csv(ss.str(), std::move(populations));
}

}  // namespace neurocore
