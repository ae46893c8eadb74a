#include <filesystem>
#include <random>

#include "doctest.h"
#include "neurocore/analysis.hpp"
#include "neurocore/error.hpp"

using namespace neurocore;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const char* name) {
  const fs::path dir = fs::temp_directory_path() / "neurocore_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

SpikeRecord sample_record() {
  SpikeRecord rec;
  rec.populations = {{"STR_D1", 3}, {"GPi/SNr", 2}};
  rec.events = {{0, 0, 1}, {3, 1, 0}, {3, 0, 2}, {8000, 1, 1}};
  return rec;
}

}  // namespace

TEST_CASE("spike trains must be strictly increasing") {
  CHECK_NOTHROW(SpikeTrain({1.0, 2.0}));
  CHECK_THROWS_AS(SpikeTrain({1.0, 1.0}), Error);
  CHECK(SpikeTrain::from_steps({8, 16}).times() == std::vector<double>{1.0, 2.0});
}

TEST_CASE("errt examples") {
  const SpikeTrain x({5.0, 30.0, 55.0});
  CHECK(errt(x, x) == 0.0);
  CHECK(errt(SpikeTrain({0.0, 10.0}), SpikeTrain({3.0, 14.0})) ==
        doctest::Approx(10.0));
  try {
    errt(SpikeTrain({1.0}), x);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::insufficient_spikes);
  }
  CHECK_THROWS_AS(errt(x, SpikeTrain{}), Error);
}

TEST_CASE("errt is scale aware") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> gap(0.5, 50.0), scale(0.1, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const double g1 = gap(rng), g2 = gap(rng), k = scale(rng);
    const double e1 = errt(SpikeTrain({0.0, g1}), SpikeTrain({0.0, g2}));
    const double e2 = errt(SpikeTrain({0.0, k * g1}), SpikeTrain({0.0, k * g2}));
    REQUIRE(e1 == doctest::Approx(e2).epsilon(1e-9));
  }
}

TEST_CASE("mean-gap errt variant") {
  const SpikeTrain ref({0.0, 10.0, 20.0, 30.0});
  const SpikeTrain test({0.0, 11.0, 22.0, 33.0});
  CHECK(errt_mean_gaps(ref, test) == doctest::Approx(10.0));
  CHECK(errt_mean_gaps(ref, ref) == 0.0);
}

TEST_CASE("firing rates") {
  CHECK(firing_rate(SpikeTrain{}, 0.0, 1000.0) == 0.0);
  std::vector<double> t;
  for (int i = 0; i < 15; ++i) t.push_back(i * 1000.0 / 15.0);
  const SpikeTrain train(t);
  CHECK(firing_rate(train, 0.0, 1000.0) == doctest::Approx(15.0));
  // Additive over disjoint windows, weighted by length.
  const double whole = firing_rate(train, 0.0, 1000.0);
  const double left = firing_rate(train, 0.0, 300.0);
  const double right = firing_rate(train, 300.0, 1000.0);
  CHECK(whole == doctest::Approx((left * 300.0 + right * 700.0) / 1000.0));
  CHECK_THROWS_AS(firing_rate(train, 5.0, 5.0), Error);
}

TEST_CASE("population rate is the mean of neuron rates") {
  const SpikeRecord rec = sample_record();
  const double end = 1000.0;
  double mean = 0.0;
  for (std::uint32_t j = 0; j < 3; ++j) {
    mean += firing_rate(neuron_train(rec, 0, j), 0.0, end) / 3.0;
  }
  CHECK(population_rate(rec, 0, 0.0, end) == doctest::Approx(mean));
  CHECK(population_rate(rec, 0, 0.0, end) == doctest::Approx(2.0 / 3.0));
  // The event at exactly 1000 ms is outside [0, 1000).
  CHECK(population_rate(rec, 1, 0.0, end) == doctest::Approx(0.5));
}

TEST_CASE("raster csv round trip") {
  const SpikeRecord rec = sample_record();
  const std::string csv = raster_csv(rec);
  CHECK(csv.rfind("step,time_ms,population,neuron\n", 0) == 0);
  CHECK(csv.find("3,0.375,GPi/SNr,0\n") != std::string::npos);
  CHECK(csv.find('\r') == std::string::npos);
  CHECK(parse_raster_csv(csv, rec.populations) == rec);
  const SpikeRecord discovered = parse_raster_csv(csv);
  CHECK(discovered.events == rec.events);

  CHECK_THROWS_AS(parse_raster_csv("bad header\n"), Error);
  CHECK_THROWS_AS(
      parse_raster_csv("step,time_ms,population,neuron\n1,0.1,X\n"), Error);
  CHECK_THROWS_AS(parse_raster_csv("step,time_ms,population,neuron\n1,0.1,Y,0\n",
                                   rec.populations),
                  Error);
}

TEST_CASE("export writes csv and svg") {
  const fs::path dir = scratch_dir("export");
  const SpikeRecord rec = sample_record();
  export_raster(rec, dir / "r.csv", dir / "r.svg", 1000.0);
  CHECK(read_raster_csv(dir / "r.csv", rec.populations) == rec);
  const std::string svg = raster_svg(rec, 1000.0);
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("GPi/SNr") != std::string::npos);
  CHECK(svg.find("<script") == std::string::npos);

  SpikeRecord empty;
  empty.populations = {{"A", 4}};
  export_raster(empty, dir / "e.csv", dir / "e.svg", 100.0);
  CHECK(read_raster_csv(dir / "e.csv", empty.populations) == empty);
  CHECK(raster_csv(empty) == "step,time_ms,population,neuron\n");
  CHECK(raster_svg(empty, 100.0).find("<line") != std::string::npos);

  try {
    export_raster(rec, dir / "missing" / "r.csv", dir / "r.svg", 1.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::io);
  }
}
