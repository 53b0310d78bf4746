#include "supwatt/core.hpp"

#include <doctest.h>

#include "oracles.hpp"
#include "support.hpp"

#include <filesystem>
#include <numeric>
#include <random>

using namespace supwatt;

using support::kind_of;

TEST_CASE("power series rejects broken invariants") {
  CHECK(kind_of([] { PowerSeries({}); }) == ErrorKind::Validation);
  CHECK(kind_of([] { PowerSeries({1.0}, 0.0); }) == ErrorKind::Validation);
  CHECK(kind_of([] { PowerSeries({1.0}, -1.0); }) == ErrorKind::Validation);
  CHECK(kind_of([] { PowerSeries({1.0, -0.5}); }) == ErrorKind::Validation);
  CHECK(kind_of([] { PowerSeries({std::nan("")}); }) == ErrorKind::Validation);

  PowerSeries s({0.0, 2.0}, 2.0, 10.0);
  CHECK(s.size() == 2);
  CHECK(s.sample_rate() == 2.0);
  CHECK(s.epoch() == 10.0);
  CHECK(s[1] == 2.0);
}

TEST_CASE("slice") {
  PowerSeries s({1, 2, 3, 4});
  auto mid = slice(s, 1, 2);
  CHECK(std::vector<double>(mid.samples().begin(), mid.samples().end()) ==
        std::vector<double>{2, 3});
  CHECK(mid.epoch() == 1.0);
  CHECK(slice(s, 0, s.size()) == s);
  CHECK(kind_of([&] { slice(s, s.size(), 1); }) == ErrorKind::OutOfRange);
  CHECK(kind_of([&] { slice(s, 2, 3); }) == ErrorKind::OutOfRange);
  CHECK(kind_of([&] { slice(s, 0, 0); }) == ErrorKind::OutOfRange);

  PowerSeries half({5, 6, 7, 8}, 2.0, 100.0);
  CHECK(slice(half, 3, 1).epoch() == doctest::Approx(101.5));
}

TEST_CASE("slice composition and max bound on random series") {
  std::mt19937_64 g(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<std::size_t> len_dist(1, 80);
    const std::size_t len = len_dist(g);
    PowerSeries s(oracle::random_watts(g, len, 3000.0, 0.3));

    std::uniform_int_distribution<std::size_t> a_dist(0, len - 1);
    const std::size_t a = a_dist(g);
    std::uniform_int_distribution<std::size_t> b_dist(1, len - a);
    const std::size_t b = b_dist(g);
    auto outer = slice(s, a, b);
    std::uniform_int_distribution<std::size_t> c_dist(0, b - 1);
    const std::size_t c = c_dist(g);
    std::uniform_int_distribution<std::size_t> d_dist(1, b - c);
    const std::size_t d = d_dist(g);

    CHECK(slice(outer, c, d) == slice(s, a + c, d));
    CHECK(max_value(outer) <= max_value(s));

    auto v = s.samples();
    double folded = std::accumulate(v.begin(), v.end(), 0.0,
                                    [](double acc, double x) { return x > acc ? x : acc; });
    CHECK(max_value(s) == folded);
  }
}

TEST_CASE("max value") {
  CHECK(max_value(PowerSeries({0, 500, 120})) == 500);
  CHECK(max_value(PowerSeries({0, 0, 0})) == 0);
  CHECK(kind_of([] { max_value(std::span<const Watts>{}); }) == ErrorKind::Validation);
}

TEST_CASE("trace csv parsing") {
  auto s = parse_series("t,watts\n0,0\n1,500\n");
  CHECK(s.size() == 2);
  CHECK(s[1] == 500);
  CHECK(s.sample_rate() == 1.0);
  CHECK(s.epoch() == 0.0);

  auto with_meta = parse_series("# rate=0.5 epoch=3600\nt,watts\r\n0,1.25\r\n1,2\r\n");
  CHECK(with_meta.sample_rate() == 0.5);
  CHECK(with_meta.epoch() == 3600);
  CHECK(with_meta[0] == 1.25);

  CHECK(kind_of([] { parse_series("t,watts\n0,1\n1,-3\n"); }) == ErrorKind::Validation);
  CHECK(kind_of([] { parse_series("t,watts\n"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse_series(""); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse_series("time,power\n0,1\n"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse_series("t,watts\n0,abc\n"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse_series("t,watts\n0,1,2\n"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse_series("t,watts\n0,1\n2,1\n"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse_series("t,watts\n0,1\n# rate=2\n"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse_series("# rate=0\nt,watts\n0,1\n"); }) == ErrorKind::Validation);
}

TEST_CASE("save and load round trip") {
  auto dir = support::scratch_dir("core");
  std::mt19937_64 g(5);
  for (int trial = 0; trial < 20; ++trial) {
    auto samples = oracle::random_watts(g, 1 + trial * 37, 2500.0, 0.4);
    PowerSeries s(samples, trial % 2 ? 1.0 : 0.25, trial * 60.0);
    auto path = dir / ("trace_" + std::to_string(trial) + ".csv");
    save_series(s, path);
    auto back = load_series(path);
    CHECK(back == s);

    // Canonical files survive a second pass byte for byte.
    auto first = read_text_file(path);
    save_series(back, path);
    CHECK(read_text_file(path) == first);
  }

  CHECK(kind_of([&] { load_series(dir / "missing.csv"); }) == ErrorKind::Io);
  write_text_file(dir / "empty.csv", "");
  CHECK(kind_of([&] { load_series(dir / "empty.csv"); }) == ErrorKind::Parse);
}

TEST_CASE("number formatting is shortest round trip") {
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(1.5) == "1.5");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(86400) == "86400");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}
