#include "supwatt/cli.hpp"
#include "supwatt/io.hpp"

#include <doctest.h>

#include "support.hpp"

#include <sstream>

using namespace supwatt;
using support::kind_of;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

} // namespace

TEST_CASE("supro json round trip") {
  for (const auto* mode : {"light", "medium", "heavy"}) {
    auto s = io::load_supro(support::data_dir() / "supro" / (std::string("washer_") + mode + ".json"));
    CHECK(s.mode_id == mode);
    CHECK(s.appliance_id == "washer");
    auto j = io::to_json(s);
    CHECK(io::to_json(io::supro_from_json(j)).dump() == j.dump());
  }
  auto bad = io::to_json(io::load_supro(support::data_dir() / "supro" / "washer_light.json"));
  bad["phases"][0]["cycles"][0]["watts"] = -5;
  CHECK(kind_of([&] { io::supro_from_json(bad); }) == ErrorKind::Validation);
  bad = io::Json::object();
  CHECK(kind_of([&] { io::supro_from_json(bad); }) != ErrorKind::Io);
}

TEST_CASE("appliance manifests") {
  for (const auto* name : {"washer", "dryer", "dishwasher"}) {
    auto a = io::load_appliance(support::data_dir() / "appliances" / (std::string(name) + ".json"));
    CHECK(a.name == name);
    CHECK(a.modes() == std::vector<std::string>{"heavy", "light", "medium"});
    CHECK(a.mode_ranking == std::vector<std::string>{"light", "medium", "heavy"});
    CHECK_NOTHROW(a.validate());
  }
  CHECK(kind_of([] { io::load_appliance("/nonexistent/x.json"); }) == ErrorKind::Io);
}

TEST_CASE("result json round trips") {
  std::vector<GroundTruthEvent> truth{{100, "light", 3000}, {50000, "heavy", 4000}};
  CHECK(io::truth_from_json(io::to_json(truth)) == truth);

  DetectionResult d;
  d.turn_on_times = {5, 900};
  d.periods = {{0, 9, 5, 12.5}, {880, 950, 900, 3.0}};
  auto back = io::detection_from_json(io::to_json(d));
  CHECK(back.turn_on_times == d.turn_on_times);
  CHECK(back.periods == d.periods);

  ClassifiedEvent e;
  e.t_on = 42;
  e.chosen_mode = "medium";
  e.min_distance = 1.25;
  e.distances = {{"heavy", 9.0}, {"medium", 1.25}};
  e.truncated = true;
  auto ce = io::classified_from_json(io::to_json(e));
  CHECK(ce.t_on == 42);
  CHECK(ce.chosen_mode == "medium");
  CHECK(ce.min_distance == 1.25);
  CHECK(ce.distances == e.distances);
  CHECK(ce.truncated);

  CHECK(kind_of([] { io::parse_json("{", "x"); }) == ErrorKind::Parse);
}

TEST_CASE("intensity strings") {
  auto i = io::parse_intensity("heavy=0.6,light=0.2,medium=0.2");
  CHECK(i.mode_weights.size() == 3);
  CHECK(i.mode_weights.at("heavy") == 0.6);
  CHECK(kind_of([] { io::parse_intensity("heavy"); }) == ErrorKind::Validation);
  CHECK(kind_of([] { io::parse_intensity("heavy=x"); }) == ErrorKind::Validation);
  CHECK(kind_of([] { io::parse_intensity("heavy=0.5,light=0.2"); }) == ErrorKind::Validation);
  CHECK(kind_of([] { io::parse_intensity("=1"); }) == ErrorKind::Validation);
}

TEST_CASE("range strings") {
  CHECK(cli::parse_range("50:200:50") == std::vector<std::size_t>{50, 100, 150, 200});
  CHECK(cli::parse_range("1:10:4") == std::vector<std::size_t>{1, 5, 9});
  CHECK(cli::parse_range("600") == std::vector<std::size_t>{600});
  for (const auto* bad : {"", "a:b:c", "10:5:1", "1:5:0", "0:5:1", "1:5", "-1:5:1", "1:5:1:2"}) {
    CHECK(kind_of([&] { cli::parse_range(bad); }) == ErrorKind::Validation);
  }
}

TEST_CASE("cli exit codes") {
  CHECK(cli_run({}).code == cli::kExitUsage);
  CHECK(cli_run({"bogus"}).code == cli::kExitUsage);
  CHECK(cli_run({"detect", "--day"}).code == cli::kExitUsage);
  CHECK(cli_run({"sweep", "--appliance", "washer", "--days", "0"}).code == cli::kExitUsage);
  CHECK(cli_run({"--help"}).code == cli::kExitOk);

  auto missing = cli_run({"detect", "--day", "/nonexistent/d.csv", "--ref", "/nonexistent/r.csv"});
  CHECK(missing.code == cli::kExitIo);
  CHECK_FALSE(missing.err.empty());

  CHECK(cli_run({"sweep", "--appliance", "washer", "--n", "9:1:1"}).code == cli::kExitValidation);
  CHECK(cli_run({"simulate", "--appliance", "washer"}).code == cli::kExitValidation);
  CHECK(cli_run({"sweep", "--appliance", "washer", "--jitter", "1.5", "--days", "1"}).code ==
        cli::kExitValidation);
}

TEST_CASE("simulate, detect, classify and recommend through the cli") {
  auto dir = support::scratch_dir("cli");
  const auto day = (dir / "day.csv").string();
  const auto ref = (dir / "ref.csv").string();
  auto sim = cli_run({"simulate", "--appliance", "washer", "--intensity", "high", "--seed", "4",
                      "--jitter", "0", "--out", day, "--ref-n", "600", "--ref-out", ref});
  REQUIRE(sim.code == 0);
  auto truth = io::truth_from_json(io::load_json(dir / "day.truth.json"));
  REQUIRE(truth.size() == 1);
  CHECK(load_series(day).size() == 86400);
  CHECK(load_series(ref).size() == 600);

  const auto det_path = (dir / "det.json").string();
  REQUIRE(cli_run({"detect", "--day", day, "--ref", ref, "--out", det_path}).code == 0);
  auto det = io::detection_from_json(io::load_json(det_path));
  REQUIRE(det.turn_on_times.size() == 1);
  CHECK(det.turn_on_times[0] == truth[0].t_on);

  auto cls = cli_run({"classify", "--day", day, "--detections", det_path, "--appliance", "washer"});
  REQUIRE(cls.code == 0);
  auto event = io::classified_from_json(io::parse_json(cls.out, "stdout"));
  CHECK(event.chosen_mode == truth[0].mode_id);

  write_text_file(dir / "events.jsonl", cls.out);
  auto rec = cli_run({"recommend", "--events", (dir / "events.jsonl").string(), "--appliance", "washer"});
  REQUIRE(rec.code == 0);
  auto j = io::parse_json(rec.out, "stdout");
  CHECK(j.at("mode") == event.chosen_mode);
  CHECK(j.contains("advice"));

  // Same seed, same bytes.
  const auto day2 = (dir / "day2.csv").string();
  REQUIRE(cli_run({"simulate", "--appliance", "washer", "--intensity", "high", "--seed", "4",
                   "--jitter", "0", "--out", day2})
              .code == 0);
  CHECK(read_text_file(day) == read_text_file(day2));
}

TEST_CASE("simulate writes one file pair per day into a directory") {
  auto dir = support::scratch_dir("cli_days");
  REQUIRE(cli_run({"simulate", "--appliance", "dryer", "--days", "3", "--out", (dir / "out").string()}).code == 0);
  for (const auto* name : {"day_000", "day_001", "day_002"}) {
    CHECK(fs::exists(dir / "out" / (std::string(name) + ".csv")));
    CHECK(fs::exists(dir / "out" / (std::string(name) + ".truth.json")));
  }
}

TEST_CASE("nothing is written when validation fails") {
  auto dir = support::scratch_dir("cli_fail");
  auto out = dir / "never";
  auto r = cli_run({"simulate", "--appliance", "washer", "--intensity", "extreme", "--out", out.string()});
  CHECK(r.code == cli::kExitValidation);
  CHECK_FALSE(fs::exists(out));

  auto ref_only = dir / "ref.csv";
  r = cli_run({"simulate", "--appliance", "washer", "--t-on", "86000", "--out",
               (dir / "d.csv").string(), "--ref-n", "10", "--ref-out", ref_only.string()});
  CHECK(r.code == cli::kExitValidation);
  CHECK_FALSE(fs::exists(dir / "d.csv"));
  CHECK_FALSE(fs::exists(ref_only));
}

TEST_CASE("config file supplies defaults and flags win") {
  auto dir = support::scratch_dir("cli_config");
  write_text_file(dir / "cfg.json", R"({"appliance": "washer", "n": "300:600:300", "days": 2, "seed": 3})");
  auto from_cfg = cli_run({"sweep", "--config", (dir / "cfg.json").string()});
  REQUIRE(from_cfg.code == 0);
  CHECK(from_cfg.out.find("days=2") != std::string::npos);
  CHECK(from_cfg.out.find("\n300,") != std::string::npos);
  CHECK(from_cfg.out.find("\n600,") != std::string::npos);

  auto flagged = cli_run({"sweep", "--config", (dir / "cfg.json").string(), "--n", "450"});
  REQUIRE(flagged.code == 0);
  CHECK(flagged.out.find("\n450,") != std::string::npos);
  CHECK(flagged.out.find("\n300,") == std::string::npos);

  write_text_file(dir / "list.json", "[1, 2]");
  CHECK(cli_run({"sweep", "--config", (dir / "list.json").string()}).code == cli::kExitValidation);
  CHECK(cli_run({"sweep", "--config", (dir / "absent.json").string()}).code == cli::kExitIo);
}

TEST_CASE("meter channel files") {
  const std::string text =
      "unix_ts,ihd,sub1,sub2\n"
      "1000,5,0,12.5\n"
      "1001,5,-0.4,13\n"
      "1004,5,900,14\n";
  auto s = io::parse_channel_csv(text, "sub1");
  CHECK(s.epoch() == 1000.0);
  CHECK(s.sample_rate() == 1.0);
  CHECK(std::vector<double>(s.samples().begin(), s.samples().end()) ==
        std::vector<double>{0, 0, 0, 0, 900});
  auto other = io::parse_channel_csv(text, "sub2");
  CHECK(other.size() == 5);
  CHECK(other[3] == 13);

  CHECK(kind_of([&] { io::parse_channel_csv(text, "sub9"); }) == ErrorKind::Validation);
  CHECK(kind_of([] { io::parse_channel_csv("ts,sub1\n1,2\n", "sub1"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { io::parse_channel_csv("unix_ts,sub1\n", "sub1"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { io::parse_channel_csv("unix_ts,sub1\n5,1\n5,2\n", "sub1"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { io::parse_channel_csv("unix_ts,sub1\n5,1,3\n", "sub1"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { io::parse_channel_csv("unix_ts,sub1\n5,x\n", "sub1"); }) == ErrorKind::Parse);

  // The CLI reads the same day from either file shape.
  auto dir = support::scratch_dir("cli_meter");
  auto washer = with_jitter(io::load_appliance(support::data_dir() / "appliances" / "washer.json"), 0.0);
  auto day = generate_day(washer.supros, uniform_intensity(washer.modes()), washer.cdf, 1, 9);
  std::string meter = "unix_ts,sub1,sub2\n";
  for (std::size_t t = 0; t < day.series.size(); ++t) {
    meter += std::to_string(1'500'000'000 + t) + ",1," + format_number(day.series[t]) + "\n";
  }
  write_text_file(dir / "meter.csv", meter);
  save_series(day.series, dir / "day.csv");
  auto ref = make_reference_pattern(day.sups[0], 500);
  save_series(PowerSeries(ref.samples), dir / "ref.csv");
  auto plain = cli_run({"detect", "--day", (dir / "day.csv").string(), "--ref", (dir / "ref.csv").string()});
  auto from_meter = cli_run({"detect", "--day", (dir / "meter.csv").string(), "--column", "sub2", "--ref",
                             (dir / "ref.csv").string()});
  REQUIRE(plain.code == 0);
  CHECK(from_meter.code == 0);
  CHECK(from_meter.out == plain.out);
}
