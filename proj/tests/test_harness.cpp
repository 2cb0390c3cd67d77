#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mimosim/harness.hpp"

using namespace mimosim;

namespace {

RunConfig small_config(Mode mode, int trials = 12) {
  RunConfig cfg;
  cfg.mode = mode;
  cfg.n_trials = trials;
  cfg.seed = 99;
  return cfg;
}

std::string trials_csv(const RunConfig& cfg, const std::vector<TrialRecord>& r) {
  std::ostringstream os;
  write_trials_csv(os, cfg.protocols, r);
  return os.str();
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("protocol names round trip") {
  for (Protocol p : all_protocols) CHECK(parse_protocol(protocol_name(p)) == p);
  CHECK(!parse_protocol("bogus"));
}

TEST_CASE("config validation") {
  RunConfig cfg;
  cfg.n_trials = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = RunConfig{};
  cfg.n_training = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = RunConfig{};
  cfg.backoff_db = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = RunConfig{};
  CHECK_NOTHROW(cfg.validate());

  CHECK(RunConfig{}.resolved_backoff_db() == 0.0);
  RunConfig prac;
  prac.mode = Mode::practical;
  CHECK(prac.resolved_backoff_db() == 1.0);
  prac.backoff_db = 2.5;
  CHECK(prac.resolved_backoff_db() == 2.5);
}

TEST_CASE("trials are deterministic") {
  for (const Mode mode : {Mode::ideal, Mode::practical}) {
    const RunConfig cfg = small_config(mode);
    const TrialRecord a = run_trial(cfg, 5);
    const TrialRecord b = run_trial(cfg, 5);
    REQUIRE(a.outcomes.size() == b.outcomes.size());
    for (std::size_t p = 0; p < a.outcomes.size(); ++p) {
      for (int link = 0; link < 2; ++link) {
        CHECK(a.outcomes[p].link[link].throughput_mbps ==
              b.outcomes[p].link[link].throughput_mbps);
        CHECK(a.outcomes[p].link[link].rt_ratio ==
              b.outcomes[p].link[link].rt_ratio);
      }
      CHECK(a.outcomes[p].concurrent == b.outcomes[p].concurrent);
    }
  }
}

TEST_CASE("ideal adaptive throughput is bracketed by the baseline") {
  RunConfig cfg = small_config(Mode::ideal, 30);
  const auto records = run_trials(cfg);
  const std::size_t single = 0, adaptive = 3;
  REQUIRE(cfg.protocols[single] == Protocol::single_link);
  REQUIRE(cfg.protocols[adaptive] == Protocol::adaptive);
  for (const TrialRecord& r : records) {
    for (int link = 0; link < 2; ++link) {
      const LinkOutcome& base = r.outcomes[single].link[link];
      const LinkOutcome& ad = r.outcomes[adaptive].link[link];
      if (base.rt_valid) CHECK(base.rt_ratio == 1.0);
      if (ad.rt_valid) {
        CHECK(ad.rt_ratio >= 1.0);
        CHECK(ad.rt_ratio <= 2.0);
      }
    }
  }
}

TEST_CASE("aggregation counts outages and bins") {
  RunConfig cfg;
  cfg.protocols = {Protocol::adaptive};
  cfg.n_trials = 1;

  TrialRecord r;
  r.trial_id = 0;
  r.outcomes.resize(1);
  r.outcomes[0].link[0] = {12.0, true, 1.2};
  r.outcomes[0].link[1] = {12.0, true, 1.2};
  Summary s = aggregate(cfg, {r});
  CHECK(s.outage_100[0] == 0.0);
  CHECK(s.outage_95[0] == 0.0);
  const int bin12 = 12;
  REQUIRE(static_cast<int>(s.bin_lo.size()) == 13);
  CHECK(s.bin_lo[bin12] == doctest::Approx(1.2));
  CHECK(s.pdf[0][bin12] == 1.0);
  CHECK(s.cdf[0][bin12] == 1.0);
  CHECK(s.ergodic_mbps[0] == doctest::Approx(12.0));

  r.outcomes[0].link[0] = {9.0, true, 0.9};
  r.outcomes[0].link[1] = {11.0, true, 1.1};
  s = aggregate(cfg, {r});
  CHECK(s.outage_100[0] == 0.5);
  CHECK(s.outage_95[0] == 0.5);
  CHECK(s.ergodic_mbps[0] == doctest::Approx(10.0));

  // zero-baseline samples are excluded from ratio statistics but kept in
  // the ergodic mean
  r.outcomes[0].link[1] = {11.0, false, 0.0};
  s = aggregate(cfg, {r});
  CHECK(s.rt_excluded[0] == 1);
  CHECK(s.outage_100[0] == 1.0);
  CHECK(s.ergodic_mbps[0] == doctest::Approx(10.0));

  CHECK_THROWS_AS(aggregate(cfg, {}), std::invalid_argument);
}

TEST_CASE("outage is monotone in the threshold") {
  RunConfig cfg = small_config(Mode::practical, 40);
  const Summary s = aggregate(cfg, run_trials(cfg));
  for (std::size_t p = 0; p < cfg.protocols.size(); ++p)
    CHECK(s.outage_95[p] <= s.outage_100[p]);
}

TEST_CASE("trials csv round trips") {
  RunConfig cfg = small_config(Mode::practical, 8);
  const auto records = run_trials(cfg);
  const std::string first = trials_csv(cfg, records);

  std::istringstream is(first);
  const auto [protocols, parsed] = read_trials_csv(is);
  REQUIRE(protocols == cfg.protocols);
  REQUIRE(parsed.size() == records.size());

  std::ostringstream os;
  write_trials_csv(os, protocols, parsed);
  CHECK(os.str() == first);

  std::istringstream bad("not,a,header\n");
  CHECK_THROWS_AS(read_trials_csv(bad), std::runtime_error);
}

TEST_CASE("emit rejects bad paths") {
  RunConfig cfg = small_config(Mode::ideal, 2);
  const auto records = run_trials(cfg);
  const Summary s = aggregate(cfg, records);
  CHECK_THROWS(emit_csv(cfg, records, s));  // out_dir unset
  cfg.out_dir = "/proc/definitely/not/writable";
  CHECK_THROWS(emit_csv(cfg, records, s));
}

TEST_CASE("runs reproduce byte-identical csv output") {
  const auto dir = std::filesystem::temp_directory_path() / "mimosim_repro_test";
  std::filesystem::remove_all(dir);

  const auto run_once = [&](int threads, const std::string& tag) {
    RunConfig cfg = small_config(Mode::practical, 24);
    cfg.n_threads = threads;
    cfg.out_dir = (dir / tag).string();
    cfg.trace = true;
    const auto records = run_trials(cfg);
    emit_csv(cfg, records, aggregate(cfg, records));
    std::ostringstream all;
    for (const char* name : {"trials.csv", "histogram.csv", "summary.csv", "trace.log"}) {
      std::ifstream in(cfg.out_dir + "/" + name);
      REQUIRE(in);
      all << in.rdbuf();
    }
    return all.str();
  };

  const std::string a = run_once(1, "a");
  const std::string b = run_once(1, "b");
  const std::string c = run_once(2, "c");
  CHECK(a == b);
  CHECK(a == c);
  std::filesystem::remove_all(dir);
}

TEST_CASE("channel dump is written once per trial and frame") {
  const auto path =
      (std::filesystem::temp_directory_path() / "mimosim_dump_test.csv").string();
  RunConfig cfg = small_config(Mode::ideal, 2);
  cfg.channel_dump_path = path;
  cfg.n_threads = 4;  // forced back to sequential by the dump
  const auto records = run_trials(cfg);
  CHECK(records.size() == 2);
  std::ifstream in(path);
  REQUIRE(in);
  int lines = 0;
  std::string line;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 2 * 2 * 4 * n_subcarriers);
  std::filesystem::remove(path);
}

TEST_CASE("training sweep requires practical mode and keeps channels paired") {
  RunConfig cfg = small_config(Mode::ideal, 4);
  CHECK_THROWS_AS(sweep_training(cfg, {1, 2}), std::invalid_argument);

  cfg.mode = Mode::practical;
  cfg.n_trials = 6;
  const auto rows = sweep_training(cfg, {2, 4});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].n_training == 2);
  CHECK(rows[1].n_training == 4);
  for (const SweepRow& row : rows)
    CHECK(row.ergodic_mbps.size() == cfg.protocols.size());
}

}  // TEST_SUITE
