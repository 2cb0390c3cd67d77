#ifndef MIMOSIM_HARNESS_HPP
#define MIMOSIM_HARNESS_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mimosim/mac.hpp"

namespace mimosim {

enum class Protocol { single_link, mima, mst, adaptive };

inline constexpr std::array<Protocol, 4> all_protocols = {
    Protocol::single_link, Protocol::mima, Protocol::mst, Protocol::adaptive};

const char* protocol_name(Protocol p);
std::optional<Protocol> parse_protocol(const std::string& name);

enum class TopologyMode { random, fixed_a, fixed_b };

struct RunConfig {
  Mode mode = Mode::ideal;
  std::vector<Protocol> protocols{all_protocols.begin(), all_protocols.end()};
  int n_trials = 1000;
  std::uint64_t seed = 1;
  int n_training = 4;
  std::optional<double> backoff_db;  // default: 0 dB ideal, 1 dB practical
  double frame_duration_s = 5e-3;
  TopologyMode topology = TopologyMode::random;
  std::string out_dir;
  int n_threads = 1;
  bool trace = false;
  std::string channel_dump_path;
  McsTable mcs;

  double resolved_backoff_db() const {
    if (backoff_db) return *backoff_db;
    return mode == Mode::practical ? 1.0 : 0.0;
  }
  void validate() const;
};

struct LinkOutcome {
  double throughput_mbps = 0.0;
  bool rt_valid = false;    // false when the single-link baseline is zero
  double rt_ratio = 0.0;    // vs. single link MAC, same trial and link
};

struct ProtocolOutcome {
  std::array<LinkOutcome, 2> link;
  bool concurrent = false;  // the trial used the concurrent scheme
  std::array<FramePlan, 2> plans;
  std::array<std::array<int, 2>, 2> credited{{{0, 0}, {0, 0}}};  // [frame][link]
};

struct TrialRecord {
  int trial_id = 0;
  std::vector<ProtocolOutcome> outcomes;  // aligned with RunConfig::protocols
};

/// One full trial: topology, per-frame fading (+ estimates and contention in
/// practical mode), rate tables, every configured planner, and MDU
/// adjudication against the true channel. Deterministic in (seed, trial_id).
TrialRecord run_trial(const RunConfig& cfg, int trial_id,
                      std::ostream* channel_dump = nullptr);

/// Runs all trials, optionally across threads. Results are identical for any
/// thread count. A channel dump forces single-threaded execution.
std::vector<TrialRecord> run_trials(const RunConfig& cfg);

struct Summary {
  std::vector<Protocol> protocols;
  int n_trials = 0;
  double bin_width = 0.1;
  std::vector<double> bin_lo;                // shared across protocols
  std::vector<std::vector<double>> pdf;      // [protocol][bin]
  std::vector<std::vector<double>> cdf;      // [protocol][bin]
  std::vector<double> ergodic_mbps;          // mean over (trial, link)
  std::vector<double> outage_100;            // P(rt < 1.0)
  std::vector<double> outage_95;             // P(rt < 0.95)
  std::vector<int> rt_excluded;              // zero-baseline samples dropped
  std::vector<double> concurrent_fraction;
};

Summary aggregate(const RunConfig& cfg, const std::vector<TrialRecord>& records);

struct SweepRow {
  int n_training = 0;
  std::vector<double> ergodic_mbps;  // aligned with RunConfig::protocols
};

/// Full Monte-Carlo per training-symbol count; channel draws are shared
/// across the sweep so the comparison is paired.
std::vector<SweepRow> sweep_training(const RunConfig& cfg,
                                     const std::vector<int>& nt_values);

// CSV surfaces (schemas documented in the README)
void write_trials_csv(std::ostream& os, const std::vector<Protocol>& protocols,
                      const std::vector<TrialRecord>& records);
std::pair<std::vector<Protocol>, std::vector<TrialRecord>> read_trials_csv(
    std::istream& is);
void write_histogram_csv(std::ostream& os, const Summary& summary);
void write_summary_csv(std::ostream& os, const Summary& summary);
void write_sweep_csv(std::ostream& os, const std::vector<Protocol>& protocols,
                     const std::vector<SweepRow>& rows);

/// Writes trials.csv, histogram.csv and summary.csv (plus trace.log when
/// tracing) under cfg.out_dir. Throws with the offending path on failure.
void emit_csv(const RunConfig& cfg, const std::vector<TrialRecord>& records,
              const Summary& summary);

}  // namespace mimosim

#endif
