#include "mimosim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mimosim/channel.hpp"
#include "mimosim/rng.hpp"

namespace mimosim {

namespace {

constexpr std::uint64_t topology_tag = 0x10;
constexpr std::uint64_t fading_tag = 0x20;
constexpr std::uint64_t estimation_tag = 0x30;
constexpr std::uint64_t backoff_tag = 0x40;

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

}  // namespace

const char* protocol_name(Protocol p) {
  switch (p) {
    case Protocol::single_link: return "single";
    case Protocol::mima: return "mima";
    case Protocol::mst: return "mst";
    case Protocol::adaptive: return "adaptive";
  }
  return "?";
}

std::optional<Protocol> parse_protocol(const std::string& name) {
  for (Protocol p : all_protocols)
    if (name == protocol_name(p)) return p;
  return std::nullopt;
}

void RunConfig::validate() const {
  if (n_trials < 1) throw std::invalid_argument("config: n_trials must be >= 1");
  if (n_training < 1) throw std::invalid_argument("config: n_training must be >= 1");
  if (!(frame_duration_s > 0.0))
    throw std::invalid_argument("config: frame duration must be positive");
  if (n_threads < 1) throw std::invalid_argument("config: n_threads must be >= 1");
  if (backoff_db && !(*backoff_db >= 0.0 && std::isfinite(*backoff_db)))
    throw std::invalid_argument("config: backoff must be finite and >= 0");
  if (protocols.empty()) throw std::invalid_argument("config: no protocols");
}

namespace {

struct FrameContext {
  RateTable plan_merged;   // planning view, per-cell scheme-matched durations
  RateTable plan_conc;     // planning view, concurrent duration everywhere
  RateTable truth_merged;  // true channel, zero backoff, scheme-matched
  RateTable truth_conc;    // true channel, zero backoff, concurrent duration
};

std::array<int, 2> credit_frame(const FramePlan& plan, const RateTable& truth,
                                const McsTable& mcs) {
  const RateCell& cell = truth.cell(plan.config.m1, plan.config.m2);
  std::array<int, 2> credited{0, 0};
  for (int link = 0; link < 2; ++link) {
    const int streams = (link == 0) ? plan.config.m1 : plan.config.m2;
    const auto& chosen = plan.config.mcs[link];
    for (int s = 0; s < streams; ++s) {
      const int idx = s < static_cast<int>(chosen.size()) ? chosen[s] : -1;
      if (idx < 0) continue;
      // QoS rule: the stream delivers everything or nothing depending on
      // whether the true effective PPSNR supports the chosen scheme.
      if (cell.link[link].stream_eff_db[s] >= mcs[idx].threshold_db)
        credited[link] += mdus_per_stream(mcs[idx], cell.payload_s);
    }
  }
  return credited;
}

bool any_concurrent(const FramePlan& a, const FramePlan& b) {
  const auto conc = [](const FramePlan& p) {
    return p.config.m1 > 0 && p.config.m2 > 0;
  };
  return conc(a) || conc(b);
}

}  // namespace

TrialRecord run_trial(const RunConfig& cfg, int trial_id,
                      std::ostream* channel_dump) {
  const double backoff_db = cfg.resolved_backoff_db();
  const BackoffConfig plan_backoff{backoff_db};
  const BackoffConfig truth_backoff{0.0};

  Topology topo;
  switch (cfg.topology) {
    case TopologyMode::random:
      topo = random_topology(substream(cfg.seed, trial_id, topology_tag));
      break;
    case TopologyMode::fixed_a: topo = representative_topology('a'); break;
    case TopologyMode::fixed_b: topo = representative_topology('b'); break;
  }

  TimingModel timing;
  timing.n_training = cfg.n_training;
  timing.frame_s = cfg.frame_duration_s;

  EstimationConfig est_cfg;
  est_cfg.n_training = cfg.n_training;

  auto backoff_rng = make_rng(substream(cfg.seed, trial_id, backoff_tag));

  std::vector<FrameContext> frames;
  frames.reserve(2);
  for (int f = 0; f < 2; ++f) {
    const FadingRealization truth = draw_fading(
        topo, f + 1, substream(cfg.seed, trial_id, fading_tag));
    if (channel_dump) write_channel_dump(*channel_dump, trial_id, truth);

    const int slots = (cfg.mode == Mode::practical)
                          ? draw_backoff_slots(timing, backoff_rng)
                          : 0;
    const double dur_single =
        payload_duration_s(Scheme::single_link, timing, cfg.mode, slots);
    const double dur_conc =
        payload_duration_s(Scheme::concurrent, timing, cfg.mode, slots);

    const EffectiveSnrTable snr_true = compute_effective_snr(truth);
    RateTable truth_single =
        build_rate_table(snr_true, dur_single, truth_backoff, cfg.mcs);
    RateTable truth_conc =
        build_rate_table(snr_true, dur_conc, truth_backoff, cfg.mcs);

    RateTable plan_single(0, 0), plan_conc(0, 0);
    if (cfg.mode == Mode::practical) {
      const FadingRealization est = estimate_channel(
          truth, est_cfg, substream(cfg.seed, trial_id, estimation_tag));
      const EffectiveSnrTable snr_est = compute_effective_snr(est);
      plan_single = build_rate_table(snr_est, dur_single, plan_backoff, cfg.mcs);
      plan_conc = build_rate_table(snr_est, dur_conc, plan_backoff, cfg.mcs);
    } else {
      plan_single = build_rate_table(snr_true, dur_single, plan_backoff, cfg.mcs);
      plan_conc = build_rate_table(snr_true, dur_conc, plan_backoff, cfg.mcs);
    }

    FrameContext ctx{scheme_matched_table(plan_single, plan_conc),
                     std::move(plan_conc),
                     scheme_matched_table(truth_single, truth_conc),
                     std::move(truth_conc)};
    frames.push_back(std::move(ctx));
  }

  const RateTable& t1 = frames[0].plan_merged;
  const RateTable& t2 = frames[1].plan_merged;

  struct Planned {
    std::array<FramePlan, 2> plan;
    std::array<const RateTable*, 2> truth;
    bool concurrent = false;
  };

  const auto plan_protocol = [&](Protocol p) {
    Planned out;
    out.truth = {&frames[0].truth_merged, &frames[1].truth_merged};
    switch (p) {
      case Protocol::single_link: {
        auto pair = plan_single_link_mac(t1, t2);
        out.plan = {pair.first, pair.second};
        break;
      }
      case Protocol::mima: {
        auto pair = plan_mima_mac(t1, t2);
        out.plan = {pair.first, pair.second};
        break;
      }
      case Protocol::mst: {
        auto pair = plan_mst_mac(t1, t2);
        out.plan = {pair.first, pair.second};
        break;
      }
      case Protocol::adaptive: {
        if (cfg.mode == Mode::ideal) {
          auto pair = plan_adaptive_ideal(t1, t2);
          out.plan = {pair.first, pair.second};
        } else {
          const FramePlan f1 = plan_adaptive_practical_f1(t1);
          if (f1.scheme == Scheme::concurrent) {
            // F2 is committed to concurrent handshaking; its single-link
            // references stay measured at single-handshake durations.
            const FramePlan f2 = plan_adaptive_practical_f2(
                frames[1].plan_conc, single_link_rate(t2, 0),
                single_link_rate(t2, 1));
            out.plan = {f1, f2};
            out.truth[1] = &frames[1].truth_conc;
            out.concurrent = true;
          } else {
            out.plan = {f1, plan_single_link_mac(t1, t2).second};
          }
          return out;
        }
        break;
      }
    }
    out.concurrent = any_concurrent(out.plan[0], out.plan[1]);
    return out;
  };

  // The single link MAC is always evaluated: it is the RT-ratio baseline.
  const Planned single_planned = plan_protocol(Protocol::single_link);
  std::array<std::array<int, 2>, 2> single_credited;
  for (int f = 0; f < 2; ++f)
    single_credited[f] =
        credit_frame(single_planned.plan[f], *single_planned.truth[f], cfg.mcs);

  const double mbps_per_mdu =
      (8.0 * mdu_bytes) / (2.0 * cfg.frame_duration_s) / 1e6;
  const std::array<double, 2> single_mbps = {
      (single_credited[0][0] + single_credited[1][0]) * mbps_per_mdu,
      (single_credited[0][1] + single_credited[1][1]) * mbps_per_mdu};

  TrialRecord record;
  record.trial_id = trial_id;
  record.outcomes.resize(cfg.protocols.size());

  for (std::size_t i = 0; i < cfg.protocols.size(); ++i) {
    const Protocol p = cfg.protocols[i];
    const Planned planned =
        (p == Protocol::single_link) ? single_planned : plan_protocol(p);
    ProtocolOutcome& out = record.outcomes[i];
    out.concurrent = planned.concurrent;
    out.plans = planned.plan;
    for (int f = 0; f < 2; ++f)
      out.credited[f] =
          (p == Protocol::single_link)
              ? single_credited[f]
              : credit_frame(planned.plan[f], *planned.truth[f], cfg.mcs);
    for (int link = 0; link < 2; ++link) {
      LinkOutcome& lo = out.link[link];
      lo.throughput_mbps =
          (out.credited[0][link] + out.credited[1][link]) * mbps_per_mdu;
      if (single_mbps[link] > 0.0) {
        lo.rt_valid = true;
        lo.rt_ratio = lo.throughput_mbps / single_mbps[link];
      }
    }
  }
  return record;
}

std::vector<TrialRecord> run_trials(const RunConfig& cfg) {
  cfg.validate();
  std::vector<TrialRecord> records(cfg.n_trials);

  if (!cfg.channel_dump_path.empty()) {
    std::ofstream dump(cfg.channel_dump_path);
    if (!dump)
      throw std::runtime_error("cannot open channel dump: " + cfg.channel_dump_path);
    for (int t = 0; t < cfg.n_trials; ++t)
      records[t] = run_trial(cfg, t, &dump);
    return records;
  }

  const int threads = std::min(cfg.n_threads, cfg.n_trials);
  if (threads <= 1) {
    for (int t = 0; t < cfg.n_trials; ++t) records[t] = run_trial(cfg, t);
    return records;
  }

  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (int t = w; t < cfg.n_trials; t += threads)
        records[t] = run_trial(cfg, t);
    });
  }
  for (auto& th : pool) th.join();
  return records;
}

Summary aggregate(const RunConfig& cfg, const std::vector<TrialRecord>& records) {
  if (records.empty()) throw std::invalid_argument("aggregate: no records");

  Summary s;
  s.protocols = cfg.protocols;
  s.n_trials = static_cast<int>(records.size());
  const std::size_t np = cfg.protocols.size();

  double max_rt = 0.0;
  for (const TrialRecord& r : records)
    for (const ProtocolOutcome& o : r.outcomes)
      for (const LinkOutcome& lo : o.link)
        if (lo.rt_valid) max_rt = std::max(max_rt, lo.rt_ratio);

  const auto bin_of = [&](double rt) {
    return static_cast<int>(std::floor(rt / s.bin_width + 1e-9));
  };
  const int n_bins = bin_of(max_rt) + 1;
  for (int b = 0; b < n_bins; ++b) s.bin_lo.push_back(b * s.bin_width);

  s.pdf.assign(np, std::vector<double>(n_bins, 0.0));
  s.cdf.assign(np, std::vector<double>(n_bins, 0.0));
  s.ergodic_mbps.assign(np, 0.0);
  s.outage_100.assign(np, 0.0);
  s.outage_95.assign(np, 0.0);
  s.rt_excluded.assign(np, 0);
  s.concurrent_fraction.assign(np, 0.0);

  for (std::size_t p = 0; p < np; ++p) {
    long valid = 0, below_100 = 0, below_95 = 0;
    double mbps_sum = 0.0;
    long conc = 0;
    for (const TrialRecord& r : records) {
      const ProtocolOutcome& o = r.outcomes[p];
      conc += o.concurrent ? 1 : 0;
      for (const LinkOutcome& lo : o.link) {
        mbps_sum += lo.throughput_mbps;
        if (!lo.rt_valid) {
          ++s.rt_excluded[p];
          continue;
        }
        ++valid;
        s.pdf[p][bin_of(lo.rt_ratio)] += 1.0;
        if (lo.rt_ratio < 1.0) ++below_100;
        if (lo.rt_ratio < 0.95) ++below_95;
      }
    }
    s.ergodic_mbps[p] = mbps_sum / (2.0 * s.n_trials);
    s.concurrent_fraction[p] = double(conc) / s.n_trials;
    if (valid > 0) {
      double acc = 0.0;
      for (int b = 0; b < n_bins; ++b) {
        s.pdf[p][b] /= double(valid);
        acc += s.pdf[p][b];
        s.cdf[p][b] = acc;
      }
      s.outage_100[p] = double(below_100) / double(valid);
      s.outage_95[p] = double(below_95) / double(valid);
    }
  }
  return s;
}

std::vector<SweepRow> sweep_training(const RunConfig& cfg,
                                     const std::vector<int>& nt_values) {
  if (cfg.mode != Mode::practical)
    throw std::invalid_argument("sweep_training: practical mode only");
  std::vector<SweepRow> rows;
  for (int nt : nt_values) {
    RunConfig c = cfg;
    c.n_training = nt;
    const Summary s = aggregate(c, run_trials(c));
    rows.push_back({nt, s.ergodic_mbps});
  }
  return rows;
}

void write_trials_csv(std::ostream& os, const std::vector<Protocol>& protocols,
                      const std::vector<TrialRecord>& records) {
  os << "trial,protocol,link,throughput_mbps,rt_valid,rt_ratio,concurrent\n";
  for (const TrialRecord& r : records) {
    for (std::size_t p = 0; p < protocols.size(); ++p) {
      const ProtocolOutcome& o = r.outcomes[p];
      for (int link = 0; link < 2; ++link) {
        const LinkOutcome& lo = o.link[link];
        os << r.trial_id << ',' << protocol_name(protocols[p]) << ','
           << (link + 1) << ',' << fmt("%.6f", lo.throughput_mbps) << ','
           << (lo.rt_valid ? 1 : 0) << ',' << fmt("%.9f", lo.rt_ratio) << ','
           << (o.concurrent ? 1 : 0) << '\n';
      }
    }
  }
}

std::pair<std::vector<Protocol>, std::vector<TrialRecord>> read_trials_csv(
    std::istream& is) {
  std::string line;
  if (!std::getline(is, line) ||
      line != "trial,protocol,link,throughput_mbps,rt_valid,rt_ratio,concurrent")
    throw std::runtime_error("trials csv: unexpected header");

  std::vector<Protocol> protocols;
  std::vector<TrialRecord> records;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 7) throw std::runtime_error("trials csv: malformed row");

    const int trial = std::stoi(fields[0]);
    const auto proto = parse_protocol(fields[1]);
    if (!proto) throw std::runtime_error("trials csv: unknown protocol " + fields[1]);
    const int link = std::stoi(fields[2]) - 1;

    if (records.empty() || records.back().trial_id != trial) {
      records.push_back({trial, {}});
    }
    TrialRecord& rec = records.back();
    std::size_t idx = 0;
    for (; idx < protocols.size(); ++idx)
      if (protocols[idx] == *proto) break;
    if (idx == protocols.size() && records.size() == 1 && link == 0)
      protocols.push_back(*proto);
    if (rec.outcomes.size() <= idx) rec.outcomes.resize(idx + 1);

    LinkOutcome& lo = rec.outcomes[idx].link[link];
    lo.throughput_mbps = std::stod(fields[3]);
    lo.rt_valid = fields[4] == "1";
    lo.rt_ratio = std::stod(fields[5]);
    rec.outcomes[idx].concurrent = fields[6] == "1";
  }
  return {protocols, records};
}

void write_histogram_csv(std::ostream& os, const Summary& s) {
  os << "bin_lo,bin_hi";
  for (Protocol p : s.protocols)
    os << ',' << protocol_name(p) << "_pdf," << protocol_name(p) << "_cdf";
  os << '\n';
  for (std::size_t b = 0; b < s.bin_lo.size(); ++b) {
    os << fmt("%.1f", s.bin_lo[b]) << ',' << fmt("%.1f", s.bin_lo[b] + s.bin_width);
    for (std::size_t p = 0; p < s.protocols.size(); ++p)
      os << ',' << fmt("%.6f", s.pdf[p][b]) << ',' << fmt("%.6f", s.cdf[p][b]);
    os << '\n';
  }
}

void write_summary_csv(std::ostream& os, const Summary& s) {
  os << "protocol,ergodic_throughput_mbps,outage_1.00,outage_0.95,"
        "rt_excluded_samples,concurrent_fraction\n";
  for (std::size_t p = 0; p < s.protocols.size(); ++p) {
    os << protocol_name(s.protocols[p]) << ','
       << fmt("%.6f", s.ergodic_mbps[p]) << ',' << fmt("%.6f", s.outage_100[p])
       << ',' << fmt("%.6f", s.outage_95[p]) << ',' << s.rt_excluded[p] << ','
       << fmt("%.6f", s.concurrent_fraction[p]) << '\n';
  }
}

void write_sweep_csv(std::ostream& os, const std::vector<Protocol>& protocols,
                     const std::vector<SweepRow>& rows) {
  os << "n_training";
  for (Protocol p : protocols) os << ',' << protocol_name(p) << "_ergodic_mbps";
  os << '\n';
  for (const SweepRow& row : rows) {
    os << row.n_training;
    for (double v : row.ergodic_mbps) os << ',' << fmt("%.6f", v);
    os << '\n';
  }
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

}  // namespace

void emit_csv(const RunConfig& cfg, const std::vector<TrialRecord>& records,
              const Summary& summary) {
  if (cfg.out_dir.empty())
    throw std::invalid_argument("emit_csv: output directory not set");
  const std::filesystem::path dir(cfg.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string());

  {
    auto os = open_output(dir / "trials.csv");
    write_trials_csv(os, cfg.protocols, records);
  }
  {
    auto os = open_output(dir / "histogram.csv");
    write_histogram_csv(os, summary);
  }
  {
    auto os = open_output(dir / "summary.csv");
    write_summary_csv(os, summary);
  }
  if (cfg.trace) {
    auto os = open_output(dir / "trace.log");
    for (const TrialRecord& r : records)
      for (std::size_t p = 0; p < cfg.protocols.size(); ++p)
        for (int f = 0; f < 2; ++f)
          os << format_trace_line(r.trial_id, protocol_name(cfg.protocols[p]),
                                  r.outcomes[p].plans[f],
                                  r.outcomes[p].credited[f])
             << '\n';
  }
}

}  // namespace mimosim
