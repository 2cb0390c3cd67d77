#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "mimosim/channel.hpp"
#include "mimosim/harness.hpp"

namespace {

using namespace mimosim;

struct CommonOpts {
  std::string mode = "ideal";
  std::string protocols = "single,mima,mst,adaptive";
  int trials = 1000;
  std::uint64_t seed = 1;
  int nt = 4;
  double backoff_db = -1.0;  // <0 means mode default
  std::string topology = "random";
  std::string out;
  int threads = 1;
  bool trace = false;
  std::string mcs_file;
  std::string dump_channels;
  double frame_ms = 5.0;
};

void add_common(CLI::App* app, CommonOpts& o) {
  app->add_option("--mode", o.mode, "ideal or practical")
      ->check(CLI::IsMember({"ideal", "practical"}));
  app->add_option("--protocols", o.protocols,
                  "comma list from single,mima,mst,adaptive");
  app->add_option("--trials", o.trials, "number of Monte-Carlo trials");
  app->add_option("--seed", o.seed, "master RNG seed");
  app->add_option("--nt", o.nt, "training symbols per Tx antenna");
  app->add_option("--backoff-db", o.backoff_db,
                  "SNR backoff margin in dB (default 0 ideal, 1 practical)");
  app->add_option("--topology", o.topology, "random, a or b")
      ->check(CLI::IsMember({"random", "a", "b"}));
  app->add_option("--out", o.out, "output directory for CSV files");
  app->add_option("--threads", o.threads, "worker threads (results identical)");
  app->add_flag("--trace", o.trace, "write per-frame decision trace");
  app->add_option("--mcs-file", o.mcs_file, "JSON MCS table overriding the built-in");
  app->add_option("--dump-channels", o.dump_channels,
                  "write every channel matrix to this file (single-threaded)");
  app->add_option("--frame-ms", o.frame_ms, "Tx frame duration in ms");
}

RunConfig to_config(const CommonOpts& o) {
  RunConfig cfg;
  cfg.mode = o.mode == "practical" ? Mode::practical : Mode::ideal;
  cfg.protocols.clear();
  std::stringstream ss(o.protocols);
  std::string name;
  while (std::getline(ss, name, ',')) {
    const auto p = parse_protocol(name);
    if (!p) throw CLI::ValidationError("--protocols", "unknown protocol: " + name);
    cfg.protocols.push_back(*p);
  }
  cfg.n_trials = o.trials;
  cfg.seed = o.seed;
  cfg.n_training = o.nt;
  if (o.backoff_db >= 0.0) cfg.backoff_db = o.backoff_db;
  cfg.frame_duration_s = o.frame_ms * 1e-3;
  cfg.topology = o.topology == "a"   ? TopologyMode::fixed_a
                 : o.topology == "b" ? TopologyMode::fixed_b
                                     : TopologyMode::random;
  cfg.out_dir = o.out;
  cfg.n_threads = o.threads;
  cfg.trace = o.trace;
  cfg.channel_dump_path = o.dump_channels;
  if (!o.mcs_file.empty()) cfg.mcs = McsTable::load(o.mcs_file);
  return cfg;
}

void print_summary(const Summary& s) {
  std::printf("%-10s %14s %12s %12s %10s %12s\n", "protocol", "ergodic_mbps",
              "outage_1.00", "outage_0.95", "excluded", "concurrent");
  for (std::size_t p = 0; p < s.protocols.size(); ++p)
    std::printf("%-10s %14.3f %12.4f %12.4f %10d %12.3f\n",
                protocol_name(s.protocols[p]), s.ergodic_mbps[p],
                s.outage_100[p], s.outage_95[p], s.rt_excluded[p],
                s.concurrent_fraction[p]);
}

int cmd_run(const CommonOpts& o) {
  const RunConfig cfg = to_config(o);
  const auto records = run_trials(cfg);
  const Summary summary = aggregate(cfg, records);
  print_summary(summary);
  if (!cfg.out_dir.empty()) {
    emit_csv(cfg, records, summary);
    std::printf("wrote %s/{trials,histogram,summary}.csv\n", cfg.out_dir.c_str());
  }
  return 0;
}

int cmd_sweep(const CommonOpts& o, const std::vector<int>& nt_values) {
  CommonOpts opts = o;
  opts.mode = "practical";
  const RunConfig cfg = to_config(opts);
  const auto rows = sweep_training(cfg, nt_values);

  std::printf("%10s", "n_training");
  for (Protocol p : cfg.protocols) std::printf(" %14s", protocol_name(p));
  std::printf("\n");
  for (const SweepRow& row : rows) {
    std::printf("%10d", row.n_training);
    for (double v : row.ergodic_mbps) std::printf(" %14.3f", v);
    std::printf("\n");
  }
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream os(cfg.out_dir + "/sweep.csv");
    if (!os) throw std::runtime_error("cannot write " + cfg.out_dir + "/sweep.csv");
    write_sweep_csv(os, cfg.protocols, rows);
    std::printf("wrote %s/sweep.csv\n", cfg.out_dir.c_str());
  }
  return 0;
}

int cmd_topology_demo(const CommonOpts& o) {
  for (const char variant : {'a', 'b'}) {
    CommonOpts opts = o;
    opts.topology = std::string(1, variant);
    const RunConfig cfg = to_config(opts);
    const Topology topo = representative_topology(variant);
    std::printf("topology (%c): T1(%.0f,%.0f) R1(%.0f,%.0f)  T2(%.0f,%.0f) R2(%.0f,%.0f)\n",
                variant, topo.tx[0].x(), topo.tx[0].y(), topo.rx[0].x(),
                topo.rx[0].y(), topo.tx[1].x(), topo.tx[1].y(), topo.rx[1].x(),
                topo.rx[1].y());
    const Summary summary = aggregate(cfg, run_trials(cfg));
    print_summary(summary);
    std::printf("\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte-Carlo simulator of adaptive single/concurrent link "
               "switching in two-link MIMO networks"};
  app.require_subcommand(1);
  app.set_config("--config");

  CommonOpts run_opts;
  CLI::App* run = app.add_subcommand("run", "run one Monte-Carlo experiment");
  add_common(run, run_opts);

  CommonOpts sweep_opts;
  std::vector<int> nt_values = {1, 2, 4, 8, 16, 32};
  CLI::App* sweep =
      app.add_subcommand("sweep-nt", "ergodic throughput vs training symbols");
  add_common(sweep, sweep_opts);
  sweep->add_option("--nt-values", nt_values, "training symbol counts to sweep");

  CommonOpts demo_opts;
  demo_opts.trials = 500;
  CLI::App* demo = app.add_subcommand(
      "topology-demo", "compare the two reference topologies");
  add_common(demo, demo_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_opts);
    if (sweep->parsed()) return cmd_sweep(sweep_opts, nt_values);
    if (demo->parsed()) return cmd_topology_demo(demo_opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
