#ifndef MIMOSIM_MAC_HPP
#define MIMOSIM_MAC_HPP

#include <array>
#include <random>
#include <utility>
#include <vector>

#include "mimosim/constants.hpp"
#include "mimosim/link_adapt.hpp"

namespace mimosim {

enum class Scheme { single_link, concurrent };
enum class Mode { ideal, practical };

/// Stream split plus the per-stream modulation choices behind it.
struct StreamConfig {
  int m1 = 0;
  int m2 = 0;
  std::array<std::vector<int>, 2> mcs;  // one entry per active stream
};

/// One frame's transmission decision. planned_mdus are the counts claimed by
/// the planning table; actual delivery is adjudicated against the true
/// channel by the harness.
struct FramePlan {
  int frame = 0;  // 0 = F1, 1 = F2
  Scheme scheme = Scheme::single_link;
  StreamConfig config;
  std::array<int, 2> planned_mdus{0, 0};
};

using FramePlanPair = std::pair<FramePlan, FramePlan>;

// ---------------------------------------------------------------------------
// Contention and handshaking timing
// ---------------------------------------------------------------------------

/// Control packet durations scale with the training preamble: every Tx
/// antenna contributes n_training symbols to an RTS, a CTS/DTS carries one
/// antenna's worth plus fixed framing, and the ACK is fixed.
struct TimingModel {
  int n_training = 4;
  int n_antennas = ::mimosim::n_antennas;
  double slot_s = 9e-6;
  int cw_min = 7;
  int cw_max = 63;  // kept for configurability; no collision retries modeled
  double frame_s = 5e-3;
  double gap_s = 16e-6;  // spacing between consecutive control packets
  double control_symbol_s = symbol_duration_s;

  double rts_s() const { return (6 + n_training * n_antennas) * control_symbol_s; }
  double cts_s() const { return (6 + n_training) * control_symbol_s; }
  double dts_s() const { return (4 + n_training) * control_symbol_s; }
  double ack_s() const { return 8 * control_symbol_s; }
};

/// Control packet time of one frame including inter-packet gaps: a single
/// link frame runs RTS/CTS/ACK, a concurrent frame runs both transmitters'
/// RTS, a CTS, the decision broadcast (DTS) and both ACKs.
double handshake_overhead_s(Scheme scheme, const TimingModel& timing);

/// Uniform draw in [0, cw_min] slots. The two links cooperate once the
/// handshake starts, so no collision/retry ladder is modeled.
int draw_backoff_slots(const TimingModel& timing, std::mt19937_64& rng);

inline double mean_backoff_s(const TimingModel& timing) {
  return 0.5 * timing.cw_min * timing.slot_s;
}

/// Payload window of one frame. Ideal mode ignores all overhead; practical
/// mode subtracts the contention draw and the scheme's handshake time.
double payload_duration_s(Scheme scheme, const TimingModel& timing, Mode mode,
                          int backoff_slots);

/// Planning view with per-cell payload durations: concurrent allocations
/// (m1 > 0 and m2 > 0) read from the concurrent-handshake table, all others
/// from the single-handshake table.
RateTable scheme_matched_table(const RateTable& single_duration,
                               const RateTable& concurrent_duration);

// ---------------------------------------------------------------------------
// MAC decision procedures
// ---------------------------------------------------------------------------
//
// All planners are deterministic in their RateTable inputs. Ties between
// equal-sum candidates are broken by larger min per-link count, then fewer
// total streams, then lexicographically smaller allocation. A frame whose
// winning allocation is empty (possible only when every allocation of that
// frame carries zero MDUs) falls back to the frame owner's single-link shape.

/// Round-robin baseline: F1 carries link 1 alone at its best stream count,
/// F2 carries link 2.
FramePlanPair plan_single_link_mac(const RateTable& f1, const RateTable& f2);

/// Fixed half-split concurrent baseline: both frames run (2, 2) with
/// per-stream rate adaptation only.
FramePlanPair plan_mima_mac(const RateTable& f1, const RateTable& f2);

/// Unconstrained sum-throughput maximizer, each frame independently.
FramePlanPair plan_mst_mac(const RateTable& f1, const RateTable& f2);

/// Non-causal switching benchmark: exhaustive search over both frames'
/// allocations maximizing total MDUs subject to each link's two-frame total
/// covering its single-link rate (link 1's from F1, link 2's from F2). The
/// round-robin default is always feasible.
FramePlanPair plan_adaptive_ideal(const RateTable& f1, const RateTable& f2);

/// Causal frame-F1 switching: with only F1's table, require every candidate
/// to cover half of each link's single-link rate (both measured on F1).
/// Concurrent is declared only when the winner activates link 2; otherwise,
/// or when nothing is feasible, the frame falls back to single-link shape
/// (the caller then plans F2 as link 2's single frame).
FramePlan plan_adaptive_practical_f1(const RateTable& f1);

/// Frame-F2 configuration once F1 went concurrent: guarantee the largest
/// fraction (capped at 1) of both links' single-link rates simultaneously
/// achievable, then maximize the sum under that guarantee. Links whose
/// single-link reference is zero are vacuously satisfied. The references
/// default to the table's own single-link rates; the harness passes values
/// measured at single-handshake durations.
FramePlan plan_adaptive_practical_f2(const RateTable& f2);
FramePlan plan_adaptive_practical_f2(const RateTable& f2, int single_rate_link1,
                                     int single_rate_link2);

/// One line per frame: trial/frame/scheme/allocation/per-stream MCS/counts.
std::string format_trace_line(int trial, const char* protocol,
                              const FramePlan& plan,
                              const std::array<int, 2>& credited);

}  // namespace mimosim

#endif
