#include "mimosim/mac.hpp"

#include <sstream>
#include <stdexcept>

namespace mimosim {

double handshake_overhead_s(Scheme scheme, const TimingModel& t) {
  int packets = 0;
  double control = 0.0;
  if (scheme == Scheme::single_link) {
    control = t.rts_s() + t.cts_s() + t.ack_s();
    packets = 3;
  } else {
    control = 2 * t.rts_s() + t.cts_s() + t.dts_s() + 2 * t.ack_s();
    packets = 6;
  }
  return control + (packets - 1) * t.gap_s;
}

int draw_backoff_slots(const TimingModel& timing, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> slots(0, timing.cw_min);
  return slots(rng);
}

double payload_duration_s(Scheme scheme, const TimingModel& timing, Mode mode,
                          int backoff_slots) {
  if (mode == Mode::ideal) return timing.frame_s;
  const double payload = timing.frame_s - backoff_slots * timing.slot_s -
                         handshake_overhead_s(scheme, timing);
  if (payload <= 0.0)
    throw std::runtime_error("payload_duration_s: overhead exceeds the frame");
  return payload;
}

RateTable scheme_matched_table(const RateTable& single_duration,
                               const RateTable& concurrent_duration) {
  if (single_duration.max_streams() != concurrent_duration.max_streams())
    throw std::invalid_argument("scheme_matched_table: table size mismatch");
  RateTable merged = single_duration;
  const int n = merged.max_streams();
  for (int m1 = 1; m1 <= n; ++m1)
    for (int m2 = 1; m1 + m2 <= n; ++m2)
      merged.cell(m1, m2) = concurrent_duration.cell(m1, m2);
  return merged;
}

namespace {

struct PlanKey {
  long sum = 0;
  int min_count = 0;
  int streams = 0;
};

// Larger sum, then larger min per-link count, then fewer total streams.
// Lexicographic allocation order is handled by ascending enumeration with a
// strictly-better comparison.
bool better(const PlanKey& a, const PlanKey& b) {
  if (a.sum != b.sum) return a.sum > b.sum;
  if (a.min_count != b.min_count) return a.min_count > b.min_count;
  return a.streams < b.streams;
}

Scheme shape_scheme(const RateCell& cell) {
  return (cell.m1 > 0 && cell.m2 > 0) ? Scheme::concurrent
                                      : Scheme::single_link;
}

FramePlan make_plan(int frame, Scheme scheme, const RateCell& cell) {
  FramePlan plan;
  plan.frame = frame;
  plan.scheme = scheme;
  plan.config.m1 = cell.m1;
  plan.config.m2 = cell.m2;
  plan.config.mcs[0] = cell.link[0].stream_mcs;
  plan.config.mcs[1] = cell.link[1].stream_mcs;
  plan.planned_mdus = {cell.link[0].mdus, cell.link[1].mdus};
  return plan;
}

int best_single_streams(const RateTable& t, int link) {
  int best_m = 1;
  int best_n = -1;
  for (int m = 1; m <= t.max_streams(); ++m) {
    const int n = (link == 0) ? t.mdus(0, m, 0) : t.mdus(1, 0, m);
    if (n > best_n) {
      best_n = n;
      best_m = m;
    }
  }
  return best_m;
}

// Frame F1 is owned by link 1 and F2 by link 2 in the round-robin default.
FramePlan owner_single_plan(const RateTable& t, int frame) {
  const int link = frame;
  const int m = best_single_streams(t, link);
  const RateCell& cell = (link == 0) ? t.cell(m, 0) : t.cell(0, m);
  return make_plan(frame, Scheme::single_link, cell);
}

FramePlan finish_frame(const RateTable& t, int frame, const RateCell& cell) {
  if (cell.m1 == 0 && cell.m2 == 0) return owner_single_plan(t, frame);
  return make_plan(frame, shape_scheme(cell), cell);
}

// Exact rational for single-link-rate fractions; a zero reference is a
// vacuous guarantee and compares as exactly 1.
struct Ratio {
  long long num = 1;
  long long den = 1;
};

Ratio link_ratio(int mdus, int single_rate) {
  if (single_rate == 0) return {1, 1};
  return {2LL * mdus, single_rate};
}

bool ratio_less(const Ratio& a, const Ratio& b) {
  return a.num * b.den < b.num * a.den;
}

}  // namespace

FramePlanPair plan_single_link_mac(const RateTable& f1, const RateTable& f2) {
  return {owner_single_plan(f1, 0), owner_single_plan(f2, 1)};
}

FramePlanPair plan_mima_mac(const RateTable& f1, const RateTable& f2) {
  const int n = f1.max_streams();
  if (n % 2 != 0)
    throw std::invalid_argument("plan_mima_mac: antenna count must be even");
  const int half = n / 2;
  return {make_plan(0, Scheme::concurrent, f1.cell(half, half)),
          make_plan(1, Scheme::concurrent, f2.cell(half, half))};
}

namespace {

FramePlan mst_frame(const RateTable& t, int frame) {
  const RateCell* best = nullptr;
  PlanKey best_key;
  for (int m1 = 0; m1 <= t.max_streams(); ++m1) {
    for (int m2 = 0; m1 + m2 <= t.max_streams(); ++m2) {
      const RateCell& cell = t.cell(m1, m2);
      const int n1 = cell.link[0].mdus;
      const int n2 = cell.link[1].mdus;
      const PlanKey key{long(n1) + n2, std::min(n1, n2), m1 + m2};
      if (best == nullptr || better(key, best_key)) {
        best = &cell;
        best_key = key;
      }
    }
  }
  return finish_frame(t, frame, *best);
}

}  // namespace

FramePlanPair plan_mst_mac(const RateTable& f1, const RateTable& f2) {
  return {mst_frame(f1, 0), mst_frame(f2, 1)};
}

FramePlanPair plan_adaptive_ideal(const RateTable& f1, const RateTable& f2) {
  const int single1 = single_link_rate(f1, 0);
  const int single2 = single_link_rate(f2, 1);

  const RateCell* best_a = nullptr;
  const RateCell* best_b = nullptr;
  PlanKey best_key;
  for (int a1 = 0; a1 <= f1.max_streams(); ++a1) {
    for (int a2 = 0; a1 + a2 <= f1.max_streams(); ++a2) {
      const RateCell& ca = f1.cell(a1, a2);
      for (int b1 = 0; b1 <= f2.max_streams(); ++b1) {
        for (int b2 = 0; b1 + b2 <= f2.max_streams(); ++b2) {
          const RateCell& cb = f2.cell(b1, b2);
          const int l1 = ca.link[0].mdus + cb.link[0].mdus;
          const int l2 = ca.link[1].mdus + cb.link[1].mdus;
          if (l1 < single1 || l2 < single2) continue;
          const PlanKey key{long(l1) + l2, std::min(l1, l2),
                            a1 + a2 + b1 + b2};
          if (best_a == nullptr || better(key, best_key)) {
            best_a = &ca;
            best_b = &cb;
            best_key = key;
          }
        }
      }
    }
  }
  // The round-robin default always satisfies both constraints.
  if (best_a == nullptr || best_b == nullptr)
    throw std::logic_error("plan_adaptive_ideal: empty feasible set");
  return {finish_frame(f1, 0, *best_a), finish_frame(f2, 1, *best_b)};
}

FramePlan plan_adaptive_practical_f1(const RateTable& f1) {
  const int single1 = single_link_rate(f1, 0);
  const int single2 = single_link_rate(f1, 1);  // predicted from F1 as well

  const RateCell* best = nullptr;
  PlanKey best_key;
  for (int m1 = 0; m1 <= f1.max_streams(); ++m1) {
    for (int m2 = 0; m1 + m2 <= f1.max_streams(); ++m2) {
      const RateCell& cell = f1.cell(m1, m2);
      const int n1 = cell.link[0].mdus;
      const int n2 = cell.link[1].mdus;
      if (2 * n1 < single1 || 2 * n2 < single2) continue;
      const PlanKey key{long(n1) + n2, std::min(n1, n2), m1 + m2};
      if (best == nullptr || better(key, best_key)) {
        best = &cell;
        best_key = key;
      }
    }
  }
  if (best == nullptr || best->m2 == 0) return owner_single_plan(f1, 0);
  return make_plan(0, Scheme::concurrent, *best);
}

FramePlan plan_adaptive_practical_f2(const RateTable& f2) {
  return plan_adaptive_practical_f2(f2, single_link_rate(f2, 0),
                                    single_link_rate(f2, 1));
}

FramePlan plan_adaptive_practical_f2(const RateTable& f2, int single_rate_link1,
                                     int single_rate_link2) {
  // Largest simultaneously guaranteeable fraction of the single-link rates,
  // capped at 1.
  Ratio max_ratio{0, 1};
  for (int m1 = 0; m1 <= f2.max_streams(); ++m1) {
    for (int m2 = 0; m1 + m2 <= f2.max_streams(); ++m2) {
      const RateCell& cell = f2.cell(m1, m2);
      const Ratio r1 = link_ratio(cell.link[0].mdus, single_rate_link1);
      const Ratio r2 = link_ratio(cell.link[1].mdus, single_rate_link2);
      const Ratio lo = ratio_less(r1, r2) ? r1 : r2;
      if (ratio_less(max_ratio, lo)) max_ratio = lo;
    }
  }
  if (ratio_less(Ratio{1, 1}, max_ratio)) max_ratio = {1, 1};

  const RateCell* best = nullptr;
  PlanKey best_key;
  for (int m1 = 0; m1 <= f2.max_streams(); ++m1) {
    for (int m2 = 0; m1 + m2 <= f2.max_streams(); ++m2) {
      const RateCell& cell = f2.cell(m1, m2);
      const Ratio r1 = link_ratio(cell.link[0].mdus, single_rate_link1);
      const Ratio r2 = link_ratio(cell.link[1].mdus, single_rate_link2);
      if (ratio_less(r1, max_ratio) || ratio_less(r2, max_ratio)) continue;
      const int n1 = cell.link[0].mdus;
      const int n2 = cell.link[1].mdus;
      const PlanKey key{long(n1) + n2, std::min(n1, n2), m1 + m2};
      if (best == nullptr || better(key, best_key)) {
        best = &cell;
        best_key = key;
      }
    }
  }
  // The allocation achieving max_ratio is feasible by construction.
  if (best == nullptr)
    throw std::logic_error("plan_adaptive_practical_f2: empty feasible set");
  // The frame is committed to concurrent handshaking by F1's decision, so the
  // scheme stays concurrent whatever shape the winning allocation has.
  FramePlan plan = make_plan(1, Scheme::concurrent, *best);
  return plan;
}

std::string format_trace_line(int trial, const char* protocol,
                              const FramePlan& plan,
                              const std::array<int, 2>& credited) {
  std::ostringstream os;
  os << "trial=" << trial << " frame=" << (plan.frame + 1)
     << " protocol=" << protocol << " scheme="
     << (plan.scheme == Scheme::single_link ? "single" : "concurrent")
     << " m1=" << plan.config.m1 << " m2=" << plan.config.m2;
  for (int link = 0; link < 2; ++link) {
    os << " mcs" << (link + 1) << '=';
    const auto& mcs = plan.config.mcs[link];
    if (mcs.empty()) os << '-';
    for (std::size_t s = 0; s < mcs.size(); ++s)
      os << (s ? "," : "") << mcs[s];
    os << " planned" << (link + 1) << '=' << plan.planned_mdus[link]
       << " credited" << (link + 1) << '=' << credited[link];
  }
  return os.str();
}

}  // namespace mimosim
