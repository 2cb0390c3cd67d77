#ifndef MIMOSIM_LINK_ADAPT_HPP
#define MIMOSIM_LINK_ADAPT_HPP

#include <string>
#include <vector>

#include "mimosim/channel.hpp"
#include "mimosim/constants.hpp"
#include "mimosim/phy.hpp"

namespace mimosim {

struct McsEntry {
  int index = 0;
  double bits_per_symbol = 0.0;  // per subcarrier, QAM bits x coding rate
  double threshold_db = 0.0;     // minimum effective PPSNR for 10% PER
};

/// Modulation and coding schemes, ordered by strictly increasing threshold.
class McsTable {
 public:
  /// The built-in 8-entry table (BPSK 1/2 ... 64QAM 5/6).
  McsTable();
  explicit McsTable(std::vector<McsEntry> entries);

  /// Loads a table from a JSON file; see README for the schema.
  static McsTable load(const std::string& path);

  /// Highest index whose threshold is <= eff_db, or -1 when even the lowest
  /// scheme is out of reach (the stream then carries nothing).
  int select(double eff_db) const;

  const McsEntry& operator[](int index) const { return entries_[index]; }
  int size() const { return static_cast<int>(entries_.size()); }

 private:
  void validate() const;
  std::vector<McsEntry> entries_;
};

struct BackoffConfig {
  double backoff_db = 0.0;  // margin subtracted from estimated effective PPSNR
};

/// AWGN-equivalent SNR of one stream: mean of the per-subcarrier dB values
/// minus 0.125 times their (population) variance, minus the configured
/// backoff margin.
double effective_ppsnr_db(const PpsnrGrid& grid, int stream,
                          const BackoffConfig& backoff = {});

/// Payload units a stream carries: whole OFDM symbols in the payload window,
/// all subcarriers loaded at the scheme's rate, floored to whole MDUs.
int mdus_per_stream(const McsEntry& mcs, double payload_duration_s);

/// One link's outcome at one stream allocation.
struct LinkRate {
  std::vector<double> stream_eff_db;  // backoff already applied
  std::vector<int> stream_mcs;        // -1 where below the lowest threshold
  int mdus = 0;
};

struct RateCell {
  int m1 = 0, m2 = 0;
  std::array<LinkRate, 2> link;
  double payload_s = 0.0;
};

/// Both links' MDU counts for every stream split (m1, m2) with
/// m1 + m2 <= max_streams. Cell (m1, m2) means link 1 sends m1 streams and
/// link 2 sends m2 concurrently.
class RateTable {
 public:
  RateTable(int max_streams, double payload_duration_s);

  RateCell& cell(int m1, int m2);
  const RateCell& cell(int m1, int m2) const;
  bool valid(int m1, int m2) const {
    return m1 >= 0 && m2 >= 0 && m1 + m2 <= max_streams_;
  }
  int max_streams() const { return max_streams_; }
  double payload_duration_s() const { return payload_s_; }

  int mdus(int link, int m1, int m2) const { return cell(m1, m2).link[link].mdus; }

 private:
  int max_streams_;
  double payload_s_;
  std::vector<RateCell> cells_;
};

/// Per-stream effective PPSNR (no backoff) for every allocation, computed
/// once per fading realization; MDU counting is layered on top so several
/// payload durations can share the PPSNR work.
struct EffectiveSnrTable {
  int max_streams = 0;
  // eff[link][index of (m1,m2)]: one value per active stream of that link
  std::vector<std::array<std::vector<double>, 2>> eff;

  int cell_index(int m1, int m2) const { return m1 * (max_streams + 1) + m2; }
};

EffectiveSnrTable compute_effective_snr(const FadingRealization& channels,
                                        double noise_power = noise_power_mw);

RateTable build_rate_table(const EffectiveSnrTable& snr,
                           double payload_duration_s,
                           const BackoffConfig& backoff, const McsTable& mcs);

/// Convenience composition of the two stages above.
RateTable build_rate_table(const FadingRealization& channels,
                           double payload_duration_s,
                           const BackoffConfig& backoff, const McsTable& mcs,
                           double noise_power = noise_power_mw);

/// Best interference-free MDU count of one link (link 0 or 1): the max over
/// its single-link allocations (m, 0) resp. (0, m), m >= 1.
int single_link_rate(const RateTable& table, int link);

}  // namespace mimosim

#endif
