#include "mimosim/link_adapt.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace mimosim {

McsTable::McsTable() {
  const double rates[] = {0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 4.5, 5.0};
  const double thresholds[] = {1.4, 4.4, 6.5, 8.6, 12.0, 15.8, 17.2, 18.8};
  for (int i = 0; i < 8; ++i)
    entries_.push_back({i, rates[i], thresholds[i]});
  validate();
}

McsTable::McsTable(std::vector<McsEntry> entries) : entries_(std::move(entries)) {
  validate();
}

void McsTable::validate() const {
  if (entries_.empty()) throw std::invalid_argument("MCS table: empty");
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const McsEntry& e = entries_[i];
    if (e.index != static_cast<int>(i))
      throw std::invalid_argument("MCS table: indices must be 0..n-1 in order");
    if (!(e.bits_per_symbol > 0.0) || !std::isfinite(e.threshold_db))
      throw std::invalid_argument("MCS table: invalid entry values");
    if (i > 0) {
      if (!(e.threshold_db > entries_[i - 1].threshold_db))
        throw std::invalid_argument("MCS table: thresholds must be strictly increasing");
      if (e.bits_per_symbol < entries_[i - 1].bits_per_symbol)
        throw std::invalid_argument("MCS table: rates must be nondecreasing");
    }
  }
}

McsTable McsTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("MCS table: cannot open " + path);
  nlohmann::json j;
  in >> j;
  std::vector<McsEntry> entries;
  for (const auto& e : j.at("mcs")) {
    McsEntry entry;
    entry.index = static_cast<int>(entries.size());
    entry.bits_per_symbol = e.at("bits_per_symbol").get<double>();
    entry.threshold_db = e.at("threshold_db").get<double>();
    entries.push_back(entry);
  }
  return McsTable(std::move(entries));
}

int McsTable::select(double eff_db) const {
  int best = -1;
  for (const McsEntry& e : entries_) {
    if (e.threshold_db <= eff_db)
      best = e.index;
    else
      break;
  }
  return best;
}

double effective_ppsnr_db(const PpsnrGrid& grid, int stream,
                          const BackoffConfig& backoff) {
  if (stream < 0 || stream >= grid.cols())
    throw std::invalid_argument("effective_ppsnr_db: stream out of range");
  const Eigen::ArrayXd db = 10.0 * grid.col(stream).log10();
  const double mean = db.mean();
  const double var = (db - mean).square().mean();
  const double alpha = 0.125;  // fitted variance penalty of the AWGN mapping
  return mean - alpha * var - backoff.backoff_db;
}

int mdus_per_stream(const McsEntry& mcs, double payload_duration_s) {
  if (!(payload_duration_s > 0.0))
    throw std::invalid_argument("mdus_per_stream: payload duration must be positive");
  const double symbols = std::floor(payload_duration_s / symbol_duration_s);
  const double bits = symbols * n_subcarriers * mcs.bits_per_symbol;
  return static_cast<int>(std::floor(bits / (8.0 * mdu_bytes)));
}

RateTable::RateTable(int max_streams, double payload_duration_s)
    : max_streams_(max_streams),
      payload_s_(payload_duration_s),
      cells_((max_streams + 1) * (max_streams + 1)) {
  for (int m1 = 0; m1 <= max_streams_; ++m1)
    for (int m2 = 0; m2 <= max_streams_; ++m2) {
      RateCell& c = cells_[m1 * (max_streams_ + 1) + m2];
      c.m1 = m1;
      c.m2 = m2;
      c.payload_s = payload_duration_s;
    }
}

RateCell& RateTable::cell(int m1, int m2) {
  if (!valid(m1, m2)) throw std::out_of_range("RateTable: invalid allocation");
  return cells_[m1 * (max_streams_ + 1) + m2];
}

const RateCell& RateTable::cell(int m1, int m2) const {
  if (!valid(m1, m2)) throw std::out_of_range("RateTable: invalid allocation");
  return cells_[m1 * (max_streams_ + 1) + m2];
}

EffectiveSnrTable compute_effective_snr(const FadingRealization& channels,
                                        double noise_power) {
  EffectiveSnrTable out;
  out.max_streams = n_antennas;
  out.eff.resize((n_antennas + 1) * (n_antennas + 1));

  for (int m1 = 0; m1 <= n_antennas; ++m1) {
    for (int m2 = 0; m2 + m1 <= n_antennas; ++m2) {
      auto& cell = out.eff[out.cell_index(m1, m2)];
      if (m1 > 0) {
        const PpsnrGrid g =
            mmse_ppsnr(channels.at(0, 0), channels.at(0, 1), m1, m2, noise_power);
        for (int s = 0; s < m1; ++s)
          cell[0].push_back(effective_ppsnr_db(g, s));
      }
      if (m2 > 0) {
        const PpsnrGrid g =
            mmse_ppsnr(channels.at(1, 1), channels.at(1, 0), m2, m1, noise_power);
        for (int s = 0; s < m2; ++s)
          cell[1].push_back(effective_ppsnr_db(g, s));
      }
    }
  }
  return out;
}

RateTable build_rate_table(const EffectiveSnrTable& snr,
                           double payload_duration_s,
                           const BackoffConfig& backoff, const McsTable& mcs) {
  RateTable table(snr.max_streams, payload_duration_s);
  for (int m1 = 0; m1 <= snr.max_streams; ++m1) {
    for (int m2 = 0; m2 + m1 <= snr.max_streams; ++m2) {
      const auto& eff = snr.eff[snr.cell_index(m1, m2)];
      RateCell& cell = table.cell(m1, m2);
      for (int link = 0; link < 2; ++link) {
        LinkRate& lr = cell.link[link];
        for (double e : eff[link]) {
          const double adjusted = e - backoff.backoff_db;
          const int idx = mcs.select(adjusted);
          lr.stream_eff_db.push_back(adjusted);
          lr.stream_mcs.push_back(idx);
          if (idx >= 0) lr.mdus += mdus_per_stream(mcs[idx], payload_duration_s);
        }
      }
    }
  }
  return table;
}

RateTable build_rate_table(const FadingRealization& channels,
                           double payload_duration_s,
                           const BackoffConfig& backoff, const McsTable& mcs,
                           double noise_power) {
  return build_rate_table(compute_effective_snr(channels, noise_power),
                          payload_duration_s, backoff, mcs);
}

int single_link_rate(const RateTable& table, int link) {
  int best = 0;
  for (int m = 1; m <= table.max_streams(); ++m) {
    const int n = (link == 0) ? table.mdus(0, m, 0) : table.mdus(1, 0, m);
    best = std::max(best, n);
  }
  return best;
}

}  // namespace mimosim
