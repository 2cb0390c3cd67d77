#ifndef MIMOSIM_CHANNEL_HPP
#define MIMOSIM_CHANNEL_HPP

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "mimosim/constants.hpp"
#include "mimosim/phy.hpp"

namespace mimosim {

/// Node placement for the two links. Index 0 is link 1, index 1 is link 2.
struct Topology {
  std::array<Eigen::Vector2d, 2> tx;
  std::array<Eigen::Vector2d, 2> rx;

  double distance(int rx_link, int tx_link) const {
    return (rx[rx_link] - tx[tx_link]).norm();
  }
};

/// Uniform node placement in the deployment box, with a minimum pairwise
/// separation so path loss stays finite. Deterministic in the seed.
Topology random_topology(std::uint64_t seed);

/// The two reference layouts: parallel 150 m links, 5 m apart, transmitting
/// in the same ('a') or opposite ('b') direction.
Topology representative_topology(char variant);

/// Linear power gain of the simplified path loss model:
/// (lambda / 4 pi d0)^2 * (d0 / d)^3. Distances below d0 clamp to d0.
double path_loss_gain(double dist_m);

/// Exponentially decaying power-delay profile over `taps` taps, last tap
/// `tap_decay_db` below the first, normalized to unit total power.
std::vector<double> exponential_pdp(int taps);

struct EstimationConfig {
  int n_training = 4;   // training symbols per Tx antenna
  int l_max = n_taps;   // time-domain paths assumed by the estimator
  double noise_power = noise_power_mw;

  double error_variance() const {
    return l_max * noise_power / (double(n_subcarriers) * n_training);
  }
};

/// Frequency response of every ordered (rx node, tx node) pair for one frame.
/// channels[k][l] is the channel from link l+1's transmitter to link k+1's
/// receiver: n_subcarriers matrices of size n_antennas x n_antennas, scaled
/// so that E|H(i,a,b)|^2 = path_loss * tx_power_per_subcarrier_mw.
struct FadingRealization {
  std::uint64_t frame_id = 0;
  std::array<std::array<SubcarrierChannels, 2>, 2> channels;

  const SubcarrierChannels& at(int rx_link, int tx_link) const {
    return channels[rx_link][tx_link];
  }
};

/// Draws one frame's fading: per node pair, i.i.d. complex Gaussian taps with
/// the exponential profile, DFT'd to per-subcarrier responses and scaled by
/// sqrt(path_loss * per-subcarrier Tx power). Independent across frame ids.
FadingRealization draw_fading(const Topology& topo, std::uint64_t frame_id,
                              std::uint64_t seed, int taps = n_taps);

/// Adds white estimation error of per-element variance
/// l_max * noise / (n_subcarriers * n_training) to every entry.
FadingRealization estimate_channel(const FadingRealization& truth,
                                   const EstimationConfig& cfg,
                                   std::uint64_t seed);

/// Replay/diff record: one line per (pair, subcarrier) of the form
///   trial,frame,rx,tx,subcarrier,re00,im00,re01,im01,...
/// with matrix entries in row-major order.
void write_channel_dump(std::ostream& os, int trial,
                        const FadingRealization& fading);

}  // namespace mimosim

#endif
