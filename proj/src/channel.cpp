#include "mimosim/channel.hpp"

#include <cmath>
#include <complex>
#include <ostream>
#include <stdexcept>

#include "mimosim/rng.hpp"

namespace mimosim {

namespace {

constexpr std::uint64_t fading_salt = 0xFAD1;
constexpr std::uint64_t estimation_salt = 0xE571;

}  // namespace

Topology random_topology(std::uint64_t seed) {
  auto rng = make_rng(substream(seed, 0x7090));
  std::uniform_real_distribution<double> coord(0.0, box_side_m);
  Topology topo;
  while (true) {
    std::array<Eigen::Vector2d, 4> pts;
    for (auto& p : pts) p = {coord(rng), coord(rng)};
    bool ok = true;
    for (int i = 0; i < 4 && ok; ++i)
      for (int j = i + 1; j < 4; ++j)
        if ((pts[i] - pts[j]).norm() < min_node_separation_m) {
          ok = false;
          break;
        }
    if (ok) {
      topo.tx = {pts[0], pts[1]};
      topo.rx = {pts[2], pts[3]};
      return topo;
    }
  }
}

Topology representative_topology(char variant) {
  Topology topo;
  topo.tx[0] = {0.0, 0.0};
  topo.rx[0] = {150.0, 0.0};
  if (variant == 'a') {
    topo.tx[1] = {0.0, 5.0};
    topo.rx[1] = {150.0, 5.0};
  } else if (variant == 'b') {
    topo.tx[1] = {150.0, 5.0};
    topo.rx[1] = {0.0, 5.0};
  } else {
    throw std::invalid_argument("representative_topology: variant must be 'a' or 'b'");
  }
  return topo;
}

double path_loss_gain(double dist_m) {
  const double d = std::max(dist_m, path_loss_ref_m);
  const double ref = wavelength_m / (4.0 * M_PI * path_loss_ref_m);
  return ref * ref * std::pow(path_loss_ref_m / d, path_loss_exponent);
}

std::vector<double> exponential_pdp(int taps) {
  if (taps < 1) throw std::invalid_argument("exponential_pdp: taps must be >= 1");
  std::vector<double> pdp(taps);
  if (taps == 1) {
    pdp[0] = 1.0;
    return pdp;
  }
  const double ratio = std::pow(10.0, -tap_decay_db / (10.0 * (taps - 1)));
  double sum = 0.0;
  for (int l = 0; l < taps; ++l) {
    pdp[l] = std::pow(ratio, l);
    sum += pdp[l];
  }
  for (auto& p : pdp) p /= sum;
  return pdp;
}

FadingRealization draw_fading(const Topology& topo, std::uint64_t frame_id,
                              std::uint64_t seed, int taps) {
  const std::vector<double> pdp = exponential_pdp(taps);
  FadingRealization out;
  out.frame_id = frame_id;

  for (int k = 0; k < 2; ++k) {
    for (int l = 0; l < 2; ++l) {
      auto rng = make_rng(substream(seed, fading_salt, frame_id, k, l));
      const double scale =
          std::sqrt(path_loss_gain(topo.distance(k, l)) * tx_power_per_subcarrier_mw);

      std::vector<ComplexMatrix> tap_gains(taps);
      for (int t = 0; t < taps; ++t) {
        tap_gains[t].resize(n_antennas, n_antennas);
        const double amp = std::sqrt(pdp[t]);
        for (int c = 0; c < n_antennas; ++c)
          for (int r = 0; r < n_antennas; ++r)
            tap_gains[t](r, c) = amp * complex_gaussian(rng);
      }

      SubcarrierChannels& freq = out.channels[k][l];
      freq.assign(n_subcarriers, ComplexMatrix::Zero(n_antennas, n_antennas));
      for (int i = 0; i < n_subcarriers; ++i) {
        for (int t = 0; t < taps; ++t) {
          const double phase = -2.0 * M_PI * double(i) * double(t) / n_subcarriers;
          freq[i] += std::polar(1.0, phase) * tap_gains[t];
        }
        freq[i] *= scale;
      }
    }
  }
  return out;
}

FadingRealization estimate_channel(const FadingRealization& truth,
                                   const EstimationConfig& cfg,
                                   std::uint64_t seed) {
  if (cfg.n_training < 1 || cfg.l_max < 1 || cfg.l_max > n_subcarriers)
    throw std::invalid_argument("estimate_channel: invalid estimation config");
  const double err_amp = std::sqrt(cfg.error_variance());

  FadingRealization est;
  est.frame_id = truth.frame_id;
  for (int k = 0; k < 2; ++k) {
    for (int l = 0; l < 2; ++l) {
      auto rng = make_rng(substream(seed, estimation_salt, truth.frame_id, k, l));
      const SubcarrierChannels& src = truth.channels[k][l];
      SubcarrierChannels& dst = est.channels[k][l];
      dst.resize(src.size());
      for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = src[i];
        for (int c = 0; c < dst[i].cols(); ++c)
          for (int r = 0; r < dst[i].rows(); ++r)
            dst[i](r, c) += err_amp * complex_gaussian(rng);
      }
    }
  }
  return est;
}

void write_channel_dump(std::ostream& os, int trial,
                        const FadingRealization& fading) {
  for (int k = 0; k < 2; ++k) {
    for (int l = 0; l < 2; ++l) {
      const SubcarrierChannels& freq = fading.channels[k][l];
      for (std::size_t i = 0; i < freq.size(); ++i) {
        os << trial << ',' << fading.frame_id << ',' << (k + 1) << ','
           << (l + 1) << ',' << i;
        for (int r = 0; r < freq[i].rows(); ++r)
          for (int c = 0; c < freq[i].cols(); ++c) {
            const std::complex<double> v = freq[i](r, c);
            os << ',' << v.real() << ',' << v.imag();
          }
        os << '\n';
      }
    }
  }
}

}  // namespace mimosim
