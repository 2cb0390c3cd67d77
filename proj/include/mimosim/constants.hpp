#ifndef MIMOSIM_CONSTANTS_HPP
#define MIMOSIM_CONSTANTS_HPP

#include <cmath>

namespace mimosim {

// OFDM air interface
inline constexpr int n_antennas = 4;       // per node, Tx and Rx
inline constexpr int n_subcarriers = 64;
inline constexpr double bandwidth_hz = 20e6;
inline constexpr double guard_fraction = 0.25;
inline constexpr double symbol_duration_s =
    (n_subcarriers / bandwidth_hz) * (1.0 + guard_fraction);  // 4 us

// Link budget (all powers handled in milliwatts)
inline constexpr double tx_power_dbm = 25.0;       // per node, whole band
inline constexpr double noise_power_dbm = -113.0;  // per subcarrier

// MAC payload unit
inline constexpr int mdu_bytes = 100;

// Tap-delay-line fading model
inline constexpr int n_taps = 8;             // time-domain paths (L_max)
inline constexpr double tap_decay_db = 20.0; // last tap relative to first

// Topology
inline constexpr double box_side_m = 200.0;
inline constexpr double min_node_separation_m = 0.1;

// Simplified path loss model
inline constexpr double path_loss_ref_m = 1.0;   // d0
inline constexpr double wavelength_m = 0.125;
inline constexpr double path_loss_exponent = 3.0;

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

inline const double noise_power_mw = dbm_to_mw(noise_power_dbm);

// The node's 25 dBm budget is spread evenly over the subcarriers; the
// per-stream 1/M split happens inside the PPSNR math. Channel matrices carry
// this factor together with path loss, so no power symbol appears downstream.
inline const double tx_power_per_subcarrier_mw =
    dbm_to_mw(tx_power_dbm) / n_subcarriers;

}  // namespace mimosim

#endif
