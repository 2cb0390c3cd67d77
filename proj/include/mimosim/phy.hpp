#ifndef MIMOSIM_PHY_HPP
#define MIMOSIM_PHY_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

namespace mimosim {

using ComplexMatrix = Eigen::MatrixXcd;
// One channel matrix per subcarrier; column m is the channel of stream m.
using SubcarrierChannels = std::vector<ComplexMatrix>;
// Linear-scale post-processing SINR, (subcarrier, stream).
using PpsnrGrid = Eigen::ArrayXXd;

/// Interference-plus-noise covariance seen by one desired stream: the other
/// desired streams at power 1/m1 each, the interferer's streams at power
/// 1/m2 each, plus the noise floor on the diagonal.
template <typename DerivedD, typename DerivedI>
Eigen::MatrixXcd mmse_covariance(const Eigen::MatrixBase<DerivedD>& desired,
                                 const Eigen::MatrixBase<DerivedI>& interferer,
                                 Eigen::Index m1, Eigen::Index m2,
                                 Eigen::Index stream, double noise_power) {
  const Eigen::Index n = desired.rows();
  Eigen::MatrixXcd cov = noise_power * Eigen::MatrixXcd::Identity(n, n);
  for (Eigen::Index l = 0; l < m1; ++l) {
    if (l == stream) continue;
    cov.noalias() += desired.col(l) * desired.col(l).adjoint() / double(m1);
  }
  for (Eigen::Index l = 0; l < m2; ++l) {
    cov.noalias() += interferer.col(l) * interferer.col(l).adjoint() / double(m2);
  }
  return cov;
}

/// MMSE post-processing SINR of each desired stream on one subcarrier.
///
/// `desired` carries the desired link's channel, `interferer` the concurrent
/// link's (ignored when m2 == 0; may then be empty). Stream l of either link
/// transmits on column l with its power scaled by 1/m1 (resp. 1/m2). For
/// every desired stream the linear MMSE receive vector is formed against the
/// covariance above, and the SINR is signal power over residual noise power.
template <typename DerivedD, typename DerivedI>
Eigen::VectorXd mmse_ppsnr_subcarrier(const Eigen::MatrixBase<DerivedD>& desired,
                                      const Eigen::MatrixBase<DerivedI>& interferer,
                                      Eigen::Index m1, Eigen::Index m2,
                                      double noise_power) {
  const Eigen::Index n = desired.rows();
  if (m1 < 1 || m2 < 0 || m1 > desired.cols())
    throw std::invalid_argument("mmse_ppsnr: invalid stream counts");
  if (m1 + m2 > n)
    throw std::invalid_argument("mmse_ppsnr: m1 + m2 exceeds antenna count");
  if (m2 > 0 && (interferer.rows() != n || interferer.cols() < m2))
    throw std::invalid_argument("mmse_ppsnr: interferer dimension mismatch");
  if (!(noise_power > 0.0))
    throw std::invalid_argument("mmse_ppsnr: noise power must be positive");

  Eigen::VectorXd gamma(m1);
  for (Eigen::Index m = 0; m < m1; ++m) {
    const Eigen::MatrixXcd cov =
        mmse_covariance(desired, interferer, m1, m2, m, noise_power);
    Eigen::LLT<Eigen::MatrixXcd> llt(cov);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("mmse_ppsnr: covariance not positive definite");
    const Eigen::VectorXcd h = desired.col(m);
    const Eigen::VectorXcd w = std::sqrt(1.0 / double(m1)) * llt.solve(h);
    const std::complex<double> gain = w.dot(h);        // w^H h
    const double residual = std::real(w.dot(cov * w)); // w^H C w
    gamma[m] = std::norm(gain) / (double(m1) * residual);
  }
  return gamma;
}

/// Post-processing SINR over all subcarriers of one link facing at most one
/// interfering link. Pass an empty `interferer` together with m2 == 0 for an
/// interference-free evaluation.
PpsnrGrid mmse_ppsnr(const SubcarrierChannels& desired,
                     const SubcarrierChannels& interferer, int m1, int m2,
                     double noise_power);

/// Same computation fed with estimated channel matrices; the receiver has no
/// separate code path for imperfect estimates.
inline PpsnrGrid mmse_ppsnr_estimated(const SubcarrierChannels& desired_est,
                                      const SubcarrierChannels& interferer_est,
                                      int m1, int m2, double noise_power) {
  return mmse_ppsnr(desired_est, interferer_est, m1, m2, noise_power);
}

}  // namespace mimosim

#endif
