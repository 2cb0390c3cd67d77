#include "mimosim/phy.hpp"

namespace mimosim {

PpsnrGrid mmse_ppsnr(const SubcarrierChannels& desired,
                     const SubcarrierChannels& interferer, int m1, int m2,
                     double noise_power) {
  if (desired.empty())
    throw std::invalid_argument("mmse_ppsnr: no subcarriers");
  if (m2 > 0 && interferer.size() != desired.size())
    throw std::invalid_argument("mmse_ppsnr: subcarrier count mismatch");

  const int nc = static_cast<int>(desired.size());
  PpsnrGrid grid(nc, m1);
  static const ComplexMatrix empty;
  for (int i = 0; i < nc; ++i) {
    const ComplexMatrix& gi = (m2 > 0) ? interferer[i] : empty;
    grid.row(i) = mmse_ppsnr_subcarrier(desired[i], gi, m1, m2, noise_power)
                      .transpose();
  }
  return grid;
}

}  // namespace mimosim
