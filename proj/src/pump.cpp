#include "biphoton/pump.hpp"

#include <cmath>
#include <stdexcept>

#include "biphoton/constants.hpp"

namespace biphoton {

double PumpSpectrum::bandwidth_omega() const {
    const double wl = center_nm * 1e-9;
    return kTwoPi * kSpeedOfLight * (fwhm_nm * 1e-9) / (wl * wl);
}

void PumpSpectrum::validate() const {
    if (center_nm <= 0) throw std::invalid_argument("pump center wavelength must be positive");
    if (fwhm_nm <= 0) throw std::invalid_argument("pump bandwidth must be positive");
    if (shape == PumpShape::aperture_clipped && cutoff_half_width_nm <= 0)
        throw std::invalid_argument("aperture-clipped pump needs a positive cutoff half-width");
}

double pump_amplitude(const PumpSpectrum& pump, double nu) {
    const double dw = pump.bandwidth_omega();
    // intensity FWHM dw  ->  amplitude exp(-2 ln2 nu^2 / dw^2)
    const double a = std::exp(-2.0 * kLn2 * nu * nu / (dw * dw));
    if (pump.shape == PumpShape::aperture_clipped) {
        const double wl = pump.center_nm * 1e-9;
        const double cut = kTwoPi * kSpeedOfLight * (pump.cutoff_half_width_nm * 1e-9) / (wl * wl);
        if (std::abs(nu) > cut) return 0.0;
    }
    return a;
}

void pump_amplitude_batch(const PumpSpectrum& pump, std::span<const double> nu,
                          std::span<double> out) {
    for (size_t i = 0; i < nu.size(); ++i) out[i] = pump_amplitude(pump, nu[i]);
}

}  // namespace biphoton
