#pragma once

#include <span>
#include <vector>

namespace biphoton {

enum class PumpShape { gaussian, aperture_clipped };

struct PumpSpectrum {
    double center_nm = 791.0;
    double fwhm_nm = 0.95;            // intensity FWHM in wavelength
    PumpShape shape = PumpShape::gaussian;
    double cutoff_half_width_nm = 0;  // aperture_clipped only

    // Intensity-FWHM bandwidth in angular frequency, rad/s.
    double bandwidth_omega() const;

    void validate() const;  // throws std::invalid_argument
};

// Amplitude at pump detuning nu (rad/s about 2*pi*c/center_nm).
// Normalized to 1 at nu = 0.
double pump_amplitude(const PumpSpectrum& pump, double nu);

void pump_amplitude_batch(const PumpSpectrum& pump, std::span<const double> nu,
                          std::span<double> out);

}  // namespace biphoton
