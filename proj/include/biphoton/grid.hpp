#pragma once

#include <vector>

namespace biphoton {

// Angular-frequency detuning relative to 2*pi*c/center_wavelength, rad/s.
double detuning_from_wavelength(double wavelength_nm, double center_nm);
double wavelength_from_detuning(double detuning, double center_nm);

// Uniform detuning grid. Endpoints sit at center +- span/2 in wavelength,
// interior points are equally spaced in detuning (not in wavelength).
struct FrequencyGrid {
    double center_nm = 0;
    double span_nm = 0;
    int points = 0;
    double step = 0;                     // detuning spacing, rad/s
    std::vector<double> detuning;        // ascending, rad/s
    std::vector<double> wavelength_nm;   // matching wavelengths (descending)
};

FrequencyGrid build_grid(double center_nm, double span_nm, int points);

}  // namespace biphoton
