#include "biphoton/grid.hpp"

#include <cmath>
#include <stdexcept>

#include "biphoton/constants.hpp"

namespace biphoton {

double detuning_from_wavelength(double wavelength_nm, double center_nm) {
    if (wavelength_nm <= 0 || center_nm <= 0)
        throw std::invalid_argument("wavelengths must be positive");
    const double wl = wavelength_nm * 1e-9;
    const double wc = center_nm * 1e-9;
    return kTwoPi * kSpeedOfLight * (1.0 / wl - 1.0 / wc);
}

double wavelength_from_detuning(double detuning, double center_nm) {
    if (center_nm <= 0) throw std::invalid_argument("center wavelength must be positive");
    const double inv = detuning / (kTwoPi * kSpeedOfLight) + 1.0 / (center_nm * 1e-9);
    if (inv <= 0) throw std::range_error("detuning beyond zero frequency");
    return 1e9 / inv;
}

FrequencyGrid build_grid(double center_nm, double span_nm, int points) {
    if (points < 2) throw std::invalid_argument("grid needs at least 2 points");
    if (span_nm <= 0 || span_nm >= 2 * center_nm)
        throw std::invalid_argument("grid span must be positive and below twice the center");

    FrequencyGrid g;
    g.center_nm = center_nm;
    g.span_nm = span_nm;
    g.points = points;

    const double lo = detuning_from_wavelength(center_nm + span_nm / 2, center_nm);
    const double hi = detuning_from_wavelength(center_nm - span_nm / 2, center_nm);
    g.step = (hi - lo) / (points - 1);
    g.detuning.resize(points);
    g.wavelength_nm.resize(points);
    for (int i = 0; i < points; ++i) {
        g.detuning[i] = lo + i * g.step;
        g.wavelength_nm[i] = wavelength_from_detuning(g.detuning[i], center_nm);
    }
    g.detuning.front() = lo;
    g.detuning.back() = hi;
    return g;
}

}  // namespace biphoton
