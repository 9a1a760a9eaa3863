#pragma once

#include <vector>

namespace biphoton {

struct PolingDesign;

// Linearized phase mismatch about the degenerate point:
//   dk(nu_s, nu_i) = delta*(nu_s - nu_i) + eps*(nu_s + nu_i)
// delta is the group-velocity-mismatch coefficient (s/m), eps the
// residual common-mode term (zero at extended phase matching).
struct DispersionModel {
    double delta = 0;  // s/m
    double eps = 0;    // s/m

    double mismatch(double nu_s, double nu_i) const {
        return delta * (nu_s - nu_i) + eps * (nu_s + nu_i);
    }
};

struct DfgScan {
    std::vector<double> wavelength_nm;  // probe wavelength
    std::vector<double> intensity;      // peak-normalized
    double fwhm_nm = 0;                 // interpolated intensity FWHM
};

// Classical difference-frequency tuning curve: probe detuned by +nu plays
// the idler, signal sits at -nu, pump fixed at degeneracy.
DfgScan dfg_scan(const PolingDesign& poling, const DispersionModel& model,
                 double center_nm, double range_nm, int points);

// Find delta such that the DFG intensity FWHM equals target_fwhm_nm.
// Relative tolerance 1e-4; throws CalibrationError if no bracket is found.
double calibrate_gvm(double target_fwhm_nm, const PolingDesign& poling,
                     double center_nm);

struct TimeBandwidth {
    double bandwidth_thz = 0;    // frequency-domain FWHM
    double duration_ps = 0;      // transform-limited Gaussian FWHM
};

// Gaussian transform-limit check: dF = c*dLambda/lambda^2, dT = (2ln2/pi)/dF.
TimeBandwidth time_bandwidth_check(double fwhm_nm, double center_nm);

}  // namespace biphoton
