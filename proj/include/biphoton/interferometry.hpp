#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "biphoton/jsa.hpp"

namespace biphoton {

struct HomScan {
    std::vector<double> delay_ps;
    std::vector<double> probability;  // coincidence probability (or counts)
    double baseline = 0.5;            // far-from-dip level of `probability`
};

// Hong-Ou-Mandel coincidence probability versus relative delay:
//   P(tau) = 1/2 * (1 - Re sum f(s,i) conj(f(i,s)) e^{i (nu_i - nu_s) tau})
HomScan hom_scan(const JointSpectralAmplitude& jsa, std::span<const double> delay_ps);

HomScan hom_scan(const JointSpectralAmplitude& jsa, double span_ps, int points);

struct HomVisibility {
    double v_raw = 0;        // (max - min) / (max + min) from raw samples
    double v_fit = 0;        // Gaussian dip fit
    double ci95 = 0;         // 95% confidence half-width on v_fit
    double dip_fwhm_ps = 0;
    double dip_center_ps = 0;
    double residual_rms = 0;  // fit residual RMS / baseline
};

// Fit b*(1 - V*exp(-(tau-t0)^2/(2 sigma^2))). Throws std::range_error when
// the scan does not extend at least 3 fitted FWHM past the dip center.
HomVisibility visibility(const HomScan& scan);

// Exchange-symmetry overlap O = Re sum f(s,i) conj(f(i,s)) step^2 in [.,1];
// ideal dip visibility V = O / (2 - O).
double exchange_overlap(const JointSpectralAmplitude& jsa);

// Ideal visibility degraded by polarization leakage (probability l per
// photon) and a beamsplitter of reflectance R:
//   V = V_ideal * [2RT/(R^2+T^2)] * (1 - 2l),  T = 1 - R.
double imperfect_visibility(const JointSpectralAmplitude& jsa, double leakage,
                            double reflectance);

// Replace probabilities with Poisson counts at pairs_per_delay * P(tau).
HomScan add_shot_noise(const HomScan& scan, long long pairs_per_delay,
                       std::uint64_t seed);

struct Autocorrelation {
    std::vector<double> delay_ps;
    std::vector<double> envelope;      // normalized field autocorrelation
    double envelope_fwhm_ps = 0;
    double duration_fwhm_ps = 0;       // envelope FWHM / 2 (Gaussian convention)
    double implied_bandwidth_nm = 0;   // transform-limit width at center_nm
    bool unresolved = false;           // spectrum too narrow for the window
};

// |sum S(nu) e^{i nu tau}| / sum S(nu) for a marginal spectrum S >= 0.
Autocorrelation field_autocorrelation(std::span<const double> nu,
                                      std::span<const double> spectrum,
                                      double center_nm);

struct EntanglementWitness {
    double ratio = 0;       // marginal FWHM / phase-matching FWHM
    bool entangled = false; // ratio exceeds the threshold
};

// Spectral-width witness: a marginal much broader than the phase-matching
// bandwidth cannot come from a separable state.
EntanglementWitness entanglement_witness(double marginal_fwhm_nm,
                                         double phase_matching_fwhm_nm,
                                         double threshold = 2.0);

}  // namespace biphoton
