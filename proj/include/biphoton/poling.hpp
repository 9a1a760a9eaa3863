#pragma once

#include <complex>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace biphoton {

// Ferroelectric domain pattern. Domains tile [0, length_m] exactly;
// adjacent domains always have opposite sign.
struct PolingDesign {
    std::string kind;                // "uniform" or "apodized"
    double period_m = 0;             // nominal QPM period
    double length_m = 0;             // crystal length
    std::vector<double> boundary_m;  // n+1 ascending, first 0, last length_m
    std::vector<int> sign;           // n entries, +1/-1 alternating
    std::vector<double> duty;        // nominal positive fraction per period

    int domain_count() const { return static_cast<int>(sign.size()); }
    double qpm_k() const;            // 2*pi/period
    bool mirror_symmetric(double tol = 1e-9) const;
    void validate() const;           // throws std::invalid_argument
};

struct ApodizationOptions {
    double duty_min = 0.1;
    double duty_max = 0.9;
    double envelope_edge = 0.05;  // target first-order amplitude at z=0, L
};

PolingDesign uniform_poling(double period_um, double length_mm);

// Gaussian-apodized duty-cycle design: per-period first-order amplitude
// tracks a Gaussian envelope via error-diffused duty quantization, with
// orientation flips carrying the tails below the sin(pi*duty_min) floor.
// Mirror symmetric about length/2 by construction.
PolingDesign apodized_poling(double period_um, double length_mm,
                             const ApodizationOptions& opt = {});

// Normalized exact domain-sum response at total mismatch k (rad/m):
//   phi(k) = (1/L) * sum_m sign_m * integral_{domain m} e^{i k z} dz
// Uniform 50:50 poling gives |phi(2*pi/period)| = 2/pi.
std::complex<double> phase_matching_amplitude(const PolingDesign& design, double k);

// Batch evaluation through the SIMD kernels. If centered, boundaries are
// referenced to length/2 so mirror-symmetric designs give real phi.
void phase_matching_batch(const PolingDesign& design, std::span<const double> k,
                          std::span<std::complex<double>> out, bool centered = false);

// Intensity FWHM of |phi|^2 in signal-idler detuning difference (rad/s),
// given the linearized mismatch slope delta (s/m).
double phase_matching_fwhm_nu(const PolingDesign& design, double delta);

// Plain-text domain table: header lines with period/length, then one line
// per domain "z_start_um z_end_um sign".
void save_domain_table(std::ostream& os, const PolingDesign& design);
PolingDesign load_domain_table(std::istream& is);

}  // namespace biphoton
