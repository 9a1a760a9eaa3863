#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "biphoton/jsa.hpp"

namespace biphoton {

// Dispersive single-photon spectrometer pair (fiber spool or dispersion
// compensation module) read out by time-tagged detection.
struct SpectrometerConfig {
    std::string variant = "fiber";      // "fiber" or "dcm"
    double dispersion_ns_per_nm = 0.78;
    double insertion_loss_db = 10.0;
    double detector_efficiency = 0.8;
    double jitter_fwhm_ps = 200.0;
    double dark_rate_hz = 400.0;
    double rep_period_ns = 12.5;
    double bin_width_ps = 10.0;
    double reference_nm = 1582.0;       // wavelength anchored to the histogram peak
    double signal_pre_delay_ns = 0;     // extra fixed delay on the signal arm
    double splitter_loss_db = 0;        // per-photon routing loss
    double integration_time_s = 0;      // > 0 enables dark counts
    double offset_ps = 0;               // common electronic offset
    double window_nm = 16.0;            // unambiguous reconstruction window

    static SpectrometerConfig fiber();
    static SpectrometerConfig dcm();

    // max(jitter_fwhm, bin_width) / dispersion, nm (binning floors the
    // resolution when jitter vanishes). Throws ResolutionError if
    // dispersion <= 0.
    double wavelength_resolution_nm() const;

    // Per-photon survival probability (efficiency and losses).
    double survival() const;

    void validate() const;
};

struct CoincidenceHistogram {
    int bins = 0;
    double rep_period_ps = 0;
    double bin_width_ps = 0;            // effective: rep_period / bins
    std::vector<double> counts;         // bins x bins, row-major [signal][idler]
    long long pairs_generated = 0;
    long long pairs_detected = 0;
    long long dark_counts = 0;
    std::uint64_t seed = 0;
    std::string rng = "mt19937_64";

    double& at(int s, int i) { return counts[static_cast<size_t>(s) * bins + i]; }
    double at(int s, int i) const { return counts[static_cast<size_t>(s) * bins + i]; }
    double bin_center_ps(int b) const { return (b + 0.5) * bin_width_ps; }
    double total() const;
};

// channel: 0 = signal, 1 = idler, 2 = trigger. Timestamps are integer ps.
struct TimeTagRecord {
    char channel = 'S';
    long long timestamp_ps = 0;
};

struct SimulationResult {
    CoincidenceHistogram histogram;
    std::vector<TimeTagRecord> tags;    // filled when emit_tags is set
};

// Monte Carlo: sample pairs from the JSI, map wavelength to arrival time
// through the dispersion, add Gaussian jitter and losses, quantize to 1 ps,
// fold into the rep period, histogram coincidences. Dark counts (uniform in
// the slot) are added when integration_time_s > 0. Deterministic in seed.
SimulationResult simulate_spectrometer(const JointSpectralAmplitude& jsa,
                                       const SpectrometerConfig& config,
                                       long long pairs, std::uint64_t seed,
                                       bool emit_tags = false);

// Deterministic detector arrival time for one photon of the given
// wavelength: (lambda - reference) * dispersion, plus the signal pre-delay
// for channel 'S' and the global offset, folded into [0, rep period).
double arrival_time_ps(double wavelength_nm, const SpectrometerConfig& config,
                       char channel = 'I');

// Klyshko heralding efficiencies from raw singles and coincidence counts.
struct HeraldingReport {
    double eta_signal = 0;  // coincidences / idler singles
    double eta_idler = 0;   // coincidences / signal singles
    double system = 0;      // geometric mean
};

HeraldingReport heralding_efficiency(double singles_signal, double singles_idler,
                                     double coincidences);

struct JsiEstimate {
    std::vector<double> wavelength_nm;  // idler == signal axis
    Eigen::MatrixXd intensity;          // counts, peak recentered on reference_nm
};

// Map a coincidence histogram back to a wavelength-wavelength intensity.
// The histogram peak is anchored at reference_nm (absolute delays drop out).
// Throws EmptyDataError if the histogram is all zero.
JsiEstimate reconstruct_jsi(const CoincidenceHistogram& histogram,
                            const SpectrometerConfig& config);

// Rebin a histogram onto fewer time bins (bins must divide evenly).
CoincidenceHistogram rebin_histogram(const CoincidenceHistogram& histogram, int bins);

// Reconstructed intensity cropped to a wavelength window around the
// reference and coarsened to bins x bins (noise-bias control before a
// Schmidt estimate).
Eigen::MatrixXd window_jsi(const JsiEstimate& estimate, double window_nm,
                           double reference_nm, int bins);

struct IngestStats {
    long long records = 0;
    long long malformed = 0;
    long long triggers = 0;
    long long pairs = 0;
};

// Time-tag text format: '#' comments, records "channel,timestamp_ps" with
// channel in {S, I, T}. Strict mode throws ParseError on malformed lines;
// lenient mode counts and skips them. Tags must be time-sorted per channel.
std::vector<TimeTagRecord> read_time_tags(std::istream& is, bool lenient,
                                          IngestStats* stats = nullptr);

void write_time_tags(std::ostream& os, const std::vector<TimeTagRecord>& tags,
                     const SpectrometerConfig& config);

// Pair signal/idler tags that fall in the same rep slot (explicit triggers
// when present, otherwise slots of rep_period) and histogram arrival times
// relative to the slot start.
CoincidenceHistogram histogram_from_tags(const std::vector<TimeTagRecord>& tags,
                                         const SpectrometerConfig& config,
                                         IngestStats* stats = nullptr);

}  // namespace biphoton
