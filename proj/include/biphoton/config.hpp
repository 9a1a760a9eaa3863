#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "biphoton/dispersion.hpp"
#include "biphoton/grid.hpp"
#include "biphoton/poling.hpp"
#include "biphoton/pump.hpp"
#include "biphoton/spectrometer.hpp"

namespace biphoton {

// Hierarchical key=value configuration ("section.key = value", '#' comments).
struct ConfigMap {
    std::map<std::string, std::string> values;
    std::vector<std::string> warnings;  // unknown keys in lenient mode

    bool has(const std::string& key) const;
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    void set(const std::string& key, const std::string& value);
};

ConfigMap parse_config(std::istream& is, bool lenient);
ConfigMap load_config(const std::string& path, bool lenient);

// Fully resolved scenario: grid, pump, poling, calibrated dispersion,
// spectrometer settings and Monte Carlo parameters.
struct Scenario {
    FrequencyGrid grid;
    PumpSpectrum pump;
    PolingDesign poling;
    ApodizationOptions apod;
    double poling_period_um = 46.1;   // nominal, as configured
    double poling_length_mm = 18.0;
    DispersionModel model;
    SpectrometerConfig spectro;
    long long pairs = 1000000;
    std::uint64_t seed = 12345;
    double dfg_target_nm = 2.2;
    std::string out_dir = ".";

    // HOM scan controls
    double hom_span_ps = 16.0;
    int hom_points = 161;
    double hom_filter_nm = 0;
    long long hom_pairs_per_delay = 0;

    static Scenario resolve(const ConfigMap& cfg);

    // Every key with its resolved value; a valid config reproducing this
    // scenario exactly (used for artifact sidecars).
    std::string resolved_text() const;
};

}  // namespace biphoton
