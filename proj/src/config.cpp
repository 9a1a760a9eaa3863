#include "biphoton/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "biphoton/csv.hpp"
#include "biphoton/errors.hpp"

namespace biphoton {

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "grid.center_nm", "grid.span_nm", "grid.points",
        "pump.center_nm", "pump.fwhm_nm", "pump.shape", "pump.cutoff_nm",
        "poling.design", "poling.period_um", "poling.length_mm",
        "poling.duty_min", "poling.duty_max", "poling.envelope_edge",
        "dispersion.dfg_target_nm", "dispersion.delta", "dispersion.eps",
        "spectrometer.variant", "spectrometer.dispersion_ns_nm",
        "spectrometer.insertion_loss_db", "spectrometer.efficiency",
        "spectrometer.jitter_fwhm_ps", "spectrometer.dark_rate_hz",
        "spectrometer.rep_period_ns", "spectrometer.bin_width_ps",
        "spectrometer.reference_nm", "spectrometer.signal_pre_delay_ns",
        "spectrometer.splitter_loss_db", "spectrometer.integration_time_s",
        "spectrometer.offset_ps", "spectrometer.window_nm",
        "mc.pairs", "mc.seed", "mc.rng",
        "hom.span_ps", "hom.points", "hom.filter_nm", "hom.pairs_per_delay",
        "out.dir",
    };
    return keys;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

bool ConfigMap::has(const std::string& key) const { return values.count(key) != 0; }

std::string ConfigMap::get(const std::string& key, const std::string& fallback) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    try {
        size_t used = 0;
        const double v = std::stod(it->second, &used);
        if (trim(it->second.substr(used)).empty()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("config key " + key + " is not a number: " + it->second);
}

long long ConfigMap::get_int(const std::string& key, long long fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    try {
        size_t used = 0;
        const long long v = std::stoll(it->second, &used);
        if (trim(it->second.substr(used)).empty()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("config key " + key + " is not an integer: " + it->second);
}

void ConfigMap::set(const std::string& key, const std::string& value) {
    values[key] = value;
}

ConfigMap parse_config(std::istream& is, bool lenient) {
    ConfigMap cfg;
    std::string line;
    long line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + " has no '='");
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config line " + std::to_string(line_no) + " is incomplete");
        if (!known_keys().count(key)) {
            if (!lenient) throw ConfigError("unknown config key: " + key);
            cfg.warnings.push_back("ignoring unknown config key: " + key);
            continue;
        }
        cfg.values[key] = value;
    }
    return cfg;
}

ConfigMap load_config(const std::string& path, bool lenient) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config file: " + path);
    return parse_config(is, lenient);
}

Scenario Scenario::resolve(const ConfigMap& cfg) {
    Scenario sc;
    sc.grid = build_grid(cfg.get_double("grid.center_nm", 1582.0),
                         cfg.get_double("grid.span_nm", 20.0),
                         static_cast<int>(cfg.get_int("grid.points", 512)));

    sc.pump.center_nm = cfg.get_double("pump.center_nm", sc.grid.center_nm / 2);
    sc.pump.fwhm_nm = cfg.get_double("pump.fwhm_nm", 0.95);
    const std::string shape = cfg.get("pump.shape", "gaussian");
    if (shape == "gaussian")
        sc.pump.shape = PumpShape::gaussian;
    else if (shape == "aperture_clipped")
        sc.pump.shape = PumpShape::aperture_clipped;
    else
        throw ConfigError("pump.shape must be gaussian or aperture_clipped");
    sc.pump.cutoff_half_width_nm = cfg.get_double("pump.cutoff_nm", 0.0);
    sc.pump.validate();

    const std::string design = cfg.get("poling.design", "apodized");
    const double period_um = cfg.get_double("poling.period_um", 46.1);
    const double length_mm = cfg.get_double("poling.length_mm", 18.0);
    sc.poling_period_um = period_um;
    sc.poling_length_mm = length_mm;
    sc.apod.duty_min = cfg.get_double("poling.duty_min", 0.1);
    sc.apod.duty_max = cfg.get_double("poling.duty_max", 0.9);
    sc.apod.envelope_edge = cfg.get_double("poling.envelope_edge", 0.05);
    if (design == "apodized") {
        sc.poling = apodized_poling(period_um, length_mm, sc.apod);
    } else if (design == "uniform") {
        sc.poling = uniform_poling(period_um, length_mm);
    } else {
        throw ConfigError("poling.design must be apodized or uniform");
    }

    sc.dfg_target_nm = cfg.get_double("dispersion.dfg_target_nm", 2.2);
    if (cfg.has("dispersion.delta"))
        sc.model.delta = cfg.get_double("dispersion.delta", 0.0);
    else
        sc.model.delta = calibrate_gvm(sc.dfg_target_nm, sc.poling, sc.grid.center_nm);
    sc.model.eps = cfg.get_double("dispersion.eps", 0.0);

    const std::string variant = cfg.get("spectrometer.variant", "fiber");
    if (variant == "fiber")
        sc.spectro = SpectrometerConfig::fiber();
    else if (variant == "dcm")
        sc.spectro = SpectrometerConfig::dcm();
    else
        throw ConfigError("spectrometer.variant must be fiber or dcm");
    sc.spectro.dispersion_ns_per_nm =
        cfg.get_double("spectrometer.dispersion_ns_nm", sc.spectro.dispersion_ns_per_nm);
    sc.spectro.insertion_loss_db =
        cfg.get_double("spectrometer.insertion_loss_db", sc.spectro.insertion_loss_db);
    sc.spectro.detector_efficiency =
        cfg.get_double("spectrometer.efficiency", sc.spectro.detector_efficiency);
    sc.spectro.jitter_fwhm_ps =
        cfg.get_double("spectrometer.jitter_fwhm_ps", sc.spectro.jitter_fwhm_ps);
    sc.spectro.dark_rate_hz = cfg.get_double("spectrometer.dark_rate_hz", sc.spectro.dark_rate_hz);
    sc.spectro.rep_period_ns =
        cfg.get_double("spectrometer.rep_period_ns", sc.spectro.rep_period_ns);
    sc.spectro.bin_width_ps = cfg.get_double("spectrometer.bin_width_ps", sc.spectro.bin_width_ps);
    sc.spectro.reference_nm = cfg.get_double("spectrometer.reference_nm", sc.grid.center_nm);
    sc.spectro.signal_pre_delay_ns =
        cfg.get_double("spectrometer.signal_pre_delay_ns", sc.spectro.signal_pre_delay_ns);
    sc.spectro.splitter_loss_db =
        cfg.get_double("spectrometer.splitter_loss_db", sc.spectro.splitter_loss_db);
    sc.spectro.integration_time_s =
        cfg.get_double("spectrometer.integration_time_s", sc.spectro.integration_time_s);
    sc.spectro.offset_ps = cfg.get_double("spectrometer.offset_ps", sc.spectro.offset_ps);
    sc.spectro.window_nm = cfg.get_double("spectrometer.window_nm", sc.spectro.window_nm);
    sc.spectro.validate();

    sc.pairs = cfg.get_int("mc.pairs", 1000000);
    if (sc.pairs <= 0 || sc.pairs > 100000000)
        throw ConfigError("mc.pairs must lie in [1, 1e8]");
    sc.seed = static_cast<std::uint64_t>(cfg.get_int("mc.seed", 12345));

    sc.hom_span_ps = cfg.get_double("hom.span_ps", 16.0);
    sc.hom_points = static_cast<int>(cfg.get_int("hom.points", 161));
    sc.hom_filter_nm = cfg.get_double("hom.filter_nm", 0.0);
    sc.hom_pairs_per_delay = cfg.get_int("hom.pairs_per_delay", 0);
    sc.out_dir = cfg.get("out.dir", ".");
    return sc;
}

std::string Scenario::resolved_text() const {
    std::ostringstream os;
    auto put = [&](const std::string& k, const std::string& v) { os << k << " = " << v << "\n"; };
    auto putd = [&](const std::string& k, double v) { put(k, format_double(v)); };

    putd("grid.center_nm", grid.center_nm);
    putd("grid.span_nm", grid.span_nm);
    put("grid.points", std::to_string(grid.points));
    putd("pump.center_nm", pump.center_nm);
    putd("pump.fwhm_nm", pump.fwhm_nm);
    put("pump.shape", pump.shape == PumpShape::gaussian ? "gaussian" : "aperture_clipped");
    if (pump.shape == PumpShape::aperture_clipped)
        putd("pump.cutoff_nm", pump.cutoff_half_width_nm);
    put("poling.design", poling.kind);
    putd("poling.period_um", poling_period_um);
    putd("poling.length_mm", poling_length_mm);
    if (poling.kind == "apodized") {
        putd("poling.duty_min", apod.duty_min);
        putd("poling.duty_max", apod.duty_max);
        putd("poling.envelope_edge", apod.envelope_edge);
    }
    putd("dispersion.dfg_target_nm", dfg_target_nm);
    putd("dispersion.delta", model.delta);
    putd("dispersion.eps", model.eps);
    put("spectrometer.variant", spectro.variant);
    putd("spectrometer.dispersion_ns_nm", spectro.dispersion_ns_per_nm);
    putd("spectrometer.insertion_loss_db", spectro.insertion_loss_db);
    putd("spectrometer.efficiency", spectro.detector_efficiency);
    putd("spectrometer.jitter_fwhm_ps", spectro.jitter_fwhm_ps);
    putd("spectrometer.dark_rate_hz", spectro.dark_rate_hz);
    putd("spectrometer.rep_period_ns", spectro.rep_period_ns);
    putd("spectrometer.bin_width_ps", spectro.bin_width_ps);
    putd("spectrometer.reference_nm", spectro.reference_nm);
    putd("spectrometer.signal_pre_delay_ns", spectro.signal_pre_delay_ns);
    putd("spectrometer.splitter_loss_db", spectro.splitter_loss_db);
    putd("spectrometer.integration_time_s", spectro.integration_time_s);
    putd("spectrometer.offset_ps", spectro.offset_ps);
    putd("spectrometer.window_nm", spectro.window_nm);
    put("mc.pairs", std::to_string(pairs));
    put("mc.seed", std::to_string(seed));
    put("mc.rng", "mt19937_64");
    putd("hom.span_ps", hom_span_ps);
    put("hom.points", std::to_string(hom_points));
    putd("hom.filter_nm", hom_filter_nm);
    put("hom.pairs_per_delay", std::to_string(hom_pairs_per_delay));
    put("out.dir", out_dir);
    return os.str();
}

}  // namespace biphoton
