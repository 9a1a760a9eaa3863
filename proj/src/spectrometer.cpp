#include "biphoton/spectrometer.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "biphoton/constants.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/grid.hpp"

namespace biphoton {

namespace {

// Thin deterministic layer over mt19937_64: fixed-cost transforms so the
// draw sequence is stable regardless of library internals.
struct Rng {
    std::mt19937_64 eng;
    explicit Rng(std::uint64_t seed) : eng(seed) {}
    double uniform() { return (eng() >> 11) * 0x1.0p-53; }          // [0,1)
    double uniform_open() { return ((eng() >> 11) + 1) * 0x1.0p-53; }  // (0,1]
    double normal() {
        const double u1 = uniform_open();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    }
    long long poisson(double mean) {
        if (mean <= 0) return 0;
        if (mean > 50.0) {
            const double v = std::floor(mean + std::sqrt(mean) * normal() + 0.5);
            return v < 0 ? 0 : static_cast<long long>(v);
        }
        const double limit = std::exp(-mean);
        long long k = 0;
        double prod = uniform_open();
        while (prod > limit) {
            prod *= uniform_open();
            ++k;
        }
        return k;
    }
};

double fold(double t, double period) {
    t = std::fmod(t, period);
    if (t < 0) t += period;
    return t;
}

// Quantize to integer picoseconds (tagger resolution), staying in [0, period).
double quantize_fold(double t, double period) {
    t = std::floor(fold(t, period) + 0.5);
    if (t >= period) t -= period;
    return t;
}

int bin_of(double rel_ps, double bin_ps, int bins) {
    int b = static_cast<int>(rel_ps / bin_ps);
    return std::clamp(b, 0, bins - 1);
}

}  // namespace

SpectrometerConfig SpectrometerConfig::fiber() {
    SpectrometerConfig c;
    c.variant = "fiber";
    c.dispersion_ns_per_nm = 0.78;
    c.insertion_loss_db = 10.0;
    c.signal_pre_delay_ns = 0;
    c.splitter_loss_db = 0;
    return c;
}

SpectrometerConfig SpectrometerConfig::dcm() {
    SpectrometerConfig c;
    c.variant = "dcm";
    c.dispersion_ns_per_nm = 1.88;
    c.insertion_loss_db = 2.8;
    c.signal_pre_delay_ns = 11.7;
    c.splitter_loss_db = 3.0;
    c.window_nm = 6.6;
    return c;
}

double SpectrometerConfig::wavelength_resolution_nm() const {
    if (dispersion_ns_per_nm <= 0)
        throw ResolutionError("nonpositive dispersion gives no spectral resolution");
    return std::max(jitter_fwhm_ps, bin_width_ps) / (dispersion_ns_per_nm * 1000.0);
}

double SpectrometerConfig::survival() const {
    return detector_efficiency * std::pow(10.0, -insertion_loss_db / 10.0) *
           std::pow(10.0, -splitter_loss_db / 10.0);
}

void SpectrometerConfig::validate() const {
    if (dispersion_ns_per_nm <= 0) throw ResolutionError("dispersion must be positive");
    if (detector_efficiency <= 0 || detector_efficiency > 1)
        throw std::invalid_argument("detector efficiency must lie in (0, 1]");
    if (insertion_loss_db < 0 || splitter_loss_db < 0)
        throw std::invalid_argument("losses must be non-negative");
    if (jitter_fwhm_ps < 0) throw std::invalid_argument("jitter must be non-negative");
    if (rep_period_ns <= 0) throw std::invalid_argument("rep period must be positive");
    if (bin_width_ps <= 0 || bin_width_ps > rep_period_ns * 1000)
        throw std::invalid_argument("bin width must lie in (0, rep period]");
    if (window_nm <= 0) throw std::invalid_argument("window must be positive");
}

double arrival_time_ps(double wavelength_nm, const SpectrometerConfig& config,
                       char channel) {
    config.validate();
    const double disp_ps_per_nm = config.dispersion_ns_per_nm * 1000.0;
    const double pre = (channel == 'S') ? config.signal_pre_delay_ns * 1000.0 : 0.0;
    const double rep_ps = config.rep_period_ns * 1000.0;
    double t = std::fmod((wavelength_nm - config.reference_nm) * disp_ps_per_nm + pre +
                             config.offset_ps,
                         rep_ps);
    if (t < 0) t += rep_ps;
    return t;
}

HeraldingReport heralding_efficiency(double singles_signal, double singles_idler,
                                     double coincidences) {
    if (singles_signal <= 0 || singles_idler <= 0)
        throw std::invalid_argument("singles rates must be positive");
    if (coincidences < 0 || coincidences > std::min(singles_signal, singles_idler))
        throw std::invalid_argument("coincidences must lie in [0, min(singles)]");
    HeraldingReport r;
    r.eta_signal = coincidences / singles_idler;
    r.eta_idler = coincidences / singles_signal;
    r.system = std::sqrt(r.eta_signal * r.eta_idler);
    return r;
}

double CoincidenceHistogram::total() const {
    return std::accumulate(counts.begin(), counts.end(), 0.0);
}

SimulationResult simulate_spectrometer(const JointSpectralAmplitude& jsa,
                                       const SpectrometerConfig& config, long long pairs,
                                       std::uint64_t seed, bool emit_tags) {
    config.validate();
    if (pairs <= 0) throw std::invalid_argument("pair count must be positive");

    const int n = jsa.grid.points;
    const Eigen::MatrixXd inten = jsi(jsa);
    const double norm = inten.sum() * jsa.grid.step * jsa.grid.step;
    if (std::abs(norm - 1.0) > 1e-6)
        throw std::invalid_argument("joint amplitude is not normalized");

    // cumulative distribution over grid cells, row-major
    std::vector<double> cdf(static_cast<size_t>(n) * n);
    double acc = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) cdf[static_cast<size_t>(i) * n + j] = (acc += inten(i, j));
    if (acc <= 0) throw EmptyDataError("joint intensity is identically zero");
    for (auto& v : cdf) v /= acc;

    const double rep_ps = config.rep_period_ns * 1000.0;
    SimulationResult res;
    CoincidenceHistogram& h = res.histogram;
    h.bins = std::max(1, static_cast<int>(std::llround(rep_ps / config.bin_width_ps)));
    h.rep_period_ps = rep_ps;
    h.bin_width_ps = rep_ps / h.bins;
    h.counts.assign(static_cast<size_t>(h.bins) * h.bins, 0.0);
    h.pairs_generated = pairs;
    h.seed = seed;

    const double surv = config.survival();
    const double jitter_sigma = config.jitter_fwhm_ps / kFwhmPerSigma;
    const double disp_ps_per_nm = config.dispersion_ns_per_nm * 1000.0;
    const double pre_delay_ps = config.signal_pre_delay_ns * 1000.0;

    Rng rng(seed);
    const long long slot_stride = static_cast<long long>(std::llround(rep_ps));

    auto arrival = [&](double wavelength_nm, double extra_ps, double jitter_draw) {
        const double t = (wavelength_nm - config.reference_nm) * disp_ps_per_nm +
                         extra_ps + config.offset_ps + jitter_draw * jitter_sigma;
        return quantize_fold(t, rep_ps);
    };

    for (long long p = 0; p < pairs; ++p) {
        // fixed draw order keeps runs bit-identical in the seed
        const double u_cell = rng.uniform();
        const double u_ds = rng.uniform();
        const double u_di = rng.uniform();
        const double u_ss = rng.uniform();
        const double u_si = rng.uniform();
        const double g_s = rng.normal();
        const double g_i = rng.normal();

        const size_t cell =
            std::lower_bound(cdf.begin(), cdf.end(), u_cell) - cdf.begin();
        const int ci = static_cast<int>(std::min(cell, cdf.size() - 1));
        const int is = ci / n, ii = ci % n;
        const double nu_s = jsa.grid.detuning[is] + (u_ds - 0.5) * jsa.grid.step;
        const double nu_i = jsa.grid.detuning[ii] + (u_di - 0.5) * jsa.grid.step;
        const double wl_s = wavelength_from_detuning(nu_s, jsa.grid.center_nm);
        const double wl_i = wavelength_from_detuning(nu_i, jsa.grid.center_nm);

        const bool alive_s = u_ss < surv;
        const bool alive_i = u_si < surv;
        if (!alive_s && !alive_i) continue;

        const double t_s = arrival(wl_s, pre_delay_ps, g_s);
        const double t_i = arrival(wl_i, 0.0, g_i);

        if (alive_s && alive_i) {
            ++h.pairs_detected;
            h.at(bin_of(t_s, h.bin_width_ps, h.bins), bin_of(t_i, h.bin_width_ps, h.bins)) += 1.0;
        }
        if (emit_tags) {
            const long long slot = p * slot_stride;
            res.tags.push_back({'T', slot});
            if (alive_s) res.tags.push_back({'S', slot + static_cast<long long>(t_s)});
            if (alive_i) res.tags.push_back({'I', slot + static_cast<long long>(t_i)});
        }
    }

    if (config.integration_time_s > 0) {
        // dark-dark accidentals: two independent detectors firing in the
        // same rep slot, uniform in arrival time
        const double mean = config.dark_rate_hz * config.dark_rate_hz * (rep_ps * 1e-12) *
                            config.integration_time_s;
        h.dark_counts = rng.poisson(mean);
        for (long long d = 0; d < h.dark_counts; ++d) {
            const double t_s = std::floor(rng.uniform() * rep_ps);
            const double t_i = std::floor(rng.uniform() * rep_ps);
            h.at(bin_of(t_s, h.bin_width_ps, h.bins), bin_of(t_i, h.bin_width_ps, h.bins)) += 1.0;
            if (emit_tags) {
                const long long slot = (pairs + d) * slot_stride;
                res.tags.push_back({'T', slot});
                res.tags.push_back({'S', slot + static_cast<long long>(t_s)});
                res.tags.push_back({'I', slot + static_cast<long long>(t_i)});
            }
        }
    }
    return res;
}

JsiEstimate reconstruct_jsi(const CoincidenceHistogram& histogram,
                            const SpectrometerConfig& config) {
    if (histogram.bins <= 0 || histogram.total() <= 0)
        throw EmptyDataError("empty coincidence histogram");

    const int b = histogram.bins;
    int peak_s = 0, peak_i = 0;
    double best = -1;
    for (int s = 0; s < b; ++s)
        for (int i = 0; i < b; ++i)
            if (histogram.at(s, i) > best) {
                best = histogram.at(s, i);
                peak_s = s;
                peak_i = i;
            }

    const double nm_per_bin = histogram.bin_width_ps / (config.dispersion_ns_per_nm * 1000.0);
    JsiEstimate est;
    est.wavelength_nm.resize(b);
    est.intensity.resize(b, b);
    const int half = b / 2;
    for (int a = 0; a < b; ++a)
        est.wavelength_nm[a] = config.reference_nm + (a - half) * nm_per_bin;
    for (int a = 0; a < b; ++a)
        for (int c = 0; c < b; ++c) {
            const int s = ((peak_s + a - half) % b + b) % b;
            const int i = ((peak_i + c - half) % b + b) % b;
            est.intensity(a, c) = histogram.at(s, i);
        }
    return est;
}

CoincidenceHistogram rebin_histogram(const CoincidenceHistogram& histogram, int bins) {
    if (bins <= 0 || histogram.bins % bins != 0)
        throw std::invalid_argument("target bin count must divide the histogram bins");
    const int k = histogram.bins / bins;
    CoincidenceHistogram out = histogram;
    out.bins = bins;
    out.bin_width_ps = histogram.rep_period_ps / bins;
    out.counts.assign(static_cast<size_t>(bins) * bins, 0.0);
    for (int s = 0; s < histogram.bins; ++s)
        for (int i = 0; i < histogram.bins; ++i)
            out.counts[static_cast<size_t>(s / k) * bins + i / k] += histogram.at(s, i);
    return out;
}

Eigen::MatrixXd window_jsi(const JsiEstimate& estimate, double window_nm,
                           double reference_nm, int bins) {
    if (bins <= 0 || window_nm <= 0)
        throw std::invalid_argument("window and bin count must be positive");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(bins, bins);
    const int n = static_cast<int>(estimate.wavelength_nm.size());
    const double lo = reference_nm - window_nm / 2;
    auto slot = [&](int a) -> int {
        const double x = (estimate.wavelength_nm[a] - lo) / window_nm;
        if (x < 0 || x >= 1) return -1;
        return static_cast<int>(x * bins);
    };
    for (int s = 0; s < n; ++s) {
        const int bs = slot(s);
        if (bs < 0) continue;
        for (int i = 0; i < n; ++i) {
            const int bi = slot(i);
            if (bi >= 0) out(bs, bi) += estimate.intensity(s, i);
        }
    }
    return out;
}

std::vector<TimeTagRecord> read_time_tags(std::istream& is, bool lenient, IngestStats* stats) {
    std::vector<TimeTagRecord> tags;
    IngestStats st;
    std::string line;
    long line_no = 0;
    long long last[3] = {LLONG_MIN, LLONG_MIN, LLONG_MIN};
    while (std::getline(is, line)) {
        ++line_no;
        const auto start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;

        auto bad = [&](const char* why) {
            if (!lenient) throw ParseError(std::string("bad time tag: ") + why, line_no);
            ++st.malformed;
        };
        const auto comma = line.find(',', start);
        if (comma == std::string::npos) {
            bad("no comma");
            continue;
        }
        std::string chan = line.substr(start, comma - start);
        while (!chan.empty() && (chan.back() == ' ' || chan.back() == '\t')) chan.pop_back();
        if (chan.size() != 1 || (chan[0] != 'S' && chan[0] != 'I' && chan[0] != 'T')) {
            bad("channel must be S, I or T");
            continue;
        }
        long long ts;
        try {
            size_t used = 0;
            ts = std::stoll(line.substr(comma + 1), &used);
            std::string rest = line.substr(comma + 1);
            const auto tail = rest.find_first_not_of(" \t\r", used);
            if (tail != std::string::npos) {
                bad("trailing garbage after timestamp");
                continue;
            }
        } catch (const std::exception&) {
            bad("timestamp is not an integer");
            continue;
        }
        const int ch = chan[0] == 'S' ? 0 : chan[0] == 'I' ? 1 : 2;
        if (ts < last[ch])
            throw ParseError("time tags are not sorted within a channel", line_no);
        last[ch] = ts;
        if (ch == 2) ++st.triggers;
        tags.push_back({chan[0], ts});
        ++st.records;
    }
    if (stats) *stats = st;
    return tags;
}

void write_time_tags(std::ostream& os, const std::vector<TimeTagRecord>& tags,
                     const SpectrometerConfig& config) {
    os << "# time tags: channel,timestamp_ps\n";
    os << "# channels: S signal, I idler, T trigger\n";
    os << "# rep_period_ps " << std::llround(config.rep_period_ns * 1000.0) << "\n";
    for (const auto& t : tags) os << t.channel << ',' << t.timestamp_ps << '\n';
}

CoincidenceHistogram histogram_from_tags(const std::vector<TimeTagRecord>& tags,
                                         const SpectrometerConfig& config,
                                         IngestStats* stats) {
    config.validate();
    if (tags.empty()) throw EmptyDataError("no time tags");

    const double rep_ps = config.rep_period_ns * 1000.0;
    CoincidenceHistogram h;
    h.bins = std::max(1, static_cast<int>(std::llround(rep_ps / config.bin_width_ps)));
    h.rep_period_ps = rep_ps;
    h.bin_width_ps = rep_ps / h.bins;
    h.counts.assign(static_cast<size_t>(h.bins) * h.bins, 0.0);

    std::vector<long long> trigger_ts;
    for (const auto& t : tags)
        if (t.channel == 'T') trigger_ts.push_back(t.timestamp_ps);

    const long long rep_ll = std::max<long long>(1, std::llround(rep_ps));
    auto slot_start = [&](long long ts) -> long long {
        if (trigger_ts.empty()) {
            long long s = ts / rep_ll;
            if (ts < 0 && ts % rep_ll != 0) --s;  // floor for negatives
            return s * rep_ll;
        }
        auto it = std::upper_bound(trigger_ts.begin(), trigger_ts.end(), ts);
        long long base = (it == trigger_ts.begin()) ? trigger_ts.front() : *std::prev(it);
        if (ts < base) return base - rep_ll * ((base - ts + rep_ll - 1) / rep_ll);
        return base + rep_ll * ((ts - base) / rep_ll);
    };

    std::map<long long, std::pair<std::vector<double>, std::vector<double>>> slots;
    for (const auto& t : tags) {
        if (t.channel == 'T') continue;
        const long long start = slot_start(t.timestamp_ps);
        const double rel = static_cast<double>(t.timestamp_ps - start);
        auto& slot = slots[start];
        (t.channel == 'S' ? slot.first : slot.second).push_back(rel);
    }

    IngestStats st;
    st.records = static_cast<long long>(tags.size());
    st.triggers = static_cast<long long>(trigger_ts.size());
    for (const auto& [start, sv] : slots)
        for (double ts : sv.first)
            for (double ti : sv.second) {
                h.at(bin_of(ts, h.bin_width_ps, h.bins), bin_of(ti, h.bin_width_ps, h.bins)) += 1.0;
                ++st.pairs;
            }
    h.pairs_detected = st.pairs;
    if (stats) {
        stats->pairs = st.pairs;
        stats->triggers = st.triggers;
        if (stats->records == 0) stats->records = st.records;  // not pre-filled by read
    }
    return h;
}

}  // namespace biphoton
