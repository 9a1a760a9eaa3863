// biphoton: joint-spectrum design and measurement simulation CLI.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "biphoton/config.hpp"
#include "biphoton/constants.hpp"
#include "biphoton/csv.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/fit.hpp"
#include "biphoton/interferometry.hpp"
#include "biphoton/jsa.hpp"
#include "biphoton/spectrometer.hpp"

namespace fs = std::filesystem;
using namespace biphoton;

namespace {

struct GlobalArgs {
    std::string config_path;
    std::string out_dir;
    long long seed = -1;
    int grid_points = 0;
    double pump_fwhm_nm = 0;
    bool lenient = false;
};

Scenario make_scenario(const GlobalArgs& g,
                       const std::vector<std::pair<std::string, std::string>>& extra = {}) {
    ConfigMap cfg;
    if (!g.config_path.empty()) cfg = load_config(g.config_path, g.lenient);
    for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << "\n";
    if (g.seed >= 0) cfg.set("mc.seed", std::to_string(g.seed));
    if (g.grid_points > 0) cfg.set("grid.points", std::to_string(g.grid_points));
    if (g.pump_fwhm_nm > 0) cfg.set("pump.fwhm_nm", format_double(g.pump_fwhm_nm));
    if (!g.out_dir.empty()) cfg.set("out.dir", g.out_dir);
    for (const auto& [k, v] : extra) cfg.set(k, v);
    Scenario sc = Scenario::resolve(cfg);
    fs::create_directories(sc.out_dir);
    return sc;
}

std::string artifact(const Scenario& sc, const std::string& name) {
    return (fs::path(sc.out_dir) / name).string();
}

void write_histogram_csv(const Scenario& sc, const CoincidenceHistogram& h,
                         const std::string& path) {
    std::vector<double> centers(h.bins);
    for (int i = 0; i < h.bins; ++i) centers[i] = h.bin_center_ps(i);
    Eigen::MatrixXd m(h.bins, h.bins);
    for (int s = 0; s < h.bins; ++s)
        for (int i = 0; i < h.bins; ++i) m(s, i) = h.at(s, i);
    write_matrix_csv(path, centers, centers, m);
    write_sidecar(path, sc.resolved_text(),
                  {{"# pairs_detected", std::to_string(h.pairs_detected)},
                   {"# dark_counts", std::to_string(h.dark_counts)}});
}

void write_jsi_estimate_csv(const Scenario& sc, const JsiEstimate& est,
                            const std::string& path) {
    write_matrix_csv(path, est.wavelength_nm, est.wavelength_nm, est.intensity);
    write_sidecar(path, sc.resolved_text());
}

int cmd_design(const GlobalArgs& g, bool uniform, const std::string& out_name) {
    Scenario sc = make_scenario(
        g, uniform ? std::vector<std::pair<std::string, std::string>>{{"poling.design", "uniform"}}
                   : std::vector<std::pair<std::string, std::string>>{});
    const std::string path = artifact(sc, out_name.empty() ? "poling.txt" : out_name);
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    save_domain_table(os, sc.poling);
    write_sidecar(path, sc.resolved_text());
    std::printf("design %s: %d domains over %g mm, period %g um\n", sc.poling.kind.c_str(),
                sc.poling.domain_count(), sc.poling.length_m * 1e3, sc.poling.period_m * 1e6);
    return 0;
}

int cmd_dfg(const GlobalArgs& g, double range_nm, int points) {
    Scenario sc = make_scenario(g);
    if (range_nm <= 0) range_nm = std::max(6.0 * sc.dfg_target_nm, 4.0);
    DfgScan scan = dfg_scan(sc.poling, sc.model, sc.grid.center_nm, range_nm, points);
    const std::string path = artifact(sc, "dfg.csv");
    write_columns_csv(path, {"wavelength_nm", "intensity"},
                      {scan.wavelength_nm, scan.intensity});
    write_sidecar(path, sc.resolved_text());
    const auto fit = fit_gaussian_1d(scan.wavelength_nm, scan.intensity);
    std::printf("dfg: fwhm %.4f nm (target %.4f), gaussian fit residual rms %.4f%%\n",
                scan.fwhm_nm, sc.dfg_target_nm, 100.0 * fit.residual_rms);
    return 0;
}

int cmd_jsa(const GlobalArgs& g) {
    Scenario sc = make_scenario(g);
    const auto jsa_m = build_jsa(sc.grid, sc.pump, sc.poling, sc.model);
    for (const auto& n : jsa_m.notes) std::cerr << "warning: " << n << "\n";

    const Eigen::MatrixXd inten = jsi(jsa_m);
    const std::string path = artifact(sc, "jsi.csv");
    write_matrix_csv(path, sc.grid.wavelength_nm, sc.grid.wavelength_nm, inten);
    write_sidecar(path, sc.resolved_text());
    write_matrix_csv(artifact(sc, "jsa_re.csv"), sc.grid.wavelength_nm, sc.grid.wavelength_nm,
                     jsa_m.f.real());
    write_matrix_csv(artifact(sc, "jsa_im.csv"), sc.grid.wavelength_nm, sc.grid.wavelength_nm,
                     jsa_m.f.imag());

    const Marginals mg = marginals(jsa_m);
    write_columns_csv(artifact(sc, "marginals.csv"),
                      {"wavelength_nm", "signal", "idler"},
                      {sc.grid.wavelength_nm, mg.signal, mg.idler});
    const double lobes = side_lobe_suppression_db(sc.grid, inten);
    std::printf("jsa: marginal fwhm %.3f / %.3f nm, side lobes %.1f dB below peak\n",
                mg.signal_fwhm_nm, mg.idler_fwhm_nm, lobes);
    return 0;
}

int cmd_schmidt(const GlobalArgs& g) {
    Scenario sc = make_scenario(g);
    const auto jsa_m = build_jsa(sc.grid, sc.pump, sc.poling, sc.model);
    const auto rep = schmidt_decompose(jsa_m.f, sc.grid.step * sc.grid.step);
    std::vector<double> idx(rep.lambda.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<double>(i);
    const std::string path = artifact(sc, "schmidt.csv");
    write_columns_csv(path, {"mode", "lambda"}, {idx, rep.lambda});
    write_sidecar(path, sc.resolved_text());
    std::printf("schmidt: K = %.6f, purity = %.6f\n", rep.schmidt_number, rep.purity);
    return 0;
}

int cmd_spectrometer(const GlobalArgs& g, const std::string& variant, long long pairs,
                     const std::string& tags_path, int purity_bins) {
    std::vector<std::pair<std::string, std::string>> extra;
    if (!variant.empty()) extra.emplace_back("spectrometer.variant", variant);
    Scenario sc = make_scenario(g, extra);
    if (pairs > 0) sc.pairs = pairs;

    const auto jsa_m = build_jsa(sc.grid, sc.pump, sc.poling, sc.model);
    const auto sim = simulate_spectrometer(jsa_m, sc.spectro, sc.pairs, sc.seed,
                                           !tags_path.empty());
    write_histogram_csv(sc, sim.histogram, artifact(sc, "histogram.csv"));
    if (!tags_path.empty()) {
        std::ofstream os(artifact(sc, tags_path));
        if (!os) throw std::runtime_error("cannot write time tags");
        write_time_tags(os, sim.tags, sc.spectro);
    }

    const auto est = reconstruct_jsi(sim.histogram, sc.spectro);
    write_jsi_estimate_csv(sc, est, artifact(sc, "recon_jsi.csv"));

    const auto coarse = window_jsi(est, sc.spectro.window_nm, sc.spectro.reference_nm,
                                   purity_bins);
    const auto rep = purity_from_jsi(coarse, 1.0);
    std::printf("spectrometer %s: %lld detected pairs, resolution %.4f nm, "
                "inferred purity %.4f (upper bound, %d bins)\n",
                sc.spectro.variant.c_str(), sim.histogram.pairs_detected,
                sc.spectro.wavelength_resolution_nm(), rep.purity, purity_bins);
    return 0;
}

int cmd_hom(const GlobalArgs& g) {
    Scenario sc = make_scenario(g);
    auto jsa_m = build_jsa(sc.grid, sc.pump, sc.poling, sc.model);
    if (sc.hom_filter_nm > 0)
        jsa_m = apply_bandpass(jsa_m, sc.grid.center_nm, sc.hom_filter_nm,
                               FilterShape::gaussian);
    HomScan scan = hom_scan(jsa_m, sc.hom_span_ps, sc.hom_points);
    if (sc.hom_pairs_per_delay > 0)
        scan = add_shot_noise(scan, sc.hom_pairs_per_delay, sc.seed);
    const std::string path = artifact(sc, "hom.csv");
    write_columns_csv(path, {"delay_ps", "coincidence"}, {scan.delay_ps, scan.probability});
    write_sidecar(path, sc.resolved_text());
    const auto vis = visibility(scan);
    std::printf("hom: v_raw %.4f, v_fit %.4f +- %.4f, dip fwhm %.3f ps\n", vis.v_raw,
                vis.v_fit, vis.ci95, vis.dip_fwhm_ps);
    return 0;
}

int cmd_ingest(const GlobalArgs& g, const std::string& tag_file) {
    Scenario sc = make_scenario(g);
    std::ifstream is(tag_file);
    if (!is) throw ParseError("cannot read time-tag file: " + tag_file);
    IngestStats stats;
    const auto tags = read_time_tags(is, g.lenient, &stats);
    if (tags.empty()) throw EmptyDataError("time-tag file holds no records");
    const auto hist = histogram_from_tags(tags, sc.spectro, &stats);
    write_histogram_csv(sc, hist, artifact(sc, "histogram.csv"));
    const auto est = reconstruct_jsi(hist, sc.spectro);
    write_jsi_estimate_csv(sc, est, artifact(sc, "recon_jsi.csv"));
    std::printf("ingest: %lld records (%lld malformed, %lld triggers), %lld pairs\n",
                stats.records, stats.malformed, stats.triggers, stats.pairs);
    return 0;
}

int cmd_table1(const GlobalArgs& g, long long pairs, int purity_bins) {
    Scenario sc = make_scenario(g);
    if (pairs > 0) sc.pairs = pairs;
    sc.spectro = SpectrometerConfig::fiber();  // 16 nm window covers the broad-pump states

    const std::vector<double> widths = {5.6, 3.6, 2.4, 1.6, 0.95, 0.74};
    std::vector<double> model_purity, model_k, recon_purity, recon_k;
    for (double w : widths) {
        PumpSpectrum pump = sc.pump;
        pump.fwhm_nm = w;
        const auto jsa_m = build_jsa(sc.grid, pump, sc.poling, sc.model);
        const auto rep = schmidt_decompose(jsa_m.f, sc.grid.step * sc.grid.step);
        model_purity.push_back(rep.purity);
        model_k.push_back(rep.schmidt_number);

        const auto sim = simulate_spectrometer(jsa_m, sc.spectro, sc.pairs, sc.seed);
        const auto est = reconstruct_jsi(sim.histogram, sc.spectro);
        const auto coarse = window_jsi(est, sc.spectro.window_nm, sc.spectro.reference_nm,
                                       purity_bins);
        const auto rrep = purity_from_jsi(coarse, 1.0);
        recon_purity.push_back(rrep.purity);
        recon_k.push_back(rrep.schmidt_number);
        std::printf("pump %5.2f nm: model purity %.4f (K %.3f), "
                    "reconstructed %.4f (K %.3f)\n",
                    w, rep.purity, rep.schmidt_number, rrep.purity, rrep.schmidt_number);
    }
    const std::string path = artifact(sc, "table1.csv");
    write_columns_csv(path,
                      {"pump_fwhm_nm", "model_purity", "model_K", "recon_purity", "recon_K"},
                      {widths, model_purity, model_k, recon_purity, recon_k});
    write_sidecar(path, sc.resolved_text());
    return 0;
}

int cmd_figure(const GlobalArgs& g, const std::string& id) {
    if (id == "dfg") return cmd_dfg(g, 0, 1201);
    if (id == "jsi-fiber") return cmd_spectrometer(g, "fiber", 0, "", 24);
    if (id == "jsi-dcm") return cmd_spectrometer(g, "dcm", 0, "", 24);
    if (id == "marginals") return cmd_jsa(g);
    if (id == "hom") return cmd_hom(g);
    std::cerr << "unknown figure id: " << id
              << " (expected dfg, jsi-fiber, jsi-dcm, marginals or hom)\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"biphoton joint-spectrum design and measurement simulation"};
    app.require_subcommand(1);

    GlobalArgs g;
    app.add_option("--config", g.config_path, "configuration file (key = value)");
    app.add_option("--seed", g.seed, "override mc.seed");
    app.add_option("--out-dir", g.out_dir, "artifact output directory");
    app.add_option("--grid-points", g.grid_points, "override grid.points");
    app.add_option("--pump-fwhm-nm", g.pump_fwhm_nm, "override pump.fwhm_nm");
    app.add_flag("--lenient", g.lenient, "tolerate unknown config keys / malformed tags");

    auto* design = app.add_subcommand("design", "emit the poling domain table");
    bool design_uniform = false;
    std::string design_out;
    design->add_flag("--uniform", design_uniform, "50:50 unapodized grating");
    design->add_option("--out", design_out, "output file name");

    auto* dfg = app.add_subcommand("dfg", "classical difference-frequency tuning curve");
    double dfg_range = 0;
    int dfg_points = 1201;
    dfg->add_option("--range-nm", dfg_range, "probe scan range");
    dfg->add_option("--points", dfg_points, "probe scan points");

    app.add_subcommand("jsa", "joint spectral amplitude, intensity and marginals");
    app.add_subcommand("schmidt", "Schmidt mode decomposition of the model state");

    auto* spect = app.add_subcommand("spectrometer", "simulate the dispersive spectrometer");
    std::string spect_variant, spect_tags;
    long long spect_pairs = 0;
    int spect_bins = 24;
    spect->add_option("--variant", spect_variant, "fiber or dcm")
        ->check(CLI::IsMember({"fiber", "dcm"}));
    spect->add_option("--pairs", spect_pairs, "generated pair count");
    spect->add_option("--emit-tags", spect_tags, "also write a time-tag file");
    spect->add_option("--purity-bins", spect_bins, "coarse bins for the purity estimate");

    app.add_subcommand("hom", "two-photon interference dip");

    auto* ingest = app.add_subcommand("ingest", "histogram a time-tag file");
    std::string tag_file;
    ingest->add_option("file", tag_file, "time-tag text file")->required();

    auto* table1 = app.add_subcommand("table1", "purity versus pump bandwidth");
    long long table_pairs = 0;
    int table_bins = 24;
    table1->add_option("--pairs", table_pairs, "generated pairs per row");
    table1->add_option("--purity-bins", table_bins, "coarse bins for the purity estimate");

    auto* figure = app.add_subcommand("figure", "canned artifact bundles");
    std::string figure_id;
    figure->add_option("id", figure_id, "dfg, jsi-fiber, jsi-dcm, marginals or hom")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // bad usage
    }

    try {
        if (design->parsed()) return cmd_design(g, design_uniform, design_out);
        if (dfg->parsed()) return cmd_dfg(g, dfg_range, dfg_points);
        if (app.get_subcommand("jsa")->parsed()) return cmd_jsa(g);
        if (app.get_subcommand("schmidt")->parsed()) return cmd_schmidt(g);
        if (spect->parsed())
            return cmd_spectrometer(g, spect_variant, spect_pairs, spect_tags, spect_bins);
        if (app.get_subcommand("hom")->parsed()) return cmd_hom(g);
        if (ingest->parsed()) return cmd_ingest(g, tag_file);
        if (table1->parsed()) return cmd_table1(g, table_pairs, table_bins);
        if (figure->parsed()) return cmd_figure(g, figure_id);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
