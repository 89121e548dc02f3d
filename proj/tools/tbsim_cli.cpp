#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tbsim/config.hpp"
#include "tbsim/designer.hpp"
#include "tbsim/dynamics.hpp"
#include "tbsim/franson.hpp"
#include "tbsim/io.hpp"
#include "tbsim/params.hpp"
#include "tbsim/pulses.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_json(const std::string& path, const json& j) {
    tbsim::write_file_atomic(path, j.dump(2) + "\n");
}

json bins_to_json(const tbsim::BinBreakdown& bins) {
    json j;
    j["areas"] = bins.areas;
    j["total"] = bins.total;
    j["windows"] = json::array();
    for (const auto& [a, b] : bins.windows) j["windows"].push_back({a, b});
    return j;
}

json simulate_summary(const tbsim::DynamicsTrace& trace, const tbsim::PulseTrain& train) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["n_s_inf"] = trace.n_s_final();
    j["n_as_inf"] = trace.n_as_final();
    if (!train.reads.empty()) {
        j["bins"] = bins_to_json(tbsim::bin_areas(trace, train));
        json centers = json::array(), durations = json::array();
        for (const auto& r : train.reads) {
            centers.push_back(r.center);
            durations.push_back(r.duration);
        }
        j["read_centers"] = centers;
        j["read_durations"] = durations;
        if (train.reads.size() > 1)
            j["tau"] = train.reads[1].center - train.reads[0].center;
    }
    return j;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 double fixed_step) {
    tbsim::RunConfig rc = tbsim::load_run_config(config_path);
    if (!rc.train || rc.design)
        throw std::runtime_error("simulate needs an explicit pulse train "
                                 "(run `design` first for design targets)");
    if (fixed_step > 0.0) rc.grid.fixed_dt = fixed_step;
    const std::string dir = out_dir.empty() ? rc.out_dir : out_dir;
    fs::create_directories(dir);

    const tbsim::DynamicsTrace trace = tbsim::integrate(rc.params, *rc.train, rc.grid);
    tbsim::write_file_atomic(dir + "/trace.csv", tbsim::trace_to_csv(trace));
    write_json(dir + "/summary.json", simulate_summary(trace, *rc.train));
    std::cout << "simulate: n_S(inf) = " << tbsim::format_number(trace.n_s_final())
              << ", n_AS(inf) = " << tbsim::format_number(trace.n_as_final()) << "\n";
    return 0;
}

int cmd_design(const std::string& config_path, const std::string& out_dir) {
    tbsim::RunConfig rc = tbsim::load_run_config(config_path);
    if (!rc.design)
        throw std::runtime_error("design needs a [design] section in the config");
    const std::string dir = out_dir.empty() ? rc.out_dir : out_dir;
    fs::create_directories(dir);

    const tbsim::DesignTarget& target = *rc.design;
    const std::vector<double> exposures = tbsim::design_exposures(target);
    const std::vector<double> seed_peaks =
        tbsim::exposures_to_peaks(exposures, rc.params, target.slots);

    json report;
    report["schema_version"] = kSchemaVersion;
    report["exposures"] = exposures;
    report["seed_peaks"] = seed_peaks;
    report["refined"] = target.refine;

    std::vector<double> peaks = seed_peaks;
    bool feasible = true;
    if (target.refine) {
        const tbsim::RefineResult res =
            tbsim::refine_design(seed_peaks, rc.params, target);
        report["peaks"] = res.peaks;
        report["achieved"] = res.achieved;
        report["residuals"] = res.residuals;
        report["iterations"] = res.iterations;
        report["converged"] = res.converged;
        peaks = res.peaks;
        feasible = res.converged;
    } else {
        report["peaks"] = peaks;
    }

    // Designed train, as a complete config the `simulate` command accepts.
    tbsim::ConfigFile cfg = tbsim::ConfigFile::parse_file(config_path);
    tbsim::ConfigFile pruned;
    for (const auto& s : cfg.sections)
        if (s.name != "design" && s.name.rfind("read.", 0) != 0)
            pruned.sections.push_back(s);
    std::string designed = pruned.to_string();
    tbsim::PulseTrain train;
    train.reads = target.slots;
    for (std::size_t i = 0; i < peaks.size(); ++i) train.reads[i].peak = peaks[i];
    designed += tbsim::train_config_fragment(train);
    tbsim::write_file_atomic(dir + "/designed_train.cfg", designed);
    write_json(dir + "/design.json", report);

    if (!feasible) {
        std::cerr << "design: refinement did not converge (target infeasible?); "
                     "see residuals in design.json\n";
        return 2;
    }
    std::cout << "design: exposures";
    for (double b : exposures) std::cout << ' ' << tbsim::format_number(b);
    std::cout << "\n";
    return 0;
}

tbsim::TimeBinState state_from_settings(const tbsim::FransonSettings& fsett,
                                        const std::string& config_dir) {
    if (fsett.bins > 0)
        return tbsim::ideal_equal_state(fsett.bins, fsett.tau, fsett.mode_width);
    if (fsett.source_summary.empty())
        throw std::runtime_error("franson: missing state source "
                                 "(set bins or source in [franson])");
    fs::path src = fsett.source_summary;
    if (src.is_relative() && !fs::exists(src)) src = fs::path(config_dir) / src;
    const json j = json::parse(slurp(src.string()));
    if (!j.contains("bins"))
        throw std::runtime_error("franson: source summary has no bin breakdown");
    const std::vector<double> areas = j["bins"]["areas"].get<std::vector<double>>();
    const std::vector<double> centers = j["read_centers"].get<std::vector<double>>();
    const std::vector<double> durations = j["read_durations"].get<std::vector<double>>();
    const double total = j["bins"]["total"].get<double>();

    tbsim::TimeBinState st;
    st.tau = centers.size() > 1 ? centers[1] - centers[0] : 0.0;
    for (std::size_t i = 0; i < areas.size(); ++i) {
        st.amplitudes.emplace_back(std::sqrt(areas[i] / total), 0.0);
        st.centers.push_back(centers[i]);
        // Anti-Stokes envelope of a gaussian read pulse: flux ~ f^2, so the
        // amplitude mode is a gaussian of width T / sqrt(2).
        const double w = durations[i] / std::numbers::sqrt2;
        const double norm = std::pow(std::numbers::pi * w * w, -0.25);
        st.modes.push_back(tbsim::BinMode{
            [norm, w](double u) { return norm * std::exp(-u * u / (2.0 * w * w)); },
            -8.0 * w, 8.0 * w});
    }
    for (std::size_t i = 1; i < centers.size(); ++i)
        if (std::abs(centers[i] - centers[i - 1] - st.tau) > 1e-9)
            st.equally_spaced = false;
    return st;
}

int cmd_franson(const std::string& config_path, const std::string& out_dir,
                std::optional<std::uint64_t> seed) {
    tbsim::RunConfig rc = tbsim::load_run_config(config_path);
    if (!rc.franson)
        throw std::runtime_error("franson needs a [franson] section in the config");
    tbsim::FransonSettings fsett = *rc.franson;
    if (seed) fsett.seed = *seed;
    const std::string dir = out_dir.empty() ? rc.out_dir : out_dir;
    fs::create_directories(dir);

    const tbsim::TimeBinState state =
        state_from_settings(fsett, fs::path(config_path).parent_path().string());

    std::vector<double> grid(fsett.theta_points);
    for (int i = 0; i < fsett.theta_points; ++i)
        grid[i] = 2.0 * std::numbers::pi * i / (fsett.theta_points - 1);

    json report;
    report["schema_version"] = kSchemaVersion;
    report["noise_kind"] = tbsim::to_string(fsett.noise_kind);
    report["seed"] = fsett.seed;
    report["samples"] = fsett.samples;
    report["results"] = json::array();

    for (std::size_t i = 0; i < fsett.variances.size(); ++i) {
        tbsim::PhaseNoiseModel noise{fsett.noise_kind, fsett.variances[i],
                                     fsett.samples, fsett.seed};
        const tbsim::FransonResult res = tbsim::averaged_counts(state, grid, noise);
        const std::string csv_name = "fringe_" + std::to_string(i) + ".csv";
        tbsim::write_file_atomic(dir + "/" + csv_name, tbsim::franson_to_csv(res));
        report["results"].push_back({{"variance", fsett.variances[i]},
                                     {"visibility", res.visibility},
                                     {"csv", csv_name}});
        std::cout << "franson: variance " << tbsim::format_number(fsett.variances[i])
                  << " -> visibility " << tbsim::format_number(res.visibility) << "\n";
    }
    write_json(dir + "/franson.json", report);
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              const std::string& key, const std::string& values_csv,
              double fixed_step) {
    // Split at the last dot so read.N.key works too.
    const auto last_dot = key.rfind('.');
    if (last_dot == std::string::npos || last_dot == 0 || last_dot + 1 == key.size())
        throw std::runtime_error("sweep: key must look like section.key");
    const std::string section = key.substr(0, last_dot);
    const std::string subkey = key.substr(last_dot + 1);

    std::vector<std::string> values;
    std::stringstream ss(values_csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto a = item.find_first_not_of(" \t");
        if (a == std::string::npos) continue;
        const auto b = item.find_last_not_of(" \t");
        values.push_back(item.substr(a, b - a + 1));
    }

    const std::string base_text = slurp(config_path);
    std::string csv = key + ",n_s_inf,n_as_inf,bin_total\n";
    for (const std::string& v : values) {
        tbsim::ConfigFile cfg = tbsim::ConfigFile::parse_string(base_text);
        cfg.set(section, subkey, v);
        tbsim::RunConfig rc = tbsim::run_config_from_string(cfg.to_string());
        if (!rc.train)
            throw std::runtime_error("sweep: config must describe an explicit train");
        if (fixed_step > 0.0) rc.grid.fixed_dt = fixed_step;
        const tbsim::DynamicsTrace trace = tbsim::integrate(rc.params, *rc.train, rc.grid);
        double bin_total = 0.0;
        if (!rc.train->reads.empty())
            bin_total = tbsim::bin_areas(trace, *rc.train).total;
        csv += v + ',' + tbsim::format_number(trace.n_s_final()) + ',' +
               tbsim::format_number(trace.n_as_final()) + ',' +
               tbsim::format_number(bin_total) + '\n';
    }

    const std::string dir = out_dir.empty() ? "out" : out_dir;
    fs::create_directories(dir);
    tbsim::write_file_atomic(dir + "/sweep.csv", csv);
    std::cout << "sweep: " << values.size() << " point(s) -> " << dir << "/sweep.csv\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-bin single-photon source simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir, sweep_key, sweep_values;
    double fixed_step = 0.0;
    std::optional<std::uint64_t> seed;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "Config file")->required();
        cmd->add_option("--out", out_dir, "Output directory");
    };

    CLI::App* sim = app.add_subcommand("simulate", "Integrate the rate equations");
    add_common(sim);
    sim->add_option("--fixed-step", fixed_step, "Fixed RK4 step (1/gamma)");

    CLI::App* des = app.add_subcommand("design", "Design read peaks for target bins");
    add_common(des);

    CLI::App* fra = app.add_subcommand("franson", "Interferometer fringe simulation");
    add_common(fra);
    std::uint64_t seed_value = 0;
    CLI::Option* seed_opt = fra->add_option("--seed", seed_value, "RNG seed override");

    CLI::App* swp = app.add_subcommand("sweep", "Parameter sweep");
    add_common(swp);
    swp->add_option("--key", sweep_key, "Config key to sweep (section.key)")->required();
    swp->add_option("--values", sweep_values, "Comma-separated values")->required();
    swp->add_option("--fixed-step", fixed_step, "Fixed RK4 step (1/gamma)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(config_path, out_dir, fixed_step);
        if (des->parsed()) return cmd_design(config_path, out_dir);
        if (fra->parsed()) {
            if (*seed_opt) seed = seed_value;
            return cmd_franson(config_path, out_dir, seed);
        }
        if (swp->parsed())
            return cmd_sweep(config_path, out_dir, sweep_key, sweep_values, fixed_step);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
