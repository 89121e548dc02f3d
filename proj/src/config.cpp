#include "tbsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tbsim {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument("config: " + msg); }

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& section, const std::string& key,
                    const std::string& value) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        fail("[" + section + "] " + key + ": not a number: '" + value + "'");
    }
    if (pos != value.size())
        fail("[" + section + "] " + key + ": trailing characters in '" + value + "'");
    return v;
}

long parse_int(const std::string& section, const std::string& key,
               const std::string& value) {
    std::size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(value, &pos);
    } catch (const std::exception&) {
        fail("[" + section + "] " + key + ": not an integer: '" + value + "'");
    }
    if (pos != value.size())
        fail("[" + section + "] " + key + ": trailing characters in '" + value + "'");
    return v;
}

bool parse_bool(const std::string& section, const std::string& key,
                const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    fail("[" + section + "] " + key + ": expected a boolean, got '" + value + "'");
}

std::vector<double> parse_double_list(const std::string& section, const std::string& key,
                                      const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse_double(section, key, item));
    }
    return out;
}

// Accessor that tracks which keys were consumed so leftovers can be rejected.
struct SectionReader {
    const ConfigFile::Section& sec;
    std::set<std::string> used;

    const std::string* get(const std::string& key) {
        auto it = sec.entries.find(key);
        if (it == sec.entries.end()) return nullptr;
        used.insert(key);
        return &it->second;
    }
    double number(const std::string& key, double fallback) {
        const std::string* v = get(key);
        return v ? parse_double(sec.name, key, *v) : fallback;
    }
    double required_number(const std::string& key) {
        const std::string* v = get(key);
        if (!v) fail("[" + sec.name + "] missing required key '" + key + "'");
        return parse_double(sec.name, key, *v);
    }
    void finish() const {
        for (const auto& [k, v] : sec.entries)
            if (!used.count(k))
                fail("[" + sec.name + "] unknown key '" + k + "'");
    }
};

PulseShape read_pulse_shape(SectionReader& r, bool peak_required) {
    PulseShape p;
    if (const std::string* kind = r.get("kind"))
        p.kind = shape_kind_from_string(*kind);
    p.center = r.required_number("center_inv_gamma");
    p.duration = r.required_number("duration_inv_gamma");
    if (const std::string* peak = r.get("peak_gamma"))
        p.peak = parse_double(r.sec.name, "peak_gamma", *peak);
    else if (peak_required)
        fail("[" + r.sec.name + "] missing required key 'peak_gamma'");
    p.phase = r.number("phase_rad", 0.0);
    return p;
}

} // namespace

ConfigFile ConfigFile::parse_string(const std::string& text) {
    ConfigFile cfg;
    std::stringstream ss(text);
    std::string raw;
    int lineno = 0;
    Section* current = nullptr;
    while (std::getline(ss, raw)) {
        ++lineno;
        std::string line = raw;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                fail("line " + std::to_string(lineno) + ": malformed section header");
            cfg.sections.push_back({trim(line.substr(1, line.size() - 2)), {}});
            current = &cfg.sections.back();
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail("line " + std::to_string(lineno) + ": expected 'key = value'");
        if (!current)
            fail("line " + std::to_string(lineno) + ": key outside any section");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!current->entries.emplace(key, value).second)
            fail("[" + current->name + "] duplicate key '" + key + "'");
    }
    return cfg;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

const ConfigFile::Section* ConfigFile::find(const std::string& name) const {
    for (const auto& s : sections)
        if (s.name == name) return &s;
    return nullptr;
}

void ConfigFile::set(const std::string& section, const std::string& key,
                     const std::string& value) {
    for (auto& s : sections) {
        if (s.name == section) {
            s.entries[key] = value;
            return;
        }
    }
    sections.push_back({section, {{key, value}}});
}

std::string ConfigFile::to_string() const {
    std::string out;
    for (const auto& s : sections) {
        out += "[" + s.name + "]\n";
        for (const auto& [k, v] : s.entries) out += k + " = " + v + "\n";
        out += "\n";
    }
    return out;
}

RunConfig run_config_from_string(const std::string& text) {
    const ConfigFile cfg = ConfigFile::parse_string(text);
    RunConfig rc;

    // [params]
    if (const auto* sec = cfg.find("params")) {
        SectionReader r{*sec, {}};
        rc.params.gamma32 = r.number("gamma32_gamma", rc.params.gamma32);
        rc.params.gamma41 = r.number("gamma41_gamma", rc.params.gamma41);
        rc.params.gamma_c = r.number("gamma_c_gamma", rc.params.gamma_c);
        rc.params.delta_w = r.number("delta_w_gamma", rc.params.delta_w);
        rc.params.delta_r = r.number("delta_r_gamma", rc.params.delta_r);
        rc.params.n_atoms = r.number("n_atoms", rc.params.n_atoms);
        rc.params.g_s = r.number("g_s_gamma", rc.params.g_s);
        rc.params.g_as = r.number("g_as_gamma", rc.params.g_as);
        const std::string* chi = r.get("chi_gamma");
        const std::string* length = r.get("length_cm");
        if (chi && length) fail("[params] give chi_gamma or length_cm, not both");
        if (chi) {
            rc.params.chi = parse_double("params", "chi_gamma", *chi);
        } else if (length) {
            // chi = c/L, converted to gamma units once at parse time.
            const double gamma_per_s = r.required_number("gamma_per_s");
            const double l_cm = parse_double("params", "length_cm", *length);
            if (!(l_cm > 0.0)) fail("[params] length_cm must be > 0");
            rc.params.chi = 2.99792458e10 / l_cm / gamma_per_s;
        }
        r.finish();
        rc.params.validate();
    }

    // [grid]
    if (const auto* sec = cfg.find("grid")) {
        SectionReader r{*sec, {}};
        rc.grid.samples = static_cast<int>(r.number("samples", rc.grid.samples));
        rc.grid.abs_tol = r.number("abs_tol", rc.grid.abs_tol);
        rc.grid.rel_tol = r.number("rel_tol", rc.grid.rel_tol);
        rc.grid.fixed_dt = r.number("fixed_dt_inv_gamma", rc.grid.fixed_dt);
        rc.grid.t_start = r.number("t_start_inv_gamma", rc.grid.t_start);
        rc.grid.t_end = r.number("t_end_inv_gamma", rc.grid.t_end);
        r.finish();
    }

    // [output]
    if (const auto* sec = cfg.find("output")) {
        SectionReader r{*sec, {}};
        if (const std::string* dir = r.get("dir")) rc.out_dir = *dir;
        r.finish();
    }

    // [write] and [read.N]
    std::optional<PulseShape> write;
    if (const auto* sec = cfg.find("write")) {
        SectionReader r{*sec, {}};
        const std::string* alpha = r.get("alpha_integral");
        PulseShape w = read_pulse_shape(r, /*peak_required=*/alpha == nullptr);
        if (alpha) {
            if (r.sec.entries.count("peak_gamma"))
                fail("[write] give peak_gamma or alpha_integral, not both");
            rc.write_alpha_goal = parse_double("write", "alpha_integral", *alpha);
            w.peak = write_peak_for_alpha_integral(rc.params, w, *rc.write_alpha_goal);
        }
        r.finish();
        write = w;
    }

    const bool design_run = cfg.find("design") != nullptr;
    std::vector<std::pair<long, const ConfigFile::Section*>> read_secs;
    for (const auto& s : cfg.sections) {
        if (s.name.rfind("read.", 0) != 0) continue;
        const std::string idx = s.name.substr(5);
        read_secs.emplace_back(parse_int(s.name, "<section index>", idx), &s);
    }
    std::sort(read_secs.begin(), read_secs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    std::vector<PulseShape> reads;
    for (const auto& [idx, sec] : read_secs) {
        SectionReader r{*sec, {}};
        reads.push_back(read_pulse_shape(r, /*peak_required=*/!design_run));
        r.finish();
    }

    double separation_factor = 6.0;
    if (const auto* sec = cfg.find("train")) {
        SectionReader r{*sec, {}};
        separation_factor = r.number("separation_factor", separation_factor);
        r.finish();
    }

    // [design]
    if (design_run) {
        SectionReader r{*cfg.find("design"), {}};
        DesignTarget target;
        const std::string* weights = r.get("weights");
        if (!weights) fail("[design] missing required key 'weights'");
        const double total = r.number("total", 0.98);
        if (weights->rfind("equal", 0) == 0) {
            const long j = parse_int("design", "weights", trim(weights->substr(5)));
            if (j < 1) fail("[design] 'equal J' needs J >= 1");
            target.weights.assign(static_cast<std::size_t>(j), total / static_cast<double>(j));
        } else {
            target.weights = parse_double_list("design", "weights", *weights);
        }
        double sum = 0.0;
        for (double w : target.weights) sum += w;
        if (r.sec.entries.count("total") && std::abs(sum - total) > 1e-9)
            fail("[design] weights do not sum to 'total'");
        target.total_retrieval = sum;
        target.refine = false;
        if (const std::string* ref = r.get("refine"))
            target.refine = parse_bool("design", "refine", *ref);
        r.finish();
        if (reads.empty())
            fail("design run needs [read.N] sections as shape templates");
        if (reads.size() != target.weights.size())
            fail("design run: weights count must match the number of [read.N] sections");
        target.slots = reads;
        target.validate();
        rc.design = std::move(target);
    } else if (write) {
        PulseTrain train;
        train.write = *write;
        train.reads = reads;
        train.separation_factor = separation_factor;
        train.validate();
        rc.train = std::move(train);
    }

    if (rc.design && rc.train) fail("give an explicit train or a design target, not both");

    // Design runs still carry the write pulse for the follow-up simulate.
    if (rc.design && write) {
        PulseTrain train;
        train.write = *write;
        train.separation_factor = separation_factor;
        rc.train = std::move(train);
        rc.train->reads.clear();
    }

    // [franson]
    if (const auto* sec = cfg.find("franson")) {
        SectionReader r{*sec, {}};
        FransonSettings fs;
        const std::string* bins = r.get("bins");
        const std::string* source = r.get("source");
        if (bins && source) fail("[franson] give bins or source, not both");
        if (bins) fs.bins = static_cast<int>(parse_int("franson", "bins", *bins));
        if (source) fs.source_summary = *source;
        fs.tau = r.number("tau_inv_gamma", fs.tau);
        fs.mode_width = r.number("mode_width_inv_gamma", fs.mode_width);
        if (const std::string* v = r.get("variances_rad2"))
            fs.variances = parse_double_list("franson", "variances_rad2", *v);
        if (const std::string* k = r.get("noise_kind"))
            fs.noise_kind = noise_kind_from_string(*k);
        fs.samples = static_cast<int>(r.number("samples", fs.samples));
        fs.seed = static_cast<std::uint64_t>(r.number("seed", 1.0));
        fs.theta_points = static_cast<int>(r.number("theta_points", fs.theta_points));
        r.finish();
        if (fs.bins > 0 && !(fs.tau > 0.0) && fs.bins > 1)
            fail("[franson] idealized state needs tau_inv_gamma > 0");
        rc.franson = std::move(fs);
    }

    return rc;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return run_config_from_string(buf.str());
}

std::string train_config_fragment(const PulseTrain& train) {
    char buf[64];
    auto num = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.12g", v);
        return std::string(buf);
    };
    std::string out;
    for (std::size_t i = 0; i < train.reads.size(); ++i) {
        const auto& r = train.reads[i];
        out += "[read." + std::to_string(i + 1) + "]\n";
        out += "kind = " + to_string(r.kind) + "\n";
        out += "peak_gamma = " + num(r.peak) + "\n";
        out += "center_inv_gamma = " + num(r.center) + "\n";
        out += "duration_inv_gamma = " + num(r.duration) + "\n";
        if (r.phase != 0.0) out += "phase_rad = " + num(r.phase) + "\n";
        out += "\n";
    }
    return out;
}

} // namespace tbsim
