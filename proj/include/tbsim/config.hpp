#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tbsim/designer.hpp"
#include "tbsim/dynamics.hpp"
#include "tbsim/franson.hpp"
#include "tbsim/params.hpp"
#include "tbsim/pulses.hpp"

namespace tbsim {

// Raw key/value sections of a config file, in file order.
struct ConfigFile {
    struct Section {
        std::string name;
        std::map<std::string, std::string> entries;
    };
    std::vector<Section> sections;

    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_string(const std::string& text);

    const Section* find(const std::string& name) const;
    void set(const std::string& section, const std::string& key, const std::string& value);
    std::string to_string() const;
};

// Franson-run settings: the state source is either an idealized equal-bin
// spec (bins > 0) or a prior simulate summary JSON.
struct FransonSettings {
    int bins = 0;
    std::string source_summary;
    double tau = 0.0;
    double mode_width = 1.0;
    std::vector<double> variances = {0.0};
    NoiseKind noise_kind = NoiseKind::shared_gaussian;
    int samples = 100000;
    std::uint64_t seed = 1;
    int theta_points = 121;
};

struct RunConfig {
    PhysicalParams params;
    std::optional<PulseTrain> train;        // explicit-train runs
    std::optional<double> write_alpha_goal; // write peak calibrated to this alpha integral
    std::optional<DesignTarget> design;     // design runs
    std::optional<FransonSettings> franson;
    GridSpec grid;
    std::string out_dir = "out";
};

// Validates section/key names (unit suffixes included), all invariants of
// the upstream types, and the one-of train/design rule. Errors name the
// offending section and key.
RunConfig load_run_config(const std::string& path);
RunConfig run_config_from_string(const std::string& text);

// Config fragment for a designed read train, consumable by `simulate`.
std::string train_config_fragment(const PulseTrain& train);

} // namespace tbsim
