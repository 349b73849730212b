#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "hdm/spectra.hpp"

namespace hdm {

// Flat "key = value" experiment description. Lines starting with '#' are
// comments; list values are comma separated. See README for the key table.
struct ExperimentConfig {
    std::string experiment = "sweep-psi";
    ModelConfig model;
    std::vector<double> psi_list{0.2, 0.3, 0.5, 1, 2, 3, 4, 5, 6};
    std::vector<double> rho_list{1.0};
    int replicates = 10;
    std::size_t mc_samples = 5000;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    double eps = 0.2;            // boosting accuracy
    long max_T = 200000;         // cap on boosting steps
    double q = 1.0;              // lq geometry for predict
    std::string activation = "compact";
    double feature_ratio = 2.0;  // d / n for random features
    std::size_t feature_p = 0;   // universality: covariate dimension (0: feature count)
    std::string mode = "A";      // universality: A (feature pair) or B (design law)
    std::size_t m_test = 0;      // 0: exact Gaussian error where available
    std::size_t latents = 0;     // gmm spike columns
    double spike_scale = 1.0;
    bool plots = true;
    std::string measure_file;

    // Canonical key=value listing of every resolved field, one per line.
    std::string canonical() const;
    // FNV-1a over canonical().
    std::uint64_t hash() const;
};

// Per-experiment default grids and sizes.
ExperimentConfig default_config(const std::string& experiment);

// Applies one key; throws ConfigError on unknown keys or malformed values.
void apply_key(ExperimentConfig& cfg, const std::string& key, const std::string& value);
ExperimentConfig parse_config(std::istream& is, ExperimentConfig base);
ExperimentConfig load_config(const std::string& path, ExperimentConfig base);

// replicates >= 1, nonempty grids, sizes in range, model assumptions.
void check_config(const ExperimentConfig& cfg);

std::uint64_t fnv1a(const std::string& s);

}  // namespace hdm
