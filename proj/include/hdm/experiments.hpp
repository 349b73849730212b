#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hdm/config.hpp"

namespace hdm {

// One psi grid point of the margin/error sweep. Margins are on the sqrt(p) scale.
struct SweepRow {
    double psi = 0.0;
    std::size_t p = 0;
    Vec kappa_lp;        // per replicate, sqrt(p) kappa_{n,l1}
    Vec err_emp;         // per separable replicate, error of the min-l1 interpolant
    int separable = 0;
    double kappa_lp_mean = 0.0, kappa_lp_sd = 0.0, err_emp_mean = 0.0;
    double kappa_star = 0.0, err_star = 0.0, bayes = 0.0, psi_threshold = 0.0;
    double kappa_l2_star = 0.0;  // lq system at q = 2, normalized-margin runs only
    std::string status = "ok";
};

// Theory and finite-sample LP margins on cfg.psi_list at rho = rho_list[0].
std::vector<SweepRow> sweep_psi(const ExperimentConfig& cfg, bool with_theory = true, bool with_l2 = false);

struct HeatCell {
    double psi, rho;
    double kappa_star, err_star, kappa_lp_mean, err_emp_mean;
    std::string status;
};
std::vector<HeatCell> heatmap_grid(const ExperimentConfig& cfg);

struct UniversalityRow {
    int replicate;
    double kappa_a, kappa_b;  // sqrt(d) kappa on the two feature maps
};
struct UniversalityA {
    std::vector<UniversalityRow> rows;
    double mean_margin = 0.0, mean_abs_diff = 0.0;
    double mu0 = 0.0, mu1 = 0.0, mu2 = 0.0;
};
UniversalityA universality_features(const ExperimentConfig& cfg);

struct BoostSummary {
    std::size_t n = 0, p = 0;
    double kappa_lp = 0.0, M = 0.0, normalized_margin = 0.0;
    long certified_T = 0, steps = 0;
    bool certified = false;
    double potential_slack = 0.0;
    long zero_error_T = 0;
    long interp_time = -1;
    long active_at_interp = -1;
    double sparsity_ratio = 0.0;   // S0 / (p log^2 p)
    double kappa_star = 0.0, sparsity_bound = 0.0;  // 12 / kappa*^2
    double gen_error = 0.0, err_star = 0.0;
};
struct BoostRun {
    BoostSummary summary;
    std::string trace_csv;
};
BoostRun boost_experiment(const ExperimentConfig& cfg);

// Header comment shared by every CSV: config hash and root seed.
std::string csv_header_comment(const ExperimentConfig& cfg);

// Subcommand drivers: write CSV (and SVG when cfg.plots) under cfg.out_dir.
void run_sweep_psi(const ExperimentConfig& cfg, std::ostream& log);
void run_normalized_margin(const ExperimentConfig& cfg, std::ostream& log);
void run_heatmap(const ExperimentConfig& cfg, std::ostream& log);
void run_universality(const ExperimentConfig& cfg, std::ostream& log);
void run_boost(const ExperimentConfig& cfg, std::ostream& log);
void run_predict(const ExperimentConfig& cfg, std::ostream& log);
void run_margin(const ExperimentConfig& cfg, std::ostream& log);
// Returns the number of failed checks.
int run_selfcheck(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace hdm
