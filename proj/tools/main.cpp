#include <omp.h>

#include <CLI11.hpp>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "hdm/common.hpp"
#include "hdm/config.hpp"
#include "hdm/experiments.hpp"

namespace {

struct Command {
    const char* name;
    const char* summary;
    const char* schema;
    void (*run)(const hdm::ExperimentConfig&, std::ostream&);
};

const char* const kCommon =
    "\nEvery CSV starts with '# config_hash=<hex> root_seed=<u64>'. Config files hold 'key = value' lines;\n"
    "see README for the key table. --set KEY=VALUE overrides a single key after the file is read.\n";

const std::vector<Command> kCommands = {
    {"sweep-psi", "LP margin and interpolant error against the asymptotic prediction over a p/n grid",
     "Writes sweep_psi.csv (+ sweep_psi_margin.svg, sweep_psi_error.svg):\n"
     "  psi,p,replicates,separable,kappa_lp_mean,kappa_lp_sd,kappa_star,rel_gap,err_emp_mean,err_star,bayes,status\n"
     "kappa columns are on the sqrt(p) scale; separable counts replicates with a positive margin.\n",
     hdm::run_sweep_psi},
    {"normalized-margin", "normalized margin kappa*/sqrt(psi) for the l1 and l2 geometries",
     "Writes normalized_margin.csv (+ .svg):\n"
     "  psi,kappa_star_over_sqrt_psi,lp_over_sqrt_psi,classical_bound,l2_kappa_star_over_sqrt_psi,increasing\n"
     "classical_bound is sqrt(psi)/kappa*; increasing flags a strict rise over the previous separable point.\n",
     hdm::run_normalized_margin},
    {"heatmap", "Gaussian-mixture margin and error over a (psi, rho) grid",
     "Writes heatmap.csv (+ four heatmap_*.svg):\n"
     "  psi,rho,kappa_star,kappa_lp_mean,rel_gap,err_star,err_emp_mean,status\n",
     hdm::run_heatmap},
    {"boost-run", "shrinkage boosting up to the certified step count",
     "Writes boost_summary.csv with columns quantity,value (rows: n, p, kappa_lp, M, certified_T, steps,\n"
     "certified, normalized_margin, margin_ratio, potential_slack, zero_error_T, interp_time, active_at_interp,\n"
     "sparsity_ratio, sparsity_bound, kappa_star, gen_error, err_star) and boost_trace.csv:\n"
     "  t,gamma,train_err,l1_norm,active_count\n",
     hdm::run_boost},
    {"universality", "random-feature pair (mode A) or design-law comparison (mode B)",
     "Mode A writes universality_features.csv:\n"
     "  replicate,kappa_a,kappa_b,abs_diff   (trailer comment with means and Hermite coefficients)\n"
     "Mode B writes universality_designs.csv (+ .svg):\n"
     "  psi,margin_gaussian,margin_rademacher,abs_diff,excess_err_gaussian,excess_err_rademacher\n",
     hdm::run_universality},
    {"robustness-rademacher", "universality mode B under its own default grid",
     "Writes universality_designs.csv as 'universality' in mode B.\n", hdm::run_universality},
    {"predict", "asymptotic fixed-point solutions only",
     "Writes predict.csv:\n  psi,rho,kappa,c1,c2,s,residual,err_star,bayes,angle\n", hdm::run_predict},
    {"margin", "one instance: LP margin, dual checks, interpolant norm",
     "Writes margin.csv with columns quantity,value (rows: n, p, separable, kappa_l1, sqrt_p_kappa_l1,\n"
     "dual_value, simplex_iterations, interpolant_norm, norm_times_kappa, xi_below, xi_above,\n"
     "active_features, angle, gen_error) and margin_theta.csv:\n  j,theta\n",
     hdm::run_margin},
    {"selfcheck", "property suite; prints one PASS/FAIL line per check",
     "Writes no files. Exit status is 0 only when every check passes.\n", nullptr},
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"High-dimensional max-margin and boosting toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::uint64_t seed = 0;
    int threads = 0;
    std::size_t mc = 0;
    std::vector<std::string> sets;

    std::map<std::string, CLI::App*> subs;
    for (const auto& c : kCommands) {
        CLI::App* s = app.add_subcommand(c.name, c.summary);
        s->footer(std::string("\nOutput\n") + c.schema + kCommon);
        s->add_option("--config", config_path, "experiment config file")->check(CLI::ExistingFile);
        s->add_option("--out", out_dir, "output directory");
        s->add_option("--seed", seed, "root seed");
        s->add_option("--threads", threads, "OpenMP worker threads")->check(CLI::PositiveNumber);
        s->add_option("--mc-samples", mc, "Monte-Carlo samples for the theory side");
        s->add_option("--set", sets, "KEY=VALUE override (repeatable)");
        subs[c.name] = s;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const Command* cmd = nullptr;
    for (const auto& c : kCommands)
        if (subs[c.name]->parsed()) cmd = &c;
    CLI::App* sub = subs[cmd->name];

    try {
        hdm::ExperimentConfig cfg = hdm::default_config(cmd->name);
        if (!config_path.empty()) cfg = hdm::load_config(config_path, cfg);
        cfg.experiment = cmd->name;
        if (cmd->name == std::string("robustness-rademacher")) cfg.mode = "B";
        for (const auto& kv : sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw hdm::ConfigError("--set expects KEY=VALUE, got '" + kv + "'");
            hdm::apply_key(cfg, kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (sub->count("--out")) cfg.out_dir = out_dir;
        if (sub->count("--seed")) cfg.seed = seed;
        if (sub->count("--mc-samples")) hdm::apply_key(cfg, "mc_samples", std::to_string(mc));
        if (threads > 0) omp_set_num_threads(threads);
        hdm::check_config(cfg);

        if (!cmd->run) return hdm::run_selfcheck(cfg, std::cout) == 0 ? 0 : 3;
        cmd->run(cfg, std::cout);
        return 0;
    } catch (const hdm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const hdm::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
