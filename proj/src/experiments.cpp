#include "hdm/experiments.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "hdm/boosting.hpp"
#include "hdm/datagen.hpp"
#include "hdm/fixedpoint.hpp"
#include "hdm/fkappa.hpp"
#include "hdm/gauss.hpp"
#include "hdm/margin.hpp"
#include "hdm/prox.hpp"
#include "hdm/rng.hpp"
#include "hdm/svg.hpp"

namespace hdm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kTheoryAtoms = 4000;

double mean(const Vec& v) {
    if (v.empty()) return kNaN;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sd(const Vec& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::uint64_t point_seed(std::uint64_t root, int rep, double a, double b = 0.0) {
    return substream(replicate_seed(root, static_cast<std::uint64_t>(rep)),
                     std::bit_cast<std::uint64_t>(a) ^ mix64(std::bit_cast<std::uint64_t>(b)));
}

CloudKind cloud_kind(const ExperimentConfig& cfg) {
    switch (cfg.model.variant) {
        case Variant::diagonal: return CloudKind::glm;
        case Variant::misspecified: return CloudKind::misspec;
        case Variant::gmm: return cfg.latents > 0 ? CloudKind::rank : CloudKind::gmm;
    }
    return CloudKind::glm;
}

MCCloud theory_cloud(const ExperimentConfig& cfg, double rho) {
    CloudOptions o;
    o.gamma = cfg.model.gamma;
    o.latents = cfg.latents;
    o.law = cfg.model.latent;
    return make_cloud(cloud_kind(cfg), cfg.mc_samples, rho, cfg.model.link, substream(cfg.seed, 'C'), o);
}

SpectralMeasure theory_measure(const ExperimentConfig& cfg) {
    if (!cfg.measure_file.empty()) {
        std::ifstream f(cfg.measure_file);
        if (!f) throw ConfigError("cannot open measure file: " + cfg.measure_file);
        return SpectralMeasure::read(f);
    }
    SpectralMeasure m = standard_gaussian_measure(kTheoryAtoms, substream(cfg.seed, 'W'));
    if (cfg.latents > 0) m = with_gaussian_spikes(m, cfg.latents, cfg.spike_scale, substream(cfg.seed, 'S'));
    return m;
}

// Per-replicate data model: Gaussian wbar (fresh theta*) and optional spikes.
ModelConfig replicate_model(const ExperimentConfig& cfg, double psi, double rho, std::uint64_t seed) {
    ModelConfig m = cfg.model;
    m.psi = psi;
    m.rho = rho;
    m.seed = seed;
    if (m.p() < 1) throw ConfigError("psi * n rounds to p = 0");
    if (cfg.latents > 0)
        m.measure = with_gaussian_spikes(standard_gaussian_measure(m.p(), substream(seed, 'M')), cfg.latents,
                                         cfg.spike_scale, substream(seed, 'S'));
    return m;
}

bool exact_error_available(const ExperimentConfig& cfg) {
    return cfg.m_test == 0 && !cfg.model.rademacher_design && cfg.latents == 0;
}

double interpolant_error(const ExperimentConfig& cfg, const ModelConfig& m, const Vec& theta) {
    if (exact_error_available(cfg)) return generalization_error_exact(theta, m);
    const std::size_t mt = cfg.m_test > 0 ? cfg.m_test : 20000;
    return generalization_error(theta, m, mt, substream(m.seed, 'E'));
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.out_dir);
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path);
    f << content;
}

// Bayes error of the generated data: Lambda = I, so the mixture value is Phi(-rho).
double bayes_for(const ExperimentConfig& cfg, double rho) {
    switch (cfg.model.variant) {
        case Variant::gmm: return ncdf(-rho);
        case Variant::misspecified:
            return bayes_error(rho, cfg.model.gamma > 0 ? cfg.model.link.smoothed(cfg.model.gamma) : cfg.model.link);
        case Variant::diagonal: break;
    }
    return bayes_error(rho, cfg.model.link);
}

Vec column(const std::vector<SweepRow>& rows, double SweepRow::*field) {
    Vec v;
    for (const auto& r : rows) v.push_back(r.*field);
    return v;
}

}  // namespace

std::string csv_header_comment(const ExperimentConfig& cfg) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "# config_hash=%016llx root_seed=%llu\n",
                  static_cast<unsigned long long>(cfg.hash()), static_cast<unsigned long long>(cfg.seed));
    return buf;
}

std::vector<SweepRow> sweep_psi(const ExperimentConfig& cfg, bool with_theory, bool with_l2) {
    check_config(cfg);
    const double rho = cfg.rho_list.front();
    const std::size_t G = cfg.psi_list.size(), R = static_cast<std::size_t>(cfg.replicates);
    std::vector<SweepRow> rows(G);

    struct Task {
        double kappa = 0.0, err = kNaN;
        bool sep = false;
        std::string fail;
    };
    std::vector<Task> tasks(G * R);
#pragma omp parallel for schedule(dynamic)
    for (long long t = 0; t < static_cast<long long>(G * R); ++t) {
        const std::size_t g = static_cast<std::size_t>(t) / R;
        const int r = static_cast<int>(static_cast<std::size_t>(t) % R);
        Task& task = tasks[static_cast<std::size_t>(t)];
        try {
            const double psi = cfg.psi_list[g];
            const ModelConfig m = replicate_model(cfg, psi, rho, point_seed(cfg.seed, r, psi));
            const Dataset d = sample(m);
            const MarginResult mr = max_margin_l1(d);
            task.sep = mr.separable();
            task.kappa = std::sqrt(static_cast<double>(d.p())) * mr.kappa;
            if (task.sep) task.err = interpolant_error(cfg, m, mr.theta);
        } catch (const std::exception& e) {
            task.fail = e.what();
        }
    }

    std::vector<AsymptoticPrediction> preds(G);
    std::vector<double> l2(G, kNaN);
    std::vector<std::string> theory_fail(G);
    if (with_theory) {
        const MCCloud cloud = theory_cloud(cfg, rho);
        const SpectralMeasure mu = theory_measure(cfg);
#pragma omp parallel for schedule(dynamic)
        for (long long g = 0; g < static_cast<long long>(G); ++g) {
            try {
                preds[static_cast<std::size_t>(g)] = kappa_star(mu, cfg.psi_list[static_cast<std::size_t>(g)], cloud);
                if (with_l2) {
                    SolveOptions o;
                    o.q = 2.0;
                    l2[static_cast<std::size_t>(g)] =
                        kappa_star(mu, cfg.psi_list[static_cast<std::size_t>(g)], cloud, o).kappa_star;
                }
            } catch (const std::exception& e) {
                theory_fail[static_cast<std::size_t>(g)] = e.what();
            }
        }
    }

    for (std::size_t g = 0; g < G; ++g) {
        SweepRow& row = rows[g];
        row.psi = cfg.psi_list[g];
        ModelConfig m = cfg.model;
        m.psi = row.psi;
        row.p = m.p();
        std::string fails;
        for (std::size_t r = 0; r < R; ++r) {
            const Task& t = tasks[g * R + r];
            if (!t.fail.empty()) {
                fails += "rep" + std::to_string(r) + ": " + t.fail + "; ";
                continue;
            }
            row.kappa_lp.push_back(t.kappa);
            if (t.sep) {
                ++row.separable;
                row.err_emp.push_back(t.err);
            }
        }
        row.kappa_lp_mean = mean(row.kappa_lp);
        row.kappa_lp_sd = sd(row.kappa_lp);
        row.err_emp_mean = mean(row.err_emp);
        row.bayes = bayes_for(cfg, rho);
        if (with_theory) {
            const auto& pr = preds[g];
            row.kappa_star = pr.kappa_star;
            row.err_star = pr.err_star;
            row.psi_threshold = pr.psi_threshold;
            row.kappa_l2_star = l2[g];
            if (!theory_fail[g].empty()) {
                fails += "theory: " + theory_fail[g];
                row.kappa_star = row.err_star = kNaN;
            }
        } else {
            row.kappa_star = row.err_star = kNaN;
        }
        if (!fails.empty()) row.status = fails;
    }
    return rows;
}

std::vector<HeatCell> heatmap_grid(const ExperimentConfig& cfg) {
    check_config(cfg);
    const std::size_t P = cfg.psi_list.size(), Q = cfg.rho_list.size(), R = static_cast<std::size_t>(cfg.replicates);
    std::vector<HeatCell> cells(P * Q);
    struct Task {
        double kappa = 0.0, err = kNaN;
        std::string fail;
    };
    std::vector<Task> tasks(P * Q * R);
#pragma omp parallel for schedule(dynamic)
    for (long long t = 0; t < static_cast<long long>(P * Q * R); ++t) {
        const std::size_t cell = static_cast<std::size_t>(t) / R;
        const int r = static_cast<int>(static_cast<std::size_t>(t) % R);
        const double psi = cfg.psi_list[cell / Q], rho = cfg.rho_list[cell % Q];
        Task& task = tasks[static_cast<std::size_t>(t)];
        try {
            const ModelConfig m = replicate_model(cfg, psi, rho, point_seed(cfg.seed, r, psi, rho));
            const Dataset d = sample(m);
            const MarginResult mr = max_margin_l1(d);
            task.kappa = std::sqrt(static_cast<double>(d.p())) * mr.kappa;
            if (mr.separable()) task.err = interpolant_error(cfg, m, mr.theta);
        } catch (const std::exception& e) {
            task.fail = e.what();
        }
    }
    const SpectralMeasure mu = theory_measure(cfg);
    std::vector<MCCloud> clouds;
    for (double rho : cfg.rho_list) clouds.push_back(theory_cloud(cfg, rho));
#pragma omp parallel for schedule(dynamic)
    for (long long c = 0; c < static_cast<long long>(P * Q); ++c) {
        HeatCell& h = cells[static_cast<std::size_t>(c)];
        h.psi = cfg.psi_list[static_cast<std::size_t>(c) / Q];
        h.rho = cfg.rho_list[static_cast<std::size_t>(c) % Q];
        h.status = "ok";
        try {
            const AsymptoticPrediction pr = kappa_star(mu, h.psi, clouds[static_cast<std::size_t>(c) % Q]);
            h.kappa_star = pr.kappa_star;
            h.err_star = pr.err_star;
        } catch (const std::exception& e) {
            h.kappa_star = h.err_star = kNaN;
            h.status = std::string("theory: ") + e.what();
        }
        Vec ks, es;
        for (std::size_t r = 0; r < R; ++r) {
            const Task& t = tasks[static_cast<std::size_t>(c) * R + r];
            if (!t.fail.empty()) {
                h.status = "rep" + std::to_string(r) + ": " + t.fail;
                continue;
            }
            ks.push_back(t.kappa);
            if (!std::isnan(t.err)) es.push_back(t.err);
        }
        h.kappa_lp_mean = mean(ks);
        h.err_emp_mean = mean(es);
    }
    return cells;
}

UniversalityA universality_features(const ExperimentConfig& cfg) {
    check_config(cfg);
    const std::size_t n = cfg.model.n;
    const std::size_t dfeat = static_cast<std::size_t>(std::llround(cfg.feature_ratio * static_cast<double>(n)));
    const std::size_t pcov = cfg.feature_p > 0 ? cfg.feature_p : dfeat;
    const double psi = static_cast<double>(pcov) / static_cast<double>(n);
    const Activation act = activation_by_name(cfg.activation);
    const std::size_t R = static_cast<std::size_t>(cfg.replicates);
    UniversalityA out;
    out.rows.resize(R);
    std::vector<Hermite> herm(R);
    std::vector<std::string> fails(R);
#pragma omp parallel for schedule(dynamic)
    for (long long r = 0; r < static_cast<long long>(R); ++r) {
        try {
            const std::uint64_t seed = point_seed(cfg.seed, static_cast<int>(r), psi);
            const ModelConfig m = replicate_model(cfg, psi, cfg.rho_list.front(), seed);
            const Dataset d = sample(m);
            const FeaturePair fp = make_feature_pair(d, dfeat, act, substream(seed, 'F'));
            const double sd_ = std::sqrt(static_cast<double>(dfeat));
            UniversalityRow& row = out.rows[static_cast<std::size_t>(r)];
            row.replicate = static_cast<int>(r);
            row.kappa_a = sd_ * max_margin_l1(with_features(d, fp.A)).kappa;
            row.kappa_b = sd_ * max_margin_l1(with_features(d, fp.B)).kappa;
            herm[static_cast<std::size_t>(r)] = {fp.mu0, fp.mu1, fp.mu2};
        } catch (const std::exception& e) {
            fails[static_cast<std::size_t>(r)] = e.what();
        }
    }
    for (const auto& f : fails)
        if (!f.empty()) throw NumericalError("universality replicate failed: " + f);
    Vec mm, dd;
    for (const auto& row : out.rows) {
        mm.push_back(0.5 * (row.kappa_a + row.kappa_b));
        dd.push_back(std::abs(row.kappa_a - row.kappa_b));
    }
    out.mean_margin = mean(mm);
    out.mean_abs_diff = mean(dd);
    out.mu0 = herm.front().mu0;
    out.mu1 = herm.front().mu1;
    out.mu2 = herm.front().mu2;
    return out;
}

BoostRun boost_experiment(const ExperimentConfig& cfg) {
    check_config(cfg);
    const double psi = cfg.psi_list.front(), rho = cfg.rho_list.front();
    const ModelConfig m = replicate_model(cfg, psi, rho, point_seed(cfg.seed, 0, psi));
    const Dataset d = sample(m);
    const Matrix Z = signed_design(d);
    BoostRun run;
    BoostSummary& s = run.summary;
    s.n = d.n();
    s.p = d.p();
    const MarginResult lp = max_margin_l1(Z);
    if (!lp.separable()) throw NumericalError("boost-run: instance is not separable");
    s.kappa_lp = lp.kappa;
    s.M = max_abs(Z);

    const Certificate cert = certified_T(s.n, s.M, s.kappa_lp, cfg.eps, s.p, 1.0, BoundKind::shrinkage);
    s.certified_T = cert.T;
    BoostOptions bo;
    bo.rule = StepRule::shrinkage;
    bo.beta = cert.beta;
    bo.T = std::min(cert.T, cfg.max_T);
    bo.trace_every = std::max(1L, bo.T / 1000);
    const BoostState st = boost_run(Z, bo);
    s.steps = st.t;
    s.certified = cert.T <= cfg.max_T;
    s.normalized_margin = st.normalized_margin();
    s.potential_slack = st.potential_slack;
    std::ostringstream tr;
    write_trace_csv(st, tr);
    run.trace_csv = tr.str();

    // Zero-initialized run with beta = 1/M^2 until the first interpolating iterate.
    const Certificate zero = certified_T(s.n, s.M, s.kappa_lp, 1.0, s.p, 1.0, BoundKind::zero_error);
    s.zero_error_T = zero.T;
    BoostOptions za;
    za.rule = StepRule::adaptive;
    za.beta = zero.beta;
    za.T = zero.T;
    za.stop_at_interp = true;
    za.trace_every = za.T;
    const BoostState sz = boost_run(Z, za);
    if (sz.interp_time) {
        s.interp_time = *sz.interp_time;
        s.active_at_interp = static_cast<long>(*sz.active_at_interp);
        const double lp2 = std::log(static_cast<double>(s.p));
        s.sparsity_ratio = static_cast<double>(s.active_at_interp) / (static_cast<double>(s.p) * lp2 * lp2);
    }
    try {
        const AsymptoticPrediction pr = kappa_star(theory_measure(cfg), psi, theory_cloud(cfg, rho));
        s.kappa_star = pr.kappa_star;
        s.err_star = pr.err_star;
        s.sparsity_bound = pr.kappa_star > 0 ? 12.0 / (pr.kappa_star * pr.kappa_star) : kNaN;
    } catch (const NumericalError&) {
        s.kappa_star = s.err_star = s.sparsity_bound = kNaN;
    }
    s.gen_error = interpolant_error(cfg, m, st.theta);
    return run;
}

void run_sweep_psi(const ExperimentConfig& cfg, std::ostream& log) {
    const auto rows = sweep_psi(cfg);
    std::ostringstream os;
    os << csv_header_comment(cfg)
       << "psi,p,replicates,separable,kappa_lp_mean,kappa_lp_sd,kappa_star,rel_gap,err_emp_mean,err_star,bayes,"
          "status\n";
    for (const auto& r : rows) {
        const double gap = r.kappa_star > 0 ? std::abs(r.kappa_lp_mean - r.kappa_star) / r.kappa_star : kNaN;
        os << num(r.psi) << ',' << r.p << ',' << r.kappa_lp.size() << ',' << r.separable << ','
           << num(r.kappa_lp_mean) << ',' << num(r.kappa_lp_sd) << ',' << num(r.kappa_star) << ',' << num(gap) << ','
           << num(r.err_emp_mean) << ',' << num(r.err_star) << ',' << num(r.bayes) << ",\"" << r.status << "\"\n";
        log << "psi=" << r.psi << " lp=" << num(r.kappa_lp_mean) << " kappa*=" << num(r.kappa_star)
            << " err=" << num(r.err_emp_mean) << " err*=" << num(r.err_star) << '\n';
    }
    write_file(out_path(cfg, "sweep_psi.csv"), os.str());
    if (cfg.plots) {
        const Vec psi = column(rows, &SweepRow::psi);
        write_file(out_path(cfg, "sweep_psi_margin.svg"),
                   svg::line_plot("max-l1-margin", "p/n", "sqrt(p) kappa",
                                  {{"LP mean", psi, column(rows, &SweepRow::kappa_lp_mean), false},
                                   {"theory", psi, column(rows, &SweepRow::kappa_star), true}}));
        write_file(out_path(cfg, "sweep_psi_error.svg"),
                   svg::line_plot("generalization error", "p/n", "error",
                                  {{"interpolant", psi, column(rows, &SweepRow::err_emp_mean), false},
                                   {"theory", psi, column(rows, &SweepRow::err_star), true},
                                   {"Bayes", psi, column(rows, &SweepRow::bayes), true}}));
    }
}

void run_normalized_margin(const ExperimentConfig& cfg, std::ostream& log) {
    const auto rows = sweep_psi(cfg, true, true);
    std::ostringstream os;
    os << csv_header_comment(cfg)
       << "psi,kappa_star_over_sqrt_psi,lp_over_sqrt_psi,classical_bound,l2_kappa_star_over_sqrt_psi,increasing\n";
    Vec psi, th, lp, l2;
    double prev = -1.0;
    bool inc = true, half = true;
    for (const auto& r : rows) {
        const double rs = std::sqrt(r.psi);
        const double k = r.kappa_star / rs, bound = r.kappa_star > 0 ? rs / r.kappa_star : kNaN;
        const bool up = r.kappa_star > 0 && k > prev;
        if (r.kappa_star > 0) {
            inc = inc && up;
            half = half && bound > 0.5;
            prev = k;
        }
        psi.push_back(r.psi);
        th.push_back(k);
        lp.push_back(r.kappa_lp_mean / rs);
        l2.push_back(r.kappa_l2_star / rs);
        os << num(r.psi) << ',' << num(k) << ',' << num(r.kappa_lp_mean / rs) << ',' << num(bound) << ','
           << num(r.kappa_l2_star / rs) << ',' << (up ? 1 : 0) << '\n';
    }
    log << "normalized margin increasing on separable points: " << (inc ? "yes" : "no")
        << "; classical bound above 0.5: " << (half ? "yes" : "no") << '\n';
    write_file(out_path(cfg, "normalized_margin.csv"), os.str());
    if (cfg.plots)
        write_file(out_path(cfg, "normalized_margin.svg"),
                   svg::line_plot("normalized margin", "p/n", "kappa / sqrt(psi)",
                                  {{"LP mean", psi, lp, false}, {"l1 theory", psi, th, true}, {"l2 theory", psi, l2, true}}));
}

void run_heatmap(const ExperimentConfig& cfg, std::ostream& log) {
    const auto cells = heatmap_grid(cfg);
    std::ostringstream os;
    os << csv_header_comment(cfg) << "psi,rho,kappa_star,kappa_lp_mean,rel_gap,err_star,err_emp_mean,status\n";
    const std::size_t P = cfg.psi_list.size(), Q = cfg.rho_list.size();
    Matrix km(Q, P), kl(Q, P), em(Q, P), el(Q, P);
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const HeatCell& h = cells[c];
        const double gap = h.kappa_star > 0 ? std::abs(h.kappa_lp_mean - h.kappa_star) / h.kappa_star : kNaN;
        os << num(h.psi) << ',' << num(h.rho) << ',' << num(h.kappa_star) << ',' << num(h.kappa_lp_mean) << ','
           << num(gap) << ',' << num(h.err_star) << ',' << num(h.err_emp_mean) << ",\"" << h.status << "\"\n";
        const std::size_t i = c % Q, j = c / Q;
        km(i, j) = h.kappa_star;
        kl(i, j) = h.kappa_lp_mean;
        em(i, j) = h.err_star;
        el(i, j) = h.err_emp_mean;
    }
    log << "heatmap: " << cells.size() << " cells\n";
    write_file(out_path(cfg, "heatmap.csv"), os.str());
    if (cfg.plots) {
        const Vec& xs = cfg.psi_list;
        const Vec& ys = cfg.rho_list;
        write_file(out_path(cfg, "heatmap_margin_theory.svg"), svg::heatmap("margin, theory", "p/n", "rho", xs, ys, km));
        write_file(out_path(cfg, "heatmap_margin_lp.svg"), svg::heatmap("margin, LP", "p/n", "rho", xs, ys, kl));
        write_file(out_path(cfg, "heatmap_error_theory.svg"), svg::heatmap("error, theory", "p/n", "rho", xs, ys, em));
        write_file(out_path(cfg, "heatmap_error_lp.svg"), svg::heatmap("error, LP", "p/n", "rho", xs, ys, el));
    }
}

void run_universality(const ExperimentConfig& cfg, std::ostream& log) {
    if (cfg.mode == "A") {
        const UniversalityA u = universality_features(cfg);
        std::ostringstream os;
        os << csv_header_comment(cfg) << "replicate,kappa_a,kappa_b,abs_diff\n";
        for (const auto& r : u.rows)
            os << r.replicate << ',' << num(r.kappa_a) << ',' << num(r.kappa_b) << ','
               << num(std::abs(r.kappa_a - r.kappa_b)) << '\n';
        os << "# mean_margin=" << num(u.mean_margin) << " mean_abs_diff=" << num(u.mean_abs_diff)
           << " mu0=" << num(u.mu0) << " mu1=" << num(u.mu1) << " mu2=" << num(u.mu2) << '\n';
        log << "mean margin " << num(u.mean_margin) << ", mean |A - B| " << num(u.mean_abs_diff) << '\n';
        write_file(out_path(cfg, "universality_features.csv"), os.str());
        return;
    }
    ExperimentConfig g = cfg, r = cfg;
    g.model.rademacher_design = false;
    r.model.rademacher_design = true;
    const auto rg = sweep_psi(g, false), rr = sweep_psi(r, false);
    std::ostringstream os;
    os << csv_header_comment(cfg)
       << "psi,margin_gaussian,margin_rademacher,abs_diff,excess_err_gaussian,excess_err_rademacher\n";
    Vec psi, mg, mr, eg, er;
    for (std::size_t k = 0; k < rg.size(); ++k) {
        const double b = rg[k].bayes;
        psi.push_back(rg[k].psi);
        mg.push_back(rg[k].kappa_lp_mean);
        mr.push_back(rr[k].kappa_lp_mean);
        eg.push_back(rg[k].err_emp_mean - b);
        er.push_back(rr[k].err_emp_mean - b);
        os << num(psi.back()) << ',' << num(mg.back()) << ',' << num(mr.back()) << ','
           << num(std::abs(mg.back() - mr.back())) << ',' << num(eg.back()) << ',' << num(er.back()) << '\n';
        log << "psi=" << psi.back() << " gaussian=" << num(mg.back()) << " rademacher=" << num(mr.back()) << '\n';
    }
    write_file(out_path(cfg, "universality_designs.csv"), os.str());
    if (cfg.plots) {
        write_file(out_path(cfg, "universality_margin.svg"),
                   svg::line_plot("max-l1-margin by design law", "p/n", "sqrt(p) kappa",
                                  {{"Gaussian", psi, mg, true}, {"Rademacher", psi, mr, true}}));
        write_file(out_path(cfg, "universality_error.svg"),
                   svg::line_plot("test minus Bayes error", "p/n", "excess error",
                                  {{"Gaussian", psi, eg, true}, {"Rademacher", psi, er, true}}));
    }
}

void run_boost(const ExperimentConfig& cfg, std::ostream& log) {
    const BoostRun run = boost_experiment(cfg);
    const BoostSummary& s = run.summary;
    std::ostringstream os;
    os << csv_header_comment(cfg) << "quantity,value\n"
       << "n," << s.n << "\np," << s.p << "\nkappa_lp," << num(s.kappa_lp) << "\nM," << num(s.M)
       << "\ncertified_T," << s.certified_T << "\nsteps," << s.steps << "\ncertified," << (s.certified ? 1 : 0)
       << "\nnormalized_margin," << num(s.normalized_margin) << "\nmargin_ratio," << num(s.normalized_margin / s.kappa_lp)
       << "\npotential_slack," << num(s.potential_slack) << "\nzero_error_T," << s.zero_error_T
       << "\ninterp_time," << s.interp_time << "\nactive_at_interp," << s.active_at_interp << "\nsparsity_ratio,"
       << num(s.sparsity_ratio) << "\nsparsity_bound," << num(s.sparsity_bound) << "\nkappa_star," << num(s.kappa_star)
       << "\ngen_error," << num(s.gen_error) << "\nerr_star," << num(s.err_star) << '\n';
    write_file(out_path(cfg, "boost_summary.csv"), os.str());
    write_file(out_path(cfg, "boost_trace.csv"), csv_header_comment(cfg) + run.trace_csv);
    log << "normalized margin " << num(s.normalized_margin) << " vs LP " << num(s.kappa_lp) << " after " << s.steps
        << " of " << s.certified_T << " certified steps\n";
    if (cfg.plots) {
        Vec t, gam, lpv;
        std::istringstream is(run.trace_csv);
        std::string line;
        std::getline(is, line);
        while (std::getline(is, line)) {
            std::istringstream ls(line);
            std::string a, b;
            std::getline(ls, a, ',');
            std::getline(ls, b, ',');
            t.push_back(std::stod(a));
            gam.push_back(std::stod(b));
            lpv.push_back(s.kappa_lp);
        }
        write_file(out_path(cfg, "boost_trace.svg"),
                   svg::line_plot("dual gap of boosting weights", "t", "|Z'eta_t|_inf",
                                  {{"gamma_t", t, gam, true}, {"LP margin", t, lpv, true}}));
    }
}

void run_predict(const ExperimentConfig& cfg, std::ostream& log) {
    check_config(cfg);
    const SpectralMeasure mu = theory_measure(cfg);
    std::ostringstream os;
    os << csv_header_comment(cfg);
    write_solution_header(os);
    for (double rho : cfg.rho_list) {
        const MCCloud cloud = theory_cloud(cfg, rho);
        for (double psi : cfg.psi_list) {
            SolveOptions o;
            o.q = cfg.q;
            const AsymptoticPrediction pr = kappa_star(mu, psi, cloud, o);
            write_solution_row(os, rho, pr);
            log << "psi=" << psi << " rho=" << rho << " kappa*=" << num(pr.kappa_star) << '\n';
        }
    }
    write_file(out_path(cfg, "predict.csv"), os.str());
}

void run_margin(const ExperimentConfig& cfg, std::ostream& log) {
    check_config(cfg);
    const double psi = cfg.psi_list.front(), rho = cfg.rho_list.front();
    const ModelConfig m = replicate_model(cfg, psi, rho, cfg.seed);
    const Dataset d = sample(m);
    const Matrix Z = signed_design(d);
    const MarginResult mr = max_margin_l1(Z);
    const double rp = std::sqrt(static_cast<double>(d.p()));
    std::ostringstream os;
    os << csv_header_comment(cfg) << "quantity,value\n"
       << "n," << d.n() << "\np," << d.p() << "\nseparable," << (mr.separable() ? 1 : 0) << "\nkappa_l1,"
       << num(mr.kappa) << "\nsqrt_p_kappa_l1," << num(rp * mr.kappa) << "\ndual_value," << num(mr.dual_value)
       << "\nsimplex_iterations," << mr.iterations << '\n';
    if (mr.separable()) {
        const Interpolant it = min_norm_interpolant_l1(Z);
        os << "interpolant_norm," << num(it.norm) << "\nnorm_times_kappa," << num(it.norm * mr.kappa)
           << "\nxi_below," << num(xi_value(Z, 0.99 * rp * mr.kappa)) << "\nxi_above,"
           << num(xi_value(Z, 1.01 * rp * mr.kappa)) << "\nactive_features," << active_features(mr.theta)
           << "\nangle," << num(empirical_angle(mr.theta, d.theta_star, d.lambda)) << "\ngen_error,"
           << num(interpolant_error(cfg, m, mr.theta)) << '\n';
    }
    write_file(out_path(cfg, "margin.csv"), os.str());
    std::ostringstream th;
    th << csv_header_comment(cfg) << "j,theta\n";
    for (std::size_t j = 0; j < mr.theta.size(); ++j) th << j << ',' << num(mr.theta[j]) << '\n';
    write_file(out_path(cfg, "margin_theta.csv"), th.str());
    log << "sqrt(p) kappa = " << num(rp * mr.kappa) << (mr.separable() ? "" : " (not separable)") << '\n';
}

int run_selfcheck(const ExperimentConfig& cfg, std::ostream& log) {
    int failed = 0;
    auto check = [&](const std::string& name, bool ok, const std::string& detail) {
        log << (ok ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
        failed += ok ? 0 : 1;
    };
    {
        const auto t0 = std::chrono::steady_clock::now();
        const MCCloud cloud = make_cloud(CloudKind::glm, cfg.mc_samples, 1.0, LinkFunction::logistic(),
                                         substream(cfg.seed, 'C'));
        const ThresholdResult th = separability_threshold(cloud);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        check("separability threshold", std::abs(th.psi_star - 0.43) <= 0.03 && secs < 10.0,
              "psi* = " + num(th.psi_star) + " in " + num(secs) + " s");
    }
    {
        Dataset d;
        d.X = Matrix(2, 2);
        d.X(0, 0) = 1;
        d.X(1, 1) = 1;
        d.y = {1, 1};
        const MarginResult r = max_margin_l1(d);
        check("two-point margin", std::abs(r.kappa - 0.5) < 1e-12, "kappa = " + num(r.kappa));
        Dataset e;
        e.X = Matrix(2, 2);
        e.X(0, 0) = 1;
        e.X(1, 0) = 1;
        e.y = {1, -1};
        check("opposite labels", !max_margin_l1(e).separable(), "non-separable");
    }
    {
        double worst = 0.0;
        for (int k = 0; k < 5; ++k) {
            ModelConfig m;
            m.n = 20;
            m.psi = 2.0;
            m.rho = 3.0;
            m.seed = substream(cfg.seed, 100 + static_cast<std::uint64_t>(k));
            const Matrix Z = signed_design(sample(m));
            const MarginResult r = max_margin_l1(Z);
            if (!r.separable()) continue;
            worst = std::max(worst, std::abs(r.kappa - dual_margin(Z)));
            worst = std::max(worst, std::abs(r.kappa * min_norm_interpolant_l1(Z).norm - 1.0));
        }
        check("LP duality", worst <= 1e-8, "max deviation " + num(worst));
    }
    {
        double worst = 0.0;
        Stream st(substream(cfg.seed, 'P'));
        for (int k = 0; k < 50; ++k) {
            const double t = 6 * st.uniform() - 3, lam = 2 * st.uniform(), q = 1 + st.uniform();
            const double x = prox_lq(t, lam, q);
            const double fx = lam * std::pow(std::abs(x), q) + 0.5 * (x - t) * (x - t);
            for (int j = -4000; j <= 4000; ++j) {
                const double z = 3.0 * j / 4000.0;
                const double fz = lam * std::pow(std::abs(z), q) + 0.5 * (z - t) * (z - t);
                worst = std::max(worst, fx - fz);
            }
        }
        check("prox optimality", worst <= 1e-9, "max objective excess " + num(worst));
    }
    {
        const MCCloud cloud = make_cloud(CloudKind::glm, cfg.mc_samples, 1.0, LinkFunction::logistic(), 5);
        const double err = derivative_check(cloud, 1.0, {0.5, 1.2});
        check("F gradient", err <= 1e-3, "relative error " + num(err));
    }
    {
        const long a = certified_T(100, 1.0, 0.5, 0.99, 1, 1.0, BoundKind::zero_error).T;
        const long b = certified_T(100, 1.0, 0.5, 0.5, 1, 1.0, BoundKind::shrinkage).T;
        check("certified step counts", a == 45 && b == 180, std::to_string(a) + ", " + std::to_string(b));
    }
    log << (failed == 0 ? "all checks passed" : std::to_string(failed) + " check(s) failed") << '\n';
    return failed;
}

}  // namespace hdm
