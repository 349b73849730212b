#include "hdm/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "hdm/datagen.hpp"

namespace hdm {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double x;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': not a number: '" + v + "'");
    }
    if (pos != v.size()) throw ConfigError("key '" + key + "': trailing characters in '" + v + "'");
    return x;
}

long long to_int(const std::string& key, const std::string& v) {
    double x = to_double(key, v);
    if (x != static_cast<double>(static_cast<long long>(x)))
        throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
    return static_cast<long long>(x);
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    unsigned long long x;
    try {
        x = std::stoull(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': not an unsigned integer: '" + v + "'");
    }
    if (pos != v.size() || v.front() == '-') throw ConfigError("key '" + key + "': bad unsigned integer '" + v + "'");
    return x;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(to_double(key, item));
    }
    if (out.empty()) throw ConfigError("key '" + key + "': empty list");
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("key '" + key + "': expected a boolean, got '" + v + "'");
}

std::string list_str(const std::vector<double>& v) {
    std::ostringstream os;
    os << std::setprecision(17);
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    return os.str();
}

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::diagonal: return "diagonal";
        case Variant::gmm: return "gmm";
        case Variant::misspecified: return "misspecified";
    }
    return "?";
}

}  // namespace

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string ExperimentConfig::canonical() const {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "activation=" << activation << '\n'
       << "design=" << (model.rademacher_design ? "rademacher" : "gaussian") << '\n'
       << "eps=" << eps << '\n'
       << "experiment=" << experiment << '\n'
       << "feature_p=" << feature_p << '\n'
       << "feature_ratio=" << feature_ratio << '\n'
       << "gamma=" << model.gamma << '\n'
       << "latent=" << (model.latent == LatentLaw::rademacher ? "rademacher" : "gaussian") << '\n'
       << "latents=" << latents << '\n'
       << "link=" << model.link.name() << '\n'
       << "m_test=" << m_test << '\n'
       << "max_T=" << max_T << '\n'
       << "mc_samples=" << mc_samples << '\n'
       << "measure_file=" << measure_file << '\n'
       << "mode=" << mode << '\n'
       << "n=" << model.n << '\n'
       << "phi=" << model.phi << '\n'
       << "psi=" << list_str(psi_list) << '\n'
       << "q=" << q << '\n'
       << "replicates=" << replicates << '\n'
       << "rho=" << list_str(rho_list) << '\n'
       << "seed=" << seed << '\n'
       << "spike_scale=" << spike_scale << '\n'
       << "upsilon=" << model.upsilon << '\n'
       << "variant=" << variant_name(model.variant) << '\n';
    return os.str();
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a(canonical()); }

ExperimentConfig default_config(const std::string& experiment) {
    ExperimentConfig c;
    c.experiment = experiment;
    if (experiment == "sweep-psi" || experiment == "normalized-margin") {
        c.psi_list = {0.2, 0.3, 0.5, 1, 2, 3, 4, 5, 6};
        c.replicates = 10;
    } else if (experiment == "heatmap") {
        c.model.variant = Variant::gmm;
        c.psi_list = {0.5, 1, 2, 3, 4};
        c.rho_list = {0.5, 1, 1.5, 2};
        c.replicates = 2;
        c.model.n = 200;
    } else if (experiment == "universality") {
        c.psi_list = {2};
        c.mode = "A";
        c.feature_ratio = 2.0;
    } else if (experiment == "robustness-rademacher") {
        c.psi_list = {1, 2, 3, 4, 5, 6};
        c.mode = "B";
    } else if (experiment == "boost-run") {
        c.psi_list = {3};
        c.model.n = 100;
        c.replicates = 1;
    } else if (experiment == "predict") {
        c.psi_list = {1, 2, 3, 4, 5, 6};
    } else if (experiment == "margin") {
        c.psi_list = {3};
        c.model.n = 100;
        c.replicates = 1;
    } else if (experiment != "selfcheck") {
        throw ConfigError("unknown experiment: " + experiment);
    }
    return c;
}

void apply_key(ExperimentConfig& c, const std::string& key, const std::string& v) {
    if (key == "experiment") {
        c.experiment = v;
    } else if (key == "psi") {
        c.psi_list = to_list(key, v);
    } else if (key == "rho") {
        c.rho_list = to_list(key, v);
    } else if (key == "n") {
        long long n = to_int(key, v);
        if (n < 1) throw ConfigError("n must be >= 1");
        c.model.n = static_cast<std::size_t>(n);
    } else if (key == "replicates") {
        c.replicates = static_cast<int>(to_int(key, v));
    } else if (key == "mc_samples") {
        long long m = to_int(key, v);
        if (m < 100) throw ConfigError("mc_samples must be >= 100");
        c.mc_samples = static_cast<std::size_t>(m);
    } else if (key == "seed") {
        c.seed = to_u64(key, v);
    } else if (key == "out") {
        c.out_dir = v;
    } else if (key == "link") {
        if (v == "logistic") c.model.link = LinkFunction::logistic();
        else if (v == "pure_noise") c.model.link = LinkFunction::pure_noise();
        else throw ConfigError("link must be logistic or pure_noise");
    } else if (key == "variant") {
        if (v == "diagonal") c.model.variant = Variant::diagonal;
        else if (v == "gmm") c.model.variant = Variant::gmm;
        else if (v == "misspecified") c.model.variant = Variant::misspecified;
        else throw ConfigError("variant must be diagonal, gmm or misspecified");
    } else if (key == "upsilon") {
        c.model.upsilon = to_double(key, v);
    } else if (key == "latent") {
        if (v == "rademacher") c.model.latent = LatentLaw::rademacher;
        else if (v == "gaussian") c.model.latent = LatentLaw::gaussian;
        else throw ConfigError("latent must be rademacher or gaussian");
    } else if (key == "latents") {
        long long l = to_int(key, v);
        if (l < 0 || l > 8) throw ConfigError("latents must lie in [0, 8]");
        c.latents = static_cast<std::size_t>(l);
    } else if (key == "spike_scale") {
        c.spike_scale = to_double(key, v);
    } else if (key == "gamma") {
        c.model.gamma = to_double(key, v);
    } else if (key == "phi") {
        c.model.phi = to_double(key, v);
    } else if (key == "design") {
        if (v == "gaussian") c.model.rademacher_design = false;
        else if (v == "rademacher") c.model.rademacher_design = true;
        else throw ConfigError("design must be gaussian or rademacher");
    } else if (key == "eps") {
        c.eps = to_double(key, v);
        if (!(c.eps > 0 && c.eps < 1)) throw ConfigError("eps must lie in (0,1)");
    } else if (key == "max_T") {
        c.max_T = static_cast<long>(to_int(key, v));
    } else if (key == "q") {
        c.q = to_double(key, v);
    } else if (key == "activation") {
        activation_by_name(v);
        c.activation = v;
    } else if (key == "feature_ratio") {
        c.feature_ratio = to_double(key, v);
    } else if (key == "feature_p") {
        c.feature_p = static_cast<std::size_t>(to_int(key, v));
    } else if (key == "mode") {
        if (v != "A" && v != "B") throw ConfigError("mode must be A or B");
        c.mode = v;
    } else if (key == "m_test") {
        c.m_test = static_cast<std::size_t>(to_int(key, v));
    } else if (key == "plots") {
        c.plots = to_bool(key, v);
    } else if (key == "measure_file") {
        c.measure_file = v;
    } else {
        throw ConfigError("unknown config key: '" + key + "'");
    }
}

ExperimentConfig parse_config(std::istream& is, ExperimentConfig base) {
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
        // An empty measure_file means "use the default measure", as canonical() writes it.
        if (key.empty() || (val.empty() && key != "measure_file")) throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
        apply_key(base, key, val);
    }
    return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    return parse_config(f, std::move(base));
}

void check_config(const ExperimentConfig& c) {
    if (c.replicates < 1) throw ConfigError("replicates must be >= 1");
    if (c.psi_list.empty() || c.rho_list.empty()) throw ConfigError("grids must be nonempty");
    for (double p : c.psi_list)
        if (!(p > 0)) throw ConfigError("psi values must be positive");
    for (double r : c.rho_list)
        if (!(r > 0)) throw ConfigError("rho values must be positive");
    if (c.max_T < 1) throw ConfigError("max_T must be >= 1");
    if (!(c.q >= 1.0 && c.q <= 2.0)) throw ConfigError("q must lie in [1, 2]");
    if (!(c.feature_ratio > 0)) throw ConfigError("feature_ratio must be positive");
    if (c.model.variant == Variant::gmm && !(c.model.upsilon > 0 && c.model.upsilon < 1))
        throw ConfigError("upsilon must lie in (0,1)");
    if (c.model.gamma < 0 || c.model.phi < 0) throw ConfigError("gamma and phi must be >= 0");
}

}  // namespace hdm
