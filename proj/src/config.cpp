#include "leakloc/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace leakloc {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kPresetTau = 0.99 / 25.0;
constexpr double kPresetSigma = kPresetTau / 3.0;

ExperimentConfig experiment1() {
    ExperimentConfig c;
    c.lasers.sources = {{0.1, 0.1}, {0.1, 0.4}, {0.4, 0.1}, {0.4, 0.4}};
    c.truth.mu.spikes = {{{0.1, 0.3}, 0.08}, {{0.4, 0.25}, 0.05}, {{0.25, 0.13}, 0.06}};
    c.truth.k = 0.01;
    c.truth.c = 0.5 * Eigen::Vector2d(std::cos(std::numbers::pi / 6.0),
                                      std::sin(std::numbers::pi / 6.0));
    c.optimizer.tau = kPresetTau;
    c.optimizer.sigma = kPresetSigma;
    return c;
}

ExperimentConfig experiment2() {
    ExperimentConfig c = experiment1();
    c.truth.mu.spikes = {{{0.2, 0.3}, 0.15}, {{0.4, 0.1}, 0.04}};
    c.truth.k = 0.02;
    c.truth.c = 0.1 * Eigen::Vector2d(std::cos(2.0 * std::numbers::pi / 3.0),
                                      std::sin(2.0 * std::numbers::pi / 3.0));
    return c;
}

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw ConfigError("config field '" + field + "': " + what);
}

// typed getter: key absent -> keep fallback, wrong type -> error naming the field
template <typename T>
void get_to(const Json& obj, const std::string& scope, const std::string& key, T& out) {
    if (!obj.contains(key)) return;
    try {
        obj.at(key).get_to(out);
    } catch (const Json::exception& e) {
        fail(scope.empty() ? key : scope + "." + key, e.what());
    }
}

void reject_unknown(const Json& obj, const std::string& scope,
                    std::initializer_list<const char*> known) {
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* k : known)
            if (item.key() == k) ok = true;
        if (!ok) fail(scope.empty() ? item.key() : scope + "." + item.key(), "unknown key");
    }
}

Eigen::Vector2d parse_point(const Json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        fail(field, "expected [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

ExperimentConfig preset(const std::string& name) {
    if (name == "experiment1") return experiment1();
    if (name == "experiment2") return experiment2();
    throw ConfigError("unknown preset '" + name + "' (valid: experiment1, experiment2)");
}

ExperimentConfig parse_config(const std::string& text) {
    bool blank = true;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) blank = false;
    if (blank) return experiment1();

    Json root;
    try {
        root = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be an object");

    ExperimentConfig c = experiment1();
    if (root.contains("preset")) {
        if (!root["preset"].is_string()) fail("preset", "expected a preset name string");
        c = preset(root["preset"].get<std::string>());
    }

    reject_unknown(root, "",
                   {"preset", "mesh", "time", "lasers", "truth", "noise", "regularization",
                    "optimizer", "rng_seed", "out_dir"});

    if (root.contains("mesh")) {
        const Json& j = root["mesh"];
        reject_unknown(j, "mesh", {"nx", "ny", "Lx", "Ly"});
        get_to(j, "mesh", "nx", c.mesh.nx);
        get_to(j, "mesh", "ny", c.mesh.ny);
        get_to(j, "mesh", "Lx", c.mesh.Lx);
        get_to(j, "mesh", "Ly", c.mesh.Ly);
    }
    if (root.contains("time")) {
        const Json& j = root["time"];
        reject_unknown(j, "time", {"T", "N_T", "cfl_safety", "n_sub"});
        get_to(j, "time", "T", c.time.T);
        get_to(j, "time", "N_T", c.time.N_T);
        get_to(j, "time", "cfl_safety", c.time.cfl_safety);
        get_to(j, "time", "n_sub", c.time.n_sub);
    }
    if (root.contains("lasers")) {
        const Json& j = root["lasers"];
        reject_unknown(j, "lasers", {"sources", "mirrors_per_edge", "n_seg"});
        if (j.contains("sources")) {
            if (!j["sources"].is_array()) fail("lasers.sources", "expected a list of points");
            c.lasers.sources.clear();
            for (std::size_t i = 0; i < j["sources"].size(); ++i)
                c.lasers.sources.push_back(parse_point(
                    j["sources"][i], "lasers.sources[" + std::to_string(i) + "]"));
        }
        get_to(j, "lasers", "mirrors_per_edge", c.lasers.mirrors_per_edge);
        get_to(j, "lasers", "n_seg", c.lasers.n_seg);
    }
    if (root.contains("truth")) {
        const Json& j = root["truth"];
        reject_unknown(j, "truth", {"spikes", "k", "c"});
        if (j.contains("spikes")) {
            if (!j["spikes"].is_array()) fail("truth.spikes", "expected a list of [x, y, rate]");
            c.truth.mu.spikes.clear();
            for (std::size_t i = 0; i < j["spikes"].size(); ++i) {
                const Json& s = j["spikes"][i];
                const std::string field = "truth.spikes[" + std::to_string(i) + "]";
                if (!s.is_array() || s.size() != 3 || !s[0].is_number() || !s[1].is_number() ||
                    !s[2].is_number())
                    fail(field, "expected [x, y, rate]");
                c.truth.mu.spikes.push_back(
                    {{s[0].get<double>(), s[1].get<double>()}, s[2].get<double>()});
            }
        }
        get_to(j, "truth", "k", c.truth.k);
        if (j.contains("c")) c.truth.c = parse_point(j["c"], "truth.c");
    }
    if (root.contains("noise")) {
        const Json& j = root["noise"];
        reject_unknown(j, "noise", {"data", "k", "c", "mitigate_inverse_crime"});
        get_to(j, "noise", "data", c.noise.data_level);
        get_to(j, "noise", "k", c.noise.k_level);
        get_to(j, "noise", "c", c.noise.c_level);
        get_to(j, "noise", "mitigate_inverse_crime", c.noise.mitigate_inverse_crime);
    }
    if (root.contains("regularization")) {
        const Json& j = root["regularization"];
        reject_unknown(j, "regularization",
                       {"alpha", "k_weight", "c_weight", "k_min", "k_max", "c_min", "c_max"});
        get_to(j, "regularization", "alpha", c.reg.alpha);
        get_to(j, "regularization", "k_weight", c.reg.k_weight);
        get_to(j, "regularization", "c_weight", c.reg.c_weight);
        get_to(j, "regularization", "k_min", c.reg.k_min);
        get_to(j, "regularization", "k_max", c.reg.k_max);
        get_to(j, "regularization", "c_min", c.reg.c_min);
        get_to(j, "regularization", "c_max", c.reg.c_max);
    }
    if (root.contains("optimizer")) {
        const Json& j = root["optimizer"];
        reject_unknown(j, "optimizer",
                       {"variant", "tau", "sigma", "theta", "eps0", "merge_radius",
                        "merge_period", "merge_tol_rel", "max_outer", "slide_shrink",
                        "slide_max_tries", "weight_floor_rel", "fit_kc"});
        if (j.contains("variant")) {
            std::string v;
            get_to(j, "optimizer", "variant", v);
            if (v == "basic")
                c.variant = Variant::Basic;
            else if (v == "sliding")
                c.variant = Variant::Sliding;
            else
                fail("optimizer.variant", "expected \"basic\" or \"sliding\"");
        }
        get_to(j, "optimizer", "tau", c.optimizer.tau);
        get_to(j, "optimizer", "sigma", c.optimizer.sigma);
        get_to(j, "optimizer", "theta", c.optimizer.theta);
        get_to(j, "optimizer", "eps0", c.optimizer.eps0);
        get_to(j, "optimizer", "merge_radius", c.optimizer.merge_radius);
        get_to(j, "optimizer", "merge_period", c.optimizer.merge_period);
        get_to(j, "optimizer", "merge_tol_rel", c.optimizer.merge_tol_rel);
        get_to(j, "optimizer", "max_outer", c.optimizer.max_outer);
        get_to(j, "optimizer", "slide_shrink", c.optimizer.slide_shrink);
        get_to(j, "optimizer", "slide_max_tries", c.optimizer.slide_max_tries);
        get_to(j, "optimizer", "weight_floor_rel", c.optimizer.weight_floor_rel);
        get_to(j, "optimizer", "fit_kc", c.optimizer.fit_kc);
    }
    get_to(root, "", "rng_seed", c.rng_seed);
    get_to(root, "", "out_dir", c.out_dir);

    validate_config(c);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string dump_config(const ExperimentConfig& c) {
    Json j;
    j["mesh"] = {{"nx", c.mesh.nx}, {"ny", c.mesh.ny}, {"Lx", c.mesh.Lx}, {"Ly", c.mesh.Ly}};
    j["time"] = {{"T", c.time.T},
                 {"N_T", c.time.N_T},
                 {"cfl_safety", c.time.cfl_safety},
                 {"n_sub", c.time.n_sub}};
    Json sources = Json::array();
    for (const auto& s : c.lasers.sources) sources.push_back({s.x(), s.y()});
    j["lasers"] = {{"sources", sources},
                   {"mirrors_per_edge", c.lasers.mirrors_per_edge},
                   {"n_seg", c.lasers.n_seg}};
    Json spikes = Json::array();
    for (const auto& s : c.truth.mu.spikes) spikes.push_back({s.pos.x(), s.pos.y(), s.rate});
    j["truth"] = {{"spikes", spikes},
                  {"k", c.truth.k},
                  {"c", {c.truth.c.x(), c.truth.c.y()}}};
    j["noise"] = {{"data", c.noise.data_level},
                  {"k", c.noise.k_level},
                  {"c", c.noise.c_level},
                  {"mitigate_inverse_crime", c.noise.mitigate_inverse_crime}};
    j["regularization"] = {{"alpha", c.reg.alpha},   {"k_weight", c.reg.k_weight},
                           {"c_weight", c.reg.c_weight}, {"k_min", c.reg.k_min},
                           {"k_max", c.reg.k_max},   {"c_min", c.reg.c_min},
                           {"c_max", c.reg.c_max}};
    j["optimizer"] = {{"variant", c.variant == Variant::Basic ? "basic" : "sliding"},
                      {"tau", c.optimizer.tau},
                      {"sigma", c.optimizer.sigma},
                      {"theta", c.optimizer.theta},
                      {"eps0", c.optimizer.eps0},
                      {"merge_radius", c.optimizer.merge_radius},
                      {"merge_period", c.optimizer.merge_period},
                      {"merge_tol_rel", c.optimizer.merge_tol_rel},
                      {"max_outer", c.optimizer.max_outer},
                      {"slide_shrink", c.optimizer.slide_shrink},
                      {"slide_max_tries", c.optimizer.slide_max_tries},
                      {"weight_floor_rel", c.optimizer.weight_floor_rel},
                      {"fit_kc", c.optimizer.fit_kc}};
    j["rng_seed"] = c.rng_seed;
    j["out_dir"] = c.out_dir;
    return j.dump(2) + "\n";
}

void validate_config(const ExperimentConfig& c) {
    if (c.mesh.nx < 2) fail("mesh.nx", "must be >= 2");
    if (c.mesh.ny < 2) fail("mesh.ny", "must be >= 2");
    if (!(c.mesh.Lx > 0.0)) fail("mesh.Lx", "must be > 0");
    if (!(c.mesh.Ly > 0.0)) fail("mesh.Ly", "must be > 0");
    if (!(c.time.T > 0.0)) fail("time.T", "must be > 0");
    if (c.time.N_T < 1) fail("time.N_T", "must be >= 1");
    if (!(c.time.cfl_safety > 0.0) || c.time.cfl_safety > 1.0)
        fail("time.cfl_safety", "must be in (0, 1]");
    if (c.time.n_sub < 1) fail("time.n_sub", "must be >= 1");
    if (c.lasers.sources.empty()) fail("lasers.sources", "at least one laser is required");
    for (std::size_t i = 0; i < c.lasers.sources.size(); ++i) {
        const auto& s = c.lasers.sources[i];
        if (!(s.x() >= 0.0 && s.x() <= c.mesh.Lx && s.y() >= 0.0 && s.y() <= c.mesh.Ly))
            fail("lasers.sources[" + std::to_string(i) + "]", "outside the domain");
    }
    if (c.lasers.mirrors_per_edge < 1) fail("lasers.mirrors_per_edge", "must be >= 1");
    if (c.lasers.n_seg < 1) fail("lasers.n_seg", "must be >= 1");
    for (std::size_t i = 0; i < c.truth.mu.spikes.size(); ++i) {
        const auto& s = c.truth.mu.spikes[i];
        const std::string field = "truth.spikes[" + std::to_string(i) + "]";
        if (!(s.rate >= 0.0)) fail(field, "rate must be >= 0");
        if (!(s.pos.x() >= 0.0 && s.pos.x() <= c.mesh.Lx && s.pos.y() >= 0.0 &&
              s.pos.y() <= c.mesh.Ly))
            fail(field, "outside the domain");
    }
    if (!(c.truth.k > 0.0)) fail("truth.k", "must be > 0");
    if (!(c.noise.data_level >= 0.0)) fail("noise.data", "must be >= 0");
    if (!(c.noise.k_level >= 0.0)) fail("noise.k", "must be >= 0");
    if (!(c.noise.c_level >= 0.0)) fail("noise.c", "must be >= 0");
    if (!(c.reg.alpha >= 0.0)) fail("regularization.alpha", "must be >= 0");
    if (!(c.reg.k_weight >= 0.0)) fail("regularization.k_weight", "must be >= 0");
    if (!(c.reg.c_weight >= 0.0)) fail("regularization.c_weight", "must be >= 0");
    if (!(c.reg.k_min > 0.0)) fail("regularization.k_min", "must be > 0");
    if (!(c.reg.k_max >= c.reg.k_min)) fail("regularization.k_max", "must be >= k_min");
    if (!(c.reg.c_max >= c.reg.c_min)) fail("regularization.c_max", "must be >= c_min");
    if (!(c.optimizer.tau > 0.0)) fail("optimizer.tau", "must be > 0");
    if (!(c.optimizer.sigma > 0.0)) fail("optimizer.sigma", "must be > 0");
    if (!(c.optimizer.theta > 0.0)) fail("optimizer.theta", "must be > 0");
    if (!(c.optimizer.eps0 > 0.0)) fail("optimizer.eps0", "must be > 0");
    if (!(c.optimizer.merge_radius >= 0.0)) fail("optimizer.merge_radius", "must be >= 0");
    if (c.optimizer.merge_period < 0) fail("optimizer.merge_period", "must be >= 0");
    if (!(c.optimizer.merge_tol_rel >= 0.0)) fail("optimizer.merge_tol_rel", "must be >= 0");
    if (c.optimizer.max_outer < 0) fail("optimizer.max_outer", "must be >= 0");
    if (!(c.optimizer.slide_shrink > 0.0) || c.optimizer.slide_shrink >= 1.0)
        fail("optimizer.slide_shrink", "must be in (0, 1)");
    if (c.optimizer.slide_max_tries < 0) fail("optimizer.slide_max_tries", "must be >= 0");
    if (!(c.optimizer.weight_floor_rel >= 0.0) || c.optimizer.weight_floor_rel >= 1.0)
        fail("optimizer.weight_floor_rel", "must be in [0, 1)");
}

}  // namespace leakloc
