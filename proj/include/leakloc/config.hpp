#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "leakloc/adjoint.hpp"
#include "leakloc/forward.hpp"
#include "leakloc/observation.hpp"
#include "leakloc/optimizer.hpp"
#include "leakloc/simulate.hpp"

namespace leakloc {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MeshConfig {
    int nx = 32;
    int ny = 32;
    double Lx = 0.5;
    double Ly = 0.5;
};

// Ground truth used for data generation and recovery metrics.
struct TruthConfig {
    DiracMeasure mu;
    double k = 0.01;
    Eigen::Vector2d c = Eigen::Vector2d::Zero();
};

struct ExperimentConfig {
    MeshConfig mesh;
    SimSpec time;
    LaserConfig lasers;
    TruthConfig truth;
    NoiseSpec noise;
    RegConfig reg;
    OptConfig optimizer;
    Variant variant = Variant::Sliding;
    std::uint64_t rng_seed = 1;
    std::string out_dir = "out";
};

// Built-in experiment setups. Valid names: "experiment1", "experiment2".
ExperimentConfig preset(const std::string& name);

// JSON text -> config. Missing keys fall back to the experiment1 preset (so
// an empty object, or a file holding only whitespace, yields that preset); a
// top-level "preset" key swaps the fallback base. Unknown keys and malformed
// values raise ConfigError naming the offending field.
ExperimentConfig parse_config(const std::string& text);

// File variant of parse_config; nonexistent path raises ConfigError.
ExperimentConfig load_config(const std::string& path);

// Fully resolved JSON echo; feeding it back to parse_config reproduces the
// config exactly.
std::string dump_config(const ExperimentConfig& config);

// Range and consistency checks; raises ConfigError naming the field.
void validate_config(const ExperimentConfig& config);

}  // namespace leakloc
