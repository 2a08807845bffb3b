#pragma once

// Command-line front end: config resolution, presets, manifests and the
// subcommand drivers.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "fracwave/fem.hpp"
#include "fracwave/fracquad.hpp"
#include "fracwave/recon.hpp"
#include "fracwave/timestepper.hpp"

namespace fracwave::cli {

/// Invalid configuration: unknown keys, out-of-range values, bad presets.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Subcommand { Forward, OracleCompare, GradientCheck, Reconstruct, Convergence, Lemmas };

const char* to_string(Subcommand s) noexcept;
Subcommand subcommand_from_string(const std::string& name);

struct PriorPair {
    double gamma = 10.0;
    double rho = 0.03;
};

struct RunConfig {
    Subcommand subcommand = Subcommand::Forward;
    std::string preset;

    Box box{-1.0, -1.0, 1.0, 1.0};
    int nx = 16;
    int ny = 16;

    Point sigma_center{0.0, 0.0};
    double sigma_radius = 0.8;

    double horizon = 1.0;
    double dt = 0.02;

    /// one entry runs a single problem; several run a sweep
    std::vector<double> alphas{0.5};
    double c2 = 1.0;
    double b = 0.1;

    Scheme scheme = Scheme::Galerkin;
    Formulation formulation = Formulation::EffectiveMass;
    ForcingRule forcing_rule = ForcingRule::Pointwise;
    NewmarkParams newmark{};

    /// prior per alpha; the entry for key -1 applies to every alpha
    std::map<double, PriorPair> prior_table{{-1.0, PriorPair{}}};

    double noise_delta = 0.01;
    std::uint64_t seed = 0;

    int fine_factor = 2;
    /// "mode" (first Laplace eigenfunction of the box) or "inclusion"
    std::string initial = "inclusion";
    Inclusion inclusion{{0.0, 0.55}, 0.15, 1.0};

    OptimizerSettings optimizer{};
    std::optional<AdjointDiscretization> adjoint;

    std::filesystem::path out_dir = "out";
    std::vector<double> snapshots;
    bool write_vtk = false;

    int levels = 4;
    int trials = 100;
    std::vector<std::string> families{"scalar-relaxation", "classical-wave"};
    int directions = 5;

    PriorPair prior_for(double alpha) const;
    void validate() const;
    nlohmann::json to_json() const;
};

/// Names accepted by --preset.
std::vector<std::string> preset_names();
/// Preset applied when none is given.
std::string default_preset(Subcommand s);
/// Applies the named preset on top of cfg; throws ConfigError for unknown names.
void apply_preset(RunConfig& cfg, const std::string& name);

/// Overlays a JSON document; unknown keys are collected and reported together.
void apply_json(RunConfig& cfg, const nlohmann::json& doc);

struct FlagOverrides {
    std::optional<std::filesystem::path> config;
    std::optional<std::filesystem::path> out;
    std::optional<std::string> preset;
    std::optional<double> alpha;
    std::optional<double> dt;
    std::optional<double> horizon;
    std::optional<int> levels;
    std::optional<int> trials;
    std::optional<std::uint64_t> seed;
};

/// Preset (flag, file, or subcommand default), then the file, then flags.
RunConfig parse_config(Subcommand sub, const FlagOverrides& flags);

/// Executes a resolved config; writes manifest.json first and outputs into
/// cfg.out_dir. Returns the process exit status.
int run(const RunConfig& cfg);

/// Full command-line entry point.
int main(int argc, char** argv);

}  // namespace fracwave::cli
