#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "netdyn/analysis.hpp"
#include "netdyn/meanfield.hpp"
#include "netdyn/sim.hpp"

namespace netdyn {

/// Everything needed to run one experiment. JSON field names:
///
///   M, K, r, r_tilde            rates; r and r_tilde are [K][M][M] or, for K = 1, [M][M]
///   family                      "er" | "sbm" | "regular"
///   N, p, d, regular_method     family parameters ("auto" | "rejection" | "pairing")
///   block_fractions, probs, scale
///   init                        {"shares": [...]} or {"opinions": [...]}
///   class_fractions             ER/regular class layout, defaults to one class
///   t_max, dt_record, h, R, mode ("annealed" | "quenched"), seed, output
struct ExperimentConfig {
    std::string name;
    EnsembleConfig ensemble;
    double t_max = 0.0;
    double dt_record = 0.0;
    double h = kDefaultStep;
    std::optional<std::uint64_t> seed;
    std::string output;
    std::string description;

    const CnvmParams& params() const { return ensemble.params; }
    /// Recording grid from t_max and dt_record.
    std::vector<double> grid() const;
    void validate() const;
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);
nlohmann::json config_to_json(const ExperimentConfig& config);

// --- presets -----------------------------------------------------------------

struct PresetOverrides {
    std::optional<std::size_t> n;             // --scale-n
    std::optional<std::size_t> realizations;  // --scale-r
};

const std::vector<std::string>& preset_names();
/// Throws std::invalid_argument for unknown names.
ExperimentConfig make_preset(const std::string& name, const PresetOverrides& overrides = {});

/// Fills in the seed and the grid. The explicit seed wins over the config
/// value, which wins over `env_seed`; a config without any seed is rejected.
ExperimentConfig resolve(ExperimentConfig config, std::optional<std::uint64_t> flag_seed,
                         std::optional<std::uint64_t> env_seed);

// --- runs --------------------------------------------------------------------

/// Single realization on one graph drawn with the realization-0 graph seed.
Trajectory run_single(const ExperimentConfig& config);

struct ExperimentResult {
    EnsembleStats stats;
    Trajectory mfe;
    DeviationReport deviation;
};

/// Ensemble, mean-field solution from the common initial collective state,
/// and their deviation.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace netdyn
