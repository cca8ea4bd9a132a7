#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "netdyn/graph.hpp"
#include "netdyn/meanfield.hpp"
#include "netdyn/model.hpp"
#include "netdyn/sim.hpp"

namespace netdyn {

// --- exact oracle ------------------------------------------------------------

inline constexpr std::size_t kMaxOracleStates = 4096;
inline constexpr double kOracleTolerance = 1e-10;

/// Expected collective state E[C(x(t))] of the full CTMC on M^N states at
/// each requested time, by uniformization. Throws std::invalid_argument when
/// M^N exceeds kMaxOracleStates.
std::vector<CollectiveState> master_equation_oracle(const Graph& g, const CnvmParams& params,
                                                    const SystemState& x0, std::span<const double> times,
                                                    double tolerance = kOracleTolerance);
CollectiveState master_equation_oracle(const Graph& g, const CnvmParams& params, const SystemState& x0, double t);

// --- propensity gap ----------------------------------------------------------

/// max over transitions of |alpha_exact / N - alpha~(C(x))| for one state.
double delta_gap(const Graph& g, const CnvmParams& params, const GraphFamily& family, const SystemState& x);

/// Sampled maximum of delta_gap over the given states. A lower estimate of
/// the maximum over all M^N states.
double delta_estimate(const Graph& g, const CnvmParams& params, const GraphFamily& family,
                      std::span<const SystemState> states);

/// Independent uniformly random opinion vectors on a fixed class layout.
std::vector<SystemState> random_states(std::span<const int> classes, int num_opinions, std::size_t count,
                                       std::uint64_t seed);

/// States visited by one simulated path, taken at each grid time.
std::vector<SystemState> visited_states(const Graph& g, const CnvmParams& params, const SystemState& x0,
                                        std::span<const double> t_grid, std::uint64_t seed);

// --- deviation from the mean-field solution ----------------------------------

struct DeviationReport {
    std::vector<double> times;
    std::vector<double> deviation;  // ||mean(t) - mfe(t)||_inf
    std::vector<double> max_std;    // max component std at t
    double sup_dev = 0.0;
};

/// Throws std::invalid_argument when the grids differ.
DeviationReport sup_deviation(const EnsembleStats& stats, const Trajectory& mfe);

// --- concentration -----------------------------------------------------------

/// E_{m,n}: sum over nodes with opinion m of their opinion-n neighbors.
std::size_t edge_count_between(const Graph& g, const SystemState& x, int m, int n);

/// Edges between nodes in extended state (m, k) and nodes of opinion n.
std::size_t edge_count_between(const Graph& g, const SystemState& x, int m, int k, int n);

enum class ConcentrationQuantity { EdgeCount, Degree };

struct ChernoffSetup {
    GraphFamily family;                     // ErdosRenyi or StochasticBlock
    SystemState state;                      // edge counts only
    ConcentrationQuantity quantity = ConcentrationQuantity::EdgeCount;
    int from = 0, cls = 0, to = 1;          // edge counts: (from, cls) -> to
    std::size_t node = 0;                   // degrees: first probed node; advances by one per sample
};

struct ConcentrationRow {
    double epsilon = 0.0;       // absolute for edge counts, relative to the mean degree for degrees
    double threshold = 0.0;     // absolute deviation tested
    std::size_t exceedances = 0;
    std::size_t samples = 0;
    double frequency = 0.0;
    double bound = 0.0;
    double std_error = 0.0;     // Monte-Carlo SE of the frequency under the bound
    bool within_bound() const { return frequency <= bound + 3.0 * std_error; }
};

struct ConcentrationReport {
    std::string label;
    double center = 0.0;
    std::vector<ConcentrationRow> rows;
    bool passed() const;
};

/// Empirical P(|X - center| >= threshold) against the matching Chernoff-type
/// bound, from `samples` independent graphs.
ConcentrationReport chernoff_check(const ChernoffSetup& setup, std::span<const double> epsilons, std::size_t samples,
                                   std::uint64_t seed);

// --- isomorphism invariance --------------------------------------------------

struct TwoSampleReport {
    double statistic = 0.0;  // Kolmogorov-Smirnov distance
    double threshold = 0.0;
    std::size_t samples = 0;
    bool passed() const { return statistic <= threshold; }
};

/// KS distance between two integer samples with a 3-sigma-equivalent threshold.
TwoSampleReport ks_two_sample(std::vector<long long> a, std::vector<long long> b);

/// Draws edge_count_between(G, x, m, n) and edge_count_between(G', tau(x), m, n)
/// over independent graphs and compares the two distributions. tau maps node i
/// to tau[i]; tau(x)_{tau[i]} = x_i.
TwoSampleReport isomorphism_invariance_check(const GraphFamily& family, const SystemState& x,
                                             std::span<const std::size_t> tau, int m, int n, std::size_t samples,
                                             std::uint64_t seed_x, std::uint64_t seed_tau);

SystemState permute_state(const SystemState& x, std::span<const std::size_t> tau);

// --- convergence study -------------------------------------------------------

struct ConvergenceRow {
    std::size_t n = 0;
    std::vector<double> sup_dev;  // per master seed
    double mean_sup_dev = 0.0;
    double time_avg_std = 0.0;    // std averaged over time, components and seeds
    double probe_std = 0.0;       // std of the probe component at the probe time, averaged over seeds
    double max_simplex_error = 0.0;  // over every realization and the mean-field solution
};

struct ConvergenceOptions {
    std::vector<std::uint64_t> seeds{1};
    double probe_time = 1.0;
    std::size_t probe_component = 0;
    double mfe_step = kDefaultStep;
};

/// For each N: ensemble + mean-field solution + sup deviation.
std::vector<ConvergenceRow> convergence_study(const EnsembleConfig& base, std::span<const std::size_t> sizes,
                                              const ConvergenceOptions& options);

// --- output ------------------------------------------------------------------

void write_deviation_csv(std::ostream& out, const DeviationReport& report);
void write_deviation_summary(std::ostream& out, const DeviationReport& report);
void write_concentration_csv(std::ostream& out, const ConcentrationReport& report);
void write_concentration_summary(std::ostream& out, const ConcentrationReport& report);
void write_convergence_csv(std::ostream& out, std::span<const ConvergenceRow> rows);

}  // namespace netdyn
