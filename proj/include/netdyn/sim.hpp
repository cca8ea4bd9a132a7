#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "netdyn/graph.hpp"
#include "netdyn/model.hpp"
#include "netdyn/rng.hpp"

namespace netdyn {

/// Uniform recording grid 0, dt, 2 dt, ..., t_max.
std::vector<double> make_time_grid(double t_max, double dt);

/// Initial condition: target shares per extended state, or explicit opinions.
struct InitSpec {
    std::variant<CollectiveState, std::vector<int>> value;

    static InitSpec shares(CollectiveState c0) { return {std::move(c0)}; }
    static InitSpec opinions(std::vector<int> x) { return {std::move(x)}; }
};

/// Deterministic initial state for the given class layout. Target shares are
/// rounded per class by largest remainder (ties to the lower opinion) and, in
/// each class, the first nodes get opinion 0, the next ones opinion 1, etc.
SystemState init_state(const InitSpec& spec, const CnvmParams& params, std::span<const int> classes);

/// Contiguous class layout: the first round(n * f_0) nodes are class 0, etc.
std::vector<int> contiguous_classes(std::size_t n, std::span<const double> fractions);

struct Trajectory {
    std::vector<double> times;
    std::vector<CollectiveState> values;
    std::uint64_t events = 0;
    std::optional<SystemState> final_state;
};

struct EnsembleStats {
    std::vector<double> times;
    std::vector<CollectiveState> mean;
    std::vector<CollectiveState> stddev;  // population standard deviation (divides by R)
    std::size_t realizations = 0;
    /// Worst simplex violation seen in any recorded value of any realization:
    /// max of |sum - 1| and of the negative part of every entry.
    double max_simplex_error = 0.0;
};

/// Exact event-driven simulator of the CNVM on a fixed graph.
///
/// Per-node exit rates live in a Fenwick tree so that selecting the firing
/// node costs O(log N). Neighbor opinion counts are maintained incrementally;
/// a flip refreshes only the flipping node and its neighbors.
class CnvmSimulator {
public:
    static constexpr std::uint64_t kRefreshInterval = 1'000'000;

    CnvmSimulator(const Graph& g, const CnvmParams& params, SystemState initial, std::uint64_t seed);

    double time() const noexcept { return time_; }
    std::uint64_t events() const noexcept { return events_; }
    const SystemState& state() const noexcept { return state_; }
    double total_rate() const;

    /// Shares computed from the maintained integer counts.
    CollectiveState collective() const;

    /// Executes the next event if it happens no later than `horizon` and
    /// returns true; otherwise moves the clock to `horizon` and returns false.
    bool step(double horizon);
    void advance_to(double t);

    double cached_rate(std::size_t i) const { return rates_[i]; }
    /// Exit rate of node i recomputed from the graph, bypassing all caches.
    double recomputed_rate(std::size_t i) const;
    /// Rebuilds the rate tree from per-node rates.
    void refresh();

private:
    double local_rate(std::size_t i) const;
    void set_rate(std::size_t i, double rate);
    std::size_t find_node(double u) const;
    void flip(std::size_t i, int to);

    const Graph* graph_;
    const CnvmParams* params_;
    SystemState state_;
    Rng rng_;
    std::vector<std::int32_t> neighbor_counts_;  // node-major, M per node
    std::vector<double> rates_;
    std::vector<double> tree_;  // Fenwick tree over rates_
    std::vector<std::size_t> ext_counts_;
    std::size_t active_ = 0;    // nodes with positive exit rate
    std::size_t top_bit_ = 0;
    double time_ = 0.0;
    std::uint64_t events_ = 0;
    std::uint64_t since_refresh_ = 0;
};

struct RunOptions {
    bool keep_final_state = false;
};

/// One realization sampled at the grid times with hold-last-state semantics.
Trajectory gillespie_run(const Graph& g, const CnvmParams& params, const SystemState& state0,
                         std::span<const double> t_grid, std::uint64_t seed, RunOptions options = {});

enum class GraphMode { Annealed, Quenched };

struct EnsembleConfig {
    GraphFamily family;
    CnvmParams params;
    InitSpec init;
    std::vector<double> class_fractions;  // ignored for block models (blocks are the classes)
    std::vector<double> t_grid;
    std::size_t realizations = 1;
    GraphMode mode = GraphMode::Annealed;
    std::uint64_t seed = 0;
    unsigned threads = 0;                 // 0: hardware concurrency
};

/// Class of every node for the configured family.
std::vector<int> ensemble_classes(const EnsembleConfig& config);

/// Seeds of realization i: graph and dynamics streams derived from the master seed.
std::uint64_t realization_graph_seed(std::uint64_t seed, std::size_t i);
std::uint64_t realization_dynamics_seed(std::uint64_t seed, std::size_t i);

/// Runs R realizations (in parallel when threads allow) and reduces them in
/// realization order, so results do not depend on the thread count.
EnsembleStats ensemble(const EnsembleConfig& config);

/// Mean/std over realizations, reduced in index order.
EnsembleStats summarize(std::span<const Trajectory> runs);

double simplex_error(std::span<const double> c);

}  // namespace netdyn
