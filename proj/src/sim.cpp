#include "netdyn/sim.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace netdyn {

std::vector<double> make_time_grid(double t_max, double dt) {
    if (!(dt > 0.0) || !(t_max >= 0.0)) throw std::invalid_argument("time grid: need dt > 0 and t_max >= 0");
    const auto steps = static_cast<std::size_t>(std::llround(t_max / dt));
    if (std::abs(static_cast<double>(steps) * dt - t_max) > 1e-9 * std::max(1.0, t_max))
        throw std::invalid_argument("time grid: dt must divide t_max");
    std::vector<double> grid(steps + 1);
    for (std::size_t j = 0; j <= steps; ++j) grid[j] = static_cast<double>(j) * dt;
    grid.back() = t_max;
    return grid;
}

std::vector<int> contiguous_classes(std::size_t n, std::span<const double> fractions) {
    if (fractions.empty()) return std::vector<int>(n, 0);
    std::vector<int> classes(n, static_cast<int>(fractions.size()) - 1);
    double cumulative = 0.0;
    std::size_t start = 0;
    for (std::size_t k = 0; k + 1 < fractions.size(); ++k) {
        cumulative += fractions[k];
        const auto end = std::min(n, static_cast<std::size_t>(std::llround(cumulative * static_cast<double>(n))));
        for (std::size_t i = start; i < end; ++i) classes[i] = static_cast<int>(k);
        start = std::max(start, end);
    }
    return classes;
}

SystemState init_state(const InitSpec& spec, const CnvmParams& params, std::span<const int> classes) {
    const std::size_t n = classes.size();
    SystemState state;
    state.cls.assign(classes.begin(), classes.end());

    if (const auto* explicit_x = std::get_if<std::vector<int>>(&spec.value)) {
        if (explicit_x->size() != n) throw std::invalid_argument("init_state: opinion vector has the wrong length");
        state.opinion = *explicit_x;
        state.validate(n, params);
        return state;
    }

    const auto& c0 = std::get<CollectiveState>(spec.value);
    const int big_m = params.num_opinions, big_k = params.num_classes;
    if (c0.size() != params.dim()) throw std::invalid_argument("init_state: share vector has the wrong length");
    double total = 0.0;
    for (double v : c0) {
        if (!(v >= 0.0)) throw std::invalid_argument("init_state: shares must be non-negative");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("init_state: shares must sum to 1");

    std::vector<std::size_t> class_size(static_cast<std::size_t>(big_k), 0);
    for (int k : classes) {
        if (k < 0 || k >= big_k) throw std::invalid_argument("init_state: class out of range");
        ++class_size[static_cast<std::size_t>(k)];
    }

    // counts[m][k] by largest remainder within each class
    std::vector<std::size_t> counts(params.dim(), 0);
    for (int k = 0; k < big_k; ++k) {
        const auto size_k = class_size[static_cast<std::size_t>(k)];
        double mass = 0.0;
        for (int m = 0; m < big_m; ++m) mass += c0[ext_index(m, k, big_k)];
        if (std::abs(mass - static_cast<double>(size_k) / static_cast<double>(n)) > 1.0 / static_cast<double>(n) + 1e-9)
            throw std::invalid_argument("init_state: share of class " + std::to_string(k) + " does not match its size");
        if (size_k == 0) continue;
        if (mass == 0.0) throw std::invalid_argument("init_state: class has nodes but no target shares");
        std::vector<double> remainder(static_cast<std::size_t>(big_m));
        std::size_t assigned = 0;
        for (int m = 0; m < big_m; ++m) {
            const double quota = c0[ext_index(m, k, big_k)] / mass * static_cast<double>(size_k);
            const double whole = std::floor(quota);
            counts[ext_index(m, k, big_k)] = static_cast<std::size_t>(whole);
            remainder[static_cast<std::size_t>(m)] = quota - whole;
            assigned += static_cast<std::size_t>(whole);
        }
        std::vector<int> order(static_cast<std::size_t>(big_m));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return remainder[static_cast<std::size_t>(a)] > remainder[static_cast<std::size_t>(b)];
        });
        for (std::size_t j = 0; assigned < size_k; ++j, ++assigned) ++counts[ext_index(order[j % order.size()], k, big_k)];
    }

    state.opinion.assign(n, 0);
    std::vector<std::size_t> handed(static_cast<std::size_t>(big_k), 0);
    std::vector<int> current(static_cast<std::size_t>(big_k), 0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(classes[i]);
        while (handed[k] >= counts[ext_index(current[k], static_cast<int>(k), big_k)]) {
            handed[k] = 0;
            ++current[k];
        }
        state.opinion[i] = current[k];
        ++handed[k];
    }
    return state;
}

// --- simulator ---------------------------------------------------------------

CnvmSimulator::CnvmSimulator(const Graph& g, const CnvmParams& params, SystemState initial, std::uint64_t seed)
    : graph_(&g), params_(&params), state_(std::move(initial)), rng_(make_rng(seed)) {
    params.validate();
    state_.validate(g.size(), params);
    const std::size_t n = g.size();
    const auto big_m = static_cast<std::size_t>(params.num_opinions);
    neighbor_counts_.assign(n * big_m, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (NodeId j : g.neighbors(i)) ++neighbor_counts_[i * big_m + static_cast<std::size_t>(state_.opinion[j])];
    ext_counts_ = extended_counts(state_, params);
    rates_.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) rates_[i] = local_rate(i);
    top_bit_ = n == 0 ? 0 : std::bit_floor(n);
    refresh();
}

double CnvmSimulator::local_rate(std::size_t i) const {
    const int m = state_.opinion[i];
    const int k = state_.cls[i];
    const auto big_m = params_->num_opinions;
    const std::size_t deg = graph_->degree(i);
    const std::int32_t* counts = neighbor_counts_.data() + i * static_cast<std::size_t>(big_m);
    const SquareMatrix& r = params_->imitation[static_cast<std::size_t>(k)];
    const SquareMatrix& rt = params_->noise[static_cast<std::size_t>(k)];
    double rate = 0.0;
    const double inv_deg = deg > 0 ? 1.0 / static_cast<double>(deg) : 0.0;
    for (int n = 0; n < big_m; ++n) {
        if (n == m) continue;
        rate += rt(m, n) + r(m, n) * static_cast<double>(counts[n]) * inv_deg;
    }
    return rate;
}

double CnvmSimulator::recomputed_rate(std::size_t i) const {
    double rate = 0.0;
    for (int n = 0; n < params_->num_opinions; ++n)
        if (n != state_.opinion[i]) rate += node_rate(*graph_, state_, *params_, i, n);
    return rate;
}

void CnvmSimulator::refresh() {
    const std::size_t n = rates_.size();
    tree_.assign(n + 1, 0.0);
    active_ = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        tree_[i] += rates_[i - 1];
        if (rates_[i - 1] > 0.0) ++active_;
        const std::size_t parent = i + (i & (~i + 1));
        if (parent <= n) tree_[parent] += tree_[i];
    }
    since_refresh_ = 0;
}

double CnvmSimulator::total_rate() const {
    if (active_ == 0) return 0.0;
    double s = 0.0;
    for (std::size_t i = rates_.size(); i > 0; i -= i & (~i + 1)) s += tree_[i];
    return std::max(s, 0.0);
}

void CnvmSimulator::set_rate(std::size_t i, double rate) {
    const double delta = rate - rates_[i];
    if (delta == 0.0) return;
    if (rates_[i] > 0.0) --active_;
    if (rate > 0.0) ++active_;
    rates_[i] = rate;
    for (std::size_t j = i + 1; j < tree_.size(); j += j & (~j + 1)) tree_[j] += delta;
}

std::size_t CnvmSimulator::find_node(double u) const {
    std::size_t pos = 0;
    for (std::size_t step = top_bit_; step != 0; step >>= 1) {
        const std::size_t next = pos + step;
        if (next < tree_.size() && tree_[next] <= u) {
            pos = next;
            u -= tree_[next];
        }
    }
    return pos;
}

CollectiveState CnvmSimulator::collective() const {
    const auto n = static_cast<double>(state_.size());
    CollectiveState c(ext_counts_.size());
    for (std::size_t j = 0; j < c.size(); ++j) c[j] = static_cast<double>(ext_counts_[j]) / n;
    return c;
}

void CnvmSimulator::flip(std::size_t i, int to) {
    const int from = state_.opinion[i];
    const int k = state_.cls[i];
    const int big_k = params_->num_classes;
    const auto big_m = static_cast<std::size_t>(params_->num_opinions);
    state_.opinion[i] = to;
    --ext_counts_[ext_index(from, k, big_k)];
    ++ext_counts_[ext_index(to, k, big_k)];
    set_rate(i, local_rate(i));
    for (NodeId j : graph_->neighbors(i)) {
        std::int32_t* counts = neighbor_counts_.data() + static_cast<std::size_t>(j) * big_m;
        --counts[from];
        ++counts[to];
        set_rate(j, local_rate(j));
    }
}

bool CnvmSimulator::step(double horizon) {
    while (true) {
        const double total = total_rate();
        if (total <= 0.0) {
            time_ = std::max(time_, horizon);
            return false;
        }
        const double wait = -std::log1p(-uniform01(rng_)) / total;
        if (time_ + wait > horizon) {
            // memoryless: discarding the pending event keeps the process exact
            time_ = horizon;
            return false;
        }
        const std::size_t i = find_node(uniform01(rng_) * total);
        if (i >= rates_.size() || rates_[i] <= 0.0) {
            // round-off in the tree sent us to a zero-rate slot
            refresh();
            continue;
        }
        time_ += wait;

        const int m = state_.opinion[i];
        const int k = state_.cls[i];
        const auto big_m = params_->num_opinions;
        const std::size_t deg = graph_->degree(i);
        const double inv_deg = deg > 0 ? 1.0 / static_cast<double>(deg) : 0.0;
        const std::int32_t* counts = neighbor_counts_.data() + i * static_cast<std::size_t>(big_m);
        const SquareMatrix& r = params_->imitation[static_cast<std::size_t>(k)];
        const SquareMatrix& rt = params_->noise[static_cast<std::size_t>(k)];
        double u = uniform01(rng_) * rates_[i];
        int target = -1;
        for (int n = 0; n < big_m; ++n) {
            if (n == m) continue;
            const double rate = rt(m, n) + r(m, n) * static_cast<double>(counts[n]) * inv_deg;
            if (rate <= 0.0) continue;
            target = n;
            if (u < rate) break;
            u -= rate;
        }
        flip(i, target);
        ++events_;
        if (++since_refresh_ >= kRefreshInterval) refresh();
        return true;
    }
}

void CnvmSimulator::advance_to(double t) {
    while (step(t)) {
    }
}

Trajectory gillespie_run(const Graph& g, const CnvmParams& params, const SystemState& state0,
                         std::span<const double> t_grid, std::uint64_t seed, RunOptions options) {
    if (t_grid.empty() || t_grid.front() != 0.0) throw std::invalid_argument("gillespie_run: grid must start at 0");
    for (std::size_t j = 1; j < t_grid.size(); ++j)
        if (!(t_grid[j] > t_grid[j - 1])) throw std::invalid_argument("gillespie_run: grid must be strictly increasing");
    CnvmSimulator sim(g, params, state0, seed);
    Trajectory traj;
    traj.times.assign(t_grid.begin(), t_grid.end());
    traj.values.reserve(t_grid.size());
    for (double t : t_grid) {
        sim.advance_to(t);
        traj.values.push_back(sim.collective());
    }
    traj.events = sim.events();
    if (options.keep_final_state) traj.final_state = sim.state();
    return traj;
}

// --- ensembles ---------------------------------------------------------------

std::vector<int> ensemble_classes(const EnsembleConfig& config) {
    if (config.family.kind == FamilyKind::StochasticBlock) {
        const auto sizes = config.family.sbm.block_sizes(config.family.n);
        std::vector<int> classes;
        classes.reserve(config.family.n);
        for (std::size_t k = 0; k < sizes.size(); ++k) classes.insert(classes.end(), sizes[k], static_cast<int>(k));
        return classes;
    }
    return contiguous_classes(config.family.n, config.class_fractions);
}

std::uint64_t realization_graph_seed(std::uint64_t seed, std::size_t i) { return stream_seed(seed, 2 * i + 1); }
std::uint64_t realization_dynamics_seed(std::uint64_t seed, std::size_t i) { return stream_seed(seed, 2 * i); }

double simplex_error(std::span<const double> c) {
    double sum = 0.0, worst = 0.0;
    for (double v : c) {
        sum += v;
        worst = std::max(worst, -v);
    }
    return std::max(worst, std::abs(sum - 1.0));
}

EnsembleStats summarize(std::span<const Trajectory> runs) {
    if (runs.empty()) throw std::invalid_argument("summarize: no realizations");
    EnsembleStats stats;
    stats.times = runs.front().times;
    stats.realizations = runs.size();
    const std::size_t nt = stats.times.size();
    const std::size_t dim = runs.front().values.front().size();
    const auto r = static_cast<double>(runs.size());
    stats.mean.assign(nt, CollectiveState(dim, 0.0));
    stats.stddev.assign(nt, CollectiveState(dim, 0.0));
    for (const auto& run : runs) {
        if (run.times != stats.times) throw std::invalid_argument("summarize: realizations use different grids");
        for (std::size_t t = 0; t < nt; ++t) {
            stats.max_simplex_error = std::max(stats.max_simplex_error, simplex_error(run.values[t]));
            for (std::size_t j = 0; j < dim; ++j) stats.mean[t][j] += run.values[t][j];
        }
    }
    for (auto& row : stats.mean)
        for (double& v : row) v /= r;
    for (const auto& run : runs)
        for (std::size_t t = 0; t < nt; ++t)
            for (std::size_t j = 0; j < dim; ++j) {
                const double dev = run.values[t][j] - stats.mean[t][j];
                stats.stddev[t][j] += dev * dev;
            }
    for (auto& row : stats.stddev)
        for (double& v : row) v = std::sqrt(v / r);
    return stats;
}

EnsembleStats ensemble(const EnsembleConfig& config) {
    if (config.realizations == 0) throw std::invalid_argument("ensemble: need at least one realization");
    config.params.validate();
    const auto classes = ensemble_classes(config);
    const SystemState state0 = init_state(config.init, config.params, classes);

    std::optional<Graph> shared;
    if (config.mode == GraphMode::Quenched) shared = config.family.sample(realization_graph_seed(config.seed, 0));

    std::vector<Trajectory> runs(config.realizations);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= runs.size()) return;
            try {
                if (shared) {
                    runs[i] = gillespie_run(*shared, config.params, state0, config.t_grid,
                                            realization_dynamics_seed(config.seed, i));
                } else {
                    const Graph g = config.family.sample(realization_graph_seed(config.seed, i));
                    runs[i] = gillespie_run(g, config.params, state0, config.t_grid,
                                            realization_dynamics_seed(config.seed, i));
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(runs.size());
                return;
            }
        }
    };
    unsigned threads = config.threads != 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, runs.size()));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return summarize(runs);
}

}  // namespace netdyn
