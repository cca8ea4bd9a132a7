#include "netdyn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "netdyn/io.hpp"
#include "netdyn/rng.hpp"

namespace netdyn {

// --- exact oracle ------------------------------------------------------------

namespace {

struct SparseGenerator {
    std::vector<std::size_t> offsets;  // CSR over source states
    std::vector<std::size_t> targets;
    std::vector<double> rates;
    std::vector<double> exit;
};

SystemState decode_state(std::size_t code, std::size_t n, int big_m, std::span<const int> classes) {
    SystemState x;
    x.opinion.resize(n);
    x.cls.assign(classes.begin(), classes.end());
    for (std::size_t i = 0; i < n; ++i) {
        x.opinion[i] = static_cast<int>(code % static_cast<std::size_t>(big_m));
        code /= static_cast<std::size_t>(big_m);
    }
    return x;
}

std::size_t encode_state(const SystemState& x, int big_m) {
    std::size_t code = 0;
    for (std::size_t i = x.size(); i > 0; --i) code = code * static_cast<std::size_t>(big_m) + static_cast<std::size_t>(x.opinion[i - 1]);
    return code;
}

// One uniformization chunk: p <- p exp(Q dt), with Lambda dt kept small so
// the Poisson weights never underflow.
std::vector<double> uniformized_step(const SparseGenerator& q, double lambda, const std::vector<double>& p, double dt,
                                     double tolerance) {
    const double mean = lambda * dt;
    const std::size_t states = p.size();
    std::vector<double> v = p, next(states), acc(states);
    double weight = std::exp(-mean);
    double cumulative = weight;
    for (std::size_t s = 0; s < states; ++s) acc[s] = weight * v[s];
    for (std::size_t k = 1; cumulative < 1.0 - tolerance && k < 10000; ++k) {
        // next = v P with P = I + Q / lambda
        for (std::size_t s = 0; s < states; ++s) next[s] = v[s] * (1.0 - q.exit[s] / lambda);
        for (std::size_t s = 0; s < states; ++s) {
            if (v[s] == 0.0) continue;
            for (std::size_t e = q.offsets[s]; e < q.offsets[s + 1]; ++e) next[q.targets[e]] += v[s] * q.rates[e] / lambda;
        }
        std::swap(v, next);
        weight *= mean / static_cast<double>(k);
        cumulative += weight;
        for (std::size_t s = 0; s < states; ++s) acc[s] += weight * v[s];
    }
    return acc;
}

}  // namespace

std::vector<CollectiveState> master_equation_oracle(const Graph& g, const CnvmParams& params, const SystemState& x0,
                                                    std::span<const double> times, double tolerance) {
    params.validate();
    const std::size_t n = g.size();
    x0.validate(n, params);
    const int big_m = params.num_opinions;
    std::size_t states = 1;
    for (std::size_t i = 0; i < n; ++i) {
        states *= static_cast<std::size_t>(big_m);
        if (states > kMaxOracleStates)
            throw std::invalid_argument("master_equation_oracle: state space M^N exceeds " +
                                        std::to_string(kMaxOracleStates));
    }

    SparseGenerator q;
    q.offsets.push_back(0);
    q.exit.assign(states, 0.0);
    std::vector<CollectiveState> shares(states);
    for (std::size_t s = 0; s < states; ++s) {
        SystemState x = decode_state(s, n, big_m, x0.cls);
        shares[s] = collective_variable(x, params);
        for (std::size_t i = 0; i < n; ++i) {
            const int m = x.opinion[i];
            for (int to = 0; to < big_m; ++to) {
                if (to == m) continue;
                const double rate = node_rate(g, x, params, i, to);
                if (rate <= 0.0) continue;
                x.opinion[i] = to;
                q.targets.push_back(encode_state(x, big_m));
                x.opinion[i] = m;
                q.rates.push_back(rate);
                q.exit[s] += rate;
            }
        }
        q.offsets.push_back(q.targets.size());
    }
    const double lambda = *std::max_element(q.exit.begin(), q.exit.end());

    std::vector<std::size_t> order(times.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
    const double horizon = times.empty() ? 0.0 : times[order.back()];
    constexpr double kChunkMean = 4.0;
    const double chunks = std::max(1.0, std::ceil(lambda * horizon / kChunkMean) + static_cast<double>(times.size()));
    const double chunk_tolerance = tolerance / chunks;

    std::vector<double> p(states, 0.0);
    p[encode_state(x0, big_m)] = 1.0;
    double now = 0.0;
    std::vector<CollectiveState> out(times.size());
    for (std::size_t idx : order) {
        const double target = times[idx];
        if (target < 0.0) throw std::invalid_argument("master_equation_oracle: negative time");
        if (lambda > 0.0) {
            while (now < target) {
                const double dt = std::min(target - now, kChunkMean / lambda);
                p = uniformized_step(q, lambda, p, dt, chunk_tolerance);
                now = (target - now <= kChunkMean / lambda) ? target : now + dt;
            }
        }
        now = std::max(now, target);
        CollectiveState expected(params.dim(), 0.0);
        for (std::size_t s = 0; s < states; ++s)
            if (p[s] != 0.0)
                for (std::size_t j = 0; j < expected.size(); ++j) expected[j] += p[s] * shares[s][j];
        out[idx] = std::move(expected);
    }
    return out;
}

CollectiveState master_equation_oracle(const Graph& g, const CnvmParams& params, const SystemState& x0, double t) {
    const double times[] = {t};
    return master_equation_oracle(g, params, x0, times).front();
}

// --- propensity gap ----------------------------------------------------------

double delta_gap(const Graph& g, const CnvmParams& params, const GraphFamily& family, const SystemState& x) {
    const auto exact = exact_propensities(g, x, params);
    const auto c = collective_variable(x, params);
    const auto n = static_cast<double>(x.size());
    const auto transitions = all_transitions(params);
    double worst = 0.0;
    for (std::size_t j = 0; j < transitions.size(); ++j)
        worst = std::max(worst, std::abs(exact[j] / n - propensity_reduced(c, params, family, transitions[j])));
    return worst;
}

double delta_estimate(const Graph& g, const CnvmParams& params, const GraphFamily& family,
                      std::span<const SystemState> states) {
    double worst = 0.0;
    for (const auto& x : states) worst = std::max(worst, delta_gap(g, params, family, x));
    return worst;
}

std::vector<SystemState> random_states(std::span<const int> classes, int num_opinions, std::size_t count,
                                       std::uint64_t seed) {
    Rng rng = make_rng(seed);
    std::vector<SystemState> out(count);
    for (auto& x : out) {
        x.cls.assign(classes.begin(), classes.end());
        x.opinion.resize(classes.size());
        for (int& o : x.opinion) o = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(num_opinions)));
    }
    return out;
}

std::vector<SystemState> visited_states(const Graph& g, const CnvmParams& params, const SystemState& x0,
                                        std::span<const double> t_grid, std::uint64_t seed) {
    CnvmSimulator sim(g, params, x0, seed);
    std::vector<SystemState> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) {
        sim.advance_to(t);
        out.push_back(sim.state());
    }
    return out;
}

// --- deviation ---------------------------------------------------------------

DeviationReport sup_deviation(const EnsembleStats& stats, const Trajectory& mfe) {
    if (stats.times.size() != mfe.times.size())
        throw std::invalid_argument("sup_deviation: grids have different lengths");
    DeviationReport report;
    report.times = stats.times;
    for (std::size_t t = 0; t < stats.times.size(); ++t) {
        if (std::abs(stats.times[t] - mfe.times[t]) > 1e-9 * std::max(1.0, std::abs(mfe.times[t])))
            throw std::invalid_argument("sup_deviation: grids differ at index " + std::to_string(t));
        if (stats.mean[t].size() != mfe.values[t].size())
            throw std::invalid_argument("sup_deviation: dimensions differ");
        double dev = 0.0, sd = 0.0;
        for (std::size_t j = 0; j < mfe.values[t].size(); ++j) {
            dev = std::max(dev, std::abs(stats.mean[t][j] - mfe.values[t][j]));
            sd = std::max(sd, stats.stddev[t][j]);
        }
        report.deviation.push_back(dev);
        report.max_std.push_back(sd);
        report.sup_dev = std::max(report.sup_dev, dev);
    }
    return report;
}

// --- concentration -----------------------------------------------------------

std::size_t edge_count_between(const Graph& g, const SystemState& x, int m, int n) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (x.opinion[i] == m) count += neighbor_opinion_count(g, x, i, n);
    return count;
}

std::size_t edge_count_between(const Graph& g, const SystemState& x, int m, int k, int n) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (x.opinion[i] == m && x.cls[i] == k) count += neighbor_opinion_count(g, x, i, n);
    return count;
}

bool ConcentrationReport::passed() const {
    return std::all_of(rows.begin(), rows.end(), [](const ConcentrationRow& r) { return r.within_bound(); });
}

ConcentrationReport chernoff_check(const ChernoffSetup& setup, std::span<const double> epsilons, std::size_t samples,
                                   std::uint64_t seed) {
    const GraphFamily& family = setup.family;
    if (family.kind == FamilyKind::Regular)
        throw std::invalid_argument("chernoff_check: supports Erdos-Renyi and block-model families");
    if (samples == 0) throw std::invalid_argument("chernoff_check: need samples");
    const std::size_t n = family.n;
    const auto nd = static_cast<double>(n);
    const bool sbm = family.kind == FamilyKind::StochasticBlock;
    std::vector<int> blocks;
    if (sbm) {
        family.sbm.validate();
        const auto sizes = family.sbm.block_sizes(n);
        for (std::size_t k = 0; k < sizes.size(); ++k) blocks.insert(blocks.end(), sizes[k], static_cast<int>(k));
    }

    ConcentrationReport report;
    std::vector<double> values(samples);
    std::vector<double> centers(samples);
    std::vector<double> scale(samples, 1.0);  // threshold multiplier per sample
    double bound_exponent_scale = 0.0;        // degree: minimum mean probability

    if (setup.quantity == ConcentrationQuantity::EdgeCount) {
        if (setup.state.size() != n) throw std::invalid_argument("chernoff_check: state size differs from n");
        std::size_t from_count = 0;
        std::vector<std::size_t> to_count(sbm ? family.sbm.blocks() : 1, 0);
        for (std::size_t i = 0; i < n; ++i) {
            if (setup.state.opinion[i] == setup.from && setup.state.cls[i] == setup.cls) ++from_count;
            if (setup.state.opinion[i] == setup.to) ++to_count[sbm ? static_cast<std::size_t>(blocks[i]) : 0];
        }
        double center = 0.0;
        if (sbm) {
            for (std::size_t kp = 0; kp < to_count.size(); ++kp)
                center += static_cast<double>(from_count) * static_cast<double>(to_count[kp]) * family.sbm.scale *
                          family.sbm.probs(static_cast<std::size_t>(setup.cls), kp);
        } else {
            center = static_cast<double>(from_count) * static_cast<double>(to_count[0]) * family.p;
        }
        report.center = center;
        report.label = std::string("edge count ") + family_name(family.kind) + " (" + std::to_string(setup.from + 1) +
                       "," + std::to_string(setup.cls + 1) + ")->" + std::to_string(setup.to + 1);
        for (std::size_t s = 0; s < samples; ++s) {
            const Graph g = family.sample(stream_seed(seed, s));
            values[s] = static_cast<double>(edge_count_between(g, setup.state, setup.from, setup.cls, setup.to));
            centers[s] = center;
        }
    } else {
        double pmin = sbm ? 1.0 : family.p;
        if (sbm)
            for (std::size_t k = 0; k < family.sbm.blocks(); ++k)
                pmin = std::min(pmin, family.sbm.scale * family.sbm.mean_prob(k));
        bound_exponent_scale = pmin;
        report.label = std::string("degree ") + family_name(family.kind);
        for (std::size_t s = 0; s < samples; ++s) {
            const std::size_t node = (setup.node + s) % n;
            const double mean_prob =
                sbm ? family.sbm.scale * family.sbm.mean_prob(static_cast<std::size_t>(blocks[node])) : family.p;
            const Graph g = family.sample(stream_seed(seed, s));
            values[s] = static_cast<double>(g.degree(node));
            centers[s] = nd * mean_prob;
            scale[s] = nd * mean_prob;
        }
        report.center = centers.front();
    }

    for (double eps : epsilons) {
        ConcentrationRow row;
        row.epsilon = eps;
        row.samples = samples;
        for (std::size_t s = 0; s < samples; ++s)
            if (std::abs(values[s] - centers[s]) >= eps * scale[s]) ++row.exceedances;
        row.threshold = eps * scale.front();
        row.frequency = static_cast<double>(row.exceedances) / static_cast<double>(samples);
        if (setup.quantity == ConcentrationQuantity::EdgeCount) {
            const double p_eff = sbm ? family.sbm.scale * family.sbm.mean_prob(static_cast<std::size_t>(setup.cls)) : family.p;
            row.bound = 2.0 * std::exp(-eps * eps / (3.0 * nd * nd * p_eff));
        } else {
            row.bound = 2.0 * std::exp(-eps * eps * nd * bound_exponent_scale / 3.0 + 2.0 * eps / 3.0);
        }
        const double b = std::min(row.bound, 1.0);
        row.std_error = std::sqrt(b * (1.0 - b) / static_cast<double>(samples));
        report.rows.push_back(row);
    }
    return report;
}

// --- isomorphism invariance --------------------------------------------------

TwoSampleReport ks_two_sample(std::vector<long long> a, std::vector<long long> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const auto na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double worst = 0.0;
    while (i < a.size() || j < b.size()) {
        long long v;
        if (j >= b.size() || (i < a.size() && a[i] <= b[j])) v = a[i];
        else v = b[j];
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        worst = std::max(worst, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    // two-sided level 0.0027, the mass outside +-3 sigma of a normal
    const double c_alpha = std::sqrt(-0.5 * std::log(0.0027 / 2.0));
    TwoSampleReport report;
    report.statistic = worst;
    report.threshold = c_alpha * std::sqrt((na + nb) / (na * nb));
    report.samples = a.size();
    return report;
}

SystemState permute_state(const SystemState& x, std::span<const std::size_t> tau) {
    if (tau.size() != x.size()) throw std::invalid_argument("permute_state: permutation has the wrong length");
    SystemState y;
    y.opinion.assign(x.size(), -1);
    y.cls.assign(x.size(), 0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (tau[i] >= x.size() || y.opinion[tau[i]] != -1) throw std::invalid_argument("permute_state: not a permutation");
        y.opinion[tau[i]] = x.opinion[i];
        y.cls[tau[i]] = x.cls[i];
    }
    return y;
}

TwoSampleReport isomorphism_invariance_check(const GraphFamily& family, const SystemState& x,
                                             std::span<const std::size_t> tau, int m, int n, std::size_t samples,
                                             std::uint64_t seed_x, std::uint64_t seed_tau) {
    if (family.kind == FamilyKind::StochasticBlock)
        throw std::invalid_argument("isomorphism_invariance_check: family must be er or regular");
    const SystemState y = permute_state(x, tau);
    std::vector<long long> a(samples), b(samples);
    for (std::size_t s = 0; s < samples; ++s) {
        a[s] = static_cast<long long>(edge_count_between(family.sample(stream_seed(seed_x, s)), x, m, n));
        b[s] = static_cast<long long>(edge_count_between(family.sample(stream_seed(seed_tau, s)), y, m, n));
    }
    return ks_two_sample(std::move(a), std::move(b));
}

// --- convergence study -------------------------------------------------------

std::vector<ConvergenceRow> convergence_study(const EnsembleConfig& base, std::span<const std::size_t> sizes,
                                              const ConvergenceOptions& options) {
    for (std::size_t j = 1; j < sizes.size(); ++j)
        if (sizes[j] <= sizes[j - 1]) throw std::invalid_argument("convergence_study: sizes must increase");
    if (options.seeds.empty()) throw std::invalid_argument("convergence_study: need at least one seed");
    std::vector<ConvergenceRow> rows;
    const MfeSystem system = MfeSystem::for_family(base.params, base.family);
    const auto& grid = base.t_grid;
    std::size_t probe = 0;
    for (std::size_t t = 0; t < grid.size(); ++t)
        if (std::abs(grid[t] - options.probe_time) < std::abs(grid[probe] - options.probe_time)) probe = t;

    for (std::size_t n : sizes) {
        ConvergenceRow row;
        row.n = n;
        EnsembleConfig config = base;
        config.family.n = n;
        for (std::uint64_t seed : options.seeds) {
            config.seed = seed;
            const EnsembleStats stats = ensemble(config);
            // every realization starts from the same state, so the t = 0 mean is C(x0)
            const CollectiveState c0 = stats.mean.front();
            const Trajectory mfe = integrate(system, c0, grid, options.mfe_step);
            const DeviationReport dev = sup_deviation(stats, mfe);
            row.sup_dev.push_back(dev.sup_dev);
            row.max_simplex_error = std::max(row.max_simplex_error, stats.max_simplex_error);
            for (const auto& v : mfe.values) row.max_simplex_error = std::max(row.max_simplex_error, simplex_error(v));
            double acc = 0.0;
            for (const auto& sd : stats.stddev)
                for (double v : sd) acc += v;
            row.time_avg_std += acc / static_cast<double>(stats.stddev.size() * stats.stddev.front().size());
            row.probe_std += stats.stddev[probe][options.probe_component];
        }
        const auto seeds = static_cast<double>(options.seeds.size());
        row.mean_sup_dev = std::accumulate(row.sup_dev.begin(), row.sup_dev.end(), 0.0) / seeds;
        row.time_avg_std /= seeds;
        row.probe_std /= seeds;
        rows.push_back(std::move(row));
    }
    return rows;
}

// --- output ------------------------------------------------------------------

void write_deviation_csv(std::ostream& out, const DeviationReport& report) {
    out << "t,deviation,max_std\n";
    for (std::size_t t = 0; t < report.times.size(); ++t)
        out << format_double(report.times[t]) << ',' << format_double(report.deviation[t]) << ','
            << format_double(report.max_std[t]) << '\n';
}

void write_deviation_summary(std::ostream& out, const DeviationReport& report) {
    double worst_std = 0.0;
    for (double s : report.max_std) worst_std = std::max(worst_std, s);
    out << "sup deviation of ensemble mean from mean-field solution (inf-norm): " << format_double(report.sup_dev)
        << "\nlargest componentwise std over the grid: " << format_double(worst_std) << '\n';
}

void write_concentration_csv(std::ostream& out, const ConcentrationReport& report) {
    out << "epsilon,threshold,exceedances,samples,frequency,bound,std_error,within_bound\n";
    for (const auto& r : report.rows)
        out << format_double(r.epsilon) << ',' << format_double(r.threshold) << ',' << r.exceedances << ','
            << r.samples << ',' << format_double(r.frequency) << ',' << format_double(r.bound) << ','
            << format_double(r.std_error) << ',' << (r.within_bound() ? 1 : 0) << '\n';
}

void write_concentration_summary(std::ostream& out, const ConcentrationReport& report) {
    out << report.label << " (center " << format_double(report.center) << ")\n";
    for (const auto& r : report.rows)
        out << "  eps=" << r.epsilon << "  freq=" << r.frequency << "  bound=" << r.bound << "  "
            << (r.within_bound() ? "ok" : "EXCEEDS") << '\n';
}

void write_convergence_csv(std::ostream& out, std::span<const ConvergenceRow> rows) {
    out << "N,mean_sup_dev,time_avg_std,probe_std\n";
    for (const auto& r : rows)
        out << r.n << ',' << format_double(r.mean_sup_dev) << ',' << format_double(r.time_avg_std) << ','
            << format_double(r.probe_std) << '\n';
}

}  // namespace netdyn
