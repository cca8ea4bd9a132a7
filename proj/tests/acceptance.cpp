// Acceptance gate: runs every criterion at full size and prints one PASS/FAIL
// line per criterion. Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "netdyn/experiment.hpp"
#include "netdyn/verify.hpp"

using namespace netdyn;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

// Worst simplex violation over every run made by the gate (criterion 9).
double g_simplex = 0.0;
void track(double err) { g_simplex = std::max(g_simplex, err); }
void track(const EnsembleStats& s) { track(s.max_simplex_error); }
void track(const Trajectory& t) {
    for (const auto& v : t.values) track(simplex_error(v));
}

// Criteria 2 and 3 share one study.
std::vector<ConvergenceRow> g_study;

Outcome oracle() {
    const double times[] = {0.5, 1.0, 2.0};
    const auto rows = check_oracle(100000, times, 101);
    Outcome o{true, ""};
    for (const auto& r : rows) {
        o.passed = o.passed && r.passed();
        o.detail += fmt("t=%g: |%.5f-%.5f|=%.5f <= %.5f; ", r.t, r.estimate, r.exact, std::abs(r.estimate - r.exact),
                        3.0 * r.std_error);
        track(r.max_simplex_error);
    }
    return o;
}

Outcome er_trend() {
    const EnsembleConfig base = resolve(make_preset("fig2a"), 1, std::nullopt).ensemble;
    const std::size_t sizes[] = {250, 1000, 4000};
    g_study = convergence_study(base, sizes, {.seeds = {1, 2, 3}, .probe_time = 1.0, .probe_component = 0});
    Outcome o{true, ""};
    for (std::size_t j = 0; j < g_study.size(); ++j) {
        const auto& r = g_study[j];
        track(r.max_simplex_error);
        o.detail += fmt("N=%zu sup_dev=%.4f; ", r.n, r.mean_sup_dev);
        if (j > 0 && r.mean_sup_dev > g_study[j - 1].mean_sup_dev) o.passed = false;
    }
    o.passed = o.passed && g_study.back().mean_sup_dev <= 0.03;
    return o;
}

Outcome clt_ratio() {
    if (g_study.size() != 3) return {false, "convergence study missing"};
    const double ratio = g_study.front().probe_std / g_study.back().probe_std;
    return {ratio >= 2.4 && ratio <= 6.4,
            fmt("std(250)=%.5f std(4000)=%.5f ratio=%.3f in [2.4, 6.4]", g_study.front().probe_std,
                g_study.back().probe_std, ratio)};
}

Outcome sbm_equilibration() {
    const ExperimentConfig c = resolve(make_preset("fig4-sbm", {.n = 1000, .realizations = 200}), 1, std::nullopt);
    const ExperimentResult res = run_experiment(c);
    track(res.stats);
    track(res.mfe);
    // late time: the last fifth of the horizon
    const double late = 0.8 * c.t_max;
    const std::size_t c11 = ext_index(0, 0, 2), c12 = ext_index(0, 1, 2);
    double gap = 0.0, track_dev = 0.0;
    for (std::size_t t = 0; t < res.stats.times.size(); ++t) {
        const auto& mean = res.stats.mean[t];
        const auto& mfe = res.mfe.values[t];
        track_dev = std::max({track_dev, std::abs(mean[c11] - mfe[c11]), std::abs(mean[c12] - mfe[c12])});
        if (res.stats.times[t] >= late) gap = std::max(gap, std::abs(mean[c11] - mean[c12]));
    }
    return {gap <= 0.05 && track_dev <= 0.05,
            fmt("late |c11-c12| max %.4f <= 0.05; max |mean-mfe| over c11,c12 %.4f <= 0.05", gap, track_dev)};
}

Outcome regular_density() {
    Outcome o{true, ""};
    for (std::uint64_t seed : {1, 2, 3}) {
        double dev[2];
        int slot = 0;
        for (const char* name : {"fig6-sirs-d10", "fig6-sirs-d100"}) {
            const ExperimentConfig c = resolve(make_preset(name, {.n = 2000, .realizations = 100}), seed, std::nullopt);
            const ExperimentResult res = run_experiment(c);
            track(res.stats);
            track(res.mfe);
            dev[slot++] = res.deviation.sup_dev;
        }
        o.passed = o.passed && dev[1] < dev[0];
        o.detail += fmt("seed %llu: d=10 %.4f, d=100 %.4f; ", static_cast<unsigned long long>(seed), dev[0], dev[1]);
    }
    return o;
}

Outcome configuration_model() {
    const auto a = check_regular_samples(100, 3, 1000, 61);
    const auto b = check_two_triangles(10000, 62);
    const auto c = check_boundary_lipschitz(10000, 63);
    return {a.passed() && b.passed() && c.passed(),
            fmt("(a) %zu samples, %zu bad degrees, %zu not simple; (b) P=%.4f vs 1/7 within %.4f; "
                "(c) %zu violations, max change %zu",
                a.samples, a.wrong_degree, a.not_simple, b.frequency, 3.0 * b.sigma, c.violations, c.max_change)};
}

Outcome concentration() {
    Outcome o{true, ""};
    for (const auto& rep : {er_edge_concentration(10000, 71), er_degree_concentration(10000, 72)}) {
        o.passed = o.passed && rep.passed();
        o.detail += rep.label + ":";
        for (const auto& r : rep.rows) o.detail += fmt(" eps=%g %.4f<=%.4f", r.epsilon, r.frequency, r.bound + 3 * r.std_error);
        o.detail += "; ";
    }
    return o;
}

Outcome delta_decay() {
    const std::size_t sizes[] = {500, 2000, 8000};
    const auto rows = check_delta_decay(sizes, 100, 81);
    Outcome o{strictly_decreasing(rows), ""};
    for (const auto& r : rows) o.detail += fmt("N=%zu delta=%.5f; ", r.n, r.delta);
    return o;
}

Outcome invariants() {
    // zero-sum right-hand side at random points for every equation family
    Rng rng = make_rng(91);
    double worst_sum = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
        const int m = 2 + static_cast<int>(uniform_below(rng, 3));
        const int k = 1 + static_cast<int>(uniform_below(rng, 3));
        std::vector<SquareMatrix> r, rt;
        for (int c = 0; c < k; ++c) {
            SquareMatrix a(static_cast<std::size_t>(m)), b(static_cast<std::size_t>(m));
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j)
                    if (i != j) {
                        a(i, j) = uniform01(rng);
                        b(i, j) = 0.1 * uniform01(rng);
                    }
            r.push_back(a);
            rt.push_back(b);
        }
        const CnvmParams p = CnvmParams::heterogeneous(r, rt);
        GraphFamily family = GraphFamily::erdos_renyi(100, 0.1);
        if (trial % 3 == 1) {
            SbmSpec spec;
            spec.block_fractions.assign(static_cast<std::size_t>(k), 1.0 / k);
            spec.probs = SquareMatrix(static_cast<std::size_t>(k));
            for (int a = 0; a < k; ++a)
                for (int b = a; b < k; ++b) spec.probs(a, b) = spec.probs(b, a) = 0.001 + 0.05 * uniform01(rng);
            family = GraphFamily::block_model(120, spec);
        } else if (trial % 3 == 2 && k == 1) {
            family = GraphFamily::regular(100, 4);
        }
        std::vector<double> c(p.dim());
        double total = 0.0;
        for (double& v : c) total += (v = -std::log1p(-uniform01(rng)));
        for (double& v : c) v /= total;
        const auto f = rhs(MfeSystem::for_family(p, family), c);
        double sum = 0.0, l1 = 0.0;
        for (double v : f) {
            sum += v;
            l1 += std::abs(v);
        }
        if (l1 > 0.0) worst_sum = std::max(worst_sum, std::abs(sum) / l1);
    }

    // repeated seeded runs, including different thread counts
    ExperimentConfig c = resolve(make_preset("fig2b", {.n = 500, .realizations = 8}), 5, std::nullopt);
    const Trajectory a = run_single(c), b = run_single(c);
    const ExperimentResult e1 = run_experiment(c);
    c.ensemble.threads = 1;
    const ExperimentResult e2 = run_experiment(c);
    track(a);
    track(e1.stats);
    track(e1.mfe);
    const bool deterministic = a.values == b.values && a.events == b.events && e1.stats.mean == e2.stats.mean &&
                               e1.stats.stddev == e2.stats.stddev && e1.mfe.values == e2.mfe.values;

    return {g_simplex <= 1e-12 && worst_sum <= 1e-14 && deterministic,
            fmt("max simplex error %.2e <= 1e-12; max relative rhs sum %.2e <= 1e-14; deterministic %s", g_simplex,
                worst_sum, deterministic ? "yes" : "no")};
}

Outcome heterogeneous() {
    // identical classes: aggregated K = 2 solution against the K = 1 solution
    const CnvmParams one = make_preset("fig2b").params();
    const CnvmParams two = CnvmParams::heterogeneous({one.imitation[0], one.imitation[0]}, {one.noise[0], one.noise[0]});
    const GraphFamily er = GraphFamily::erdos_renyi(1000, 0.01);
    const auto grid = make_time_grid(20.0, 0.1);
    const CollectiveState split{0.15, 0.05, 0.2, 0.3, 0.1, 0.2};
    CollectiveState merged(3);
    for (int m = 0; m < 3; ++m) merged[m] = split[ext_index(m, 0, 2)] + split[ext_index(m, 1, 2)];
    const Trajectory t2 = integrate(MfeSystem::for_family(two, er), split, grid);
    const Trajectory t1 = integrate(MfeSystem::for_family(one, er), merged, grid);
    double collapse = 0.0;
    for (std::size_t t = 0; t < grid.size(); ++t)
        for (int m = 0; m < 3; ++m)
            collapse = std::max(collapse, std::abs(t2.values[t][ext_index(m, 0, 2)] + t2.values[t][ext_index(m, 1, 2)] -
                                                   t1.values[t][m]));

    // opposing preferences: the preset run settles at an interior equilibrium
    const ExperimentConfig c = resolve(make_preset("fig3-hetero"), 1, std::nullopt);
    const MfeSystem sys = MfeSystem::for_family(c.params(), c.ensemble.family);
    const CollectiveState start = std::get<CollectiveState>(c.ensemble.init.value);
    const CollectiveState reached = integrate(sys, start, c.grid(), c.h).values.back();
    const std::vector<double> long_run{0.0, 20.0 * c.t_max};
    const CollectiveState eq = integrate(sys, start, long_run, c.h).values.back();
    double speed = 0.0, miss = 0.0;
    for (double v : rhs(sys, eq)) speed = std::max(speed, std::abs(v));
    for (std::size_t j = 0; j < eq.size(); ++j) miss = std::max(miss, std::abs(reached[j] - eq[j]));
    const bool interior = std::all_of(eq.begin(), eq.end(), [](double v) { return v > 1e-3; });
    const double share21 = eq[ext_index(1, 0, 2)], share22 = eq[ext_index(1, 1, 2)];

    // Jacobian on the tangent space with fixed class masses: coordinates are the
    // opinion-1 shares of each class, opinion 2 takes the complement
    double jac[2][2];
    const double step = 1e-6;
    for (int k = 0; k < 2; ++k) {
        CollectiveState up = eq, down = eq;
        up[ext_index(0, k, 2)] += step;
        up[ext_index(1, k, 2)] -= step;
        down[ext_index(0, k, 2)] -= step;
        down[ext_index(1, k, 2)] += step;
        const auto fu = rhs(sys, up), fd = rhs(sys, down);
        for (int row = 0; row < 2; ++row)
            jac[row][k] = (fu[ext_index(0, row, 2)] - fd[ext_index(0, row, 2)]) / (2 * step);
    }
    const double trace = jac[0][0] + jac[1][1], det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
    const bool stable = trace < 0.0 && det > 0.0;

    // the ensemble agrees on the ordering at the end of the preset horizon
    const EnsembleStats stats = ensemble(c.ensemble);
    track(stats);
    const auto& last = stats.mean.back();
    const bool ensemble_order = last[ext_index(1, 0, 2)] > last[ext_index(1, 1, 2)];

    return {collapse <= 1e-10 && speed <= 1e-10 && miss <= 1e-3 && interior && stable && share21 > share22 &&
                ensemble_order,
            fmt("K=2 vs K=1 max gap %.2e <= 1e-10; equilibrium (%.4f, %.4f, %.4f, %.4f) with |rhs| %.1e, reached to %.1e "
                "at t=%g; tangent Jacobian trace %.4f det %.4f; c_(2,1)=%.4f > c_(2,2)=%.4f (ensemble %.4f > %.4f)",
                collapse, eq[0], eq[1], eq[2], eq[3], speed, miss, c.t_max, trace, det, share21, share22,
                last[ext_index(1, 0, 2)], last[ext_index(1, 1, 2)])};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {"1 oracle equivalence", oracle},
        {"2 ER mean-field trend", er_trend},
        {"3 CLT variance scaling", clt_ratio},
        {"4 SBM equilibration", sbm_equilibration},
        {"5 regular-graph density effect", regular_density},
        {"6 configuration-model correctness", configuration_model},
        {"7 concentration bounds", concentration},
        {"8 propensity-gap decay", delta_decay},
        {"10 heterogeneous consistency", heterogeneous},
        {"9 structural invariants", invariants},  // last: it collects simplex errors from every run above
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& ex) {
            o = {false, std::string("exception: ") + ex.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s criterion %s (%.1fs): %s\n", o.passed ? "PASS" : "FAIL", c.name, secs, o.detail.c_str());
        std::fflush(stdout);
        if (!o.passed) ++failures;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
