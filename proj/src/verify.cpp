#include "netdyn/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "netdyn/rng.hpp"

namespace netdyn {

RegularSampleCheck check_regular_samples(std::size_t n, std::size_t d, std::size_t samples, std::uint64_t seed) {
    RegularSampleCheck check;
    check.samples = samples;
    std::vector<std::size_t> degree(n);
    for (std::size_t s = 0; s < samples; ++s) {
        const Graph g = generate_regular(n, d, stream_seed(seed, s));
        auto edges = g.edges();
        std::fill(degree.begin(), degree.end(), 0);
        bool simple = true;
        for (const auto& [a, b] : edges) {
            if (a == b) simple = false;
            ++degree[a];
            ++degree[b];
        }
        std::sort(edges.begin(), edges.end());
        if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) simple = false;
        if (!simple) ++check.not_simple;
        if (std::any_of(degree.begin(), degree.end(), [d](std::size_t k) { return k != d; })) ++check.wrong_degree;
    }
    return check;
}

bool UniformityCheck::passed() const { return std::abs(frequency - expected) <= 3.0 * sigma; }

UniformityCheck check_two_triangles(std::size_t samples, std::uint64_t seed) {
    UniformityCheck check;
    check.samples = samples;
    check.expected = 1.0 / 7.0;
    for (std::size_t s = 0; s < samples; ++s) {
        const Graph g = generate_regular(6, 2, stream_seed(seed, s));
        const auto nb = g.neighbors(0);
        if (g.has_edge(nb[0], nb[1])) ++check.hits;  // node 0 sits on a triangle
    }
    check.frequency = static_cast<double>(check.hits) / static_cast<double>(samples);
    check.sigma = std::sqrt(check.expected * (1.0 - check.expected) / static_cast<double>(samples));
    return check;
}

LipschitzCheck check_boundary_lipschitz(std::size_t trials, std::uint64_t seed) {
    LipschitzCheck check;
    Rng rng = make_rng(seed);
    while (check.trials < trials) {
        const std::size_t n = 2 + uniform_below(rng, 11);
        const std::size_t d = 1 + uniform_below(rng, 4);
        if ((n * d) % 2 != 0) continue;
        const SelectionTuple t = sample_selection_tuple(n, d, rng());
        SelectionTuple u = t;
        const std::size_t r = 1 + uniform_below(rng, u.values.size());
        const std::uint64_t range = u.range(r);
        if (range < 2) continue;
        auto& slot = u.values[r - 1];
        const auto old = slot;
        while (slot == old) slot = 1 + uniform_below(rng, range);
        const std::uint64_t b = 1 + uniform_below(rng, n * d);
        const std::size_t h0 = boundary_crossings(t, b), h1 = boundary_crossings(u, b);
        const std::size_t change = h0 > h1 ? h0 - h1 : h1 - h0;
        check.max_change = std::max(check.max_change, change);
        if (change > 2) ++check.violations;
        ++check.trials;
    }
    return check;
}

bool MeanCheck::passed() const { return std::abs(sample_mean - expected) <= tolerance; }

MeanCheck check_er_edge_mean(std::size_t n, double p, std::size_t samples, std::uint64_t seed) {
    MeanCheck check;
    check.samples = samples;
    const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
    check.expected = pairs * p;
    check.tolerance = 3.0 * std::sqrt(pairs * p * (1.0 - p) / static_cast<double>(samples));
    double total = 0.0;
    for (std::size_t s = 0; s < samples; ++s) total += static_cast<double>(generate_er(n, p, stream_seed(seed, s)).edge_count());
    check.sample_mean = total / static_cast<double>(samples);
    return check;
}

bool OracleRow::passed() const { return std::abs(estimate - exact) <= 3.0 * std_error; }

std::vector<OracleRow> check_oracle(std::size_t runs, std::span<const double> times, std::uint64_t seed) {
    if (runs < 2) throw std::invalid_argument("check_oracle: need at least two runs");
    const CnvmParams params = CnvmParams::homogeneous({{0, 0.99}, {1, 0}}, {{0, 0.01}, {0.01, 0}});
    const Graph g = complete_graph(5);
    const SystemState x0 = SystemState::single_class({0, 0, 1, 1, 1});
    std::vector<double> grid{0.0};
    grid.insert(grid.end(), times.begin(), times.end());
    const auto exact = master_equation_oracle(g, params, x0, times);

    std::vector<double> sum(times.size(), 0.0), sum_sq(times.size(), 0.0);
    double simplex = 0.0;
    for (std::size_t i = 0; i < runs; ++i) {
        const Trajectory traj = gillespie_run(g, params, x0, grid, stream_seed(seed, i));
        for (const auto& v : traj.values) simplex = std::max(simplex, simplex_error(v));
        for (std::size_t j = 0; j < times.size(); ++j) {
            const double v = traj.values[j + 1][0];
            sum[j] += v;
            sum_sq[j] += v * v;
        }
    }
    std::vector<OracleRow> rows;
    const auto r = static_cast<double>(runs);
    for (std::size_t j = 0; j < times.size(); ++j) {
        OracleRow row;
        row.t = times[j];
        row.exact = exact[j][0];
        row.estimate = sum[j] / r;
        const double var = std::max(0.0, (sum_sq[j] - r * row.estimate * row.estimate) / (r - 1.0));
        row.std_error = std::sqrt(var / r);
        row.max_simplex_error = simplex;
        rows.push_back(row);
    }
    return rows;
}

std::vector<DeltaRow> check_delta_decay(std::span<const std::size_t> sizes, std::size_t states, std::uint64_t seed) {
    const CnvmParams params = CnvmParams::homogeneous({{0, 0.99}, {1, 0}}, {{0, 0.01}, {0.01, 0}});
    std::vector<DeltaRow> rows;
    for (std::size_t j = 0; j < sizes.size(); ++j) {
        DeltaRow row;
        row.n = sizes[j];
        row.p = std::min(1.0, 4.0 * std::log(static_cast<double>(row.n)) / static_cast<double>(row.n));
        const GraphFamily family = GraphFamily::erdos_renyi(row.n, row.p);
        const Graph g = family.sample(stream_seed(seed, 2 * j));
        const std::vector<int> classes(row.n, 0);
        const auto xs = random_states(classes, params.num_opinions, states, stream_seed(seed, 2 * j + 1));
        row.delta = delta_estimate(g, params, family, xs);
        rows.push_back(row);
    }
    return rows;
}

bool strictly_decreasing(const std::vector<DeltaRow>& rows) {
    for (std::size_t j = 1; j < rows.size(); ++j)
        if (!(rows[j].delta < rows[j - 1].delta)) return false;
    return true;
}

namespace {

SystemState split_state(std::size_t n, std::span<const int> classes) {
    SystemState x;
    x.opinion.resize(n);
    x.cls.assign(classes.begin(), classes.end());
    for (std::size_t i = 0; i < n; ++i) x.opinion[i] = static_cast<int>(i % 2);
    return x;
}

SbmSpec two_blocks() {
    SbmSpec spec;
    spec.block_fractions = {0.5, 0.5};
    spec.probs = SquareMatrix{{0.02, 0.005}, {0.005, 0.02}};
    return spec;
}

}  // namespace

ConcentrationReport er_edge_concentration(std::size_t samples, std::uint64_t seed) {
    ChernoffSetup setup;
    setup.family = GraphFamily::erdos_renyi(500, 0.05);
    setup.state = split_state(500, std::vector<int>(500, 0));
    setup.quantity = ConcentrationQuantity::EdgeCount;
    const double eps[] = {0.0, 100.0, 200.0, 300.0, 400.0, 600.0};
    return chernoff_check(setup, eps, samples, seed);
}

ConcentrationReport er_degree_concentration(std::size_t samples, std::uint64_t seed) {
    ChernoffSetup setup;
    setup.family = GraphFamily::erdos_renyi(2000, 0.01);
    setup.quantity = ConcentrationQuantity::Degree;
    const double eps[] = {0.1, 0.25, 0.5, 0.75, 1.0};
    return chernoff_check(setup, eps, samples, seed);
}

ConcentrationReport sbm_edge_concentration(std::size_t samples, std::uint64_t seed) {
    ChernoffSetup setup;
    setup.family = GraphFamily::block_model(400, two_blocks());
    std::vector<int> classes(400, 0);
    std::fill(classes.begin() + 200, classes.end(), 1);
    setup.state = split_state(400, classes);
    setup.quantity = ConcentrationQuantity::EdgeCount;
    const double eps[] = {0.0, 50.0, 100.0, 150.0, 200.0};
    return chernoff_check(setup, eps, samples, seed);
}

ConcentrationReport sbm_degree_concentration(std::size_t samples, std::uint64_t seed) {
    ChernoffSetup setup;
    setup.family = GraphFamily::block_model(1000, two_blocks());
    setup.quantity = ConcentrationQuantity::Degree;
    const double eps[] = {0.1, 0.25, 0.5, 0.75, 1.0};
    return chernoff_check(setup, eps, samples, seed);
}

// --- suites ------------------------------------------------------------------

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {"graphs", "concentration", "oracle", "delta", "all"};
    return names;
}

namespace {

std::string printf_string(const char* format, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

void graphs_suite(std::uint64_t seed, std::vector<CheckResult>& out) {
    const auto reg = check_regular_samples(100, 3, 1000, stream_seed(seed, 1));
    out.push_back({"regular degrees and simplicity (n=100, d=3)", reg.passed(),
                   printf_string("%zu samples, %zu with a wrong degree, %zu not simple", reg.samples,
                                 reg.wrong_degree, reg.not_simple)});
    const auto uni = check_two_triangles(10000, stream_seed(seed, 2));
    out.push_back({"regular uniformity (n=6, d=2)", uni.passed(),
                   printf_string("P(two triangles) = %.4f, expected %.4f, 3 sigma = %.4f", uni.frequency, uni.expected,
                                 3.0 * uni.sigma)});
    const auto lip = check_boundary_lipschitz(10000, stream_seed(seed, 3));
    out.push_back({"boundary-crossing Lipschitz constant 2", lip.passed(),
                   printf_string("%zu perturbations, %zu violations, largest change %zu", lip.trials, lip.violations,
                                 lip.max_change)});
    const auto er = check_er_edge_mean(2000, 0.01, 500, stream_seed(seed, 4));
    out.push_back({"G(2000, 0.01) edge-count mean", er.passed(),
                   printf_string("sample mean %.2f, expected %.2f, tolerance %.2f", er.sample_mean, er.expected,
                                 er.tolerance)});
}

CheckResult concentration_result(const ConcentrationReport& report) {
    std::string detail;
    for (const auto& r : report.rows)
        detail += printf_string("eps=%g freq=%.4f bound=%.4f; ", r.epsilon, r.frequency, r.bound);
    return {report.label, report.passed(), detail};
}

void concentration_suite(std::uint64_t seed, std::vector<CheckResult>& out) {
    out.push_back(concentration_result(er_edge_concentration(10000, stream_seed(seed, 11))));
    out.push_back(concentration_result(er_degree_concentration(5000, stream_seed(seed, 12))));
    out.push_back(concentration_result(sbm_edge_concentration(2000, stream_seed(seed, 13))));
    out.push_back(concentration_result(sbm_degree_concentration(2000, stream_seed(seed, 14))));
}

void oracle_suite(std::uint64_t seed, std::vector<CheckResult>& out) {
    const double times[] = {0.5, 1.0, 2.0};
    for (const auto& row : check_oracle(100000, times, stream_seed(seed, 21)))
        out.push_back({printf_string("Gillespie vs master equation at t=%g", row.t), row.passed(),
                       printf_string("mean %.5f, exact %.5f, 3 SE %.5f", row.estimate, row.exact, 3.0 * row.std_error)});
}

void delta_suite(std::uint64_t seed, std::vector<CheckResult>& out) {
    const std::size_t sizes[] = {500, 2000, 8000};
    const auto rows = check_delta_decay(sizes, 100, stream_seed(seed, 31));
    std::string detail;
    for (const auto& r : rows) detail += printf_string("N=%zu delta=%.5f; ", r.n, r.delta);
    out.push_back({"propensity gap decreasing in N on G(N, 4 ln N / N)", strictly_decreasing(rows), detail});
}

}  // namespace

std::vector<CheckResult> run_suite(const std::string& suite, std::uint64_t seed) {
    std::vector<CheckResult> out;
    const bool all = suite == "all";
    if (!all && std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end())
        throw std::invalid_argument("unknown suite '" + suite + "'");
    if (all || suite == "graphs") graphs_suite(seed, out);
    if (all || suite == "concentration") concentration_suite(seed, out);
    if (all || suite == "oracle") oracle_suite(seed, out);
    if (all || suite == "delta") delta_suite(seed, out);
    return out;
}

}  // namespace netdyn
