#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "netdyn/analysis.hpp"
#include "netdyn/rng.hpp"

using namespace netdyn;

namespace {

CnvmParams fig2a() { return CnvmParams::homogeneous({{0, 0.99}, {1, 0}}, {{0, 0.01}, {0.01, 0}}); }

// Dense generator of the full chain on a complete graph with M = 2, written
// out from the node-rate formula, then exponentiated directly.
double dense_expected_share(std::size_t n, const CnvmParams& p, const std::vector<int>& x0, double t) {
    const std::size_t states = std::size_t{1} << n;
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(states), static_cast<Eigen::Index>(states));
    for (std::size_t s = 0; s < states; ++s) {
        for (std::size_t i = 0; i < n; ++i) {
            const int mine = static_cast<int>((s >> i) & 1U);
            const int other = 1 - mine;
            std::size_t agree = 0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i && static_cast<int>((s >> j) & 1U) == other) ++agree;
            const double rate = p.r(0, mine, other) * static_cast<double>(agree) / static_cast<double>(n - 1) +
                                p.r_tilde(0, mine, other);
            const std::size_t target = s ^ (std::size_t{1} << i);
            q(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(target)) += rate;
            q(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) -= rate;
        }
    }
    std::size_t start = 0;
    for (std::size_t i = 0; i < n; ++i) start |= static_cast<std::size_t>(x0[i]) << i;
    const Eigen::MatrixXd transition = (q * t).exp();
    double expected = 0.0;
    for (std::size_t s = 0; s < states; ++s) {
        const double zeros = static_cast<double>(n - static_cast<std::size_t>(std::popcount(s)));
        expected += transition(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(s)) * zeros / static_cast<double>(n);
    }
    return expected;
}

}  // namespace

TEST_CASE("master-equation oracle") {
    const CnvmParams p = fig2a();
    const Graph k5 = complete_graph(5);
    const SystemState x0 = SystemState::single_class({0, 0, 1, 1, 1});
    CHECK(master_equation_oracle(k5, p, x0, 0.0) == collective_variable(x0, p));

    const CnvmParams noise = CnvmParams::homogeneous(SquareMatrix(2), {{0, 1}, {1, 0}});
    const auto two_state = master_equation_oracle(Graph(1), noise, SystemState::single_class({0}), 1.0);
    CHECK(two_state[0] == doctest::Approx(0.5 + 0.5 * std::exp(-2.0)).epsilon(1e-10));
    CHECK(two_state[0] == doctest::Approx(0.5676676).epsilon(1e-7));

    const std::vector<int> start{0, 1, 1};
    const SystemState x3 = SystemState::single_class(start);
    for (double t : {0.1, 0.5, 1.0, 2.0, 7.5}) {
        const auto got = master_equation_oracle(complete_graph(3), p, x3, t);
        CHECK(std::abs(got[0] - dense_expected_share(3, p, start, t)) <= 1e-8);
    }

    // times in any order give the same values as one-at-a-time calls
    const std::vector<double> times{2.0, 0.5, 1.0};
    const auto many = master_equation_oracle(k5, p, x0, times);
    for (std::size_t j = 0; j < times.size(); ++j)
        CHECK(many[j][0] == doctest::Approx(master_equation_oracle(k5, p, x0, times[j])[0]).epsilon(1e-10));

    CHECK_THROWS_AS(master_equation_oracle(complete_graph(13), p, SystemState::single_class(std::vector<int>(13, 0)), 1.0),
                    std::invalid_argument);
}

TEST_CASE("Gillespie mean agrees with the oracle on a small complete graph") {
    const CnvmParams p = fig2a();
    const Graph k5 = complete_graph(5);
    const SystemState x0 = SystemState::single_class({0, 0, 1, 1, 1});
    const std::vector<double> grid{0.0, 0.5, 1.0, 2.0};
    const auto exact = master_equation_oracle(k5, p, x0, std::span(grid).subspan(1));
    const std::size_t runs = 20000;
    std::vector<double> sum(3, 0.0), sq(3, 0.0);
    for (std::size_t r = 0; r < runs; ++r) {
        const Trajectory t = gillespie_run(k5, p, x0, grid, stream_seed(2024, r));
        for (std::size_t j = 0; j < 3; ++j) {
            sum[j] += t.values[j + 1][0];
            sq[j] += t.values[j + 1][0] * t.values[j + 1][0];
        }
    }
    for (std::size_t j = 0; j < 3; ++j) {
        const double mean = sum[j] / runs;
        const double se = std::sqrt((sq[j] / runs - mean * mean) / (runs - 1));
        CHECK(std::abs(mean - exact[j][0]) <= 3.0 * se);
    }
}

TEST_CASE("propensity gap") {
    const GraphFamily er = GraphFamily::erdos_renyi(10, 1.0);
    const CnvmParams zero = CnvmParams::homogeneous(SquareMatrix(2), SquareMatrix(2));
    const SystemState half = SystemState::single_class({0, 0, 0, 0, 0, 1, 1, 1, 1, 1});
    CHECK(delta_gap(complete_graph(10), zero, er, half) == 0.0);

    const CnvmParams unit = CnvmParams::homogeneous({{0, 1}, {1, 0}}, {{0, 0.01}, {0.01, 0}});
    CHECK(delta_gap(complete_graph(10), unit, er, half) == doctest::Approx(0.25 / 9.0).epsilon(1e-12));

    const CnvmParams p = fig2a();
    const auto states = random_states(std::vector<int>(40, 0), 2, 50, 3);
    double closed = 0.0;
    for (const auto& x : states) {
        const auto c = collective_variable(x, p);
        closed = std::max({closed, 0.99 * c[0] * c[1] / 39.0, 1.0 * c[1] * c[0] / 39.0});
    }
    CHECK(delta_estimate(complete_graph(40), p, er, states) == doctest::Approx(closed).epsilon(1e-12));

    const auto visited = visited_states(complete_graph(40), p, states[0], make_time_grid(2.0, 0.5), 9);
    CHECK(visited.size() == 5);
    CHECK(visited.front().opinion == states[0].opinion);
}

TEST_CASE("deviation reports") {
    const GraphFamily er = GraphFamily::erdos_renyi(100, 0.01);
    const auto sys = MfeSystem::for_family(fig2a(), er);
    const auto grid = make_time_grid(2.0, 0.5);
    const Trajectory mfe = integrate(sys, std::vector<double>{0.2, 0.8}, grid);
    CHECK(sup_deviation(as_ensemble(mfe), mfe).sup_dev == 0.0);

    EnsembleStats shifted = as_ensemble(mfe);
    shifted.mean[2][0] += 0.01;
    shifted.mean[2][1] -= 0.01;
    const DeviationReport rep = sup_deviation(shifted, mfe);
    CHECK(rep.sup_dev == doctest::Approx(0.01));
    for (double d : rep.deviation) CHECK(d <= rep.sup_dev);

    // duplicating a grid point leaves the supremum unchanged
    EnsembleStats dup = shifted;
    Trajectory mfe_dup = mfe;
    dup.times.insert(dup.times.begin() + 2, dup.times[2]);
    dup.mean.insert(dup.mean.begin() + 2, dup.mean[2]);
    dup.stddev.insert(dup.stddev.begin() + 2, dup.stddev[2]);
    mfe_dup.times.insert(mfe_dup.times.begin() + 2, mfe_dup.times[2]);
    mfe_dup.values.insert(mfe_dup.values.begin() + 2, mfe_dup.values[2]);
    CHECK(sup_deviation(dup, mfe_dup).sup_dev == rep.sup_dev);

    Trajectory other = mfe;
    other.times[1] = 0.6;
    CHECK_THROWS_AS(sup_deviation(shifted, other), std::invalid_argument);
    other = mfe;
    other.times.pop_back();
    other.values.pop_back();
    CHECK_THROWS_AS(sup_deviation(shifted, other), std::invalid_argument);

    std::ostringstream csv;
    write_deviation_csv(csv, rep);
    CHECK(csv.str().rfind("t,deviation,max_std\n", 0) == 0);
}

TEST_CASE("edge counts between opinions") {
    const SystemState x = SystemState::single_class({0, 1, 0, 1, 1, 0});
    CHECK(edge_count_between(Graph(6), x, 0, 1) == 0);
    CHECK(edge_count_between(complete_graph(6), x, 0, 1) == 9);
    const Graph g = generate_er(6, 0.5, 3);
    CHECK(edge_count_between(g, x, 0, 1) == edge_count_between(g, x, 1, 0));

    // E_{1,2} on G(500, 0.05) with c = (0.5, 0.5): mean 0.25 N^2 p = 3125, variance 250^2 p (1 - p)
    std::vector<int> o(500);
    for (std::size_t i = 0; i < 500; ++i) o[i] = static_cast<int>(i % 2);
    const SystemState half = SystemState::single_class(o);
    const std::size_t samples = 10000;
    double total = 0.0;
    for (std::size_t s = 0; s < samples; ++s)
        total += static_cast<double>(edge_count_between(generate_er(500, 0.05, stream_seed(7, s)), half, 0, 1));
    CHECK(std::abs(total / samples - 3125.0) <= 3.0 * std::sqrt(62500.0 * 0.05 * 0.95 / samples));
}

TEST_CASE("concentration checks") {
    std::vector<int> o(500);
    for (std::size_t i = 0; i < 500; ++i) o[i] = static_cast<int>(i % 2);
    ChernoffSetup edges;
    edges.family = GraphFamily::erdos_renyi(500, 0.05);
    edges.state = SystemState::single_class(o);
    const double eps[] = {0.0, 600.0};
    const auto rep = chernoff_check(edges, eps, 10000, 5);
    CHECK(rep.center == doctest::Approx(3125.0));
    CHECK(rep.rows[0].frequency == 1.0);
    CHECK(rep.rows[0].bound >= 1.0);
    CHECK(rep.rows[1].exceedances == 0);
    CHECK(rep.rows[1].bound == doctest::Approx(2.0 * std::exp(-9.6)));
    CHECK(rep.passed());

    ChernoffSetup degree;
    degree.family = GraphFamily::erdos_renyi(2000, 0.01);
    degree.quantity = ConcentrationQuantity::Degree;
    const double half_eps[] = {0.5};
    const auto deg = chernoff_check(degree, half_eps, 2000, 6);
    CHECK(deg.rows[0].bound == doctest::Approx(2.0 * std::exp(-0.25 * 20.0 / 3.0 + 1.0 / 3.0)));
    CHECK(deg.rows[0].threshold == doctest::Approx(10.0));
    CHECK(deg.rows[0].frequency <= deg.rows[0].bound);

    SbmSpec spec;
    spec.block_fractions = {0.5, 0.5};
    spec.probs = SquareMatrix{{0.02, 0.005}, {0.005, 0.02}};
    ChernoffSetup sbm;
    sbm.family = GraphFamily::block_model(400, spec);
    std::vector<int> cls(400, 0);
    std::fill(cls.begin() + 200, cls.end(), 1);
    std::vector<int> op(400);
    for (std::size_t i = 0; i < 400; ++i) op[i] = static_cast<int>(i % 2);
    sbm.state = SystemState{op, cls};
    const double sbm_eps[] = {0.0, 100.0, 200.0};
    const auto sbm_rep = chernoff_check(sbm, sbm_eps, 2000, 8);
    // (opinion 0, class 0) has 100 nodes; opinion-1 nodes: 100 per block
    CHECK(sbm_rep.center == doctest::Approx(100.0 * 100.0 * 0.02 + 100.0 * 100.0 * 0.005));
    CHECK(sbm_rep.passed());

    sbm.quantity = ConcentrationQuantity::Degree;
    const double deg_eps[] = {0.25, 0.5, 1.0};
    const auto sbm_deg = chernoff_check(sbm, deg_eps, 2000, 9);
    CHECK(sbm_deg.center == doctest::Approx(400.0 * 0.0125));
    CHECK(sbm_deg.passed());

    std::ostringstream csv;
    write_concentration_csv(csv, rep);
    CHECK(csv.str().rfind("epsilon,threshold,exceedances,samples,frequency,bound,std_error,within_bound\n", 0) == 0);
}

TEST_CASE("two-sample test and isomorphism invariance") {
    std::vector<long long> a(1000);
    std::iota(a.begin(), a.end(), 0);
    std::vector<long long> b(a);
    CHECK(ks_two_sample(a, b).statistic == 0.0);
    for (auto& v : b) v += 200;
    CHECK_FALSE(ks_two_sample(a, b).passed());
    CHECK(ks_two_sample(a, b).threshold == doctest::Approx(1.8175 * std::sqrt(2.0 / 1000.0)).epsilon(1e-3));

    std::vector<int> o(200);
    for (std::size_t i = 0; i < 200; ++i) o[i] = i < 100 ? 0 : 1;
    const SystemState x = SystemState::single_class(o);
    std::vector<std::size_t> identity(200);
    std::iota(identity.begin(), identity.end(), 0);
    const auto same = isomorphism_invariance_check(GraphFamily::erdos_renyi(200, 0.05), x, identity, 0, 1, 500, 4, 4);
    CHECK(same.statistic == 0.0);

    std::vector<std::size_t> tau = identity;
    Rng rng = make_rng(12);
    std::shuffle(tau.begin(), tau.end(), rng);
    CHECK(permute_state(x, tau).opinion[tau[0]] == x.opinion[0]);
    const auto er = isomorphism_invariance_check(GraphFamily::erdos_renyi(200, 0.05), x, tau, 0, 1, 5000, 1, 2);
    CHECK(er.passed());

    std::vector<int> o100(100);
    for (std::size_t i = 0; i < 100; ++i) o100[i] = i < 50 ? 0 : 1;
    std::vector<std::size_t> tau100(100);
    std::iota(tau100.begin(), tau100.end(), 0);
    std::shuffle(tau100.begin(), tau100.end(), rng);
    const auto reg = isomorphism_invariance_check(GraphFamily::regular(100, 4), SystemState::single_class(o100), tau100,
                                                  0, 1, 5000, 3, 4);
    CHECK(reg.passed());

    std::vector<std::size_t> broken(200, 0);
    CHECK_THROWS_AS(permute_state(x, broken), std::invalid_argument);
}

TEST_CASE("convergence study bookkeeping") {
    EnsembleConfig base;
    base.family = GraphFamily::erdos_renyi(100, 0.05);
    base.params = fig2a();
    base.init = InitSpec::shares({0.2, 0.8});
    base.t_grid = make_time_grid(1.0, 0.1);
    base.realizations = 4;
    ConvergenceOptions opts;
    opts.seeds = {1, 2};
    const std::size_t sizes[] = {100, 200};
    const auto rows = convergence_study(base, sizes, opts);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].n == 200);
    CHECK(rows[0].sup_dev.size() == 2);
    CHECK(rows[0].mean_sup_dev == doctest::Approx((rows[0].sup_dev[0] + rows[0].sup_dev[1]) / 2));
    CHECK(rows[0].probe_std > 0.0);
    const std::size_t bad[] = {200, 100};
    CHECK_THROWS_AS(convergence_study(base, bad, opts), std::invalid_argument);
}
