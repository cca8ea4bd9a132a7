#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "netdyn/analysis.hpp"

namespace netdyn {

// Statistical batteries behind `netdyn verify`. Each check returns its raw
// statistics so callers can report them; `passed` applies the documented rule.

struct RegularSampleCheck {
    std::size_t samples = 0;
    std::size_t wrong_degree = 0;  // samples with some degree != d
    std::size_t not_simple = 0;    // samples with a loop or a repeated edge
    bool passed() const { return wrong_degree == 0 && not_simple == 0; }
};

/// Draws d-regular graphs and checks every degree and simplicity from the raw edge list.
RegularSampleCheck check_regular_samples(std::size_t n, std::size_t d, std::size_t samples, std::uint64_t seed);

struct UniformityCheck {
    std::size_t samples = 0;
    std::size_t hits = 0;
    double frequency = 0.0;
    double expected = 0.0;
    double sigma = 0.0;  // binomial std of the frequency under `expected`
    bool passed() const;
};

/// 2-regular graphs on 6 labeled nodes: 60 six-cycles and 10 pairs of
/// triangles, so a uniform sampler gives two triangles with probability 1/7.
UniformityCheck check_two_triangles(std::size_t samples, std::uint64_t seed);

struct LipschitzCheck {
    std::size_t trials = 0;
    std::size_t violations = 0;
    std::size_t max_change = 0;
    bool passed() const { return violations == 0; }
};

/// Changes one entry of a random selection tuple and compares boundary
/// crossing counts at random boundaries; a change above 2 is a violation.
LipschitzCheck check_boundary_lipschitz(std::size_t trials, std::uint64_t seed);

struct MeanCheck {
    std::size_t samples = 0;
    double sample_mean = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;  // 3 standard errors
    bool passed() const;
};

/// Edge count of G(n, p) against its binomial mean.
MeanCheck check_er_edge_mean(std::size_t n, double p, std::size_t samples, std::uint64_t seed);

struct OracleRow {
    double t = 0.0;
    double exact = 0.0;      // master-equation E[c_1(t)]
    double estimate = 0.0;   // Gillespie sample mean
    double std_error = 0.0;  // sample std / sqrt(runs)
    double max_simplex_error = 0.0;  // over every recorded value of every run
    bool passed() const;
};

/// Complete graph on 5 nodes, two opinions, start with two nodes of opinion 1;
/// Gillespie mean of c_1 against the exact expectation at each time.
std::vector<OracleRow> check_oracle(std::size_t runs, std::span<const double> times, std::uint64_t seed);

struct DeltaRow {
    std::size_t n = 0;
    double p = 0.0;
    double delta = 0.0;
};

/// Sampled-max propensity gap on G(N, 4 ln N / N) with uniformly random states.
std::vector<DeltaRow> check_delta_decay(std::span<const std::size_t> sizes, std::size_t states, std::uint64_t seed);
bool strictly_decreasing(const std::vector<DeltaRow>& rows);

/// Edge counts E_{1,2} on G(500, 0.05) with half the nodes in each opinion.
ConcentrationReport er_edge_concentration(std::size_t samples, std::uint64_t seed);
/// Node degrees on G(2000, 0.01).
ConcentrationReport er_degree_concentration(std::size_t samples, std::uint64_t seed);
/// Same two quantities on a two-block model.
ConcentrationReport sbm_edge_concentration(std::size_t samples, std::uint64_t seed);
ConcentrationReport sbm_degree_concentration(std::size_t samples, std::uint64_t seed);

// --- suites ------------------------------------------------------------------

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

const std::vector<std::string>& suite_names();

/// Runs one suite ("graphs", "concentration", "oracle", "delta" or "all").
/// Throws std::invalid_argument for other names.
std::vector<CheckResult> run_suite(const std::string& suite, std::uint64_t seed);

}  // namespace netdyn
