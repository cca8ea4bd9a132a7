#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "netdyn/graph.hpp"
#include "netdyn/matrix.hpp"

namespace netdyn {

/// Rates of the continuous-time noisy voter model, one pair of M x M matrices
/// per node class. Off-diagonal entries are rates in 1/time; diagonals are
/// never read.
struct CnvmParams {
    int num_opinions = 2;
    int num_classes = 1;
    std::vector<SquareMatrix> imitation;  // r^k
    std::vector<SquareMatrix> noise;      // r~^k

    /// Single-class parameters.
    static CnvmParams homogeneous(SquareMatrix imitation, SquareMatrix noise);
    /// One (imitation, noise) pair per class.
    static CnvmParams heterogeneous(std::vector<SquareMatrix> imitation, std::vector<SquareMatrix> noise);

    double r(int k, int m, int n) const { return imitation[static_cast<std::size_t>(k)](m, n); }
    double r_tilde(int k, int m, int n) const { return noise[static_cast<std::size_t>(k)](m, n); }

    /// Throws std::invalid_argument on shape errors or negative/non-finite rates.
    void validate() const;
    /// Largest off-diagonal r + r~ over all classes; every node rate is at most this.
    double rate_bound() const;

    std::size_t dim() const noexcept { return static_cast<std::size_t>(num_opinions * num_classes); }
    std::size_t transition_count() const noexcept {
        return static_cast<std::size_t>(num_opinions * num_classes * (num_opinions - 1));
    }
};

/// Opinions x_i in [0, M) and fixed classes s_i in [0, K).
struct SystemState {
    std::vector<int> opinion;
    std::vector<int> cls;

    std::size_t size() const noexcept { return opinion.size(); }
    /// All nodes in class 0.
    static SystemState single_class(std::vector<int> opinions);
    void validate(std::size_t n, const CnvmParams& params) const;
};

/// Shares of each extended state (m, k), stored at index m * K + k.
using CollectiveState = std::vector<double>;

constexpr std::size_t ext_index(int m, int k, int num_classes) noexcept {
    return static_cast<std::size_t>(m * num_classes + k);
}

/// Transition (m, k) -> n of a node with opinion m in class k to opinion n.
struct Transition {
    int from = 0;
    int cls = 0;
    int to = 1;
};

/// Transitions in the canonical order: m, then k, then n != m.
std::vector<Transition> all_transitions(const CnvmParams& params);

std::vector<std::size_t> extended_counts(const SystemState& state, const CnvmParams& params);
CollectiveState collective_variable(const SystemState& state, const CnvmParams& params);

std::size_t neighbor_opinion_count(const Graph& g, const SystemState& state, std::size_t i, int n);

/// Rate at which node i switches to opinion n: r^k_{m,n} d_{i,n} / d_i + r~^k_{m,n}.
/// Isolated nodes only see the noise term. Throws if n is the node's opinion.
double node_rate(const Graph& g, const SystemState& state, const CnvmParams& params, std::size_t i, int n);

/// Cumulative rate of transition t over all nodes in extended state (t.from, t.cls).
double propensity_exact(const Graph& g, const SystemState& state, const CnvmParams& params, const Transition& t);

/// All exact propensities in all_transitions() order, computed in one pass.
std::vector<double> exact_propensities(const Graph& g, const SystemState& state, const CnvmParams& params);

/// Reduced propensity of the family's mean-field limit, per unit population.
///
/// Erdos-Renyi and regular graphs use c_(m,k) (r^k_{m,n} c_n + r~^k_{m,n}) with
/// c_n the overall share of opinion n; the block model weights the opinion-n
/// shares of each block k' by p_{k,k'} / pbar_k. Throws for a block model whose
/// block k has pbar_k = 0.
double propensity_reduced(std::span<const double> c, const CnvmParams& params, const GraphFamily& family,
                          const Transition& t);

}  // namespace netdyn
