#include "netdyn/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace netdyn {

CnvmParams CnvmParams::homogeneous(SquareMatrix imitation, SquareMatrix noise) {
    CnvmParams p;
    p.num_opinions = static_cast<int>(imitation.dim());
    p.num_classes = 1;
    p.imitation = {std::move(imitation)};
    p.noise = {std::move(noise)};
    p.validate();
    return p;
}

CnvmParams CnvmParams::heterogeneous(std::vector<SquareMatrix> imitation, std::vector<SquareMatrix> noise) {
    CnvmParams p;
    p.num_opinions = imitation.empty() ? 0 : static_cast<int>(imitation.front().dim());
    p.num_classes = static_cast<int>(imitation.size());
    p.imitation = std::move(imitation);
    p.noise = std::move(noise);
    p.validate();
    return p;
}

void CnvmParams::validate() const {
    if (num_opinions < 2) throw std::invalid_argument("CnvmParams: need at least two opinions");
    if (num_classes < 1) throw std::invalid_argument("CnvmParams: need at least one class");
    const auto k = static_cast<std::size_t>(num_classes);
    if (imitation.size() != k || noise.size() != k)
        throw std::invalid_argument("CnvmParams: need one imitation and one noise matrix per class");
    const auto m = static_cast<std::size_t>(num_opinions);
    for (std::size_t c = 0; c < k; ++c) {
        if (imitation[c].dim() != m || noise[c].dim() != m)
            throw std::invalid_argument("CnvmParams: rate matrix of class " + std::to_string(c) + " is not M x M");
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b) {
                if (a == b) continue;
                for (double v : {imitation[c](a, b), noise[c](a, b)})
                    if (!std::isfinite(v) || v < 0.0)
                        throw std::invalid_argument("CnvmParams: rates must be finite and non-negative");
            }
    }
}

double CnvmParams::rate_bound() const {
    double bound = 0.0;
    for (int k = 0; k < num_classes; ++k)
        for (int m = 0; m < num_opinions; ++m)
            for (int n = 0; n < num_opinions; ++n)
                if (m != n) bound = std::max(bound, r(k, m, n) + r_tilde(k, m, n));
    return bound;
}

SystemState SystemState::single_class(std::vector<int> opinions) {
    SystemState s;
    s.cls.assign(opinions.size(), 0);
    s.opinion = std::move(opinions);
    return s;
}

void SystemState::validate(std::size_t n, const CnvmParams& params) const {
    if (opinion.size() != n || cls.size() != n) throw std::invalid_argument("SystemState: length differs from graph size");
    for (std::size_t i = 0; i < n; ++i) {
        if (opinion[i] < 0 || opinion[i] >= params.num_opinions)
            throw std::invalid_argument("SystemState: opinion out of range at node " + std::to_string(i));
        if (cls[i] < 0 || cls[i] >= params.num_classes)
            throw std::invalid_argument("SystemState: class out of range at node " + std::to_string(i));
    }
}

std::vector<Transition> all_transitions(const CnvmParams& params) {
    std::vector<Transition> out;
    out.reserve(params.transition_count());
    for (int m = 0; m < params.num_opinions; ++m)
        for (int k = 0; k < params.num_classes; ++k)
            for (int n = 0; n < params.num_opinions; ++n)
                if (n != m) out.push_back({m, k, n});
    return out;
}

std::vector<std::size_t> extended_counts(const SystemState& state, const CnvmParams& params) {
    std::vector<std::size_t> counts(params.dim(), 0);
    for (std::size_t i = 0; i < state.size(); ++i) {
        const int m = state.opinion[i], k = state.cls[i];
        if (m < 0 || m >= params.num_opinions || k < 0 || k >= params.num_classes)
            throw std::invalid_argument("state has an opinion or class outside the parameter ranges");
        ++counts[ext_index(m, k, params.num_classes)];
    }
    return counts;
}

CollectiveState collective_variable(const SystemState& state, const CnvmParams& params) {
    const auto counts = extended_counts(state, params);
    const auto n = static_cast<double>(state.size());
    CollectiveState c(counts.size());
    for (std::size_t j = 0; j < counts.size(); ++j) c[j] = static_cast<double>(counts[j]) / n;
    return c;
}

std::size_t neighbor_opinion_count(const Graph& g, const SystemState& state, std::size_t i, int n) {
    std::size_t count = 0;
    for (NodeId j : g.neighbors(i))
        if (state.opinion[j] == n) ++count;
    return count;
}

double node_rate(const Graph& g, const SystemState& state, const CnvmParams& params, std::size_t i, int n) {
    const int m = state.opinion[i];
    if (n == m) throw std::invalid_argument("node_rate: target opinion equals the current opinion");
    const int k = state.cls[i];
    const std::size_t deg = g.degree(i);
    double rate = params.r_tilde(k, m, n);
    if (deg > 0)
        rate += params.r(k, m, n) * static_cast<double>(neighbor_opinion_count(g, state, i, n)) / static_cast<double>(deg);
    return rate;
}

double propensity_exact(const Graph& g, const SystemState& state, const CnvmParams& params, const Transition& t) {
    double total = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i)
        if (state.opinion[i] == t.from && state.cls[i] == t.cls) total += node_rate(g, state, params, i, t.to);
    return total;
}

std::vector<double> exact_propensities(const Graph& g, const SystemState& state, const CnvmParams& params) {
    const int big_m = params.num_opinions;
    const int big_k = params.num_classes;
    std::vector<double> out(params.transition_count(), 0.0);
    std::vector<std::size_t> local(static_cast<std::size_t>(big_m));
    for (std::size_t i = 0; i < state.size(); ++i) {
        const int m = state.opinion[i];
        const int k = state.cls[i];
        std::fill(local.begin(), local.end(), 0);
        for (NodeId j : g.neighbors(i)) ++local[static_cast<std::size_t>(state.opinion[j])];
        const std::size_t deg = g.degree(i);
        // index of transition (m, k, n) in all_transitions() order
        const std::size_t base = static_cast<std::size_t>((m * big_k + k) * (big_m - 1));
        std::size_t slot = 0;
        for (int n = 0; n < big_m; ++n) {
            if (n == m) continue;
            double rate = params.r_tilde(k, m, n);
            if (deg > 0) rate += params.r(k, m, n) * static_cast<double>(local[static_cast<std::size_t>(n)]) / static_cast<double>(deg);
            out[base + slot++] += rate;
        }
    }
    return out;
}

double propensity_reduced(std::span<const double> c, const CnvmParams& params, const GraphFamily& family,
                          const Transition& t) {
    const int big_k = params.num_classes;
    const double share = c[ext_index(t.from, t.cls, big_k)];
    if (share == 0.0) return 0.0;
    double neighbor_share = 0.0;
    if (family.kind == FamilyKind::StochasticBlock) {
        const SbmSpec& sbm = family.sbm;
        if (sbm.blocks() != static_cast<std::size_t>(big_k))
            throw std::invalid_argument("propensity_reduced: block count differs from class count");
        const auto k = static_cast<std::size_t>(t.cls);
        const double pbar = sbm.mean_prob(k);
        if (!(pbar > 0.0)) throw std::invalid_argument("propensity_reduced: block with zero mean connection probability");
        for (int kp = 0; kp < big_k; ++kp)
            neighbor_share += c[ext_index(t.to, kp, big_k)] * sbm.probs(k, static_cast<std::size_t>(kp));
        neighbor_share /= pbar;
    } else {
        for (int kp = 0; kp < big_k; ++kp) neighbor_share += c[ext_index(t.to, kp, big_k)];
    }
    return share * (params.r(t.cls, t.from, t.to) * neighbor_share + params.r_tilde(t.cls, t.from, t.to));
}

}  // namespace netdyn
