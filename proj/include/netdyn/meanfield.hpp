#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "netdyn/graph.hpp"
#include "netdyn/model.hpp"
#include "netdyn/sim.hpp"

namespace netdyn {

/// Mean-field equation dc/dt = sum over transitions of alpha~(c) v, where
/// v_{(m,k)->n} = e_(n,k) - e_(m,k).
///
/// The reduced propensities come from the graph family (see
/// propensity_reduced) or, for the Generic tag, from a user callable.
struct MfeSystem {
    enum class Family { Generic, ErHomogeneous, ErHeterogeneous, BlockModel, Regular };
    using Propensity = std::function<double(std::span<const double> c, const Transition& t)>;

    Family family = Family::ErHomogeneous;
    CnvmParams params;
    SbmSpec sbm;           // BlockModel only
    Propensity propensity; // Generic only

    static MfeSystem for_family(const CnvmParams& params, const GraphFamily& family);
    static MfeSystem generic(const CnvmParams& params, Propensity propensity);

    std::size_t dim() const noexcept { return params.dim(); }
    double reduced(std::span<const double> c, const Transition& t) const;
    void validate() const;
};

const char* mfe_family_name(MfeSystem::Family family);

/// F(c); components sum to zero up to round-off.
std::vector<double> rhs(const MfeSystem& system, std::span<const double> c);

/// Thrown when the integrator leaves the simplex by more than the tolerance.
class StepSizeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kDefaultStep = 0.01;
inline constexpr double kNegativeTolerance = 1e-9;

/// Classical fixed-step RK4 for dy/dt = f(y), recorded at the grid times.
/// The step must divide every grid spacing. `check` runs after every step.
template <class Rhs, class Check>
std::vector<std::vector<double>> integrate_rk4(Rhs&& f, std::vector<double> y, std::span<const double> grid, double h,
                                               Check&& check) {
    if (!(h > 0.0)) throw std::invalid_argument("integrate: step must be positive");
    if (grid.empty() || grid.front() != 0.0) throw std::invalid_argument("integrate: grid must start at 0");
    const std::size_t n = y.size();
    std::vector<std::vector<double>> out;
    out.reserve(grid.size());
    out.push_back(y);
    std::vector<double> tmp(n);
    for (std::size_t j = 1; j < grid.size(); ++j) {
        const double span = grid[j] - grid[j - 1];
        const auto steps = static_cast<long long>(std::llround(span / h));
        if (steps < 1 || std::abs(static_cast<double>(steps) * h - span) > 1e-9 * std::max(1.0, span))
            throw std::invalid_argument("integrate: step does not divide the grid spacing");
        for (long long s = 0; s < steps; ++s) {
            const std::vector<double> k1 = f(y);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
            const std::vector<double> k2 = f(tmp);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
            const std::vector<double> k3 = f(tmp);
            for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
            const std::vector<double> k4 = f(tmp);
            for (std::size_t i = 0; i < n; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            check(y);
        }
        out.push_back(y);
    }
    return out;
}

template <class Rhs>
std::vector<std::vector<double>> integrate_rk4(Rhs&& f, std::vector<double> y, std::span<const double> grid, double h) {
    return integrate_rk4(std::forward<Rhs>(f), std::move(y), grid, h, [](const std::vector<double>&) {});
}

/// Integrates the mean-field equation from c0 on the grid. Throws
/// StepSizeError if a component drops below -1e-9.
Trajectory integrate(const MfeSystem& system, std::span<const double> c0, std::span<const double> t_grid,
                     double h = kDefaultStep);

/// SIRS as a CNVM with opinions (S, I, R): only r_{S,I}, r~_{I,R} and r~_{R,S} are nonzero.
MfeSystem sirs_preset(double r_si, double r_tilde_ir, double r_tilde_rs);
CnvmParams sirs_params(double r_si, double r_tilde_ir, double r_tilde_rs);

/// Wraps a deterministic trajectory as a one-realization ensemble.
EnsembleStats as_ensemble(const Trajectory& trajectory);

}  // namespace netdyn
