#include "netdyn/meanfield.hpp"

#include <string>

namespace netdyn {

MfeSystem MfeSystem::for_family(const CnvmParams& params, const GraphFamily& family) {
    MfeSystem s;
    s.params = params;
    switch (family.kind) {
        case FamilyKind::ErdosRenyi:
            s.family = params.num_classes == 1 ? Family::ErHomogeneous : Family::ErHeterogeneous;
            break;
        case FamilyKind::Regular:
            s.family = Family::Regular;
            break;
        case FamilyKind::StochasticBlock:
            s.family = Family::BlockModel;
            s.sbm = family.sbm;
            break;
    }
    s.validate();
    return s;
}

MfeSystem MfeSystem::generic(const CnvmParams& params, Propensity propensity) {
    MfeSystem s;
    s.family = Family::Generic;
    s.params = params;
    s.propensity = std::move(propensity);
    s.validate();
    return s;
}

void MfeSystem::validate() const {
    params.validate();
    switch (family) {
        case Family::Generic:
            if (!propensity) throw std::invalid_argument("MfeSystem: generic system without a propensity");
            break;
        case Family::ErHomogeneous:
        case Family::Regular:
            if (params.num_classes != 1)
                throw std::invalid_argument(std::string("MfeSystem: ") + mfe_family_name(family) + " needs K = 1");
            break;
        case Family::ErHeterogeneous:
            break;
        case Family::BlockModel:
            sbm.validate();
            if (sbm.blocks() != static_cast<std::size_t>(params.num_classes))
                throw std::invalid_argument("MfeSystem: block count differs from class count");
            for (std::size_t k = 0; k < sbm.blocks(); ++k)
                if (!(sbm.mean_prob(k) > 0.0))
                    throw std::invalid_argument("MfeSystem: block with zero mean connection probability");
            break;
    }
}

double MfeSystem::reduced(std::span<const double> c, const Transition& t) const {
    if (family == Family::Generic) return propensity(c, t);
    GraphFamily descriptor;
    if (family == Family::BlockModel) {
        descriptor.kind = FamilyKind::StochasticBlock;
        descriptor.sbm = sbm;
    }
    return propensity_reduced(c, params, descriptor, t);
}

const char* mfe_family_name(MfeSystem::Family family) {
    switch (family) {
        case MfeSystem::Family::Generic: return "generic";
        case MfeSystem::Family::ErHomogeneous: return "er-homogeneous";
        case MfeSystem::Family::ErHeterogeneous: return "er-heterogeneous";
        case MfeSystem::Family::BlockModel: return "sbm";
        case MfeSystem::Family::Regular: return "regular";
    }
    return "?";
}

std::vector<double> rhs(const MfeSystem& system, std::span<const double> c) {
    const int big_m = system.params.num_opinions;
    const int big_k = system.params.num_classes;
    if (c.size() != system.dim()) throw std::invalid_argument("rhs: state has the wrong dimension");
    std::vector<double> out(c.size(), 0.0);

    if (system.family == MfeSystem::Family::Generic) {
        for (const auto& t : all_transitions(system.params)) {
            const double a = system.propensity(c, t);
            out[ext_index(t.to, t.cls, big_k)] += a;
            out[ext_index(t.from, t.cls, big_k)] -= a;
        }
        return out;
    }

    // Neighbor share of opinion n seen from class k, precomputed once.
    std::vector<double> seen(static_cast<std::size_t>(big_m * big_k), 0.0);
    if (system.family == MfeSystem::Family::BlockModel) {
        for (int k = 0; k < big_k; ++k) {
            const double pbar = system.sbm.mean_prob(static_cast<std::size_t>(k));
            for (int n = 0; n < big_m; ++n) {
                double s = 0.0;
                for (int kp = 0; kp < big_k; ++kp)
                    s += c[ext_index(n, kp, big_k)] * system.sbm.probs(static_cast<std::size_t>(k), static_cast<std::size_t>(kp));
                seen[ext_index(n, k, big_k)] = s / pbar;
            }
        }
    } else {
        for (int n = 0; n < big_m; ++n) {
            double s = 0.0;
            for (int kp = 0; kp < big_k; ++kp) s += c[ext_index(n, kp, big_k)];
            for (int k = 0; k < big_k; ++k) seen[ext_index(n, k, big_k)] = s;
        }
    }

    for (int m = 0; m < big_m; ++m)
        for (int k = 0; k < big_k; ++k) {
            const double share = c[ext_index(m, k, big_k)];
            if (share == 0.0) continue;
            for (int n = 0; n < big_m; ++n) {
                if (n == m) continue;
                const double a = share * (system.params.r(k, m, n) * seen[ext_index(n, k, big_k)] +
                                          system.params.r_tilde(k, m, n));
                out[ext_index(n, k, big_k)] += a;
                out[ext_index(m, k, big_k)] -= a;
            }
        }
    return out;
}

Trajectory integrate(const MfeSystem& system, std::span<const double> c0, std::span<const double> t_grid, double h) {
    system.validate();
    if (c0.size() != system.dim()) throw std::invalid_argument("integrate: initial state has the wrong dimension");
    for (double v : c0)
        if (v < -kNegativeTolerance) throw std::invalid_argument("integrate: initial state has a negative share");
    auto f = [&system](const std::vector<double>& y) { return rhs(system, y); };
    auto check = [h](const std::vector<double>& y) {
        for (double v : y)
            if (v < -kNegativeTolerance)
                throw StepSizeError("integrate: share dropped to " + std::to_string(v) + "; step h=" +
                                    std::to_string(h) + " is too large");
    };
    Trajectory traj;
    traj.times.assign(t_grid.begin(), t_grid.end());
    auto values = integrate_rk4(f, std::vector<double>(c0.begin(), c0.end()), t_grid, h, check);
    traj.values.assign(std::make_move_iterator(values.begin()), std::make_move_iterator(values.end()));
    return traj;
}

CnvmParams sirs_params(double r_si, double r_tilde_ir, double r_tilde_rs) {
    if (r_si < 0.0 || r_tilde_ir < 0.0 || r_tilde_rs < 0.0) throw std::invalid_argument("sirs: rates must be non-negative");
    SquareMatrix r(3), rt(3);
    r(0, 1) = r_si;
    rt(1, 2) = r_tilde_ir;
    rt(2, 0) = r_tilde_rs;
    return CnvmParams::homogeneous(r, rt);
}

MfeSystem sirs_preset(double r_si, double r_tilde_ir, double r_tilde_rs) {
    MfeSystem s;
    s.family = MfeSystem::Family::Regular;
    s.params = sirs_params(r_si, r_tilde_ir, r_tilde_rs);
    return s;
}

EnsembleStats as_ensemble(const Trajectory& trajectory) {
    return summarize(std::span<const Trajectory>(&trajectory, 1));
}

}  // namespace netdyn
