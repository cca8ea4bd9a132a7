#include "netdyn/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

namespace netdyn {

using nlohmann::json;

std::vector<double> ExperimentConfig::grid() const { return make_time_grid(t_max, dt_record); }

void ExperimentConfig::validate() const {
    const auto& e = ensemble;
    e.params.validate();
    if (e.family.n == 0) throw std::invalid_argument("config: N must be positive");
    if (e.realizations == 0) throw std::invalid_argument("config: R must be positive");
    if (!(t_max > 0.0) || !(dt_record > 0.0)) throw std::invalid_argument("config: t_max and dt_record must be positive");
    if (!(h > 0.0)) throw std::invalid_argument("config: h must be positive");
    switch (e.family.kind) {
        case FamilyKind::ErdosRenyi:
            if (!(e.family.p >= 0.0 && e.family.p <= 1.0)) throw std::invalid_argument("config: p must lie in [0, 1]");
            break;
        case FamilyKind::Regular:
            if (e.family.d == 0 || e.family.d >= e.family.n || (e.family.n * e.family.d) % 2 != 0)
                throw std::invalid_argument("config: need 0 < d < N and N*d even");
            break;
        case FamilyKind::StochasticBlock:
            e.family.sbm.validate();
            if (e.family.sbm.blocks() != static_cast<std::size_t>(e.params.num_classes))
                throw std::invalid_argument("config: block count must equal K");
            break;
    }
    if (e.family.kind != FamilyKind::StochasticBlock && e.params.num_classes > 1 &&
        e.class_fractions.size() != static_cast<std::size_t>(e.params.num_classes))
        throw std::invalid_argument("config: class_fractions needs K entries");
    // builds the initial state once to surface share/size mismatches early
    init_state(e.init, e.params, ensemble_classes(e));
}

// --- JSON --------------------------------------------------------------------

namespace {

const std::set<std::string> kKnownFields = {
    "name",  "description", "M",     "K",    "r",    "r_tilde",   "family",    "N",      "p",
    "d",     "regular_method", "max_attempts", "block_fractions", "probs", "scale", "init", "class_fractions",
    "t_max", "dt_record",   "h",     "R",    "mode", "seed",      "output"};

SquareMatrix matrix_from_json(const json& j, std::size_t dim, const char* what) {
    if (!j.is_array() || j.size() != dim) throw std::invalid_argument(std::string("config: ") + what + " must be " +
                                                                      std::to_string(dim) + " x " + std::to_string(dim));
    SquareMatrix m(dim);
    for (std::size_t a = 0; a < dim; ++a) {
        if (!j[a].is_array() || j[a].size() != dim)
            throw std::invalid_argument(std::string("config: ") + what + " has a ragged row");
        for (std::size_t b = 0; b < dim; ++b) {
            const json& v = j[a][b];
            if (v.is_null() || (a == b && v.is_string())) continue;  // diagonal placeholder
            if (!v.is_number()) throw std::invalid_argument(std::string("config: ") + what + " entries must be numbers");
            m(a, b) = v.get<double>();
        }
    }
    return m;
}

std::vector<SquareMatrix> rates_from_json(const json& j, int big_m, int big_k, const char* what) {
    if (!j.is_array() || j.empty()) throw std::invalid_argument(std::string("config: ") + what + " must be an array");
    const bool per_class = j[0].is_array() && !j[0].empty() && j[0][0].is_array();
    std::vector<SquareMatrix> out;
    if (!per_class) {
        if (big_k != 1) throw std::invalid_argument(std::string("config: ") + what + " needs one matrix per class");
        out.push_back(matrix_from_json(j, static_cast<std::size_t>(big_m), what));
        return out;
    }
    if (j.size() != static_cast<std::size_t>(big_k))
        throw std::invalid_argument(std::string("config: ") + what + " needs K matrices");
    for (const auto& m : j) out.push_back(matrix_from_json(m, static_cast<std::size_t>(big_m), what));
    return out;
}

json matrix_to_json(const SquareMatrix& m) {
    json rows = json::array();
    for (std::size_t a = 0; a < m.dim(); ++a) {
        json row = json::array();
        for (std::size_t b = 0; b < m.dim(); ++b) row.push_back(a == b ? json(nullptr) : json(m(a, b)));
        rows.push_back(row);
    }
    return rows;
}

RegularMethod parse_regular_method(const std::string& s) {
    if (s == "auto") return RegularMethod::Auto;
    if (s == "rejection") return RegularMethod::Rejection;
    if (s == "pairing") return RegularMethod::Pairing;
    throw std::invalid_argument("config: regular_method must be auto, rejection or pairing");
}

const char* regular_method_name(RegularMethod m) {
    switch (m) {
        case RegularMethod::Auto: return "auto";
        case RegularMethod::Rejection: return "rejection";
        case RegularMethod::Pairing: return "pairing";
    }
    return "auto";
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw std::invalid_argument("config: top level must be an object");
    for (const auto& item : doc.items())
        if (!kKnownFields.count(item.key())) throw std::invalid_argument("config: unknown field '" + item.key() + "'");

    ExperimentConfig c;
    try {
        c.name = doc.value("name", std::string("config"));
        c.description = doc.value("description", std::string());
        auto& e = c.ensemble;
        const int big_m = doc.at("M").get<int>();
        const int big_k = doc.value("K", 1);
        if (big_m < 2 || big_k < 1) throw std::invalid_argument("config: need M >= 2 and K >= 1");
        e.params = CnvmParams::heterogeneous(rates_from_json(doc.at("r"), big_m, big_k, "r"),
                                             rates_from_json(doc.at("r_tilde"), big_m, big_k, "r_tilde"));

        e.family.kind = parse_family(doc.at("family").get<std::string>());
        e.family.n = doc.at("N").get<std::size_t>();
        switch (e.family.kind) {
            case FamilyKind::ErdosRenyi: e.family.p = doc.at("p").get<double>(); break;
            case FamilyKind::Regular:
                e.family.d = doc.at("d").get<std::size_t>();
                e.family.regular_method = parse_regular_method(doc.value("regular_method", std::string("auto")));
                e.family.max_attempts = doc.value("max_attempts", kDefaultMaxAttempts);
                break;
            case FamilyKind::StochasticBlock: {
                e.family.sbm.block_fractions = doc.at("block_fractions").get<std::vector<double>>();
                e.family.sbm.probs = matrix_from_json(doc.at("probs"), e.family.sbm.block_fractions.size(), "probs");
                // probs carries real diagonals
                for (std::size_t k = 0; k < e.family.sbm.blocks(); ++k)
                    e.family.sbm.probs(k, k) = doc.at("probs")[k][k].get<double>();
                e.family.sbm.scale = doc.value("scale", 1.0);
                break;
            }
        }

        const json& init = doc.at("init");
        if (init.contains("shares") == init.contains("opinions"))
            throw std::invalid_argument("config: init needs exactly one of 'shares' or 'opinions'");
        if (init.contains("shares")) e.init = InitSpec::shares(init.at("shares").get<std::vector<double>>());
        else e.init = InitSpec::opinions(init.at("opinions").get<std::vector<int>>());

        e.class_fractions = doc.value("class_fractions", std::vector<double>{});
        e.realizations = doc.value("R", std::size_t{1});
        const std::string mode = doc.value("mode", std::string("annealed"));
        if (mode == "annealed") e.mode = GraphMode::Annealed;
        else if (mode == "quenched") e.mode = GraphMode::Quenched;
        else throw std::invalid_argument("config: mode must be annealed or quenched");

        c.t_max = doc.at("t_max").get<double>();
        c.dt_record = doc.at("dt_record").get<double>();
        c.h = doc.value("h", kDefaultStep);
        if (doc.contains("seed")) c.seed = doc.at("seed").get<std::uint64_t>();
        c.output = doc.value("output", std::string());
    } catch (const json::exception& ex) {
        throw std::invalid_argument(std::string("config: ") + ex.what());
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& ex) {
        throw std::invalid_argument("config: " + path + ": " + ex.what());
    }
    return parse_config(doc);
}

json config_to_json(const ExperimentConfig& c) {
    const auto& e = c.ensemble;
    json doc;
    doc["name"] = c.name;
    if (!c.description.empty()) doc["description"] = c.description;
    doc["M"] = e.params.num_opinions;
    doc["K"] = e.params.num_classes;
    json r = json::array(), rt = json::array();
    for (int k = 0; k < e.params.num_classes; ++k) {
        r.push_back(matrix_to_json(e.params.imitation[static_cast<std::size_t>(k)]));
        rt.push_back(matrix_to_json(e.params.noise[static_cast<std::size_t>(k)]));
    }
    doc["r"] = r;
    doc["r_tilde"] = rt;
    doc["family"] = family_name(e.family.kind);
    doc["N"] = e.family.n;
    switch (e.family.kind) {
        case FamilyKind::ErdosRenyi: doc["p"] = e.family.p; break;
        case FamilyKind::Regular:
            doc["d"] = e.family.d;
            doc["regular_method"] = regular_method_name(e.family.regular_method);
            doc["max_attempts"] = e.family.max_attempts;
            break;
        case FamilyKind::StochasticBlock: {
            doc["block_fractions"] = e.family.sbm.block_fractions;
            json probs = json::array();
            for (std::size_t a = 0; a < e.family.sbm.blocks(); ++a) {
                json row = json::array();
                for (std::size_t b = 0; b < e.family.sbm.blocks(); ++b) row.push_back(e.family.sbm.probs(a, b));
                probs.push_back(row);
            }
            doc["probs"] = probs;
            doc["scale"] = e.family.sbm.scale;
            break;
        }
    }
    if (const auto* s = std::get_if<CollectiveState>(&e.init.value)) doc["init"] = {{"shares", *s}};
    else doc["init"] = {{"opinions", std::get<std::vector<int>>(e.init.value)}};
    if (!e.class_fractions.empty()) doc["class_fractions"] = e.class_fractions;
    doc["t_max"] = c.t_max;
    doc["dt_record"] = c.dt_record;
    doc["h"] = c.h;
    doc["R"] = e.realizations;
    doc["mode"] = e.mode == GraphMode::Annealed ? "annealed" : "quenched";
    if (c.seed) doc["seed"] = *c.seed;
    if (!c.output.empty()) doc["output"] = c.output;
    return doc;
}

// --- presets -----------------------------------------------------------------

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"fig2a", "fig2b", "fig3-hetero", "fig4-sbm", "fig6-sirs-d10",
                                                   "fig6-sirs-d100"};
    return names;
}

namespace {

SquareMatrix uniform_offdiag(std::size_t dim, double v) {
    SquareMatrix m(dim, v);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 0.0;
    return m;
}

ExperimentConfig base_preset(std::string name, CnvmParams params, GraphFamily family, CollectiveState c0,
                             double t_max, double dt, std::size_t realizations) {
    ExperimentConfig c;
    c.name = std::move(name);
    c.ensemble.params = std::move(params);
    c.ensemble.family = std::move(family);
    c.ensemble.init = InitSpec::shares(std::move(c0));
    c.ensemble.realizations = realizations;
    c.t_max = t_max;
    c.dt_record = dt;
    return c;
}

ExperimentConfig sirs(const std::string& name, std::size_t d) {
    // Chosen rates: infection 2, recovery 1, loss of immunity 0.1 (basic reproduction number 2).
    ExperimentConfig c = base_preset(name, sirs_params(2.0, 1.0, 0.1), GraphFamily::regular(10000, d), {0.99, 0.01, 0.0},
                                     40.0, 0.2, 100);
    c.description = "SIRS on random " + std::to_string(d) +
                    "-regular graphs; the ensemble approaches the mean-field curve more closely for larger d";
    return c;
}

}  // namespace

ExperimentConfig make_preset(const std::string& name, const PresetOverrides& overrides) {
    ExperimentConfig c;
    if (name == "fig2a") {
        c = base_preset(name, CnvmParams::homogeneous({{0, 0.99}, {1, 0}}, uniform_offdiag(2, 0.01)),
                        GraphFamily::erdos_renyi(1000, 0.01), {0.2, 0.8}, 5.0, 0.05, 200);
        c.description = "two opinions on G(N, 0.01); mean and spread approach the mean-field curve as N grows";
    } else if (name == "fig2b") {
        c = base_preset(name,
                        CnvmParams::homogeneous({{0, 0.8, 0.2}, {0.2, 0, 0.8}, {0.8, 0.2, 0}}, uniform_offdiag(3, 0.01)),
                        GraphFamily::erdos_renyi(1000, 0.01), {0.2, 0.5, 0.3}, 20.0, 0.1, 200);
        c.description = "three cyclically dominant opinions on G(N, 0.01); agreement degrades with time";
    } else if (name == "fig3-hetero") {
        // Chosen rates: class 1 switches to opinion 2 slightly faster than back, class 2 the reverse.
        const SquareMatrix class1{{0, 1.0}, {0.9, 0}}, class2{{0, 0.8}, {1.0, 0}};
        const SquareMatrix noise = uniform_offdiag(2, 0.01);
        c = base_preset(name, CnvmParams::heterogeneous({class1, class2}, {noise, noise}),
                        GraphFamily::erdos_renyi(1000, 0.01), {0.25, 0.25, 0.25, 0.25}, 200.0, 0.5, 200);
        c.ensemble.class_fractions = {0.5, 0.5};
        c.description = "two classes with opposing preferences; class 1 ends with the larger opinion-2 share";
    } else if (name == "fig4-sbm") {
        SbmSpec spec;
        spec.block_fractions = {0.5, 0.5};
        spec.probs = SquareMatrix{{0.01, 0.0001}, {0.0001, 0.01}};
        const SquareMatrix rates{{0, 1.0}, {1.0, 0}};
        const SquareMatrix noise = uniform_offdiag(2, 0.01);
        c = base_preset(name, CnvmParams::heterogeneous({rates, rates}, {noise, noise}),
                        GraphFamily::block_model(1000, spec), {0.5, 0.0, 0.0, 0.5}, 100.0, 0.5, 200);
        c.description = "two weakly coupled blocks starting in opposite consensus; block shares equilibrate";
    } else if (name == "fig6-sirs-d10") {
        c = sirs(name, 10);
    } else if (name == "fig6-sirs-d100") {
        c = sirs(name, 100);
    } else {
        throw std::invalid_argument("unknown preset '" + name + "'");
    }
    if (overrides.n) c.ensemble.family.n = *overrides.n;
    if (overrides.realizations) c.ensemble.realizations = *overrides.realizations;
    c.validate();
    return c;
}

ExperimentConfig resolve(ExperimentConfig config, std::optional<std::uint64_t> flag_seed,
                         std::optional<std::uint64_t> env_seed) {
    if (flag_seed) config.seed = flag_seed;
    else if (!config.seed) config.seed = env_seed;
    if (!config.seed) throw std::invalid_argument("no seed: pass --seed, set it in the config, or set NETDYN_SEED");
    config.ensemble.seed = *config.seed;
    config.ensemble.t_grid = config.grid();
    return config;
}

// --- runs --------------------------------------------------------------------

Trajectory run_single(const ExperimentConfig& config) {
    const auto& e = config.ensemble;
    const Graph g = e.family.sample(realization_graph_seed(e.seed, 0));
    const SystemState x0 = init_state(e.init, e.params, ensemble_classes(e));
    return gillespie_run(g, e.params, x0, e.t_grid, realization_dynamics_seed(e.seed, 0));
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    const auto& e = config.ensemble;
    ExperimentResult result;
    result.stats = ensemble(e);
    const SystemState x0 = init_state(e.init, e.params, ensemble_classes(e));
    const CollectiveState c0 = collective_variable(x0, e.params);
    result.mfe = integrate(MfeSystem::for_family(e.params, e.family), c0, e.t_grid, config.h);
    result.deviation = sup_deviation(result.stats, result.mfe);
    return result;
}

}  // namespace netdyn
