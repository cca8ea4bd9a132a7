#include "netdyn/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_set>

#include "netdyn/rng.hpp"

namespace netdyn {

namespace {

// Sorted set over {0, ..., n-1} supporting k-th smallest lookup and removal
// in O(log n), backed by a Fenwick tree of membership counts.
class IndexedSet {
public:
    explicit IndexedSet(std::size_t n) : tree_(n + 1, 0), size_(n) {
        for (std::size_t i = 1; i <= n; ++i) {
            tree_[i] += 1;
            const std::size_t parent = i + (i & (~i + 1));
            if (parent <= n) tree_[parent] += tree_[i];
        }
        top_ = n == 0 ? 0 : std::bit_floor(n);
    }

    std::size_t size() const noexcept { return size_; }

    // k is 0-based: kth(0) is the smallest member.
    std::uint64_t kth(std::uint64_t k) const {
        std::size_t pos = 0;
        std::uint64_t rem = k;
        for (std::size_t step = top_; step != 0; step >>= 1) {
            const std::size_t next = pos + step;
            if (next < tree_.size() && tree_[next] <= rem) {
                pos = next;
                rem -= tree_[next];
            }
        }
        return pos;  // pos is the 1-based index of the last skipped slot, i.e. the 0-based answer
    }

    void erase(std::uint64_t value) {
        for (std::size_t i = value + 1; i < tree_.size(); i += i & (~i + 1)) tree_[i] -= 1;
        --size_;
    }

private:
    std::vector<std::uint64_t> tree_;
    std::size_t size_;
    std::size_t top_ = 0;
};

void check_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

// Geometric skip length for Bernoulli(p) trials: number of failures before
// the next success.
std::uint64_t geometric_skip(Rng& rng, double log_q) {
    const double u = uniform01(rng);
    const double s = std::floor(std::log1p(-u) / log_q);
    if (!(s < 1.8e19)) return UINT64_MAX;
    return static_cast<std::uint64_t>(s);
}

// Appends the edges among nodes [offset, offset + size) with probability p.
void sample_within(std::vector<Edge>& edges, std::size_t offset, std::size_t size, double p, Rng& rng) {
    if (p <= 0.0 || size < 2) return;
    if (p >= 1.0) {
        for (std::size_t v = 1; v < size; ++v)
            for (std::size_t w = 0; w < v; ++w)
                edges.emplace_back(static_cast<NodeId>(offset + w), static_cast<NodeId>(offset + v));
        return;
    }
    // Linear index over the strict lower triangle, row v holding pairs (v, 0..v-1).
    const double log_q = std::log1p(-p);
    std::uint64_t v = 1, w = 0;
    std::uint64_t skip = geometric_skip(rng, log_q);
    while (true) {
        // advance (v, w) by skip positions
        while (skip > 0 && v < size) {
            const std::uint64_t left_in_row = v - w;
            if (skip < left_in_row) {
                w += skip;
                skip = 0;
            } else {
                skip -= left_in_row;
                ++v;
                w = 0;
            }
        }
        if (v >= size) return;
        edges.emplace_back(static_cast<NodeId>(offset + w), static_cast<NodeId>(offset + v));
        // step past the accepted pair
        if (++w == v) {
            ++v;
            w = 0;
        }
        if (v >= size) return;
        skip = geometric_skip(rng, log_q);
    }
}

// Appends the edges between [a0, a0 + na) and [b0, b0 + nb) with probability p.
void sample_between(std::vector<Edge>& edges, std::size_t a0, std::size_t na, std::size_t b0, std::size_t nb,
                    double p, Rng& rng) {
    if (p <= 0.0 || na == 0 || nb == 0) return;
    const std::uint64_t total = static_cast<std::uint64_t>(na) * nb;
    if (p >= 1.0) {
        for (std::uint64_t idx = 0; idx < total; ++idx)
            edges.emplace_back(static_cast<NodeId>(a0 + idx / nb), static_cast<NodeId>(b0 + idx % nb));
        return;
    }
    const double log_q = std::log1p(-p);
    std::uint64_t idx = 0;
    while (true) {
        const std::uint64_t skip = geometric_skip(rng, log_q);
        if (skip >= total - idx) return;
        idx += skip;
        edges.emplace_back(static_cast<NodeId>(a0 + idx / nb), static_cast<NodeId>(b0 + idx % nb));
        if (++idx >= total) return;
    }
}

}  // namespace

// --- Graph -------------------------------------------------------------------

Graph::Graph(std::size_t n) : offsets_(n + 1, 0) {}

Graph Graph::from_edges(std::size_t n, std::span<const Edge> edges) {
    Graph g;
    g.offsets_.assign(n + 1, 0);
    for (const auto& [a, b] : edges) {
        if (a >= n || b >= n) throw std::invalid_argument("Graph: edge endpoint out of range");
        if (a == b) throw std::invalid_argument("Graph: self-loop");
        ++g.offsets_[a + 1];
        ++g.offsets_[b + 1];
    }
    for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
    g.neighbors_.resize(g.offsets_[n]);
    std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const auto& [a, b] : edges) {
        g.neighbors_[fill[a]++] = b;
        g.neighbors_[fill[b]++] = a;
    }
    for (std::size_t i = 0; i < n; ++i) {
        auto first = g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i]);
        auto last = g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i + 1]);
        std::sort(first, last);
        if (std::adjacent_find(first, last) != last) throw std::invalid_argument("Graph: repeated edge");
    }
    return g;
}

bool Graph::has_edge(std::size_t i, std::size_t j) const {
    const auto nb = neighbors(i);
    return std::binary_search(nb.begin(), nb.end(), static_cast<NodeId>(j));
}

std::vector<Edge> Graph::edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (std::size_t i = 0; i < size(); ++i)
        for (NodeId j : neighbors(i))
            if (j > i) out.emplace_back(static_cast<NodeId>(i), j);
    return out;
}

Graph complete_graph(std::size_t n) {
    std::vector<Edge> edges;
    edges.reserve(n * (n - (n > 0)) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
    return Graph::from_edges(n, edges);
}

// --- MultiGraph --------------------------------------------------------------

bool MultiGraph::is_simple() const {
    std::vector<Edge> sorted;
    sorted.reserve(edges.size());
    for (auto [a, b] : edges) {
        if (a == b) return false;
        sorted.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(sorted.begin(), sorted.end());
    return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

std::vector<std::size_t> MultiGraph::degrees() const {
    std::vector<std::size_t> deg(n, 0);
    for (auto [a, b] : edges) {
        ++deg[a];
        ++deg[b];
    }
    return deg;
}

Graph MultiGraph::to_graph() const { return Graph::from_edges(n, edges); }

// --- configuration model -----------------------------------------------------

bool SelectionTuple::valid() const {
    if ((n * d) % 2 != 0 || values.size() != n * d / 2) return false;
    for (std::size_t r = 1; r <= values.size(); ++r)
        if (values[r - 1] < 1 || values[r - 1] > range(r)) return false;
    return true;
}

SelectionTuple sample_selection_tuple(std::size_t n, std::size_t d, std::uint64_t seed) {
    if ((n * d) % 2 != 0) throw std::invalid_argument("sample_selection_tuple: n*d must be even");
    SelectionTuple t{n, d, {}};
    const std::size_t eta = n * d / 2;
    t.values.resize(eta);
    Rng rng = make_rng(seed);
    for (std::size_t r = 1; r <= eta; ++r) t.values[r - 1] = 1 + uniform_below(rng, t.range(r));
    return t;
}

Configuration psi(const SelectionTuple& t) {
    if (!t.valid()) throw std::invalid_argument("psi: invalid selection tuple");
    Configuration f{t.n, t.d, {}};
    f.pairs.reserve(t.values.size());
    IndexedSet remaining(t.half_edges());
    for (std::uint64_t tr : t.values) {
        const std::uint64_t first = remaining.kth(0);
        const std::uint64_t partner = remaining.kth(tr);
        remaining.erase(first);
        remaining.erase(partner);
        f.pairs.emplace_back(first, partner);
    }
    return f;
}

MultiGraph gamma(const Configuration& f) {
    MultiGraph g{f.n, {}};
    g.edges.reserve(f.pairs.size());
    for (auto [e, h] : f.pairs) g.edges.emplace_back(static_cast<NodeId>(e / f.d), static_cast<NodeId>(h / f.d));
    return g;
}

std::size_t boundary_crossings(const SelectionTuple& t, std::uint64_t b) {
    if (b < 1 || b > t.half_edges()) throw std::invalid_argument("boundary_crossings: boundary out of range");
    // 1-based s <= b < e  <=>  0-based s0 < b <= e0
    std::size_t count = 0;
    for (auto [s, e] : psi(t).pairs)
        if (s < b && b <= e) ++count;
    return count;
}

Graph generate_regular(std::size_t n, std::size_t d, std::uint64_t seed, std::size_t max_attempts) {
    if ((n * d) % 2 != 0) throw std::invalid_argument("generate_regular: n*d must be even");
    if (d >= n && !(n == 0 && d == 0)) throw std::invalid_argument("generate_regular: need d < n");
    for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
        const auto t = sample_selection_tuple(n, d, stream_seed(seed, attempt));
        MultiGraph mg = gamma(psi(t));
        if (mg.is_simple()) return mg.to_graph();
    }
    throw GenerationError("generate_regular: no simple graph after " + std::to_string(max_attempts) +
                          " attempts (n=" + std::to_string(n) + ", d=" + std::to_string(d) + ")");
}

Graph generate_regular_pairing(std::size_t n, std::size_t d, std::uint64_t seed, std::size_t max_attempts) {
    if ((n * d) % 2 != 0) throw std::invalid_argument("generate_regular_pairing: n*d must be even");
    if (d >= n && !(n == 0 && d == 0)) throw std::invalid_argument("generate_regular_pairing: need d < n");
    Rng rng = make_rng(seed);
    const auto key = [n](std::uint64_t a, std::uint64_t b) { return a < b ? a * n + b : b * n + a; };

    for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
        std::unordered_set<std::uint64_t> edge_keys;
        edge_keys.reserve(n * d);
        std::vector<Edge> edges;
        edges.reserve(n * d / 2);
        std::vector<NodeId> stubs;
        stubs.reserve(n * d);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d; ++j) stubs.push_back(static_cast<NodeId>(i));

        bool stuck = false;
        while (!stubs.empty()) {
            for (std::size_t i = stubs.size(); i > 1; --i)
                std::swap(stubs[i - 1], stubs[uniform_below(rng, i)]);
            std::vector<NodeId> leftover;
            for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
                const NodeId a = stubs[i], b = stubs[i + 1];
                if (a != b && edge_keys.insert(key(a, b)).second) {
                    edges.emplace_back(std::min(a, b), std::max(a, b));
                } else {
                    leftover.push_back(a);
                    leftover.push_back(b);
                }
            }
            if (leftover.empty()) break;
            // Continue only if some admissible pair exists among the leftover nodes.
            std::vector<NodeId> nodes = leftover;
            std::sort(nodes.begin(), nodes.end());
            nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
            bool admissible = false;
            for (std::size_t i = 0; i < nodes.size() && !admissible; ++i)
                for (std::size_t j = i + 1; j < nodes.size() && !admissible; ++j)
                    admissible = !edge_keys.contains(key(nodes[i], nodes[j]));
            if (!admissible) {
                stuck = true;
                break;
            }
            stubs = std::move(leftover);
        }
        if (!stuck) return Graph::from_edges(n, edges);
    }
    throw GenerationError("generate_regular_pairing: stuck in every one of " + std::to_string(max_attempts) +
                          " attempts");
}

RegularMethod resolve_regular_method(RegularMethod method, std::size_t d, std::size_t max_attempts) {
    if (method != RegularMethod::Auto) return method;
    const double dd = static_cast<double>(d);
    const double expected_attempts = std::exp((dd * dd - 1.0) / 4.0);
    return expected_attempts * 10.0 <= static_cast<double>(max_attempts) ? RegularMethod::Rejection
                                                                         : RegularMethod::Pairing;
}

// --- ER and SBM --------------------------------------------------------------

Graph generate_er(std::size_t n, double p, std::uint64_t seed) {
    check_probability(p, "generate_er: p");
    if (n == 0) throw std::invalid_argument("generate_er: n must be positive");
    Rng rng = make_rng(seed);
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(p * static_cast<double>(n) * static_cast<double>(n - 1) / 2.0 * 1.1) + 16);
    sample_within(edges, 0, n, p, rng);
    return Graph::from_edges(n, edges);
}

std::vector<std::size_t> SbmSpec::block_sizes(std::size_t n) const {
    std::vector<std::size_t> sizes;
    std::size_t total = 0;
    for (double b : block_fractions) {
        const double exact = b * static_cast<double>(n);
        const double rounded = std::round(exact);
        if (std::abs(exact - rounded) > 1e-9 * std::max(1.0, exact))
            throw std::invalid_argument("SbmSpec: block fraction times n is not an integer");
        sizes.push_back(static_cast<std::size_t>(rounded));
        total += sizes.back();
    }
    if (total != n) throw std::invalid_argument("SbmSpec: block sizes do not add up to n");
    return sizes;
}

double SbmSpec::mean_prob(std::size_t k) const {
    double s = 0.0;
    for (std::size_t j = 0; j < blocks(); ++j) s += block_fractions[j] * probs(k, j);
    return s;
}

void SbmSpec::validate() const {
    const std::size_t k = blocks();
    if (k == 0) throw std::invalid_argument("SbmSpec: no blocks");
    if (probs.dim() != k) throw std::invalid_argument("SbmSpec: probability matrix has wrong dimension");
    double sum = 0.0;
    for (double b : block_fractions) {
        if (!(b > 0.0)) throw std::invalid_argument("SbmSpec: block fractions must be positive");
        sum += b;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("SbmSpec: block fractions must sum to 1");
    if (!probs.is_symmetric()) throw std::invalid_argument("SbmSpec: probability matrix must be symmetric");
    for (std::size_t i = 0; i < k; ++i) {
        bool positive = false;
        for (std::size_t j = 0; j < k; ++j) {
            check_probability(probs(i, j), "SbmSpec: edge probability");
            positive = positive || probs(i, j) > 0.0;
        }
        if (!positive) throw std::invalid_argument("SbmSpec: every block needs a positive connection probability");
    }
    check_probability(scale, "SbmSpec: scale");
}

SbmGraph generate_sbm(const SbmSpec& spec, std::size_t n, std::uint64_t seed) {
    spec.validate();
    const auto sizes = spec.block_sizes(n);
    std::vector<std::size_t> start(sizes.size() + 1, 0);
    for (std::size_t k = 0; k < sizes.size(); ++k) start[k + 1] = start[k] + sizes[k];

    SbmGraph out;
    out.classes.resize(n);
    for (std::size_t k = 0; k < sizes.size(); ++k)
        std::fill(out.classes.begin() + static_cast<std::ptrdiff_t>(start[k]),
                  out.classes.begin() + static_cast<std::ptrdiff_t>(start[k + 1]), static_cast<int>(k));

    Rng rng = make_rng(seed);
    std::vector<Edge> edges;
    for (std::size_t a = 0; a < sizes.size(); ++a) {
        sample_within(edges, start[a], sizes[a], spec.scale * spec.probs(a, a), rng);
        for (std::size_t b = a + 1; b < sizes.size(); ++b)
            sample_between(edges, start[a], sizes[a], start[b], sizes[b], spec.scale * spec.probs(a, b), rng);
    }
    out.graph = Graph::from_edges(n, edges);
    return out;
}

// --- families ----------------------------------------------------------------

GraphFamily GraphFamily::erdos_renyi(std::size_t n, double p) {
    GraphFamily f;
    f.kind = FamilyKind::ErdosRenyi;
    f.n = n;
    f.p = p;
    return f;
}

GraphFamily GraphFamily::regular(std::size_t n, std::size_t d) {
    GraphFamily f;
    f.kind = FamilyKind::Regular;
    f.n = n;
    f.d = d;
    return f;
}

GraphFamily GraphFamily::block_model(std::size_t n, SbmSpec spec) {
    GraphFamily f;
    f.kind = FamilyKind::StochasticBlock;
    f.n = n;
    f.sbm = std::move(spec);
    return f;
}

Graph GraphFamily::sample(std::uint64_t seed) const {
    switch (kind) {
        case FamilyKind::ErdosRenyi:
            return generate_er(n, p, seed);
        case FamilyKind::StochasticBlock:
            return generate_sbm(sbm, n, seed).graph;
        case FamilyKind::Regular:
            if (resolve_regular_method(regular_method, d, max_attempts) == RegularMethod::Rejection)
                return generate_regular(n, d, seed, max_attempts);
            return generate_regular_pairing(n, d, seed, max_attempts);
    }
    throw std::logic_error("GraphFamily: unknown kind");
}

const char* family_name(FamilyKind kind) {
    switch (kind) {
        case FamilyKind::ErdosRenyi: return "er";
        case FamilyKind::StochasticBlock: return "sbm";
        case FamilyKind::Regular: return "regular";
    }
    return "?";
}

FamilyKind parse_family(const std::string& name) {
    if (name == "er") return FamilyKind::ErdosRenyi;
    if (name == "sbm") return FamilyKind::StochasticBlock;
    if (name == "regular") return FamilyKind::Regular;
    throw std::invalid_argument("unknown graph family '" + name + "' (expected er, sbm or regular)");
}

// --- edge-list I/O -----------------------------------------------------------

void write_edge_list(std::ostream& out, const Graph& g) {
    out << g.size() << ' ' << g.edge_count() << '\n';
    for (auto [i, j] : g.edges()) out << i << ' ' << j << '\n';
}

Graph read_edge_list(std::istream& in) {
    std::size_t n = 0, m = 0;
    if (!(in >> n >> m)) throw std::runtime_error("edge list: missing header");
    std::vector<Edge> edges;
    edges.reserve(m);
    for (std::size_t e = 0; e < m; ++e) {
        std::uint64_t i = 0, j = 0;
        if (!(in >> i >> j)) throw std::runtime_error("edge list: truncated at edge " + std::to_string(e));
        if (i >= j) throw std::runtime_error("edge list: expected i < j");
        edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
    }
    if (!std::is_sorted(edges.begin(), edges.end())) throw std::runtime_error("edge list: edges not sorted");
    try {
        return Graph::from_edges(n, edges);
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("edge list: ") + e.what());
    }
}

}  // namespace netdyn
