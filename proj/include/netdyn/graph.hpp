#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <stdexcept>
#include <utility>
#include <vector>

#include "netdyn/matrix.hpp"

namespace netdyn {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

/// Simple undirected graph stored as compressed adjacency lists.
///
/// Every neighbor list is sorted and free of duplicates and self-loops, and
/// adjacency is symmetric. Instances are immutable once built, so a single
/// graph can be shared read-only between simulation workers.
class Graph {
public:
    Graph() = default;
    /// Edgeless graph on `n` nodes.
    explicit Graph(std::size_t n);

    /// Builds a graph from an edge list. Throws std::invalid_argument on a
    /// self-loop, a repeated edge, or an endpoint outside [0, n).
    static Graph from_edges(std::size_t n, std::span<const Edge> edges);

    std::size_t size() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t edge_count() const noexcept { return neighbors_.size() / 2; }

    std::span<const NodeId> neighbors(std::size_t i) const {
        return {neighbors_.data() + offsets_[i], neighbors_.data() + offsets_[i + 1]};
    }
    std::size_t degree(std::size_t i) const { return offsets_[i + 1] - offsets_[i]; }
    bool has_edge(std::size_t i, std::size_t j) const;

    /// Edges as (i, j) with i < j, sorted lexicographically.
    std::vector<Edge> edges() const;

    friend bool operator==(const Graph&, const Graph&) = default;

private:
    std::vector<std::size_t> offsets_;
    std::vector<NodeId> neighbors_;
};

Graph complete_graph(std::size_t n);

/// Multigraph induced by a configuration; self-loops and repeated edges allowed.
struct MultiGraph {
    std::size_t n = 0;
    std::vector<Edge> edges;

    bool is_simple() const;
    std::vector<std::size_t> degrees() const;  // a self-loop adds 2
    Graph to_graph() const;                    // throws if not simple
};

/// Perfect matching of the half-edges {0, ..., n*d - 1}. Half-edge e belongs
/// to node e / d. Each pair is stored as (smaller, larger).
struct Configuration {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
};

/// Selection tuple driving the configuration construction. Entries are
/// 1-based: values[r-1] lies in {1, ..., n*d - 2r + 1}.
struct SelectionTuple {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<std::uint64_t> values;

    std::size_t half_edges() const noexcept { return n * d; }
    /// Largest admissible value at 1-based position r.
    std::uint64_t range(std::size_t r) const noexcept { return n * d - 2 * r + 1; }
    bool valid() const;
};

// --- generators --------------------------------------------------------------

/// G(n, p): every pair is an edge independently with probability p.
Graph generate_er(std::size_t n, double p, std::uint64_t seed);

struct SbmSpec {
    std::vector<double> block_fractions;  // b_k, positive, sum to 1
    SquareMatrix probs;                   // symmetric K x K
    double scale = 1.0;                   // multiplies every entry of probs

    std::size_t blocks() const noexcept { return block_fractions.size(); }
    /// Exact block sizes for n nodes; throws if n * b_k is not an integer.
    std::vector<std::size_t> block_sizes(std::size_t n) const;
    /// Average connection weight of block k: sum over k' of b_k' * p_{k,k'} (unscaled).
    double mean_prob(std::size_t k) const;
    void validate() const;
};

struct SbmGraph {
    Graph graph;
    std::vector<int> classes;  // 0-based block of each node
};

/// Stochastic block model with consecutive blocks: nodes [0, n*b_0) form block 0, and so on.
SbmGraph generate_sbm(const SbmSpec& spec, std::size_t n, std::uint64_t seed);

SelectionTuple sample_selection_tuple(std::size_t n, std::size_t d, std::uint64_t seed);

/// Pairs the smallest remaining half-edge with the (t_r + 1)-th smallest
/// remaining one, for r = 1, ..., n*d/2. O(n d log(n d)).
Configuration psi(const SelectionTuple& t);

MultiGraph gamma(const Configuration& f);

/// Number of pairs (s, e) of psi(t) with s <= b < e, in 1-based half-edge
/// labels; b ranges over [1, n*d].
std::size_t boundary_crossings(const SelectionTuple& t, std::uint64_t b);

class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultMaxAttempts = 10000;

/// Uniformly random d-regular simple graph: configuration model conditioned
/// on simplicity by rejection. Throws GenerationError after max_attempts.
Graph generate_regular(std::size_t n, std::size_t d, std::uint64_t seed,
                       std::size_t max_attempts = kDefaultMaxAttempts);

/// d-regular simple graph by incremental stub pairing that never forms a
/// loop or a repeated edge, restarting when stuck. Only asymptotically
/// uniform, but practical where rejection is hopeless (d beyond ~5).
Graph generate_regular_pairing(std::size_t n, std::size_t d, std::uint64_t seed,
                               std::size_t max_attempts = kDefaultMaxAttempts);

enum class RegularMethod { Auto, Rejection, Pairing };

/// Auto uses rejection whenever the expected number of attempts,
/// exp((d^2 - 1) / 4), stays below a tenth of the attempt budget.
RegularMethod resolve_regular_method(RegularMethod method, std::size_t d,
                                     std::size_t max_attempts = kDefaultMaxAttempts);

// --- families ----------------------------------------------------------------

enum class FamilyKind { ErdosRenyi, StochasticBlock, Regular };

/// Random-graph family with its parameters, used wherever a graph has to be
/// resampled (ensembles, concentration checks) and to select the reduced
/// propensities of the mean-field equation.
struct GraphFamily {
    FamilyKind kind = FamilyKind::ErdosRenyi;
    std::size_t n = 0;
    double p = 0.0;     // ErdosRenyi
    std::size_t d = 0;  // Regular
    RegularMethod regular_method = RegularMethod::Auto;
    std::size_t max_attempts = kDefaultMaxAttempts;
    SbmSpec sbm;        // StochasticBlock

    static GraphFamily erdos_renyi(std::size_t n, double p);
    static GraphFamily regular(std::size_t n, std::size_t d);
    static GraphFamily block_model(std::size_t n, SbmSpec spec);

    Graph sample(std::uint64_t seed) const;
};

const char* family_name(FamilyKind kind);
FamilyKind parse_family(const std::string& name);

// --- edge-list text format ---------------------------------------------------

/// Writes "n m" then one "i j" line per edge (i < j, lexicographic order).
void write_edge_list(std::ostream& out, const Graph& g);
Graph read_edge_list(std::istream& in);

}  // namespace netdyn
