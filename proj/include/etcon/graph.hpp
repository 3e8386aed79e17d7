#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace etcon {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Absolute tolerance for the out-degree / in-degree comparison.
inline constexpr double kBalanceTol = 1e-12;
/// A Sym(L) eigenvalue at or below this is treated as zero.
inline constexpr double kConnectivityTol = 1e-10;

struct Edge {
    int from = 0;
    int to = 0;
    double weight = 0.0;
};

/// Weighted digraph on vertices 0..n-1 stored as a dense adjacency matrix W.
/// An edge (i, j) with weight w_ij > 0 makes j an out-neighbor of i; agent i's
/// control then depends on the broadcast state of j.
///
/// Undirected graphs store both w_ij and w_ji. Instances are immutable once
/// built and always satisfy: w_ij >= 0, w_ii = 0, symmetric W when undirected.
class WeightedDigraph {
public:
    /// Validates and adopts W. Throws Error(InvalidGraph) on a negative or
    /// non-finite entry, a nonzero diagonal, or asymmetry when !directed.
    WeightedDigraph(Matrix weights, bool directed);

    /// Builds from a 0-based edge list. For undirected graphs each listed
    /// edge sets both directions. Rejects w <= 0, self loops, out-of-range ids
    /// and duplicate edges.
    static WeightedDigraph from_edges(int n, const std::vector<Edge>& edges, bool directed);

    [[nodiscard]] int size() const noexcept { return static_cast<int>(weights_.rows()); }
    [[nodiscard]] bool directed() const noexcept { return directed_; }
    [[nodiscard]] const Matrix& weights() const noexcept { return weights_; }
    [[nodiscard]] double weight(int i, int j) const { return weights_(i, j); }

    [[nodiscard]] Vector out_degrees() const;
    [[nodiscard]] Vector in_degrees() const;
    /// Out-neighbors of i in ascending id order.
    [[nodiscard]] std::vector<int> out_neighbors(int i) const;
    [[nodiscard]] std::vector<int> in_neighbors(int i) const;
    [[nodiscard]] int max_out_neighbor_count() const;
    [[nodiscard]] double max_weight() const;
    /// Edges in row-major order (i ascending, then j).
    [[nodiscard]] std::vector<Edge> edges() const;

private:
    Matrix weights_;
    bool directed_;
};

struct SpectralInfo {
    double lambda2 = 0.0;        ///< second-smallest eigenvalue of Sym(L)
    double lambdaN = 0.0;        ///< largest eigenvalue of Sym(L)
    double laplacian_norm = 0.0; ///< induced 2-norm of L
};

/// L = D^out - W.
[[nodiscard]] Matrix laplacian(const WeightedDigraph& g);
/// (L + L^T) / 2.
[[nodiscard]] Matrix symmetrized_laplacian(const WeightedDigraph& g);
[[nodiscard]] bool is_weight_balanced(const WeightedDigraph& g);
[[nodiscard]] bool is_strongly_connected(const WeightedDigraph& g);
/// Largest singular value.
[[nodiscard]] double spectral_norm(const Matrix& m);

/// Requires a strongly connected, weight-balanced graph; throws NotBalanced or
/// NotConnected otherwise.
[[nodiscard]] SpectralInfo spectral_info(const WeightedDigraph& g);

/// Throws NotBalanced / NotConnected if g cannot host average consensus.
void require_consensus_graph(const WeightedDigraph& g);

// Text format:
//   n directed|undirected
//   i j w
//   ...
// Blank lines and lines starting with '#' are ignored.
[[nodiscard]] WeightedDigraph parse_graph(std::istream& in);
[[nodiscard]] WeightedDigraph parse_graph_text(const std::string& text);
[[nodiscard]] WeightedDigraph load_graph_file(const std::string& path);
void write_graph(std::ostream& out, const WeightedDigraph& g);

// Named families.
[[nodiscard]] WeightedDigraph path_graph(int n, double weight = 1.0);
[[nodiscard]] WeightedDigraph complete_graph(int n, double weight = 1.0);
[[nodiscard]] WeightedDigraph directed_cycle(int n, double weight = 1.0);

/// Random connected undirected graph: a random spanning tree plus each
/// remaining pair independently with probability `extra_edge_prob`. Weights
/// uniform in [w_lo, w_hi].
[[nodiscard]] WeightedDigraph random_connected_undirected(int n, std::uint64_t seed,
                                                          double extra_edge_prob = 0.4,
                                                          double w_lo = 1.0, double w_hi = 1.0);

/// Random strongly connected weight-balanced digraph built as a superposition
/// of directed cycles: one Hamiltonian cycle (guarantees strong connectivity)
/// plus `extra_cycles` random simple cycles, each with its own positive weight
/// in [w_lo, w_hi]. Every cycle adds equal in- and out-weight to each vertex
/// it visits, so the sum stays balanced.
[[nodiscard]] WeightedDigraph random_balanced_digraph(int n, std::uint64_t seed,
                                                      int extra_cycles = 2,
                                                      double w_lo = 0.5, double w_hi = 1.5);

}  // namespace etcon
