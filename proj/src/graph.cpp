#include "etcon/graph.hpp"

#include "etcon/error.hpp"
#include "etcon/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace etcon {

WeightedDigraph::WeightedDigraph(Matrix weights, bool directed)
    : weights_(std::move(weights)), directed_(directed) {
    if (weights_.rows() != weights_.cols() || weights_.rows() == 0) {
        throw Error(ErrorKind::InvalidGraph, "weight matrix must be square and non-empty");
    }
    const int n = size();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double w = weights_(i, j);
            if (!std::isfinite(w) || w < 0.0) {
                throw Error(ErrorKind::InvalidGraph, "weight (" + std::to_string(i) + "," +
                                                         std::to_string(j) + ") must be finite and >= 0");
            }
            if (i == j && w != 0.0) {
                throw Error(ErrorKind::InvalidGraph, "self-loop at vertex " + std::to_string(i));
            }
            if (!directed_ && w != weights_(j, i)) {
                throw Error(ErrorKind::InvalidGraph, "undirected graph has asymmetric weight at (" +
                                                         std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }
}

WeightedDigraph WeightedDigraph::from_edges(int n, const std::vector<Edge>& edges, bool directed) {
    if (n <= 0) throw Error(ErrorKind::InvalidGraph, "vertex count must be positive");
    Matrix w = Matrix::Zero(n, n);
    for (const auto& e : edges) {
        const std::string where = "edge " + std::to_string(e.from) + " " + std::to_string(e.to);
        if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n) {
            throw Error(ErrorKind::InvalidGraph, where + ": vertex id out of range [0," + std::to_string(n) + ")");
        }
        if (e.from == e.to) throw Error(ErrorKind::InvalidGraph, where + ": self-loop");
        if (!std::isfinite(e.weight) || e.weight <= 0.0) {
            throw Error(ErrorKind::InvalidGraph, where + ": weight must be > 0");
        }
        if (w(e.from, e.to) != 0.0 || (!directed && w(e.to, e.from) != 0.0)) {
            throw Error(ErrorKind::InvalidGraph, where + ": duplicate edge");
        }
        w(e.from, e.to) = e.weight;
        if (!directed) w(e.to, e.from) = e.weight;
    }
    return WeightedDigraph(std::move(w), directed);
}

Vector WeightedDigraph::out_degrees() const { return weights_.rowwise().sum(); }

Vector WeightedDigraph::in_degrees() const { return weights_.colwise().sum().transpose(); }

std::vector<int> WeightedDigraph::out_neighbors(int i) const {
    std::vector<int> out;
    for (int j = 0; j < size(); ++j) {
        if (weights_(i, j) > 0.0) out.push_back(j);
    }
    return out;
}

std::vector<int> WeightedDigraph::in_neighbors(int i) const {
    std::vector<int> in;
    for (int j = 0; j < size(); ++j) {
        if (weights_(j, i) > 0.0) in.push_back(j);
    }
    return in;
}

int WeightedDigraph::max_out_neighbor_count() const {
    int best = 0;
    for (int i = 0; i < size(); ++i) {
        best = std::max(best, static_cast<int>(out_neighbors(i).size()));
    }
    return best;
}

double WeightedDigraph::max_weight() const { return weights_.maxCoeff(); }

std::vector<Edge> WeightedDigraph::edges() const {
    std::vector<Edge> out;
    for (int i = 0; i < size(); ++i) {
        for (int j = 0; j < size(); ++j) {
            if (weights_(i, j) > 0.0 && (directed_ || i < j)) out.push_back({i, j, weights_(i, j)});
        }
    }
    return out;
}

Matrix laplacian(const WeightedDigraph& g) {
    Matrix l = -g.weights();
    l.diagonal() = g.out_degrees();
    return l;
}

Matrix symmetrized_laplacian(const WeightedDigraph& g) {
    const Matrix l = laplacian(g);
    return 0.5 * (l + l.transpose());
}

bool is_weight_balanced(const WeightedDigraph& g) {
    return ((g.out_degrees() - g.in_degrees()).array().abs() <= kBalanceTol).all();
}

bool is_strongly_connected(const WeightedDigraph& g) {
    const int n = g.size();
    // Strongly connected iff vertex 0 reaches everything in G and in G^T.
    auto reaches_all = [&](bool transpose) {
        std::vector<char> seen(n, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int u = 0; u < n; ++u) {
                const double w = transpose ? g.weight(u, v) : g.weight(v, u);
                if (w > 0.0 && !seen[u]) {
                    seen[u] = 1;
                    stack.push_back(u);
                }
            }
        }
        return std::all_of(seen.begin(), seen.end(), [](char s) { return s != 0; });
    };
    return reaches_all(false) && reaches_all(true);
}

double spectral_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

SpectralInfo spectral_info(const WeightedDigraph& g) {
    if (!is_weight_balanced(g)) {
        throw Error(ErrorKind::NotBalanced, "out-degrees differ from in-degrees");
    }
    const int n = g.size();
    if (n < 2) throw Error(ErrorKind::NotConnected, "spectral gap undefined for a single vertex");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrized_laplacian(g), Eigen::EigenvaluesOnly);
    const Vector& ev = eig.eigenvalues();  // ascending
    if (ev(1) <= kConnectivityTol) {
        throw Error(ErrorKind::NotConnected, "zero is not a simple eigenvalue of Sym(L)");
    }
    return SpectralInfo{ev(1), ev(n - 1), spectral_norm(laplacian(g))};
}

void require_consensus_graph(const WeightedDigraph& g) {
    if (!is_weight_balanced(g)) throw Error(ErrorKind::NotBalanced, "graph is not weight-balanced");
    if (!is_strongly_connected(g)) throw Error(ErrorKind::NotConnected, "graph is not strongly connected");
}

WeightedDigraph parse_graph(std::istream& in) {
    std::string line;
    int line_no = 0;
    auto next_content_line = [&](std::string& out) {
        while (std::getline(in, out)) {
            ++line_no;
            const auto first = out.find_first_not_of(" \t\r");
            if (first == std::string::npos || out[first] == '#') continue;
            return true;
        }
        return false;
    };
    if (!next_content_line(line)) throw Error(ErrorKind::ParseError, "graph: missing header line");
    std::istringstream header(line);
    int n = 0;
    std::string kind;
    if (!(header >> n >> kind) || n <= 0) {
        throw Error(ErrorKind::ParseError, "graph line " + std::to_string(line_no) +
                                               ": expected 'n directed|undirected'");
    }
    if (kind != "directed" && kind != "undirected") {
        throw Error(ErrorKind::ParseError, "graph line " + std::to_string(line_no) +
                                               ": kind must be 'directed' or 'undirected', got '" + kind + "'");
    }
    std::vector<Edge> edges;
    while (next_content_line(line)) {
        std::istringstream ls(line);
        Edge e;
        std::string extra;
        if (!(ls >> e.from >> e.to >> e.weight) || (ls >> extra)) {
            throw Error(ErrorKind::ParseError, "graph line " + std::to_string(line_no) + ": expected 'i j w'");
        }
        edges.push_back(e);
    }
    try {
        return WeightedDigraph::from_edges(n, edges, kind == "directed");
    } catch (const Error& err) {
        throw Error(ErrorKind::ParseError, std::string("graph: ") + err.what());
    }
}

WeightedDigraph parse_graph_text(const std::string& text) {
    std::istringstream in(text);
    return parse_graph(in);
}

WeightedDigraph load_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open graph file '" + path + "'");
    return parse_graph(in);
}

void write_graph(std::ostream& out, const WeightedDigraph& g) {
    out << g.size() << (g.directed() ? " directed\n" : " undirected\n");
    char buf[64];
    for (const auto& e : g.edges()) {
        const auto res = std::to_chars(buf, buf + sizeof(buf), e.weight);
        out << e.from << ' ' << e.to << ' ' << std::string_view(buf, res.ptr - buf) << '\n';
    }
}

WeightedDigraph path_graph(int n, double weight) {
    std::vector<Edge> edges;
    for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, weight});
    return WeightedDigraph::from_edges(n, edges, false);
}

WeightedDigraph complete_graph(int n, double weight) {
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) edges.push_back({i, j, weight});
    }
    return WeightedDigraph::from_edges(n, edges, false);
}

WeightedDigraph directed_cycle(int n, double weight) {
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, weight});
    return WeightedDigraph::from_edges(n, edges, true);
}

namespace {

std::vector<int> random_permutation(int n, XorShift64Star& rng) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.uniform_int(0, i)]);
    return perm;
}

}  // namespace

WeightedDigraph random_connected_undirected(int n, std::uint64_t seed, double extra_edge_prob,
                                            double w_lo, double w_hi) {
    XorShift64Star rng(seed);
    Matrix w = Matrix::Zero(n, n);
    const auto perm = random_permutation(n, rng);
    // Random recursive tree over a shuffled vertex order.
    for (int k = 1; k < n; ++k) {
        const int a = perm[k];
        const int b = perm[rng.uniform_int(0, k - 1)];
        w(a, b) = w(b, a) = rng.uniform(w_lo, w_hi);
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (w(i, j) == 0.0 && rng.uniform() < extra_edge_prob) {
                w(i, j) = w(j, i) = rng.uniform(w_lo, w_hi);
            }
        }
    }
    return WeightedDigraph(std::move(w), false);
}

WeightedDigraph random_balanced_digraph(int n, std::uint64_t seed, int extra_cycles, double w_lo,
                                        double w_hi) {
    if (n < 2) throw Error(ErrorKind::InvalidGraph, "balanced digraph needs at least 2 vertices");
    XorShift64Star rng(seed);
    Matrix w = Matrix::Zero(n, n);
    auto add_cycle = [&](const std::vector<int>& cycle) {
        const double cw = rng.uniform(w_lo, w_hi);
        for (std::size_t k = 0; k < cycle.size(); ++k) {
            w(cycle[k], cycle[(k + 1) % cycle.size()]) += cw;
        }
    };
    add_cycle(random_permutation(n, rng));
    for (int c = 0; c < extra_cycles; ++c) {
        auto perm = random_permutation(n, rng);
        perm.resize(rng.uniform_int(2, n));
        add_cycle(perm);
    }
    return WeightedDigraph(std::move(w), true);
}

}  // namespace etcon
