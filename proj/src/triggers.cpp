#include "etcon/triggers.hpp"

#include "etcon/error.hpp"

#include <algorithm>
#include <cmath>

namespace etcon {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_open_unit(double v, const std::string& field) {
    if (!(v > 0.0 && v < 1.0)) {
        throw Error(ErrorKind::InvalidParameter, field + " must lie in (0,1), got " + std::to_string(v));
    }
}

std::vector<double> checked_sigma(const std::vector<double>& sigma, int n, const std::string& law) {
    if (!sigma.empty() && sigma.size() != 1 && static_cast<int>(sigma.size()) != n) {
        throw Error(ErrorKind::InvalidParameter, law + ".sigma_i must have 1 or " + std::to_string(n) +
                                                     " entries, got " + std::to_string(sigma.size()));
    }
    auto out = expand_sigma(sigma, n);
    for (std::size_t k = 0; k < out.size(); ++k) {
        require_open_unit(out[k], law + ".sigma_i[" + std::to_string(k) + "]");
    }
    return out;
}

void require_no_isolated(const WeightedDigraph& g, const std::string& law) {
    for (int i = 0; i < g.size(); ++i) {
        if (g.out_neighbors(i).empty()) {
            throw Error(ErrorKind::IsolatedAgent, law + ": agent " + std::to_string(i) + " has no out-neighbors");
        }
    }
}

void require_undirected(const WeightedDigraph& g, const std::string& law) {
    if (g.directed()) {
        throw Error(ErrorKind::InvalidParameter, law + " requires an undirected graph");
    }
}

}  // namespace

std::string law_name(const TriggerLaw& law) {
    return std::visit(overloaded{
                          [](const IdealLaw&) { return std::string("ideal"); },
                          [](const CentralizedNorm&) { return std::string("centralized"); },
                          [](const DecentralizedState&) { return std::string("decentralized"); },
                          [](const TimeDependent&) { return std::string("time_dependent"); },
                          [](const StateDependent&) { return std::string("state_dependent"); },
                          [](const DirectedStateDependent&) { return std::string("directed_state_dependent"); },
                          [](const PeriodicStateDependent&) { return std::string("periodic"); },
                      },
                      law);
}

std::vector<double> expand_sigma(const std::vector<double>& sigma, int n) {
    if (sigma.empty()) return std::vector<double>(n, kDefaultSigma);
    if (sigma.size() == 1) return std::vector<double>(n, sigma.front());
    return sigma;
}

TriggerLaw validate_law(const TriggerLaw& law, const WeightedDigraph& g) {
    const int n = g.size();
    return std::visit(
        overloaded{
            [&](const IdealLaw& l) -> TriggerLaw { return l; },
            [&](const CentralizedNorm& l) -> TriggerLaw {
                require_open_unit(l.sigma, "centralized.sigma");
                return l;
            },
            [&](const DecentralizedState& l) -> TriggerLaw {
                require_undirected(g, "decentralized");
                require_no_isolated(g, "decentralized");
                DecentralizedState out{checked_sigma(l.sigma_i, n, "decentralized"), l.a};
                const double a_max = 1.0 / g.max_out_neighbor_count();
                if (!(l.a > 0.0 && l.a < a_max)) {
                    throw Error(ErrorKind::InvalidParameter, "decentralized.a must lie in (0, 1/max|N_i|) = (0, " +
                                                                 std::to_string(a_max) + "), got " +
                                                                 std::to_string(l.a));
                }
                return out;
            },
            [&](const TimeDependent& l) -> TriggerLaw {
                if (l.c0 < 0.0) throw Error(ErrorKind::InvalidParameter, "time_dependent.c0 must be >= 0");
                if (l.c1 < 0.0) throw Error(ErrorKind::InvalidParameter, "time_dependent.c1 must be >= 0");
                if (!(l.c0 + l.c1 > 0.0)) {
                    throw Error(ErrorKind::InvalidParameter, "time_dependent.c0 + c1 must be > 0");
                }
                if (!(l.alpha > 0.0)) throw Error(ErrorKind::InvalidParameter, "time_dependent.alpha must be > 0");
                return l;
            },
            [&](const StateDependent& l) -> TriggerLaw {
                require_undirected(g, "state_dependent");
                require_no_isolated(g, "state_dependent");
                return StateDependent{checked_sigma(l.sigma_i, n, "state_dependent")};
            },
            [&](const DirectedStateDependent& l) -> TriggerLaw {
                require_no_isolated(g, "directed_state_dependent");
                return DirectedStateDependent{checked_sigma(l.sigma_i, n, "directed_state_dependent")};
            },
            [&](const PeriodicStateDependent& l) -> TriggerLaw {
                require_no_isolated(g, "periodic");
                if (!(l.h > 0.0) || !std::isfinite(l.h)) {
                    throw Error(ErrorKind::InvalidParameter, "periodic.h must be > 0");
                }
                return PeriodicStateDependent{checked_sigma(l.sigma_i, n, "periodic"), l.h};
            },
        },
        law);
}

AgentView make_agent_view(const WeightedDigraph& g, int i, const Vector& x, const Vector& xhat, double t) {
    AgentView view;
    view.i = i;
    view.x_i = x(i);
    view.xhat_i = xhat(i);
    view.t = t;
    for (int j : g.out_neighbors(i)) {
        view.xhat_neighbors.push_back({j, g.weight(i, j), xhat(j)});
        view.d_out_i += g.weight(i, j);
    }
    view.card_Ni = static_cast<int>(view.xhat_neighbors.size());
    return view;
}

bool eval_centralized(double sigma, const Vector& x, const Vector& xhat, const Matrix& L, double normL) {
    if (x.size() != xhat.size() || L.rows() != x.size() || L.cols() != x.size()) {
        throw Error(ErrorKind::DimensionMismatch, "centralized trigger: x, xhat and L disagree in size");
    }
    if (!(normL > 0.0)) throw Error(ErrorKind::InvalidParameter, "centralized trigger: ||L|| must be > 0");
    const double e_norm = (xhat - x).norm();
    if (e_norm == 0.0) return false;
    return e_norm >= sigma * (L * x).norm() / normL;
}

bool eval_decentralized_state(const AgentView& view, double sigma_i, double a,
                              const std::vector<NeighborState>& x_neighbors_exact) {
    if (view.card_Ni <= 0) {
        throw Error(ErrorKind::IsolatedAgent, "agent " + std::to_string(view.i) + " has no neighbors");
    }
    const double card = view.card_Ni;
    if (!(a > 0.0 && a < 1.0 / card)) {
        throw Error(ErrorKind::InvalidParameter, "decentralized trigger: a must lie in (0, 1/|N_i|)");
    }
    if (x_neighbors_exact.size() != view.xhat_neighbors.size()) {
        throw Error(ErrorKind::DimensionMismatch, "decentralized trigger: exact neighbor list size mismatch");
    }
    double z = 0.0;
    for (std::size_t k = 0; k < x_neighbors_exact.size(); ++k) {
        z += view.x_i - x_neighbors_exact[k].x_j;
    }
    const double e = view.error();
    if (e == 0.0) return false;
    return e * e >= sigma_i * a * (1.0 - a * card) / card * z * z;
}

bool eval_time_dependent(double e_i, double t, double c0, double c1, double alpha) {
    if (c0 < 0.0 || c1 < 0.0 || !(c0 + c1 > 0.0) || !(alpha > 0.0) || t < 0.0) {
        throw Error(ErrorKind::InvalidParameter, "time-dependent trigger: need c0,c1 >= 0, c0+c1 > 0, alpha > 0, t >= 0");
    }
    if (e_i == 0.0) return false;
    return std::abs(e_i) >= c0 + c1 * std::exp(-alpha * t);
}

bool eval_state_dependent(const AgentView& view, double sigma_i) {
    if (view.card_Ni <= 0) {
        throw Error(ErrorKind::IsolatedAgent, "agent " + std::to_string(view.i) + " has no neighbors");
    }
    double spread = 0.0;
    for (const auto& nb : view.xhat_neighbors) {
        const double d = view.xhat_i - nb.xhat_j;
        spread += d * d;
    }
    const double e = view.error();
    if (e == 0.0) return false;
    return e * e >= sigma_i / (4.0 * view.card_Ni) * spread;
}

bool eval_directed_state_dependent(const AgentView& view, double sigma_i) {
    if (!(view.d_out_i > 0.0)) {
        throw Error(ErrorKind::IsolatedAgent, "agent " + std::to_string(view.i) + " has zero out-degree");
    }
    double spread = 0.0;
    for (const auto& nb : view.xhat_neighbors) {
        const double d = view.xhat_i - nb.xhat_j;
        spread += nb.w_ij * d * d;
    }
    const double e = view.error();
    if (e == 0.0) return false;
    return e * e >= sigma_i / (4.0 * view.d_out_i) * spread;
}

double max_admissible_period(double sigma_max, double w_max, int n_out_max) {
    require_open_unit(sigma_max, "sigma_max");
    if (!(w_max > 0.0)) throw Error(ErrorKind::InvalidParameter, "w_max must be > 0");
    if (n_out_max < 1) throw Error(ErrorKind::InvalidParameter, "|N_max^out| must be >= 1");
    return (1.0 - sigma_max) / (4.0 * w_max * n_out_max);
}

double max_admissible_period(const WeightedDigraph& g, const std::vector<double>& sigma_i) {
    const auto sigma = expand_sigma(sigma_i, g.size());
    return max_admissible_period(*std::max_element(sigma.begin(), sigma.end()), g.max_weight(),
                                 g.max_out_neighbor_count());
}

}  // namespace etcon
