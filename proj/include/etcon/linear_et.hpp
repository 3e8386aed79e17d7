#pragma once

#include "etcon/graph.hpp"

#include <optional>
#include <vector>

namespace etcon {

/// Grid density used to bracket the first sign change before bisection.
inline constexpr int kDefaultGridPoints = 10000;
/// Bisection stops once the bracket is this narrow.
inline constexpr double kRootTimeTol = 1e-10;

/// Plant x' = Ax + Bu with nominal feedback u = Kx, the decay rate Q of the
/// continuous loop and the slower rate R demanded of the sampled loop. A_s may
/// be supplied; otherwise it is built from P and R.
struct LinearEtSystem {
    Matrix A;
    Matrix B;
    Matrix K;
    Matrix Q;
    Matrix R;
    std::optional<Matrix> As;
};

/// Everything derived once per system.
///   P   solves (A+BK)^T P + P (A+BK) = -Q
///   As  solves As^T P + P As = -R
///   F   = [[A+BK, BK], [-(A+BK), -BK]]     (dynamics of y = [x; e])
///   Fs  = blockdiag(As, 0)
///   C   = [I 0]
struct LyapunovData {
    Matrix P;
    Matrix As;
    Matrix F;
    Matrix Fs;
    Matrix C;
};

[[nodiscard]] bool is_hurwitz(const Matrix& m, double margin = 1e-10);
[[nodiscard]] bool is_spd(const Matrix& m);

/// Solves Acl^T P + P Acl = -Q by vectorising into an n^2 x n^2 linear system.
/// Throws NotHurwitz or NotSPD.
[[nodiscard]] Matrix solve_lyapunov(const Matrix& Acl, const Matrix& Q);

/// Frobenius norm of Acl^T P + P Acl + Q.
[[nodiscard]] double lyapunov_residual(const Matrix& Acl, const Matrix& P, const Matrix& Q);

/// e^{M t} by scaling and squaring with a degree-13 Pade approximant.
/// Throws Overflow when the result is not finite.
[[nodiscard]] Matrix matrix_exponential(const Matrix& M, double t = 1.0);

/// Checks dimensions and the positivity / stability assumptions, then builds
/// P, As (default -1/2 P^{-1} R), F, Fs and C.
[[nodiscard]] LyapunovData prepare_lyapunov(const LinearEtSystem& sys);

/// M(t) = [I 0] (e^{F^T t} C^T P C e^{F t} - e^{Fs^T t} C^T P C e^{Fs t}) [I; 0].
[[nodiscard]] Matrix gap_matrix(const LyapunovData& lyap, double t);

/// f(t, y_l) = V - S at elapsed time t after an event at state x_ell.
[[nodiscard]] double trigger_gap(const LinearEtSystem& sys, const LyapunovData& lyap, double t, const Vector& x_ell);

/// Default scan window 100 / ||F||.
[[nodiscard]] double default_scan_window(const LyapunovData& lyap);

/// M(t) sampled on the uniform grid t_k = k t_max / points, k = 1..points.
struct GapTable {
    double t_max = 0.0;
    std::vector<double> times;
    std::vector<Matrix> gaps;
};

[[nodiscard]] GapTable tabulate_gap(const LyapunovData& lyap, double t_max, int points = kDefaultGridPoints);

/// Smallest elapsed time in (0, t_max] where f crosses from <= 0 to > 0;
/// nullopt when there is none. t_max <= 0 uses default_scan_window.
[[nodiscard]] std::optional<double> next_event_time(const LinearEtSystem& sys, const LyapunovData& lyap,
                                                    const Vector& x_ell, double t_max,
                                                    int points = kDefaultGridPoints);
/// Same scan reusing a precomputed table.
[[nodiscard]] std::optional<double> next_event_time(const LyapunovData& lyap, const GapTable& table,
                                                    const Vector& x_ell);

/// First t > 0 with det M(t) = 0. Throws NoRootFound if none lies in (0, t_max].
/// t_max <= 0 uses default_scan_window.
[[nodiscard]] double min_inter_event_time(const LinearEtSystem& sys, const LyapunovData& lyap, double t_max,
                                          int points = kDefaultGridPoints);
[[nodiscard]] double min_inter_event_time(const LyapunovData& lyap, const GapTable& table);

/// |det M(t)| / max(1, ||M(t)||_2)^n.
[[nodiscard]] double scaled_det_residual(const LyapunovData& lyap, double t);

struct LinearEtTrace {
    std::vector<double> times;
    std::vector<Vector> states;
    std::vector<double> V;  ///< x^T P x
    std::vector<double> S;  ///< x_s^T P x_s
    std::vector<double> event_times;
};

/// Sample-and-hold closed loop u = K x(t_l) with events from next_event_time.
/// Samples `samples_per_interval` evenly spaced points inside each
/// inter-event interval (both ends included).
[[nodiscard]] LinearEtTrace simulate_linear_et(const LinearEtSystem& sys, const LyapunovData& lyap,
                                               const Vector& x0, double horizon, int samples_per_interval = 32);
/// Same run reusing a precomputed table; intervals longer than its window
/// fall back to a fresh scan.
[[nodiscard]] LinearEtTrace simulate_linear_et(const LinearEtSystem& sys, const LyapunovData& lyap, const GapTable& table,
                                               const Vector& x0, double horizon, int samples_per_interval = 32);

}  // namespace etcon
