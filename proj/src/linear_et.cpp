#include "etcon/linear_et.hpp"

#include "etcon/error.hpp"
#include "etcon/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>

namespace etcon {

bool is_hurwitz(const Matrix& m, double margin) {
    if (m.rows() != m.cols() || m.rows() == 0) return false;
    Eigen::EigenSolver<Matrix> eig(m, false);
    return (eig.eigenvalues().real().array() < -margin).all();
}

bool is_spd(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() == 0) return false;
    if ((m - m.transpose()).norm() > 1e-12 * std::max(1.0, m.norm())) return false;
    Eigen::LLT<Matrix> llt(0.5 * (m + m.transpose()));
    return llt.info() == Eigen::Success;
}

Matrix solve_lyapunov(const Matrix& Acl, const Matrix& Q) {
    const auto n = Acl.rows();
    if (Acl.cols() != n || Q.rows() != n || Q.cols() != n) {
        throw Error(ErrorKind::DimensionMismatch, "solve_lyapunov: Acl and Q must be square of equal size");
    }
    if (!is_hurwitz(Acl)) throw Error(ErrorKind::NotHurwitz, "closed-loop matrix has an eigenvalue with Re >= -1e-10");
    if (!is_spd(Q)) throw Error(ErrorKind::NotSPD, "Q must be symmetric positive definite");
    // vec(Acl^T P + P Acl) = (I kron Acl^T + Acl^T kron I) vec(P), column-major.
    const Matrix I = Matrix::Identity(n, n);
    const Matrix At = Acl.transpose();
    Matrix kron = Matrix::Zero(n * n, n * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            kron.block(i * n, j * n, n, n) += I(i, j) * At + At(i, j) * I;
        }
    }
    const Vector rhs = -Eigen::Map<const Vector>(Q.data(), n * n);
    const Vector p = kron.fullPivLu().solve(rhs);
    Matrix P = Eigen::Map<const Matrix>(p.data(), n, n);
    P = 0.5 * (P + P.transpose());
    if (!is_spd(P)) throw Error(ErrorKind::NotSPD, "Lyapunov solution is not positive definite");
    return P;
}

double lyapunov_residual(const Matrix& Acl, const Matrix& P, const Matrix& Q) {
    return (Acl.transpose() * P + P * Acl + Q).norm();
}

Matrix matrix_exponential(const Matrix& M, double t) {
    if (M.rows() != M.cols()) throw Error(ErrorKind::DimensionMismatch, "matrix_exponential: matrix must be square");
    if (!M.allFinite() || !std::isfinite(t)) throw Error(ErrorKind::Overflow, "matrix_exponential: non-finite input");
    const auto n = M.rows();
    const Matrix I = Matrix::Identity(n, n);
    Matrix A = M * t;
    const double norm1 = A.cwiseAbs().colwise().sum().maxCoeff();
    // Degree-13 Pade coefficients and the norm bound below which no scaling is needed.
    static constexpr std::array<double, 14> b = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
        129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
        1323241920.0,        40840800.0,          960960.0,           16380.0,
        182.0,               1.0};
    constexpr double theta13 = 5.371920351148152;
    int squarings = 0;
    if (norm1 > theta13) {
        squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
        A /= std::ldexp(1.0, squarings);
    }
    const Matrix A2 = A * A;
    const Matrix A4 = A2 * A2;
    const Matrix A6 = A4 * A2;
    const Matrix U = A * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
    const Matrix V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
    Matrix E = (V - U).partialPivLu().solve(V + U);
    for (int s = 0; s < squarings; ++s) E = E * E;
    if (!E.allFinite()) throw Error(ErrorKind::Overflow, "matrix_exponential: result overflowed");
    return E;
}

LyapunovData prepare_lyapunov(const LinearEtSystem& sys) {
    const auto n = sys.A.rows();
    if (sys.A.cols() != n || sys.B.rows() != n || sys.K.rows() != sys.B.cols() || sys.K.cols() != n ||
        sys.Q.rows() != n || sys.Q.cols() != n || sys.R.rows() != n || sys.R.cols() != n) {
        throw Error(ErrorKind::DimensionMismatch, "linear system: A n x n, B n x m, K m x n, Q and R n x n");
    }
    if (!is_spd(sys.R)) throw Error(ErrorKind::NotSPD, "R must be symmetric positive definite");
    if (!is_spd(sys.Q - sys.R)) throw Error(ErrorKind::NotSPD, "Q - R must be positive definite");
    const Matrix BK = sys.B * sys.K;
    const Matrix Acl = sys.A + BK;
    LyapunovData out;
    out.P = solve_lyapunov(Acl, sys.Q);
    if (sys.As) {
        out.As = *sys.As;
        if (out.As.rows() != n || out.As.cols() != n) throw Error(ErrorKind::DimensionMismatch, "As must be n x n");
        if (!is_hurwitz(out.As)) throw Error(ErrorKind::NotHurwitz, "As must be Hurwitz");
        if (lyapunov_residual(out.As, out.P, sys.R) > 1e-9) {
            throw Error(ErrorKind::InvalidParameter, "As does not satisfy As^T P + P As = -R");
        }
    } else {
        out.As = -0.5 * out.P.ldlt().solve(sys.R);
    }
    out.F = Matrix::Zero(2 * n, 2 * n);
    out.F.topLeftCorner(n, n) = Acl;
    out.F.topRightCorner(n, n) = BK;
    out.F.bottomLeftCorner(n, n) = -Acl;
    out.F.bottomRightCorner(n, n) = -BK;
    out.Fs = Matrix::Zero(2 * n, 2 * n);
    out.Fs.topLeftCorner(n, n) = out.As;
    out.C = Matrix::Zero(n, 2 * n);
    out.C.leftCols(n) = Matrix::Identity(n, n);
    return out;
}

Matrix gap_matrix(const LyapunovData& lyap, double t) {
    const auto n = lyap.P.rows();
    const Matrix CE = lyap.C * matrix_exponential(lyap.F, t);
    const Matrix CEs = lyap.C * matrix_exponential(lyap.Fs, t);
    const Matrix full = CE.transpose() * lyap.P * CE - CEs.transpose() * lyap.P * CEs;
    const Matrix M = full.topLeftCorner(n, n);
    return 0.5 * (M + M.transpose());
}

double trigger_gap(const LinearEtSystem& sys, const LyapunovData& lyap, double t, const Vector& x_ell) {
    const auto n = sys.A.rows();
    if (x_ell.size() != n) throw Error(ErrorKind::DimensionMismatch, "trigger_gap: x_ell has wrong size");
    if (t == 0.0) return 0.0;
    Vector y = Vector::Zero(2 * n);
    y.head(n) = x_ell;
    const Vector x = lyap.C * (matrix_exponential(lyap.F, t) * y);
    const Vector xs = lyap.C * (matrix_exponential(lyap.Fs, t) * y);
    return x.dot(lyap.P * x) - xs.dot(lyap.P * xs);
}

double default_scan_window(const LyapunovData& lyap) { return 100.0 / spectral_norm(lyap.F); }

GapTable tabulate_gap(const LyapunovData& lyap, double t_max, int points) {
    if (!(t_max > 0.0) || points < 2) throw Error(ErrorKind::InvalidParameter, "tabulate_gap: need t_max > 0, points >= 2");
    GapTable table;
    table.t_max = t_max;
    table.times.resize(points);
    for (int k = 0; k < points; ++k) table.times[k] = t_max * static_cast<double>(k + 1) / points;
    table.gaps = gap_matrices(lyap, table.times);
    return table;
}

namespace {

/// Bisects g on (lo, hi] with g(lo) <= 0 < g(hi) down to kRootTimeTol.
template <class G>
double bisect_up_crossing(const G& g, double lo, double hi) {
    while (hi - lo > kRootTimeTol) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

double quad_gap(const LyapunovData& lyap, double t, const Vector& x) {
    return x.dot(gap_matrix(lyap, t) * x);
}

}  // namespace

std::optional<double> next_event_time(const LyapunovData& lyap, const GapTable& table, const Vector& x_ell) {
    if (x_ell.size() != lyap.P.rows()) throw Error(ErrorKind::DimensionMismatch, "next_event_time: x_ell has wrong size");
    double prev_t = 0.0;
    for (std::size_t k = 0; k < table.times.size(); ++k) {
        const double f = x_ell.dot(table.gaps[k] * x_ell);
        if (f > 0.0) {
            return bisect_up_crossing([&](double t) { return quad_gap(lyap, t, x_ell); }, prev_t, table.times[k]);
        }
        prev_t = table.times[k];
    }
    return std::nullopt;
}

std::optional<double> next_event_time(const LinearEtSystem& sys, const LyapunovData& lyap, const Vector& x_ell,
                                      double t_max, int points) {
    if (x_ell.size() != sys.A.rows()) throw Error(ErrorKind::DimensionMismatch, "next_event_time: x_ell has wrong size");
    if (x_ell.isZero(0.0)) return std::nullopt;
    if (t_max <= 0.0) t_max = default_scan_window(lyap);
    return next_event_time(lyap, tabulate_gap(lyap, t_max, points), x_ell);
}

double min_inter_event_time(const LyapunovData& lyap, const GapTable& table) {
    // M(t) is negative definite right after an event, so det M first vanishes
    // exactly when its largest eigenvalue first reaches zero.
    const auto lambda_max = max_eigenvalues(table.gaps);
    double prev_t = 0.0;
    for (std::size_t k = 0; k < lambda_max.size(); ++k) {
        if (lambda_max[k] > 0.0) {
            return bisect_up_crossing(
                [&](double t) {
                    Eigen::SelfAdjointEigenSolver<Matrix> eig(gap_matrix(lyap, t), Eigen::EigenvaluesOnly);
                    return eig.eigenvalues()(eig.eigenvalues().size() - 1);
                },
                prev_t, table.times[k]);
        }
        prev_t = table.times[k];
    }
    throw Error(ErrorKind::NoRootFound, "det M(t) keeps its sign on (0, " + std::to_string(table.t_max) + "]");
}

double min_inter_event_time(const LinearEtSystem& /*sys*/, const LyapunovData& lyap, double t_max, int points) {
    if (t_max <= 0.0) t_max = default_scan_window(lyap);
    return min_inter_event_time(lyap, tabulate_gap(lyap, t_max, points));
}

double scaled_det_residual(const LyapunovData& lyap, double t) {
    const Matrix M = gap_matrix(lyap, t);
    const double scale = std::max(1.0, spectral_norm(M));
    return std::abs(M.determinant()) / std::pow(scale, static_cast<double>(M.rows()));
}

LinearEtTrace simulate_linear_et(const LinearEtSystem& sys, const LyapunovData& lyap, const Vector& x0, double horizon,
                                 int samples_per_interval) {
    const auto n = sys.A.rows();
    if (x0.size() != n) throw Error(ErrorKind::DimensionMismatch, "simulate_linear_et: x0 has wrong size");
    if (!(horizon > 0.0)) throw Error(ErrorKind::InvalidParameter, "simulate_linear_et: horizon must be > 0");
    return simulate_linear_et(sys, lyap, tabulate_gap(lyap, std::min(default_scan_window(lyap), horizon)), x0,
                              horizon, samples_per_interval);
}

LinearEtTrace simulate_linear_et(const LinearEtSystem& sys, const LyapunovData& lyap, const GapTable& table,
                                 const Vector& x0, double horizon, int samples_per_interval) {
    const auto n = sys.A.rows();
    if (x0.size() != n) throw Error(ErrorKind::DimensionMismatch, "simulate_linear_et: x0 has wrong size");
    if (!(horizon > 0.0)) throw Error(ErrorKind::InvalidParameter, "simulate_linear_et: horizon must be > 0");
    if (samples_per_interval < 2) throw Error(ErrorKind::InvalidParameter, "samples_per_interval must be >= 2");

    LinearEtTrace out;
    double t_ell = 0.0;
    Vector x_ell = x0;
    out.event_times.push_back(0.0);
    while (t_ell < horizon) {
        const double remaining = horizon - t_ell;
        std::optional<double> gap;
        if (!x_ell.isZero(0.0)) {
            gap = next_event_time(lyap, table, x_ell);
            if (gap && *gap > remaining) gap.reset();
            if (!gap && remaining > table.t_max) gap = next_event_time(sys, lyap, x_ell, remaining);
        }
        const double span = gap ? *gap : remaining;
        Vector y = Vector::Zero(2 * n);
        y.head(n) = x_ell;
        for (int s = (out.times.empty() ? 0 : 1); s < samples_per_interval; ++s) {
            const double tau = span * static_cast<double>(s) / (samples_per_interval - 1);
            const Vector x = lyap.C * (matrix_exponential(lyap.F, tau) * y);
            const Vector xs = lyap.C * (matrix_exponential(lyap.Fs, tau) * y);
            out.times.push_back(t_ell + tau);
            out.states.push_back(x);
            out.V.push_back(x.dot(lyap.P * x));
            out.S.push_back(xs.dot(lyap.P * xs));
        }
        if (!gap) break;
        x_ell = out.states.back();
        t_ell += span;
        out.event_times.push_back(t_ell);
    }
    return out;
}

}  // namespace etcon
