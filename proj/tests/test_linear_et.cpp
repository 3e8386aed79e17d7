#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "etcon/error.hpp"
#include "etcon/linear_et.hpp"
#include "etcon/rng.hpp"
#include "test_support.hpp"

#include <cmath>
#include <functional>

using namespace etcon;

namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

LinearEtSystem scalar_system() {
    LinearEtSystem sys;
    sys.A = scalar(0.0);
    sys.B = scalar(1.0);
    sys.K = scalar(-1.0);
    sys.Q = scalar(1.0);
    sys.R = scalar(0.5);
    sys.As = scalar(-0.5);
    return sys;
}

// x(t) = x_l (1 - t), x_s(t) = x_l e^{-t/2}; the trigger changes sign where t - 1 = e^{-t/2}
double scalar_event_time_oracle() {
    double lo = 1.0, hi = 2.0;
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        (mid - 1.0 - std::exp(-0.5 * mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an etcon::Error");
    return ErrorKind::InvalidParameter;
}

}  // namespace

TEST_CASE("Lyapunov solutions") {
    CHECK(solve_lyapunov(scalar(-1.0), scalar(1.0))(0, 0) == doctest::Approx(0.5));
    const Matrix p = solve_lyapunov(-Matrix::Identity(2, 2), Matrix::Identity(2, 2));
    CHECK((p - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);

    Matrix acl(2, 2);
    acl << 0, 1, -2, -3;
    const Matrix q = Matrix::Identity(2, 2);
    const Matrix p2 = solve_lyapunov(acl, q);
    CHECK(is_spd(p2));
    CHECK(lyapunov_residual(acl, p2, q) <= 1e-9);
    // independent residual
    CHECK((acl.transpose() * p2 + p2 * acl + q).cwiseAbs().maxCoeff() <= 1e-9);

    CHECK(kind_of([] { (void)solve_lyapunov(scalar(0.5), scalar(1.0)); }) == ErrorKind::NotHurwitz);
    CHECK(kind_of([] { (void)solve_lyapunov(scalar(-1.0), scalar(-1.0)); }) == ErrorKind::NotSPD);
}

TEST_CASE("Lyapunov residuals on random stable systems") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const int n = 2 + static_cast<int>(seed % 3);
        const auto sys = testing::random_stable_system(n, seed);
        const Matrix acl = sys.A + sys.B * sys.K;
        CHECK(is_hurwitz(acl));
        const Matrix p = solve_lyapunov(acl, sys.Q);
        CHECK(is_spd(p));
        CHECK((acl.transpose() * p + p * acl + sys.Q).cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("matrix exponential special cases") {
    CHECK(matrix_exponential(Matrix::Zero(3, 3)).isApprox(Matrix::Identity(3, 3)));
    Matrix d = Matrix::Zero(2, 2);
    d.diagonal() << -1, -2;
    const Matrix ed = matrix_exponential(d, 1.0);
    CHECK(ed(0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(ed(1, 1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    CHECK(ed(0, 1) == 0.0);
    Matrix nil(2, 2);
    nil << 0, 1, 0, 0;
    for (double t : {0.3, 2.0, 17.5}) {
        const Matrix e = matrix_exponential(nil, t);
        CHECK(e(0, 0) == doctest::Approx(1.0));
        CHECK(e(0, 1) == doctest::Approx(t));
        CHECK(e(1, 0) == 0.0);
        CHECK(e(1, 1) == doctest::Approx(1.0));
    }
    CHECK(kind_of([] { (void)matrix_exponential(scalar(1.0), 1000.0); }) == ErrorKind::Overflow);
}

TEST_CASE("matrix exponential agrees with a Taylor oracle and the semigroup law") {
    XorShift64Star rng(99);
    for (int k = 0; k < 40; ++k) {
        const int n = 1 + k % 6;
        Matrix m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = rng.normal();
        const double t = rng.uniform(0.0, 3.0);
        const Matrix e = matrix_exponential(m, t);
        const Matrix oracle = testing::taylor_exponential(m, t);
        CHECK((e - oracle).norm() <= 1e-10 * std::max(1.0, oracle.norm()));
        const double s = rng.uniform(0.0, 2.0);
        const Matrix lhs = matrix_exponential(m, s + t);
        const Matrix rhs = matrix_exponential(m, s) * e;
        CHECK((lhs - rhs).norm() <= 1e-10 * std::max(1.0, lhs.norm()));
    }
}

TEST_CASE("scalar example: event time is independent of the state magnitude") {
    const auto sys = scalar_system();
    const auto lyap = prepare_lyapunov(sys);
    CHECK(lyap.P(0, 0) == doctest::Approx(0.5));
    const double oracle = scalar_event_time_oracle();
    CHECK(trigger_gap(sys, lyap, 0.0, Vector::Constant(1, 1.0)) == 0.0);
    CHECK(trigger_gap(sys, lyap, 0.5 * oracle, Vector::Constant(1, 1.0)) < 0.0);
    CHECK(trigger_gap(sys, lyap, 1.1 * oracle, Vector::Constant(1, 2.0)) > 0.0);

    const double t_min = min_inter_event_time(sys, lyap, 0.0);
    CHECK(t_min == doctest::Approx(oracle).epsilon(1e-9));
    for (double x : {1.0, 2.0, -0.01, 1e4}) {
        const auto t = next_event_time(sys, lyap, Vector::Constant(1, x), 0.0);
        REQUIRE(t.has_value());
        CHECK(*t == doctest::Approx(t_min).epsilon(1e-9));
    }
    CHECK_FALSE(next_event_time(sys, lyap, Vector::Zero(1), 0.0).has_value());
    CHECK(scaled_det_residual(lyap, t_min) <= 1e-8);
}

TEST_CASE("inter-event bound on random stable systems") {
    XorShift64Star rng(123);
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const int n = 2 + static_cast<int>(seed % 3);
        const auto sys = testing::random_stable_system(n, seed);
        const auto lyap = prepare_lyapunov(sys);
        const auto table = tabulate_gap(lyap, default_scan_window(lyap));
        const double t_min = min_inter_event_time(lyap, table);
        CHECK(t_min > 0.0);
        CHECK(scaled_det_residual(lyap, t_min) <= 1e-8);
        for (int k = 0; k < 10; ++k) {
            const Vector x = testing::random_vector(n, rng);
            const auto t = next_event_time(lyap, table, x);
            if (t) CHECK(*t >= t_min - 1e-9);
            for (double frac : {0.1, 0.5, 0.9, 0.999}) CHECK(trigger_gap(sys, lyap, frac * t_min, x) <= 1e-12);
        }
    }
}

TEST_CASE("gap matrix is symmetric and vanishes at zero") {
    const auto sys = testing::random_stable_system(3, 5);
    const auto lyap = prepare_lyapunov(sys);
    CHECK(gap_matrix(lyap, 0.0).cwiseAbs().maxCoeff() < 1e-12);
    const Matrix m = gap_matrix(lyap, 0.3);
    CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
    XorShift64Star rng(1);
    const Vector x = testing::random_vector(3, rng);
    CHECK(x.dot(m * x) == doctest::Approx(trigger_gap(sys, lyap, 0.3, x)).epsilon(1e-10));
}

TEST_CASE("sample-and-hold simulation keeps V below S") {
    XorShift64Star rng(31);
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const int n = 2 + static_cast<int>(seed % 3);
        const auto sys = testing::random_stable_system(n, seed);
        const auto lyap = prepare_lyapunov(sys);
        const auto tr = simulate_linear_et(sys, lyap, testing::random_vector(n, rng), 5.0);
        REQUIRE(tr.times.size() == tr.V.size());
        for (std::size_t k = 0; k < tr.V.size(); ++k) CHECK(tr.V[k] <= tr.S[k] + 1e-8);
        CHECK(tr.V.back() < tr.V.front());
        CHECK(tr.event_times.size() >= 1);
    }
}

TEST_CASE("system validation") {
    auto sys = scalar_system();
    sys.R = scalar(2.0);
    CHECK(kind_of([&] { (void)prepare_lyapunov(sys); }) == ErrorKind::NotSPD);
    sys = scalar_system();
    sys.K = scalar(1.0);
    CHECK(kind_of([&] { (void)prepare_lyapunov(sys); }) == ErrorKind::NotHurwitz);
    sys = scalar_system();
    sys.B = Matrix::Ones(2, 1);
    CHECK(kind_of([&] { (void)prepare_lyapunov(sys); }) == ErrorKind::DimensionMismatch);
}
