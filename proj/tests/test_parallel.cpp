#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "etcon/parallel.hpp"
#include "etcon/rng.hpp"
#include "test_support.hpp"

#include <omp.h>

using namespace etcon;

namespace {

std::vector<SimJob> mixed_jobs() {
    XorShift64Star rng(77);
    std::vector<SimJob> jobs;
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        const auto g = random_connected_undirected(4 + static_cast<int>(seed % 3), seed);
        SimConfig cfg;
        cfg.horizon = 8.0;
        const std::vector<TriggerLaw> laws{IdealLaw{}, CentralizedNorm{0.4}, StateDependent{{0.6}},
                                           TimeDependent{0.0, 0.5, 0.5}};
        jobs.push_back({g, laws[seed % laws.size()], testing::random_vector(g.size(), rng), cfg});
    }
    return jobs;
}

}  // namespace

TEST_CASE("gap matrices match the serial reference bit for bit") {
    const auto sys = testing::random_stable_system(4, 3);
    const auto lyap = prepare_lyapunov(sys);
    std::vector<double> times;
    for (int k = 1; k <= 2000; ++k) times.push_back(0.001 * k);
    const auto par = gap_matrices(lyap, times);
    const auto ser = gap_matrices_serial(lyap, times);
    REQUIRE(par.size() == ser.size());
    for (std::size_t k = 0; k < par.size(); ++k) CHECK((par[k].array() == ser[k].array()).all());

    const auto ev_par = max_eigenvalues(par);
    const auto ev_ser = max_eigenvalues_serial(ser);
    CHECK(ev_par == ev_ser);
}

TEST_CASE("batched runs match the serial reference") {
    omp_set_num_threads(4);
    const auto jobs = mixed_jobs();
    const auto par = run_jobs(jobs);
    const auto ser = run_jobs_serial(jobs);
    REQUIRE(par.size() == jobs.size());
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        REQUIRE(par[k].trace.has_value());
        CHECK(metrics_csv_values(par[k].metrics) == metrics_csv_values(ser[k].metrics));
        CHECK((par[k].trace->final_state.x.array() == ser[k].trace->final_state.x.array()).all());
        CHECK(par[k].trace->events.size() == ser[k].trace->events.size());
    }
}

TEST_CASE("job failures are reported per job") {
    SimJob bad{directed_cycle(3), StateDependent{{0.5}}, Vector::Ones(3), SimConfig{}};
    const auto out = run_job(bad);
    REQUIRE(out.error.has_value());
    CHECK(*out.error == ErrorKind::InvalidParameter);
    CHECK_FALSE(out.trace.has_value());

    SimConfig cfg;
    cfg.horizon = 20.0;
    cfg.event_tol = 1e-10;
    cfg.max_events_per_window = 3;
    Vector x0(3);
    x0 << 1, 0.2, -1;
    SimJob runaway{path_graph(3), DecentralizedState{{0.999}, 0.25}, x0, cfg};
    const auto z = run_job(runaway);
    REQUIRE(z.error.has_value());
    CHECK(*z.error == ErrorKind::ZenoAbort);
    CHECK(z.trace.has_value());
    CHECK(z.metrics.zeno_suspect);
}
