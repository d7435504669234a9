// Wall-clock comparison of the serial reference against the OpenMP path.
// Both must produce identical estimates; the table reports the speedup.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "attentive/parallel.hpp"
#include "attentive/rng.hpp"
#include "attentive/simulate.hpp"
#include "attentive/stst.hpp"

using Clock = std::chrono::steady_clock;

namespace {

struct Timing {
    double estimate;
    double seconds;
};

Timing timed(const std::function<mc::EstimateReport(attentive::Exec)>& run,
             attentive::Exec exec) {
    const auto t0 = Clock::now();
    const auto rep = run(exec);
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    return {rep.point_estimate, secs};
}

void row(const char* name, const std::function<mc::EstimateReport(attentive::Exec)>& run) {
    const auto serial = timed(run, attentive::Exec::serial);
    const auto parallel = timed(run, attentive::Exec::parallel);
    const bool equal = serial.estimate == parallel.estimate;
    std::printf("%-16s %10.6f %10.6f %8.3fs %8.3fs %6.2fx  %s\n", name, serial.estimate,
                parallel.estimate, serial.seconds, parallel.seconds,
                serial.seconds / parallel.seconds, equal ? "identical" : "MISMATCH");
}

} // namespace

int main() {
    const std::uint64_t seed = 99;
    const std::size_t paths = 40000;

    std::printf("threads available: %d\n", attentive::max_threads());
    std::printf("%-16s %10s %10s %9s %9s %7s\n", "estimator", "serial", "parallel", "t_ser",
                "t_par", "speedup");

    row("bridge", [&](attentive::Exec e) {
        const mc::WalkSpec spec{1000, mc::Gaussian{0.0, std::sqrt(1.0 / 1000.0)}, seed};
        return mc::estimate_bridge_crossing(spec, 1.0, 0.0, paths, e);
    });
    row("decision-error", [&](attentive::Exec e) {
        const mc::WalkSpec spec{400, mc::BoundedUniform{-0.475, 0.525}, seed};
        return mc::estimate_decision_error(spec, 0.0, 0.01, paths, e);
    });
    row("stopping-time", [&](attentive::Exec e) {
        const mc::WalkSpec spec{1600, mc::BoundedUniform{-0.45, 0.55}, seed};
        return mc::estimate_stopping_time(spec, 0.01, paths, e);
    });
    row("wald", [&](attentive::Exec e) {
        const mc::WalkSpec spec{1600, mc::BoundedUniform{-0.45, 0.55}, seed};
        const double tau = stst::simplified_boundary(spec.var_full_sum(), 0.01);
        const auto rep = mc::wald_identity_check(spec, tau, paths, e);
        return mc::EstimateReport{rep.discrepancy, rep.combined_se, rep.paths_used, 0};
    });
    return 0;
}
