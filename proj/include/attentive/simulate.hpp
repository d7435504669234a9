#pragma once
#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "attentive/parallel.hpp"

// Monte Carlo checks for the sequential test's probabilistic claims: the
// pinned-walk (Brownian bridge) crossing probability, the realized
// decision-error rate of the constant boundary, the O(sqrt(n)) expected
// stopping time, and Wald's identity E[S_T] = E[T]E[X].
//
// Path simulation is a pure function of (spec, path index): each path owns an
// RNG stream derived from the spec seed and its index, results land in
// per-path slots, and aggregation is a serial pass in path order. Reports are
// therefore bit-identical for any thread count, including Exec::serial.

namespace mc {

using attentive::Exec;

struct Gaussian {
    double mean = 0.0;
    double sd = 1.0;
};
struct BoundedUniform {
    double lo = 0.0;
    double hi = 1.0;
};
struct RademacherBiased {
    double p = 0.5; // P(X = +1); X = -1 otherwise
};
using IncrementKind = std::variant<Gaussian, BoundedUniform, RademacherBiased>;

/// An i.i.d.-increment random walk of n steps plus the seed of its path family.
struct WalkSpec {
    std::size_t n = 0;
    IncrementKind increments = Gaussian{};
    std::uint64_t seed = 0;

    double mean_increment() const;
    double var_increment() const;
    double var_full_sum() const; // n * var_increment, analytic
    double bound() const;        // k with |X| <= k; +inf for gaussian
    bool bounded() const;
};

/// Monte Carlo estimate with its binomial / sample standard error.
/// conditioning_count is the number of paths inside the conditioning event;
/// when it is zero the estimate carries no information (point_estimate NaN).
struct EstimateReport {
    double point_estimate = 0.0;
    double standard_error = 0.0;
    std::size_t paths_used = 0;
    std::size_t conditioning_count = 0;

    bool has_estimate() const { return conditioning_count > 0; }
};

/// Both sides of Wald's identity, estimated over paths, and their gap.
/// combined_se is the standard error of the paired difference S_T - EX*T.
struct WaldReport {
    double mean_s_t = 0.0;
    double mean_t_times_ex = 0.0;
    double discrepancy = 0.0;
    double combined_se = 0.0;
    std::size_t paths_used = 0;
};

/// Fraction of walks pinned at S_n = theta whose running maximum reaches tau.
/// Gaussian increments only. Each path simulates the bridge skeleton
/// B_i = theta*i/n + (W_i - (i/n) W_n) and accounts for within-step crossings
/// of the continuous bridge, so the estimate is unbiased for
/// exp(-2 tau (tau - theta) / var(S_n)).
EstimateReport estimate_bridge_crossing(const WalkSpec& spec, double tau, double theta,
                                        std::size_t paths, Exec exec = Exec::parallel);

/// Realized decision-error rate of the constant boundary: among raw walks
/// that finish with S_n < theta, the fraction that crossed
/// tau = constant_boundary(theta, delta, var(S_n)) before step n.
/// Requires positive-mean increments (the conditioning event must be rare).
EstimateReport estimate_decision_error(const WalkSpec& spec, double theta, double delta,
                                       std::size_t paths, Exec exec = Exec::parallel);

/// Mean of T = min(first i with S_i >= simplified_boundary(var(S_n), delta), n).
/// Requires bounded increments with positive mean.
EstimateReport estimate_stopping_time(const WalkSpec& spec, double delta, std::size_t paths,
                                      Exec exec = Exec::parallel);

/// Estimates E[S_T] and E[T]E[X] for T = first crossing of boundary_a capped
/// at n (T = 0 when boundary_a <= 0). Requires bounded, positive-mean increments.
WaldReport wald_identity_check(const WalkSpec& spec, double boundary_a, std::size_t paths,
                               Exec exec = Exec::parallel);

namespace detail {
/// Skeleton of one pinned path: fills out[0..n-1] with B_1..B_n (B_n = theta
/// up to rounding). Exposed so tests can check the pinning directly.
void bridge_skeleton(const WalkSpec& spec, double theta, std::size_t path_index,
                     std::vector<double>& out);
}

} // namespace mc
