#pragma once
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>

// Sequential thresholded-sum test: closed-form constant stopping boundaries
// for weighted-sum evaluations, and the early-stopping scan itself.
//
// The setting: a sum S_n = sum_i w_i * x_i with x_i in [-1, 1] is compared
// against an importance threshold theta. Evaluating terms left to right, the
// scan halts as soon as the partial sum crosses a boundary tau chosen so that
// sums which would have finished below theta are wrongly halted with
// probability about delta.

namespace stst {

/// Parameters that define a constant stopping boundary.
///   theta        importance threshold on the full sum
///   delta        target decision-error rate, in (0, 1]
///   var_full_sum estimate of var(S_n)
struct BoundarySpec {
    double theta = 0.0;
    double delta = 1.0;
    double var_full_sum = 0.0;
};

/// One weighted term of the sum. value is clamped nowhere: construction
/// rejects values outside [-1, 1] and non-finite weights.
struct WeightedTerm {
    WeightedTerm(double weight_, double value_);
    double weight;
    double value;
};

/// Result of one early-stoppable scan.
/// stopped_early implies partial_sum >= tau and stop_index < n; a crossing
/// on the very last term counts as a completed evaluation, not a stop.
struct SequentialOutcome {
    bool stopped_early = false;
    std::size_t stop_index = 0;      // 1-based index of the first crossing, n if none
    double partial_sum = 0.0;        // S at termination (full sum when not stopped)
    std::size_t terms_evaluated = 0; // equals stop_index when stopped, else n
};

/// Sentinel that disables stopping: the scan degenerates to a plain dot product.
inline constexpr double kDisabledBoundary = std::numeric_limits<double>::infinity();

/// Boundary tau solving tau^2 - tau*theta = var(S_n) * log(1/sqrt(delta)),
/// taken at the root >= theta:
///   tau = theta/2 + sqrt(theta^2/4 + var(S_n) * log(1/sqrt(delta))).
/// Reduces to simplified_boundary when theta = 0 (bit-exactly).
double constant_boundary(const BoundarySpec& spec);

/// The theta = 0 boundary, tau = sqrt(var(S_n) * log(1/sqrt(delta))).
double simplified_boundary(double var_full_sum, double delta);

/// Probability that a random walk pinned at S_n = theta crosses the level tau
/// before time n:  exp(-2 * tau * (tau - theta) / var(S_n)).
/// Requires tau >= theta, tau*(tau-theta) >= 0 and var_full_sum > 0.
double crossing_probability(double tau, double theta, double var_full_sum);

namespace detail {
void check_boundary_inputs(double theta, double delta, double var_full_sum);
}

/// Core scan shared by every caller: accumulates term(0..n-1) left to right
/// in double precision and halts at the first prefix sum >= tau, provided at
/// least one term remains unevaluated. Deterministic for a fixed term order.
template <typename TermFn>
SequentialOutcome scan_threshold_sum(std::size_t n, double tau, TermFn&& term) {
    if (tau != tau)
        throw std::invalid_argument("scan_threshold_sum: tau is NaN");
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        s += term(i);
        if (s >= tau && i + 1 < n)
            return SequentialOutcome{true, i + 1, s, i + 1};
    }
    return SequentialOutcome{false, n, s, n};
}

/// Scan over explicit weighted terms.
SequentialOutcome sequential_threshold_sum(std::span<const WeightedTerm> terms, double tau);

} // namespace stst
