#include "attentive/stst.hpp"

#include <cmath>
#include <string>

namespace stst {

namespace detail {

void check_boundary_inputs(double theta, double delta, double var_full_sum) {
    if (!std::isfinite(theta))
        throw std::invalid_argument("boundary: theta must be finite");
    if (!(delta > 0.0) || delta > 1.0 || !std::isfinite(delta))
        throw std::invalid_argument("boundary: delta must lie in (0, 1]");
    if (!(var_full_sum >= 0.0) || !std::isfinite(var_full_sum))
        throw std::invalid_argument("boundary: var_full_sum must be finite and >= 0");
}

} // namespace detail

WeightedTerm::WeightedTerm(double weight_, double value_) : weight(weight_), value(value_) {
    if (!std::isfinite(weight))
        throw std::invalid_argument("WeightedTerm: weight must be finite");
    if (!(value >= -1.0 && value <= 1.0))
        throw std::invalid_argument("WeightedTerm: value must lie in [-1, 1]");
}

double constant_boundary(const BoundarySpec& spec) {
    detail::check_boundary_inputs(spec.theta, spec.delta, spec.var_full_sum);
    // log(1/sqrt(delta)) = -0.5*log(delta); exactly 0 at delta = 1.
    const double log_term = 0.5 * std::log(1.0 / spec.delta);
    const double half = spec.theta / 2.0;
    return half + std::sqrt(half * half + spec.var_full_sum * log_term);
}

double simplified_boundary(double var_full_sum, double delta) {
    detail::check_boundary_inputs(0.0, delta, var_full_sum);
    const double log_term = 0.5 * std::log(1.0 / delta);
    return std::sqrt(var_full_sum * log_term);
}

double crossing_probability(double tau, double theta, double var_full_sum) {
    if (!std::isfinite(tau) || !std::isfinite(theta))
        throw std::invalid_argument("crossing_probability: tau and theta must be finite");
    if (!(var_full_sum > 0.0) || !std::isfinite(var_full_sum))
        throw std::invalid_argument("crossing_probability: var_full_sum must be finite and > 0");
    if (tau < theta)
        throw std::invalid_argument("crossing_probability: requires tau >= theta");
    const double product = tau * (tau - theta);
    if (product < 0.0) // only reachable when theta <= tau < 0: not an upper crossing
        throw std::invalid_argument("crossing_probability: tau*(tau-theta) must be >= 0");
    return std::exp(-2.0 * product / var_full_sum);
}

SequentialOutcome sequential_threshold_sum(std::span<const WeightedTerm> terms, double tau) {
    return scan_threshold_sum(terms.size(), tau,
                              [&](std::size_t i) { return terms[i].weight * terms[i].value; });
}

} // namespace stst
