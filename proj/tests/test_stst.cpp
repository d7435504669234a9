#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "attentive/stst.hpp"

#include <cmath>
#include <random>
#include <vector>

using stst::BoundarySpec;
using stst::WeightedTerm;

namespace {

std::vector<WeightedTerm> make_terms(const std::vector<double>& w, const std::vector<double>& x) {
    std::vector<WeightedTerm> t;
    for (std::size_t i = 0; i < w.size(); ++i) t.emplace_back(w[i], x[i]);
    return t;
}

// independent oracle: plain left-to-right dot product
double plain_dot(const std::vector<WeightedTerm>& t) {
    double s = 0.0;
    for (const auto& term : t) s += term.weight * term.value;
    return s;
}

} // namespace

TEST_CASE("constant_boundary: pinned values") {
    // delta = 1 turns the log term off
    CHECK(stst::constant_boundary({0.0, 1.0, 1.0}) == 0.0);
    // zero variance collapses the square root to theta/2
    CHECK(stst::constant_boundary({2.0, 0.05, 0.0}) == 2.0);
    // sqrt(100 * ln 10), evaluated at 30-digit precision
    CHECK(stst::constant_boundary({0.0, 0.01, 100.0}) ==
          doctest::Approx(15.1742712938514635).epsilon(1e-14));
}

TEST_CASE("simplified_boundary: pinned values") {
    CHECK(stst::simplified_boundary(1.0, 1.0) == 0.0);
    CHECK(stst::simplified_boundary(100.0, 0.01) ==
          doctest::Approx(15.1742712938514635).epsilon(1e-14));
    // delta = e^-2 makes log(1/sqrt(delta)) exactly 1
    CHECK(stst::simplified_boundary(4.0, std::exp(-2.0)) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("boundary input validation") {
    CHECK_THROWS_AS(stst::constant_boundary({0.0, 0.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(stst::constant_boundary({0.0, 1.5, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(stst::constant_boundary({0.0, 0.5, -1.0}), std::invalid_argument);
    CHECK_THROWS_AS(stst::constant_boundary({std::nan(""), 0.5, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(stst::simplified_boundary(-1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(
        stst::simplified_boundary(std::numeric_limits<double>::infinity(), 0.5),
        std::invalid_argument);
}

TEST_CASE("constant_boundary: tau >= theta and tau >= 0 everywhere") {
    for (double theta : {-3.0, -0.5, 0.0, 0.5, 2.0, 10.0})
        for (double var : {0.0, 0.1, 1.0, 100.0})
            for (double delta : {1.0, 0.5, 0.1, 0.01}) {
                const double tau = stst::constant_boundary({theta, delta, var});
                CHECK(tau >= theta);
                CHECK(tau >= 0.0);
            }
}

TEST_CASE("constant_boundary: monotone in var and delta") {
    const std::vector<double> vars = {0.0, 0.01, 0.1, 1.0, 10.0, 100.0};
    const std::vector<double> deltas = {1.0, 0.5, 0.2, 0.1, 0.05, 0.01, 0.001};
    for (double theta : {0.0, 0.5, 2.0}) {
        for (std::size_t i = 1; i < vars.size(); ++i)
            CHECK(stst::constant_boundary({theta, 0.1, vars[i]}) >=
                  stst::constant_boundary({theta, 0.1, vars[i - 1]}));
        // larger allowed error rate => lower threshold
        for (std::size_t i = 1; i < deltas.size(); ++i)
            CHECK(stst::constant_boundary({theta, deltas[i], 1.0}) >=
                  stst::constant_boundary({theta, deltas[i - 1], 1.0}));
    }
}

TEST_CASE("constant_boundary reduces exactly to simplified_boundary at theta = 0") {
    for (double var : {0.0, 0.1, 1.0, 4.0, 100.0, 12345.678})
        for (double delta : {1.0, 0.9, 0.5, 0.1, 0.01, 1e-6})
            CHECK(stst::constant_boundary({0.0, delta, var}) ==
                  stst::simplified_boundary(var, delta));
}

TEST_CASE("boundary is the delta level set of the crossing probability") {
    for (double theta : {0.0, 0.5, 2.0})
        for (double var : {0.1, 1.0, 100.0})
            for (double delta : {0.5, 0.1, 0.01}) {
                const double tau = stst::constant_boundary({theta, delta, var});
                const double p = stst::crossing_probability(tau, theta, var);
                CHECK(std::abs(p - delta) / delta < 1e-12);
            }
}

TEST_CASE("crossing_probability: pinned values") {
    CHECK(stst::crossing_probability(0.7, 0.7, 1.0) == 1.0);
    CHECK(stst::crossing_probability(-3.0, -3.0, 2.0) == 1.0);
    CHECK(stst::crossing_probability(1.0, 0.0, 1.0) ==
          doctest::Approx(0.13533528323661269).epsilon(1e-15));
    CHECK(stst::crossing_probability(2.0, 1.0, 4.0) ==
          doctest::Approx(0.36787944117144233).epsilon(1e-15));
}

TEST_CASE("crossing_probability: validation") {
    CHECK_THROWS_AS(stst::crossing_probability(0.5, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(stst::crossing_probability(1.0, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(stst::crossing_probability(1.0, 0.0, -1.0), std::invalid_argument);
    // tau in (theta, 0) is not an upper crossing
    CHECK_THROWS_AS(stst::crossing_probability(-1.0, -2.0, 1.0), std::invalid_argument);
}

TEST_CASE("WeightedTerm validation") {
    CHECK_THROWS_AS(WeightedTerm(1.0, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(WeightedTerm(1.0, -1.01), std::invalid_argument);
    CHECK_THROWS_AS(WeightedTerm(1.0, std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS(WeightedTerm(std::numeric_limits<double>::infinity(), 0.5),
                    std::invalid_argument);
    CHECK_NOTHROW(WeightedTerm(-3.0, 1.0));
    CHECK_NOTHROW(WeightedTerm(0.0, -1.0));
}

TEST_CASE("sequential_threshold_sum: hand-walked stop") {
    auto terms = make_terms({1, 1, 1}, {1, 1, 1});
    auto out = stst::sequential_threshold_sum(terms, 1.5);
    CHECK(out.stopped_early);
    CHECK(out.stop_index == 2);   // S1 = 1 < 1.5, S2 = 2 >= 1.5
    CHECK(out.partial_sum == 2.0);
    CHECK(out.terms_evaluated == 2);
}

TEST_CASE("sequential_threshold_sum: all-zero weights never stop") {
    auto terms = make_terms({0, 0, 0, 0}, {1, -1, 1, 0.5});
    auto out = stst::sequential_threshold_sum(terms, 0.5);
    CHECK_FALSE(out.stopped_early);
    CHECK(out.partial_sum == 0.0);
    CHECK(out.terms_evaluated == 4);
    CHECK(out.stop_index == 4);
}

TEST_CASE("sequential_threshold_sum: disabled boundary equals a plain dot product") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> wdist(-3.0, 3.0);
    std::uniform_real_distribution<double> xdist(-1.0, 1.0);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = 1 + rng() % 64;
        std::vector<WeightedTerm> t;
        for (std::size_t i = 0; i < n; ++i) t.emplace_back(wdist(rng), xdist(rng));
        auto out = stst::sequential_threshold_sum(t, stst::kDisabledBoundary);
        CHECK_FALSE(out.stopped_early);
        CHECK(out.terms_evaluated == n);
        CHECK(std::abs(out.partial_sum - plain_dot(t)) <= 1e-9);
    }
}

TEST_CASE("sequential_threshold_sum: crossing on the last term is not an early stop") {
    auto terms = make_terms({1, 1}, {0.25, 1.0});
    auto out = stst::sequential_threshold_sum(terms, 1.0);
    CHECK_FALSE(out.stopped_early);
    CHECK(out.terms_evaluated == 2);
    CHECK(out.partial_sum == 1.25);
}

TEST_CASE("sequential_threshold_sum: tie at the boundary stops") {
    auto terms = make_terms({1, 1, 1}, {0.5, 0.5, 0.5});
    auto out = stst::sequential_threshold_sum(terms, 1.0);
    CHECK(out.stopped_early);
    CHECK(out.stop_index == 2); // S2 = 1.0 >= 1.0
}

TEST_CASE("sequential_threshold_sum: empty sequence") {
    auto out = stst::sequential_threshold_sum({}, 1.0);
    CHECK_FALSE(out.stopped_early);
    CHECK(out.partial_sum == 0.0);
    CHECK(out.terms_evaluated == 0);
}

TEST_CASE("sequential_threshold_sum: NaN tau rejected") {
    auto terms = make_terms({1}, {1});
    CHECK_THROWS_AS(stst::sequential_threshold_sum(terms, std::nan("")), std::invalid_argument);
}

TEST_CASE("prefix property: extensions beyond a stop never change the outcome") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> wdist(-2.0, 2.0);
    std::uniform_real_distribution<double> xdist(-1.0, 1.0);
    int stops_seen = 0;
    for (int rep = 0; rep < 400; ++rep) {
        const std::size_t n = 4 + rng() % 48;
        std::vector<WeightedTerm> t;
        for (std::size_t i = 0; i < n; ++i) t.emplace_back(wdist(rng), xdist(rng));
        const double tau = 0.25 * static_cast<double>(rng() % 8);
        auto full = stst::sequential_threshold_sum(t, tau);
        if (!full.stopped_early) continue;
        ++stops_seen;
        // any extension stops at the same index with the same partial sum
        std::vector<WeightedTerm> ext = t;
        for (int extra = 0; extra < 5; ++extra) ext.emplace_back(wdist(rng), xdist(rng));
        auto extended = stst::sequential_threshold_sum(ext, tau);
        CHECK(extended.stopped_early);
        CHECK(extended.stop_index == full.stop_index);
        CHECK(extended.partial_sum == full.partial_sum);
    }
    CHECK(stops_seen > 50); // the generator actually exercises the stopping branch
}

TEST_CASE("outcome invariants on random inputs") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> wdist(-2.0, 2.0);
    std::uniform_real_distribution<double> xdist(-1.0, 1.0);
    std::uniform_real_distribution<double> taudist(-1.0, 3.0);
    for (int rep = 0; rep < 500; ++rep) {
        const std::size_t n = 1 + rng() % 32;
        std::vector<WeightedTerm> t;
        for (std::size_t i = 0; i < n; ++i) t.emplace_back(wdist(rng), xdist(rng));
        const double tau = taudist(rng);
        auto out = stst::sequential_threshold_sum(t, tau);
        if (out.stopped_early) {
            CHECK(out.partial_sum >= tau);
            CHECK(out.stop_index < n);
            CHECK(out.terms_evaluated == out.stop_index);
        } else {
            CHECK(out.terms_evaluated == n);
            CHECK(out.stop_index == n);
        }
    }
}
