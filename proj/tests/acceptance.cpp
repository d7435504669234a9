// End-to-end acceptance checks. One line per criterion; exits nonzero if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "attentive/mnist.hpp"
#include "attentive/pegasos.hpp"
#include "attentive/rng.hpp"
#include "attentive/simulate.hpp"
#include "attentive/stst.hpp"
#include "plain_pegasos.hpp"

using attentive::seed_chain;
using Clock = std::chrono::steady_clock;

namespace {

constexpr std::uint64_t kSeed = 20260819ULL;
int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
    if (!pass) failures += 1;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

// --- criterion 1: Monte Carlo reproduction of the crossing closed form ------

void criterion_1() {
    const auto t0 = Clock::now();
    const std::size_t paths = 100000, n = 1000;
    std::size_t ok = 0, total = 0;
    double worst_sigma = 0.0;
    for (double theta : {0.0, 0.5, 2.0}) {
        for (double var : {0.5, 1.0, 4.0}) {
            const double tau = theta + std::sqrt(var);
            const mc::WalkSpec spec{n, mc::Gaussian{0.0, std::sqrt(var / double(n))},
                                    seed_chain(kSeed, 1u, total)};
            const auto est = mc::estimate_bridge_crossing(spec, tau, theta, paths);
            const double cf = stst::crossing_probability(tau, theta, var);
            const double se = std::sqrt(cf * (1.0 - cf) / double(paths));
            const double sigmas = std::abs(est.point_estimate - cf) / se;
            worst_sigma = std::max(worst_sigma, sigmas);
            ok += sigmas <= 3.0;
            total += 1;
        }
    }
    const double secs = seconds_since(t0);
    report(1, ok == total && secs <= 60.0,
           "closed-form crossing grid " + std::to_string(ok) + "/" + std::to_string(total) +
               " within 3 SE (worst " + fmt(worst_sigma) + " SE, " + fmt(secs) + " s)");
}

// --- criterion 2: boundary level-set consistency ----------------------------

void criterion_2() {
    double worst = 0.0;
    for (double theta : {0.0, 0.5, 2.0})
        for (double var : {0.1, 1.0, 100.0})
            for (double delta : {0.5, 0.1, 0.01}) {
                const double tau = stst::constant_boundary({theta, delta, var});
                const double back = stst::crossing_probability(tau, theta, var);
                worst = std::max(worst, std::abs(back - delta) / delta);
            }
    report(2, worst <= 1e-12,
           "boundary level-set round trip, worst relative error " + fmt(worst));
}

// --- criterion 3: decision-error calibration --------------------------------

void criterion_3() {
    const mc::WalkSpec spec{400, mc::BoundedUniform{-0.475, 0.525}, seed_chain(kSeed, 3u)};
    const std::size_t paths = 400000;
    bool ok = true;
    double prev = 1.0;
    std::string detail = "P(stop | S_n < 0):";
    for (double delta : {0.1, 0.05, 0.01}) {
        const auto est = mc::estimate_decision_error(spec, 0.0, delta, paths);
        ok = ok && est.has_estimate() && est.point_estimate <= 3.0 * delta &&
             est.point_estimate <= prev + 1e-15;
        detail += " " + fmt(est.point_estimate) + "<=" + fmt(3.0 * delta);
        prev = est.point_estimate;
    }
    report(3, ok, detail + " and monotone in delta");
}

// --- criterion 4: stopping-time scaling and the Wald identity ---------------

void criterion_4() {
    const double delta = 0.01;
    const std::size_t paths = 100000;
    std::vector<double> ratios;
    bool ok = true;
    std::string detail = "E[T]/sqrt(n):";
    for (std::size_t n : {100, 400, 1600, 6400}) {
        const mc::WalkSpec spec{n, mc::BoundedUniform{-0.45, 0.55}, seed_chain(kSeed, 4u, n)};
        const double tau = stst::simplified_boundary(spec.var_full_sum(), delta);
        const double ceiling = (tau + spec.bound()) / spec.mean_increment() + 1.0;
        const auto st = mc::estimate_stopping_time(spec, delta, paths);
        const auto wald = mc::wald_identity_check(spec, tau, paths);
        ok = ok && st.point_estimate <= ceiling && wald.discrepancy <= spec.bound();
        ratios.push_back(st.point_estimate / std::sqrt(double(n)));
        detail += " " + fmt(ratios.back());
    }
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    const double spread = *hi / *lo;
    ok = ok && spread < 2.0;
    report(4, ok, detail + " (spread " + fmt(spread) +
                      " < 2), all under ceiling, Wald discrepancy <= k");
}

// --- criteria 5-8 share one synthetic corpus --------------------------------

struct Corpus {
    mnist::PairTask train, test;
};

Corpus load_pair(const std::string& dir, int a, int b) {
    const auto tr = mnist::load_dataset(dir + "/train-images-idx3-ubyte",
                                        dir + "/train-labels-idx1-ubyte");
    const auto te =
        mnist::load_dataset(dir + "/t10k-images-idx3-ubyte", dir + "/t10k-labels-idx1-ubyte");
    return {mnist::make_pair_task(tr, a, b), mnist::make_pair_task(te, a, b)};
}

void criterion_5(const std::string& dir) {
    const auto pair = load_pair(dir, 0, 1);

    pegasos::TrainerConfig full;
    full.mode = pegasos::Mode::full;
    full.lambda = 1e-3;
    full.epochs = 2;
    full.policy = {pegasos::PolicyKind::random_permutation, seed_chain(kSeed, 5u, 1u)};
    full.shuffle_seed = seed_chain(kSeed, 5u, 2u);
    const auto full_run = pegasos::train(full, pair.train);

    pegasos::TrainerConfig disabled = full;
    disabled.mode = pegasos::Mode::attentive;
    disabled.boundary_disabled = true;
    const auto disabled_run = pegasos::train(disabled, pair.train);

    bool bitwise = full_run.model.weights == disabled_run.model.weights &&
                   full_run.model.examples_seen == disabled_run.model.examples_seen;

    // independent straight-line reimplementation on a 1,000-example subset
    mnist::PairTask subset;
    subset.positive_digit = pair.train.positive_digit;
    subset.negative_digit = pair.train.negative_digit;
    subset.dim = pair.train.dim;
    const std::size_t m = 1000;
    subset.x.assign(pair.train.x.begin(), pair.train.x.begin() + m * pair.train.dim);
    subset.y.assign(pair.train.y.begin(), pair.train.y.begin() + m);

    pegasos::TrainerConfig plain_cfg;
    plain_cfg.mode = pegasos::Mode::full;
    plain_cfg.lambda = 1e-3;
    plain_cfg.epochs = 1;
    const auto ours = pegasos::train(plain_cfg, subset);

    const auto oracle = plainref::train(subset.x, subset.y, subset.dim, 1e-3, 1);

    double worst = 0.0;
    for (std::size_t j = 0; j < subset.dim; ++j)
        worst = std::max(worst, std::abs(ours.model.weights[j] - oracle.w[j]));

    report(5, bitwise && worst <= 1e-9,
           std::string("disabled-boundary run ") +
               (bitwise ? "bit-identical to full" : "DIFFERS from full") +
               "; plain-Pegasos oracle max weight gap " + fmt(worst));
}

struct PairOutcome {
    double att_acc = 0, full_acc = 0, budgeted_acc = 0;
    double fsk = 0; // mean features on skipped examples
    std::size_t budget = 0;
    pegasos::TrainResult rep0; // attentive rep 0, reused for prediction checks
};

std::vector<PairOutcome> headline_outcomes;
std::uint64_t audit_hard_total = 0, audit_hard_skipped = 0;
const std::vector<std::pair<int, int>> kPairs = {{0, 1}, {3, 5}, {4, 9}};

void criterion_6(const std::string& dir) {
    const auto t0 = Clock::now();
    const std::size_t reps = 10;
    const double delta = 0.01;
    std::size_t pairs_ok = 0;
    std::string detail;
    for (std::size_t pi = 0; pi < kPairs.size(); ++pi) {
        const auto [a, b] = kPairs[pi];
        const auto pair = load_pair(dir, a, b);
        const double d = double(pair.train.dim);

        pegasos::TrainerConfig base;
        base.delta = delta;
        base.lambda = 1e-3;
        base.epochs = 6;
        base.audit = true;

        PairOutcome out;
        std::vector<double> feats_per_example;
        for (std::size_t r = 0; r < reps; ++r) {
            pegasos::TrainerConfig cfg = base;
            cfg.mode = pegasos::Mode::attentive;
            cfg.policy = {pegasos::PolicyKind::random_permutation,
                          seed_chain(kSeed, 6u, pi, r, 1u)};
            cfg.shuffle_seed = seed_chain(kSeed, 6u, pi, r, 2u);
            auto res = pegasos::train(cfg, pair.train, &pair.test);
            out.att_acc += res.report.epoch_test_accuracy.back() / double(reps);
            out.fsk += res.report.mean_features_skipped() / double(reps);
            feats_per_example.push_back(
                double(res.report.features_on_skipped + res.report.features_on_completed) /
                double(res.report.examples_processed));
            audit_hard_total += res.report.audit_low_margin_total;
            audit_hard_skipped += res.report.audit_low_margin_skipped;
            if (r == 0) out.rep0 = std::move(res);

            pegasos::TrainerConfig fcfg = base;
            fcfg.mode = pegasos::Mode::full;
            fcfg.policy = {pegasos::PolicyKind::natural, cfg.policy.seed};
            fcfg.shuffle_seed = cfg.shuffle_seed;
            const auto fres = pegasos::train(fcfg, pair.train, &pair.test);
            out.full_acc += fres.report.epoch_test_accuracy.back() / double(reps);
        }
        double mean_feats = 0;
        for (double f : feats_per_example) mean_feats += f / double(reps);
        out.budget = std::size_t(std::clamp<long long>(std::llround(mean_feats), 1,
                                                       long(pair.train.dim)));
        for (std::size_t r = 0; r < reps; ++r) {
            pegasos::TrainerConfig cfg = base;
            cfg.mode = pegasos::Mode::budgeted;
            cfg.budget = out.budget;
            cfg.policy = {pegasos::PolicyKind::random_permutation,
                          seed_chain(kSeed, 6u, pi, r, 1u)};
            cfg.shuffle_seed = seed_chain(kSeed, 6u, pi, r, 2u);
            const auto bres = pegasos::train(cfg, pair.train, &pair.test);
            out.budgeted_acc += bres.report.epoch_test_accuracy.back() / double(reps);
        }

        const bool pair_ok = out.fsk <= 0.25 * d && out.att_acc >= out.full_acc - 0.02;
        pairs_ok += pair_ok;
        detail += std::to_string(a) + "v" + std::to_string(b) + "[fsk=" + fmt(out.fsk / d) +
                  "d att=" + fmt(out.att_acc) + " full=" + fmt(out.full_acc) + " budget(" +
                  std::to_string(out.budget) + ")=" + fmt(out.budgeted_acc) + "] ";
        headline_outcomes.push_back(std::move(out));
    }
    const double secs = seconds_since(t0);
    report(6, pairs_ok >= 2 && secs <= 600.0,
           detail + std::to_string(pairs_ok) + "/3 pairs pass (" + fmt(secs) + " s)");
}

void criterion_7(const std::string& dir) {
    const double delta = 0.01;
    std::size_t pairs_ok = 0;
    std::string detail;
    for (std::size_t pi = 0; pi < kPairs.size(); ++pi) {
        const auto [a, b] = kPairs[pi];
        const auto pair = load_pair(dir, a, b);
        const auto& run = headline_outcomes[pi].rep0;
        const double d = double(pair.test.dim);

        const double full_acc = pegasos::evaluate_accuracy(run.model, pair.test);
        const auto eval = pegasos::evaluate_attentive(
            run.model, run.moments, delta,
            {pegasos::PolicyKind::random_permutation, seed_chain(kSeed, 7u, pi)}, pair.test);
        const bool pair_ok =
            eval.accuracy >= full_acc - 0.01 && eval.mean_features <= 0.25 * d;
        pairs_ok += pair_ok;
        detail += std::to_string(a) + "v" + std::to_string(b) + "[acc=" + fmt(eval.accuracy) +
                  " vs " + fmt(full_acc) + ", feats=" + fmt(eval.mean_features / d) + "d]";
        if (eval.accuracy > full_acc) detail += "(early exit outperformed)";
        detail += " ";
    }
    report(7, pairs_ok >= 2, detail + std::to_string(pairs_ok) + "/3 pairs pass");
}

void criterion_8() {
    const double rate =
        audit_hard_total == 0 ? 0.0 : double(audit_hard_skipped) / double(audit_hard_total);
    report(8, rate <= 3.0 * 0.01,
           "pooled training decision-error rate " + fmt(rate) + " <= 0.03 (" +
               std::to_string(audit_hard_skipped) + "/" + std::to_string(audit_hard_total) +
               " low-margin examples skipped)");
}

} // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();

    // Criteria 5-8 run on real MNIST when MNIST_DIR points at the four idx
    // files; otherwise on a deterministic synthetic corpus in the same format.
    std::string dir;
    if (const char* env = std::getenv("MNIST_DIR"); env && *env) {
        dir = env;
    } else {
        dir = (std::filesystem::temp_directory_path() / "attentive-acceptance-corpus").string();
        mnist::write_synthetic_mnist(dir, 6000, 1000, kSeed);
    }

    criterion_5(dir);
    criterion_6(dir);
    criterion_7(dir);
    criterion_8();

    if (failures != 0) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
