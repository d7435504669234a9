#include "attentive/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <tuple>

#include <CLI11.hpp>
#include <json.hpp>

#include "attentive/mnist.hpp"
#include "attentive/parallel.hpp"
#include "attentive/pegasos.hpp"
#include "attentive/reports.hpp"
#include "attentive/rng.hpp"
#include "attentive/simulate.hpp"
#include "attentive/stst.hpp"

namespace fs = std::filesystem;
using attentive::seed_chain;
using reports::cell;

namespace cli {
namespace {

constexpr std::uint64_t kLemmaTag = 0x6c656d6d61ULL;
constexpr std::uint64_t kStopTag = 0x73746f70ULL;
constexpr std::uint64_t kSynthTag = 0x73796e7468ULL;
constexpr std::uint64_t kShuffleTag = 0x73687566ULL;
constexpr std::uint64_t kPolicyTag = 0x706f6c69ULL;
constexpr std::uint64_t kPredictTag = 0x70726564ULL;

double sample_mean(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double sample_sd(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double m = sample_mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

/// Mean skipping NaN entries; NaN when nothing remains.
double nan_aware_mean(const std::vector<double>& xs) {
    double s = 0.0;
    std::size_t n = 0;
    for (double x : xs) {
        if (std::isnan(x)) continue;
        s += x;
        n += 1;
    }
    if (n == 0) return std::numeric_limits<double>::quiet_NaN();
    return s / static_cast<double>(n);
}

// ---------------------------------------------------------------- verify-lemma

struct LemmaOpts {
    std::string out = "verify-lemma.csv";
    std::size_t paths = 100000;
    std::size_t n = 1000;
    std::uint64_t seed = 1;
    bool serial = false;
};

int run_verify_lemma(const LemmaOpts& o) {
    const auto exec = o.serial ? attentive::Exec::serial : attentive::Exec::parallel;
    struct Point {
        double theta, var, tau;
    };
    std::vector<Point> grid;
    for (double theta : {0.0, 0.5, 2.0})
        for (double var : {0.5, 1.0, 4.0}) grid.push_back({theta, var, theta + std::sqrt(var)});
    grid.push_back({0.5, 1.0, 0.5}); // tau = theta: certain crossing

    reports::CsvFile csv(o.out, "# schema: verify-lemma v1",
                         {"tau", "theta", "var", "n", "paths", "closed_form", "estimate",
                          "std_error", "pass"});
    std::size_t passed = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& g = grid[i];
        const mc::WalkSpec spec{
            o.n, mc::Gaussian{0.0, std::sqrt(g.var / static_cast<double>(o.n))},
            seed_chain(o.seed, kLemmaTag, i)};
        const auto rep = mc::estimate_bridge_crossing(spec, g.tau, g.theta, o.paths, exec);
        const double cf = stst::crossing_probability(g.tau, g.theta, g.var);
        // gate against the standard error the closed form itself implies
        const double se_null = std::sqrt(cf * (1.0 - cf) / static_cast<double>(o.paths));
        const bool pass = std::abs(rep.point_estimate - cf) <= 3.0 * se_null;
        passed += pass;
        csv.row({cell(g.tau), cell(g.theta), cell(g.var), cell(o.n), cell(o.paths), cell(cf),
                 cell(rep.point_estimate), cell(rep.standard_error), cell(pass)});
    }
    std::cout << "verify-lemma: " << passed << "/" << grid.size()
              << " grid points within 3 SE of the closed form -> " << o.out << "\n";
    return passed == grid.size() ? 0 : 3;
}

// ------------------------------------------------------------- verify-stopping

struct StopOpts {
    std::string out = "verify-stopping.csv";
    std::size_t paths = 100000;
    double delta = 0.01;
    double lo = -0.45;
    double hi = 0.55;
    std::vector<std::size_t> sweep = {100, 400, 1600, 6400};
    std::uint64_t seed = 1;
    bool serial = false;
    bool no_deterministic_row = false;
};

int run_verify_stopping(const StopOpts& o) {
    const auto exec = o.serial ? attentive::Exec::serial : attentive::Exec::parallel;
    reports::CsvFile csv(
        o.out, "# schema: verify-stopping v1",
        {"n", "delta", "lo", "hi", "ex", "k", "var_increment", "tau", "mean_t", "se_t",
         "ratio_sqrt_n", "ceiling", "mean_s_t", "mean_t_times_ex", "wald_discrepancy", "wald_se",
         "pass"});

    std::size_t rows = 0, passed = 0;
    std::vector<double> ratios;
    auto emit = [&](std::size_t n, double lo, double hi, bool count_ratio) {
        const mc::WalkSpec spec{n, mc::BoundedUniform{lo, hi}, seed_chain(o.seed, kStopTag, n)};
        const double ex = spec.mean_increment();
        const double k = spec.bound();
        const double tau = stst::simplified_boundary(spec.var_full_sum(), o.delta);
        const auto st = mc::estimate_stopping_time(spec, o.delta, o.paths, exec);
        const auto wald = mc::wald_identity_check(spec, tau, o.paths, exec);
        const double ceiling = (tau + k) / ex + 1.0;
        const double ratio = st.point_estimate / std::sqrt(static_cast<double>(n));
        const bool pass = st.point_estimate <= ceiling && wald.discrepancy <= k;
        rows += 1;
        passed += pass;
        if (count_ratio) ratios.push_back(ratio);
        csv.row({cell(n), cell(o.delta), cell(lo), cell(hi), cell(ex), cell(k),
                 cell(spec.var_increment()), cell(tau), cell(st.point_estimate),
                 cell(st.standard_error), cell(ratio), cell(ceiling), cell(wald.mean_s_t),
                 cell(wald.mean_t_times_ex), cell(wald.discrepancy), cell(wald.combined_se),
                 cell(pass)});
    };

    // a zero-variance walk has tau = 0 and stops on the first step, exactly
    if (!o.no_deterministic_row) emit(50, 0.3, 0.3, false);
    for (std::size_t n : o.sweep) emit(n, o.lo, o.hi, true);

    double spread = 0.0;
    if (!ratios.empty()) {
        const auto [lo_it, hi_it] = std::minmax_element(ratios.begin(), ratios.end());
        spread = *hi_it / *lo_it;
    }
    const bool spread_ok = spread < 2.0;
    std::cout << "verify-stopping: " << passed << "/" << rows
              << " rows under the ceiling with Wald discrepancy <= k; E[T]/sqrt(n) spread "
              << reports::format_double(spread) << " (< 2 expected) -> " << o.out << "\n";
    return (passed == rows && spread_ok) ? 0 : 3;
}

// ------------------------------------------------------------------------ train

struct TrainOpts {
    std::string data_dir;
    bool synthetic = false;
    std::size_t synth_train = 4000;
    std::size_t synth_test = 1000;
    std::vector<std::string> pairs = {"0,1", "3,5", "4,9"};
    std::vector<std::string> policies = {"natural", "permutation", "sampled", "sorted"};
    std::size_t reps = 10;
    double delta = 0.01;
    double lambda = 1e-4;
    std::size_t epochs = 1;
    bool no_audit = false;
    double prior = 0.25;
    std::string variance = "squared";
    bool no_hinge_check = false;
    std::uint64_t seed = 1;
    std::string out = "train-runs.csv";
    std::string summary_out = "train-summary.csv";
    std::string json_out = "train-report.json";
    std::string save_model_dir;
};

std::pair<int, int> parse_pair(const std::string& s) {
    const auto sep = s.find_first_of(",-x");
    if (sep == std::string::npos || sep == 0 || sep + 1 >= s.size())
        throw std::invalid_argument("pair must look like \"0,1\": " + s);
    const int a = std::stoi(s.substr(0, sep));
    const int b = std::stoi(s.substr(sep + 1));
    if (a < 0 || a > 9 || b < 0 || b > 9 || a == b)
        throw std::invalid_argument("pair needs two distinct digits in 0..9: " + s);
    return {a, b};
}

pegasos::PolicyKind parse_policy(const std::string& name) {
    if (name == "natural") return pegasos::PolicyKind::natural;
    if (name == "sorted") return pegasos::PolicyKind::sorted_by_weight;
    if (name == "sampled") return pegasos::PolicyKind::sampled_by_weight;
    if (name == "permutation") return pegasos::PolicyKind::random_permutation;
    throw std::invalid_argument("unknown policy (natural|sorted|sampled|permutation): " + name);
}

pegasos::VarianceFormula parse_variance(const std::string& name) {
    if (name == "squared") return pegasos::VarianceFormula::squared_w;
    if (name == "literal") return pegasos::VarianceFormula::literal_w;
    throw std::invalid_argument("unknown variance formula (squared|literal): " + name);
}

struct DataPaths {
    std::string train_images, train_labels, test_images, test_labels;
};

DataPaths resolve_data(const TrainOpts& o) {
    std::string dir = o.data_dir;
    if (o.synthetic) {
        if (dir.empty()) dir = "synthetic-mnist";
        mnist::write_synthetic_mnist(dir, o.synth_train, o.synth_test,
                                     seed_chain(o.seed, kSynthTag));
        std::cout << "train: synthetic corpus (" << o.synth_train << "+" << o.synth_test
                  << " examples) written to " << dir << "\n";
    } else if (dir.empty()) {
        throw std::invalid_argument(
            "pass --data-dir with the four idx files, or --synthetic to generate a corpus");
    }
    DataPaths p{dir + "/train-images-idx3-ubyte", dir + "/train-labels-idx1-ubyte",
                dir + "/t10k-images-idx3-ubyte", dir + "/t10k-labels-idx1-ubyte"};
    return p;
}

struct RunRecord {
    std::string pair;
    std::string mode;
    std::string policy;
    std::size_t rep = 0;
    double delta = 0.0;
    std::size_t budget = 0;
    std::uint64_t policy_seed = 0, shuffle_seed = 0;
    double test_accuracy = 0.0;
    pegasos::TrainReport report;
    bool sampled_surrogate = false;
};

int run_train(const TrainOpts& o) {
    const auto paths = resolve_data(o);
    const auto train_raw = mnist::load_dataset(paths.train_images, paths.train_labels);
    const auto test_raw = mnist::load_dataset(paths.test_images, paths.test_labels);

    std::vector<std::pair<int, int>> pairs;
    for (const auto& s : o.pairs) pairs.push_back(parse_pair(s));
    std::vector<std::string> policies = o.policies;
    std::sort(policies.begin(), policies.end());
    policies.erase(std::unique(policies.begin(), policies.end()), policies.end());
    for (const auto& p : policies) parse_policy(p); // validate early
    if (o.reps < 1) throw std::invalid_argument("--reps must be >= 1");

    pegasos::TrainerConfig base;
    base.delta = o.delta;
    base.lambda = o.lambda;
    base.epochs = o.epochs;
    base.audit = !o.no_audit;
    base.prior_variance = o.prior;
    base.variance_formula = parse_variance(o.variance);
    base.hinge_check_on_full_evaluation = !o.no_hinge_check;

    if (!o.save_model_dir.empty()) fs::create_directories(o.save_model_dir);

    std::vector<RunRecord> runs;
    for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
        const auto [a, b] = pairs[pi];
        const std::string pair_name = std::to_string(a) + "v" + std::to_string(b);
        const auto task = mnist::make_pair_task(train_raw, a, b);
        const auto eval = mnist::make_pair_task(test_raw, a, b);
        const std::size_t d = task.dim;

        auto one_run = [&](pegasos::Mode mode, const std::string& policy_name,
                           std::size_t budget, std::size_t rep) {
            pegasos::TrainerConfig cfg = base;
            cfg.mode = mode;
            cfg.budget = budget;
            cfg.policy = {parse_policy(policy_name), seed_chain(o.seed, pi, rep, kPolicyTag)};
            cfg.shuffle_seed = seed_chain(o.seed, pi, rep, kShuffleTag);
            const auto res = pegasos::train(cfg, task, &eval);
            RunRecord r;
            r.pair = pair_name;
            r.mode = mode == pegasos::Mode::full        ? "full"
                     : mode == pegasos::Mode::attentive ? "attentive"
                                                        : "budgeted";
            r.policy = policy_name;
            r.rep = rep;
            r.delta = mode == pegasos::Mode::attentive ? o.delta : 0.0;
            r.budget = budget;
            r.policy_seed = cfg.policy.seed;
            r.shuffle_seed = *cfg.shuffle_seed;
            r.test_accuracy = res.report.epoch_test_accuracy.back();
            r.report = res.report;
            r.sampled_surrogate = policy_name == "sampled";
            runs.push_back(r);
            return res;
        };

        for (const auto& policy_name : policies) {
            // attentive first: its evaluation cost sets the matched budget
            std::vector<double> feats;
            for (std::size_t rep = 0; rep < o.reps; ++rep) {
                const auto res = one_run(pegasos::Mode::attentive, policy_name, 0, rep);
                feats.push_back(static_cast<double>(res.report.features_on_skipped +
                                                    res.report.features_on_completed) /
                                static_cast<double>(res.report.examples_processed));
                if (rep == 0 && !o.save_model_dir.empty()) {
                    const auto file =
                        o.save_model_dir + "/model-" + pair_name + "-" + policy_name + ".json";
                    pegasos::save_checkpoint(file, res.model, res.moments);
                    std::cout << "train: saved " << file << "\n";
                }
            }
            const std::size_t budget = static_cast<std::size_t>(std::clamp<long long>(
                std::llround(sample_mean(feats)), 1, static_cast<long long>(d)));
            if (policy_name != "sorted") { // a budget prefix of a sort is ill-defined
                for (std::size_t rep = 0; rep < o.reps; ++rep)
                    one_run(pegasos::Mode::budgeted, policy_name, budget, rep);
            }
        }
        for (std::size_t rep = 0; rep < o.reps; ++rep)
            one_run(pegasos::Mode::full, "natural", 0, rep);
    }

    std::sort(runs.begin(), runs.end(), [](const RunRecord& x, const RunRecord& y) {
        return std::tie(x.pair, x.mode, x.policy, x.rep) <
               std::tie(y.pair, y.mode, y.policy, y.rep);
    });

    reports::CsvFile csv(
        o.out, "# schema: train-runs v1",
        {"pair", "mode", "policy", "rep", "delta", "lambda", "epochs", "budget",
         "test_accuracy", "examples", "skipped", "completed", "features_total",
         "mean_features_per_example", "mean_features_skipped", "updates",
         "regularization_steps", "audit_rate", "train_seconds"});
    for (const auto& r : runs) {
        const auto& t = r.report;
        const std::uint64_t total = t.features_on_skipped + t.features_on_completed;
        csv.row({cell(r.pair), cell(r.mode), cell(r.policy), cell(r.rep), cell(r.delta),
                 cell(o.lambda), cell(o.epochs), cell(r.budget), cell(r.test_accuracy),
                 cell(t.examples_processed), cell(t.skipped_examples),
                 cell(t.completed_examples), cell(total),
                 cell(static_cast<double>(total) /
                      static_cast<double>(t.examples_processed)),
                 cell(t.mean_features_skipped()), cell(t.updates_applied),
                 cell(t.regularization_only_steps), cell(t.audit_decision_error_rate()),
                 cell(t.train_seconds)});
    }

    // per-(pair, mode, policy) aggregates over the repetitions
    reports::CsvFile sum(
        o.summary_out, "# schema: train-summary v1",
        {"pair", "mode", "policy", "delta", "budget", "reps", "test_accuracy_mean",
         "test_accuracy_sd", "mean_features_per_example_mean",
         "mean_features_per_example_sd", "mean_features_skipped_mean", "audit_rate_mean",
         "train_seconds_mean"});
    nlohmann::json jruns = nlohmann::json::array();
    for (std::size_t i = 0; i < runs.size();) {
        std::size_t j = i;
        std::vector<double> acc, mfpe, mfs, audit, secs;
        while (j < runs.size() && runs[j].pair == runs[i].pair && runs[j].mode == runs[i].mode &&
               runs[j].policy == runs[i].policy) {
            const auto& t = runs[j].report;
            acc.push_back(runs[j].test_accuracy);
            mfpe.push_back(static_cast<double>(t.features_on_skipped +
                                               t.features_on_completed) /
                           static_cast<double>(t.examples_processed));
            mfs.push_back(t.mean_features_skipped());
            audit.push_back(t.audit_decision_error_rate());
            secs.push_back(t.train_seconds);
            ++j;
        }
        const auto& r = runs[i];
        sum.row({cell(r.pair), cell(r.mode), cell(r.policy), cell(r.delta), cell(r.budget),
                 cell(j - i), cell(sample_mean(acc)), cell(sample_sd(acc)),
                 cell(sample_mean(mfpe)), cell(sample_sd(mfpe)), cell(nan_aware_mean(mfs)),
                 cell(nan_aware_mean(audit)), cell(sample_mean(secs))});
        std::cout << "train: " << r.pair << " " << r.mode << "/" << r.policy << " acc "
                  << reports::format_double(sample_mean(acc)) << " feats/ex "
                  << reports::format_double(sample_mean(mfpe)) << "\n";
        i = j;
    }

    for (const auto& r : runs) {
        const auto& t = r.report;
        nlohmann::json run;
        run["pair"] = r.pair;
        run["mode"] = r.mode;
        run["policy"] = r.policy;
        run["rep"] = r.rep;
        run["config"] = {{"delta", r.delta},
                         {"lambda", o.lambda},
                         {"epochs", o.epochs},
                         {"budget", r.budget},
                         {"policy_seed", r.policy_seed},
                         {"shuffle_seed", r.shuffle_seed},
                         {"prior_variance", o.prior},
                         {"variance_formula", o.variance},
                         {"hinge_check", !o.no_hinge_check},
                         {"audit", !o.no_audit},
                         {"sampled_margin_surrogate", r.sampled_surrogate}};
        run["metrics"] = {
            {"test_accuracy", r.test_accuracy},
            {"examples", t.examples_processed},
            {"skipped", t.skipped_examples},
            {"completed", t.completed_examples},
            {"features_total", t.features_on_skipped + t.features_on_completed},
            {"mean_features_per_example",
             static_cast<double>(t.features_on_skipped + t.features_on_completed) /
                 static_cast<double>(t.examples_processed)},
            {"mean_features_skipped", t.mean_features_skipped()},
            {"updates", t.updates_applied},
            {"regularization_steps", t.regularization_only_steps},
            {"audit_rate", t.audit_decision_error_rate()},
            {"train_seconds", t.train_seconds}};
        jruns.push_back(run);
    }
    std::ofstream jf(o.json_out, std::ios::trunc);
    if (!jf) throw std::runtime_error("cannot write report: " + o.json_out);
    jf << jruns.dump(1, '\t') << '\n';

    std::cout << "train: " << runs.size() << " runs -> " << o.out << ", " << o.summary_out
              << ", " << o.json_out << "\n";
    return 0;
}

// ----------------------------------------------------------------- predict-eval

struct PredictOpts {
    std::string model;
    std::string data_dir;
    std::string images, labels;
    std::string pair = "0,1";
    std::vector<double> deltas = {0.5, 0.1, 0.05, 0.01};
    std::string policy = "natural";
    std::uint64_t seed = 1;
    std::string out = "predict-eval.csv";
};

int run_predict_eval(const PredictOpts& o) {
    if (o.model.empty()) throw std::invalid_argument("--model is required");
    const auto cp = pegasos::load_checkpoint(o.model);

    std::string images = o.images, labels = o.labels;
    if (images.empty() || labels.empty()) {
        if (o.data_dir.empty())
            throw std::invalid_argument("pass --data-dir or --images/--labels for the test split");
        images = o.data_dir + "/t10k-images-idx3-ubyte";
        labels = o.data_dir + "/t10k-labels-idx1-ubyte";
    }
    const auto raw = mnist::load_dataset(images, labels);
    const auto [a, b] = parse_pair(o.pair);
    const auto task = mnist::make_pair_task(raw, a, b);
    if (task.dim != cp.model.dim())
        throw std::runtime_error("checkpoint dimension does not match the dataset");
    const auto kind = parse_policy(o.policy);
    for (double d : o.deltas)
        if (!(d > 0.0 && d <= 1.0))
            throw std::invalid_argument("--deltas entries must lie in (0, 1]");

    const std::string pair_name = std::to_string(a) + "v" + std::to_string(b);
    reports::CsvFile csv(o.out, "# schema: predict-eval v1",
                         {"pair", "mode", "delta", "tau0", "accuracy", "mean_features",
                          "stopped_fraction"});

    const double full_acc = pegasos::evaluate_accuracy(cp.model, task);
    csv.row({cell(pair_name), cell("full"), cell(0.0), cell("inf"), cell(full_acc),
             cell(static_cast<double>(task.dim)), cell(0.0)});

    auto deltas = o.deltas;
    std::sort(deltas.begin(), deltas.end(), std::greater<>()); // features grow down the file
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        const double delta = deltas[i];
        const pegasos::CoordinatePolicy pol{kind, seed_chain(o.seed, kPredictTag, i)};
        const auto rep = pegasos::evaluate_attentive(cp.model, cp.moments, delta, pol, task);
        const double tau0 = pegasos::predict_boundary(cp.model, cp.moments, delta);
        csv.row({cell(pair_name), cell("attentive"), cell(delta), cell(tau0),
                 cell(rep.accuracy), cell(rep.mean_features),
                 cell(static_cast<double>(rep.stopped) / static_cast<double>(rep.count))});
        std::cout << "predict-eval: delta " << reports::format_double(delta) << " acc "
                  << reports::format_double(rep.accuracy) << " feats/ex "
                  << reports::format_double(rep.mean_features) << " (full acc "
                  << reports::format_double(full_acc) << ")\n";
    }
    std::cout << "predict-eval: -> " << o.out << "\n";
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"sequential thresholded-sum testing and attentive Pegasos experiments"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from an ini/toml file (flags override)");

    LemmaOpts lemma;
    auto* cl = app.add_subcommand("verify-lemma",
                                  "Monte Carlo check of the pinned-walk crossing probability");
    cl->add_option("--out", lemma.out, "output CSV path");
    cl->add_option("--paths", lemma.paths, "Monte Carlo paths per grid point")
        ->check(CLI::PositiveNumber);
    cl->add_option("--n", lemma.n, "walk length")->check(CLI::PositiveNumber);
    cl->add_option("--seed", lemma.seed, "root seed");
    cl->add_flag("--serial", lemma.serial, "force single-threaded simulation");

    StopOpts stop;
    auto* cs = app.add_subcommand("verify-stopping",
                                  "stopping-time sweep with the Wald identity columns");
    cs->add_option("--out", stop.out, "output CSV path");
    cs->add_option("--paths", stop.paths, "Monte Carlo paths per row")
        ->check(CLI::PositiveNumber);
    cs->add_option("--delta", stop.delta, "decision-error target")
        ->check(CLI::Range(1e-12, 1.0));
    cs->add_option("--lo", stop.lo, "uniform increment lower bound");
    cs->add_option("--hi", stop.hi, "uniform increment upper bound");
    cs->add_option("--sweep", stop.sweep, "walk lengths to sweep")->delimiter(',');
    cs->add_option("--seed", stop.seed, "root seed");
    cs->add_flag("--serial", stop.serial, "force single-threaded simulation");
    cs->add_flag("--no-deterministic-row", stop.no_deterministic_row,
                 "omit the exact zero-variance reference row");

    TrainOpts tr;
    auto* ct = app.add_subcommand("train", "three-way Pegasos comparison on 1-vs-1 digit tasks");
    ct->add_option("--data-dir", tr.data_dir, "directory with the four idx files");
    ct->add_flag("--synthetic", tr.synthetic, "generate a synthetic corpus into --data-dir");
    ct->add_option("--synthetic-train", tr.synth_train, "synthetic train split size");
    ct->add_option("--synthetic-test", tr.synth_test, "synthetic test split size");
    ct->add_option("--pairs", tr.pairs, "digit pairs, e.g. 0,1;3,5")->delimiter(';');
    ct->add_option("--policies", tr.policies,
                   "coordinate policies (natural|sorted|sampled|permutation)")
        ->delimiter(',');
    ct->add_option("--reps", tr.reps, "shuffled repetitions per configuration")
        ->check(CLI::PositiveNumber);
    ct->add_option("--delta", tr.delta, "attentive decision-error target")
        ->check(CLI::Range(1e-12, 1.0));
    ct->add_option("--lambda", tr.lambda, "Pegasos regularization")
        ->check(CLI::PositiveNumber);
    ct->add_option("--epochs", tr.epochs, "training epochs")->check(CLI::PositiveNumber);
    ct->add_flag("--no-audit", tr.no_audit, "skip the decision-error audit pass");
    ct->add_option("--prior-variance", tr.prior, "cold-start variance prior");
    ct->add_option("--variance-formula", tr.variance, "squared|literal");
    ct->add_flag("--no-hinge-check", tr.no_hinge_check,
                 "update unconditionally on full evaluation (literal algorithm)");
    ct->add_option("--seed", tr.seed, "root seed (fans out to every run)");
    ct->add_option("--out", tr.out, "per-run CSV path");
    ct->add_option("--summary-out", tr.summary_out, "aggregated CSV path");
    ct->add_option("--json-out", tr.json_out, "per-run JSON report path");
    ct->add_option("--save-model-dir", tr.save_model_dir,
                   "save each pair/policy attentive rep-0 checkpoint here");

    PredictOpts pr;
    auto* cp = app.add_subcommand("predict-eval",
                                  "early-stopped prediction vs full prediction on a checkpoint");
    cp->add_option("--model", pr.model, "checkpoint path")->required();
    cp->add_option("--data-dir", pr.data_dir, "directory with t10k idx files");
    cp->add_option("--images", pr.images, "test images idx path (overrides --data-dir)");
    cp->add_option("--labels", pr.labels, "test labels idx path (overrides --data-dir)");
    cp->add_option("--pair", pr.pair, "digit pair, e.g. 4,9");
    cp->add_option("--deltas", pr.deltas, "decision-error grid")->delimiter(',');
    cp->add_option("--policy", pr.policy, "coordinate order for early stopping");
    cp->add_option("--seed", pr.seed, "root seed");
    cp->add_option("--out", pr.out, "output CSV path");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        std::cerr << nlohmann::json{{"error", e.what()}}.dump() << "\n";
        return code != 0 ? code : 1;
    }

    try {
        if (cl->parsed()) return run_verify_lemma(lemma);
        if (cs->parsed()) return run_verify_stopping(stop);
        if (ct->parsed()) return run_train(tr);
        if (cp->parsed()) return run_predict_eval(pr);
        throw std::logic_error("no subcommand dispatched");
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"error", e.what()}}.dump() << "\n";
        return 1;
    }
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

} // namespace cli
