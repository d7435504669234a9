#include "attentive/pegasos.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "attentive/rng.hpp"

namespace pegasos {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

void check_example(const LinearModel& model, std::span<const double> x, int y) {
    require(x.size() == model.dim(), "feature dimension does not match the model");
    require(y == 1 || y == -1, "label must be +1 or -1");
}

void project_to_ball(LinearModel& model) {
    double ss = 0.0;
    for (double w : model.weights) ss += w * w;
    const double norm = std::sqrt(ss);
    const double radius = 1.0 / std::sqrt(model.lambda);
    if (norm > radius) {
        const double scale = radius / norm;
        for (double& w : model.weights) w *= scale;
    }
}

double weight_factor(double w, VarianceFormula formula) {
    return formula == VarianceFormula::squared_w ? w * w : w;
}

double log_term(double delta) {
    // log(1/sqrt(delta)) = 0.5 * log(1/delta); natural log throughout
    return 0.5 * std::log(1.0 / delta);
}

/// Gradient step restricted to the coordinates actually evaluated (budgeted
/// mode: unevaluated features were never acquired, so they get no gradient
/// contribution; the scalar shrink still applies everywhere).
LinearModel masked_update(const LinearModel& model, std::span<const double> x, int y,
                          std::span<const std::size_t> coords) {
    require(model.lambda > 0.0, "lambda must be positive");
    require(model.examples_seen >= 1, "examples_seen must be >= 1 before an update");
    check_example(model, x, y);
    const double mu = 1.0 / (static_cast<double>(model.examples_seen) * model.lambda);
    const double shrink = 1.0 - mu * model.lambda;
    const double muy = mu * static_cast<double>(y);
    LinearModel out = model;
    for (std::size_t j = 0; j < out.dim(); ++j) out.weights[j] = shrink * model.weights[j];
    std::vector<std::size_t> uniq(coords.begin(), coords.end());
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    for (std::size_t j : uniq) out.weights[j] += muy * x[j];
    project_to_ball(out);
    return out;
}

} // namespace

RunningMoments::RunningMoments(std::size_t dim, double prior_variance)
    : pos_(dim), neg_(dim), prior_(prior_variance) {
    if (prior_variance < 0.0)
        throw std::invalid_argument("RunningMoments: prior variance must be >= 0");
}

void RunningMoments::update(int label, std::size_t j, double x) {
    Cell& c = cells(label).at(j);
    c.n += 1;
    const double d = x - c.mean;
    c.mean += d / static_cast<double>(c.n);
    c.m2 += d * (x - c.mean);
}

double RunningMoments::variance(int label, std::size_t j) const {
    const Cell& c = cells(label).at(j);
    // population variance once the cell has real data; prior before that
    if (c.n >= 2) return c.m2 / static_cast<double>(c.n);
    return prior_;
}

double RunningMoments::mean(int label, std::size_t j) const { return cells(label).at(j).mean; }

std::uint64_t RunningMoments::count(int label, std::size_t j) const {
    return cells(label).at(j).n;
}

std::vector<std::size_t> policy_order(const CoordinatePolicy& policy,
                                      std::span<const double> weights, std::mt19937_64& rng) {
    const std::size_t d = weights.size();
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    switch (policy.kind) {
        case PolicyKind::natural:
            break;
        case PolicyKind::sorted_by_weight:
            // stable: ties (including the all-zero cold start) keep natural order
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return std::abs(weights[a]) > std::abs(weights[b]);
            });
            break;
        case PolicyKind::sampled_by_weight: {
            double total = 0.0;
            for (double w : weights) total += std::abs(w);
            if (total == 0.0) break; // undefined at w = 0: natural order
            std::vector<double> mass(d);
            for (std::size_t j = 0; j < d; ++j) mass[j] = std::abs(weights[j]);
            std::discrete_distribution<std::size_t> pick(mass.begin(), mass.end());
            for (std::size_t i = 0; i < d; ++i) order[i] = pick(rng);
            break;
        }
        case PolicyKind::random_permutation:
            std::shuffle(order.begin(), order.end(), rng);
            break;
    }
    return order;
}

LinearModel pegasos_update(const LinearModel& model, std::span<const double> x, int y) {
    require(model.lambda > 0.0, "lambda must be positive");
    require(model.examples_seen >= 1, "examples_seen must be >= 1 before an update");
    check_example(model, x, y);
    const double mu = 1.0 / (static_cast<double>(model.examples_seen) * model.lambda);
    const double shrink = 1.0 - mu * model.lambda;
    const double muy = mu * static_cast<double>(y);
    LinearModel out = model;
    for (std::size_t j = 0; j < out.dim(); ++j)
        out.weights[j] = shrink * model.weights[j] + muy * x[j];
    project_to_ball(out);
    return out;
}

LinearModel pegasos_update(const LinearModel& model, const LabeledExample& ex) {
    return pegasos_update(model, ex.features, ex.label);
}

LinearModel regularization_step(const LinearModel& model) {
    require(model.lambda > 0.0, "lambda must be positive");
    require(model.examples_seen >= 1, "examples_seen must be >= 1 before an update");
    const double mu = 1.0 / (static_cast<double>(model.examples_seen) * model.lambda);
    const double shrink = 1.0 - mu * model.lambda;
    LinearModel out = model;
    for (double& w : out.weights) w *= shrink;
    project_to_ball(out);
    return out;
}

double full_margin(const LinearModel& model, std::span<const double> x, int y) {
    check_example(model, x, y);
    double dot = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) dot += model.weights[j] * x[j];
    return static_cast<double>(y) * dot;
}

double full_margin(const LinearModel& model, const LabeledExample& ex) {
    return full_margin(model, ex.features, ex.label);
}

double attentive_boundary(const LinearModel& model, const RunningMoments& moments, int y,
                          double delta, VarianceFormula formula) {
    require(delta > 0.0 && delta <= 1.0, "delta must be in (0, 1]");
    require(moments.dim() == model.dim(), "moments dimension does not match the model");
    require(y == 1 || y == -1, "label must be +1 or -1");
    double v = 0.0;
    for (std::size_t j = 0; j < model.dim(); ++j)
        v += weight_factor(model.weights[j], formula) * moments.variance(y, j);
    v = std::max(v, 0.0); // literal_w can go negative
    return 1.0 + std::sqrt(v) * std::sqrt(log_term(delta));
}

stst::SequentialOutcome attentive_margin_test(const LinearModel& model, std::span<const double> x,
                                              int y, const RunningMoments& moments, double delta,
                                              const CoordinatePolicy& policy, std::mt19937_64& rng,
                                              VarianceFormula formula) {
    check_example(model, x, y);
    const double tau = attentive_boundary(model, moments, y, delta, formula);
    const auto order = policy_order(policy, model.weights, rng);
    return stst::scan_threshold_sum(order.size(), tau, [&](std::size_t i) {
        const std::size_t j = order[i];
        return static_cast<double>(y) * model.weights[j] * x[j];
    });
}

stst::SequentialOutcome attentive_margin_test(const LinearModel& model, std::span<const double> x,
                                              int y, const RunningMoments& moments, double delta,
                                              const CoordinatePolicy& policy,
                                              VarianceFormula formula) {
    std::mt19937_64 rng(attentive::derive_seed(policy.seed, 0x706f6c6963ULL));
    return attentive_margin_test(model, x, y, moments, delta, policy, rng, formula);
}

stst::SequentialOutcome attentive_margin_test(const LinearModel& model, const LabeledExample& ex,
                                              const RunningMoments& moments, double delta,
                                              const CoordinatePolicy& policy,
                                              VarianceFormula formula) {
    return attentive_margin_test(model, ex.features, ex.label, moments, delta, policy, formula);
}

void update_moments(RunningMoments& moments, std::span<const double> x, int y,
                    std::span<const std::size_t> evaluated_indices) {
    for (std::size_t j : evaluated_indices) moments.update(y, j, x[j]);
}

double TrainReport::mean_features_skipped() const {
    if (skipped_examples == 0) return kNaN;
    return static_cast<double>(features_on_skipped) / static_cast<double>(skipped_examples);
}

double TrainReport::mean_features_completed() const {
    if (completed_examples == 0) return kNaN;
    return static_cast<double>(features_on_completed) / static_cast<double>(completed_examples);
}

double TrainReport::audit_decision_error_rate() const {
    if (audit_low_margin_total == 0) return kNaN;
    return static_cast<double>(audit_low_margin_skipped) /
           static_cast<double>(audit_low_margin_total);
}

TrainResult train(const TrainerConfig& config, const mnist::PairTask& task,
                  const mnist::PairTask* eval) {
    require(task.count() >= 1, "train: task is empty");
    require(task.dim >= 1, "train: task has no features");
    require(config.lambda > 0.0, "train: lambda must be positive");
    require(config.epochs >= 1, "train: epochs must be >= 1");
    if (config.mode == Mode::attentive)
        require(config.delta > 0.0 && config.delta <= 1.0, "train: delta must be in (0, 1]");
    if (config.mode == Mode::budgeted)
        require(config.budget >= 1 && config.budget <= task.dim,
                "train: budget must be in [1, d]");
    for (double v : task.x)
        require(v >= -1.0 && v <= 1.0, "train: features must lie in [-1, 1]");

    const std::size_t d = task.dim;
    // full mode needs the true margin; a with-replacement sample is not one
    CoordinatePolicy policy = config.policy;
    if (config.mode == Mode::full && policy.kind == PolicyKind::sampled_by_weight)
        policy.kind = PolicyKind::natural;

    TrainResult res{LinearModel{std::vector<double>(d, 0.0), config.lambda, 0},
                    RunningMoments(d, config.prior_variance), TrainReport{}};
    LinearModel& model = res.model;
    RunningMoments& moments = res.moments;
    TrainReport& rep = res.report;

    std::mt19937_64 policy_rng(attentive::derive_seed(policy.seed, 0x706f6c6963ULL));
    const std::size_t scan_terms =
        config.mode == Mode::budgeted ? std::min(config.budget, d) : d;

    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::vector<std::size_t> visit(task.count());
        std::iota(visit.begin(), visit.end(), std::size_t{0});
        if (config.shuffle_seed)
            visit = mnist::shuffled_order(
                task.count(), attentive::derive_seed(*config.shuffle_seed, epoch));

        for (std::size_t idx : visit) {
            const std::span<const double> x(task.example(idx), d);
            const int y = task.y[idx];

            double tau = stst::kDisabledBoundary;
            if (config.mode == Mode::attentive && !config.boundary_disabled)
                tau = attentive_boundary(model, moments, y, config.delta,
                                         config.variance_formula);

            const auto order = policy_order(policy, model.weights, policy_rng);
            const auto outcome =
                stst::scan_threshold_sum(scan_terms, tau, [&](std::size_t i) {
                    const std::size_t j = order[i];
                    return static_cast<double>(y) * model.weights[j] * x[j];
                });

            // margin of record: the natural-order full sum over current weights
            double true_margin = kNaN;
            bool have_margin = false;
            auto margin = [&]() {
                if (!have_margin) {
                    true_margin = full_margin(model, x, y);
                    have_margin = true;
                }
                return true_margin;
            };

            if (config.audit && margin() < 1.0) {
                rep.audit_low_margin_total += 1;
                if (outcome.stopped_early) rep.audit_low_margin_skipped += 1;
            }

            update_moments(moments, x, y,
                           std::span<const std::size_t>(order.data(), outcome.terms_evaluated));

            rep.examples_processed += 1;
            if (outcome.stopped_early) {
                rep.skipped_examples += 1;
                rep.features_on_skipped += outcome.terms_evaluated;
                continue; // w and l unchanged
            }
            rep.completed_examples += 1;
            rep.features_on_completed += outcome.terms_evaluated;
            model.examples_seen += 1;

            bool do_update;
            if (config.mode == Mode::budgeted)
                do_update = outcome.partial_sum < 1.0; // truncated margin is the margin
            else
                do_update = !config.hinge_check_on_full_evaluation || margin() < 1.0;

            if (do_update) {
                if (config.mode == Mode::budgeted)
                    model = masked_update(
                        model, x, y,
                        std::span<const std::size_t>(order.data(), outcome.terms_evaluated));
                else
                    model = pegasos_update(model, x, y);
                rep.updates_applied += 1;
            } else {
                model = regularization_step(model);
                rep.regularization_only_steps += 1;
            }
        }
        if (eval != nullptr) rep.epoch_test_accuracy.push_back(evaluate_accuracy(model, *eval));
    }
    rep.train_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

int predict(const LinearModel& model, std::span<const double> x) {
    require(x.size() == model.dim(), "feature dimension does not match the model");
    double dot = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) dot += model.weights[j] * x[j];
    return dot < 0.0 ? -1 : 1; // sign(0) = +1
}

double evaluate_accuracy(const LinearModel& model, const mnist::PairTask& task) {
    require(task.count() >= 1, "evaluate_accuracy: task is empty");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < task.count(); ++i)
        hits += predict(model, std::span<const double>(task.example(i), task.dim)) == task.y[i];
    return static_cast<double>(hits) / static_cast<double>(task.count());
}

double predict_boundary(const LinearModel& model, const RunningMoments& moments, double delta,
                        VarianceFormula formula) {
    require(delta > 0.0 && delta <= 1.0, "delta must be in (0, 1]");
    require(moments.dim() == model.dim(), "moments dimension does not match the model");
    double v = 0.0;
    for (std::size_t j = 0; j < model.dim(); ++j)
        v += weight_factor(model.weights[j], formula) * 0.5 *
             (moments.variance(1, j) + moments.variance(-1, j));
    v = std::max(v, 0.0);
    return std::sqrt(v) * std::sqrt(log_term(delta));
}

PredictOutcome attentive_predict_with_tau(const LinearModel& model, std::span<const double> x,
                                          double tau0, const CoordinatePolicy& policy,
                                          std::mt19937_64& rng) {
    require(x.size() == model.dim(), "feature dimension does not match the model");
    require(tau0 >= 0.0, "prediction boundary must be >= 0");
    const auto order = policy_order(policy, model.weights, rng);
    const std::size_t d = order.size();
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const std::size_t j = order[i];
        s += model.weights[j] * x[j];
        // symmetric boundary, label-free: stop once the sign is confident
        if (i + 1 < d && s != 0.0 && std::abs(s) >= tau0)
            return PredictOutcome{s < 0.0 ? -1 : 1, i + 1, true};
    }
    return PredictOutcome{s < 0.0 ? -1 : 1, d, false};
}

PredictOutcome attentive_predict_with_tau(const LinearModel& model, std::span<const double> x,
                                          double tau0, const CoordinatePolicy& policy) {
    std::mt19937_64 rng(attentive::derive_seed(policy.seed, 0x7072656443ULL));
    return attentive_predict_with_tau(model, x, tau0, policy, rng);
}

PredictOutcome attentive_predict(const LinearModel& model, std::span<const double> x,
                                 const RunningMoments& moments, double delta,
                                 const CoordinatePolicy& policy) {
    return attentive_predict_with_tau(model, x, predict_boundary(model, moments, delta), policy);
}

AttentiveEvalReport evaluate_attentive(const LinearModel& model, const RunningMoments& moments,
                                       double delta, const CoordinatePolicy& policy,
                                       const mnist::PairTask& task) {
    require(task.count() >= 1, "evaluate_attentive: task is empty");
    const double tau0 = predict_boundary(model, moments, delta);
    std::mt19937_64 rng(attentive::derive_seed(policy.seed, 0x7072656443ULL));
    AttentiveEvalReport rep;
    rep.count = task.count();
    std::uint64_t features = 0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < task.count(); ++i) {
        const auto out = attentive_predict_with_tau(
            model, std::span<const double>(task.example(i), task.dim), tau0, policy, rng);
        hits += out.label == task.y[i];
        features += out.terms_evaluated;
        rep.stopped += out.stopped_early;
    }
    rep.accuracy = static_cast<double>(hits) / static_cast<double>(task.count());
    rep.mean_features = static_cast<double>(features) / static_cast<double>(task.count());
    return rep;
}

namespace {

nlohmann::json cells_to_json(const std::vector<RunningMoments::Cell>& cells) {
    nlohmann::json j;
    auto& count = j["count"] = nlohmann::json::array();
    auto& mean = j["mean"] = nlohmann::json::array();
    auto& m2 = j["m2"] = nlohmann::json::array();
    for (const auto& c : cells) {
        count.push_back(c.n);
        mean.push_back(c.mean);
        m2.push_back(c.m2);
    }
    return j;
}

void cells_from_json(const nlohmann::json& j, std::vector<RunningMoments::Cell>& cells,
                     std::size_t d) {
    const auto& count = j.at("count");
    const auto& mean = j.at("mean");
    const auto& m2 = j.at("m2");
    if (count.size() != d || mean.size() != d || m2.size() != d)
        throw std::runtime_error("checkpoint: moments arrays do not match the model dimension");
    cells.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
        cells[i].n = count[i].get<std::uint64_t>();
        cells[i].mean = mean[i].get<double>();
        cells[i].m2 = m2[i].get<double>();
    }
}

} // namespace

void save_checkpoint(const std::string& path, const LinearModel& model,
                     const RunningMoments& moments) {
    if (moments.dim() != model.dim())
        throw std::invalid_argument("save_checkpoint: moments dimension does not match the model");
    nlohmann::json j;
    j["format"] = "attentive-pegasos-checkpoint";
    j["version"] = 1;
    j["d"] = model.dim();
    j["lambda"] = model.lambda;
    j["examples_seen"] = model.examples_seen;
    j["weights"] = model.weights;
    j["prior_variance"] = moments.prior_variance();
    j["moments"]["positive"] = cells_to_json(moments.cells(1));
    j["moments"]["negative"] = cells_to_json(moments.cells(-1));
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out << j.dump(1, '\t') << '\n';
    if (!out) throw std::runtime_error("short write on checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::runtime_error("checkpoint parse error: " + path + ": " + e.what());
    }
    if (j.value("format", "") != "attentive-pegasos-checkpoint")
        throw std::runtime_error("not a model checkpoint: " + path);
    if (j.value("version", 0) != 1)
        throw std::runtime_error("unsupported checkpoint version in " + path);

    Checkpoint cp;
    const std::size_t d = j.at("d").get<std::size_t>();
    cp.model.lambda = j.at("lambda").get<double>();
    cp.model.examples_seen = j.at("examples_seen").get<std::uint64_t>();
    cp.model.weights = j.at("weights").get<std::vector<double>>();
    if (cp.model.weights.size() != d)
        throw std::runtime_error("checkpoint: weight vector does not match d");
    if (cp.model.lambda <= 0.0) throw std::runtime_error("checkpoint: lambda must be positive");
    cp.moments = RunningMoments(d, j.at("prior_variance").get<double>());
    cells_from_json(j.at("moments").at("positive"), cp.moments.cells(1), d);
    cells_from_json(j.at("moments").at("negative"), cp.moments.cells(-1), d);
    return cp;
}

} // namespace pegasos
