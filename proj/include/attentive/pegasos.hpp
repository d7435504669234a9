#pragma once
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "attentive/mnist.hpp"
#include "attentive/stst.hpp"

// Pegasos SVM trainers for 1-vs-1 digit tasks: the plain (full-evaluation)
// solver, the attentive variant that sequentially thresholds the partial
// margin and skips easy examples after a prefix of features, and a budgeted
// baseline that always evaluates a fixed number of coordinates.

namespace pegasos {

struct LinearModel {
    std::vector<double> weights;
    double lambda = 1e-4;
    std::uint64_t examples_seen = 0; // gradient-step counter l

    std::size_t dim() const { return weights.size(); }
};

struct LabeledExample {
    std::vector<double> features; // each entry in [-1, 1]
    int label = 1;                // +1 or -1
};

/// Per-class, per-feature streaming moments (Welford). Until a cell has two
/// observations its variance reads as the prior (default: variance of a
/// uniform [0,1] pixel), which keeps the early boundary away from the
/// degenerate tau = 1.
class RunningMoments {
  public:
    RunningMoments() = default;
    RunningMoments(std::size_t dim, double prior_variance = 0.25);

    void update(int label, std::size_t j, double x);
    double variance(int label, std::size_t j) const;
    double mean(int label, std::size_t j) const;
    std::uint64_t count(int label, std::size_t j) const;

    std::size_t dim() const { return pos_.size(); }
    double prior_variance() const { return prior_; }

    struct Cell {
        std::uint64_t n = 0;
        double mean = 0.0;
        double m2 = 0.0;
    };
    const std::vector<Cell>& cells(int label) const { return label > 0 ? pos_ : neg_; }
    std::vector<Cell>& cells(int label) { return label > 0 ? pos_ : neg_; }

  private:
    std::vector<Cell> pos_;
    std::vector<Cell> neg_;
    double prior_ = 0.25;
};

enum class PolicyKind {
    natural,            // 0, 1, ..., d-1
    sorted_by_weight,   // |w_j| descending, stable on ties
    sampled_by_weight,  // d draws with replacement, P(j) proportional to |w_j|
    random_permutation, // fresh uniform permutation
};

struct CoordinatePolicy {
    PolicyKind kind = PolicyKind::natural;
    std::uint64_t seed = 0;
};

/// Emit the coordinate visit order for one example. sorted/sampled fall back
/// to natural order while w = 0 (|w|-proportional choice is undefined there).
/// rng carries the policy's random stream across examples.
std::vector<std::size_t> policy_order(const CoordinatePolicy& policy,
                                      std::span<const double> weights, std::mt19937_64& rng);

enum class Mode { full, attentive, budgeted };
enum class VarianceFormula { squared_w, literal_w };

struct TrainerConfig {
    Mode mode = Mode::attentive;
    double delta = 0.01;    // attentive decision-error target
    std::size_t budget = 0; // budgeted: coordinates per example (<= d)
    CoordinatePolicy policy{};
    double lambda = 1e-4;
    bool hinge_check_on_full_evaluation = true;
    VarianceFormula variance_formula = VarianceFormula::squared_w;
    std::size_t epochs = 1;
    bool audit = false; // fully evaluate everything on the side to tally decision errors
    double prior_variance = 0.25;
    bool boundary_disabled = false; // attentive with tau = +inf (oracle / ablation)
    std::optional<std::uint64_t> shuffle_seed; // per-epoch reshuffle when set
};

struct TrainReport {
    std::size_t examples_processed = 0;
    std::size_t skipped_examples = 0;
    std::size_t completed_examples = 0;
    std::size_t updates_applied = 0;
    std::size_t regularization_only_steps = 0;
    std::uint64_t features_on_skipped = 0;
    std::uint64_t features_on_completed = 0;
    std::size_t audit_low_margin_total = 0;   // full margin < 1 (audit runs only)
    std::size_t audit_low_margin_skipped = 0; // ... of those, skipped anyway
    double train_seconds = 0.0;
    std::vector<double> epoch_test_accuracy; // filled when an eval set is given

    double mean_features_skipped() const;
    double mean_features_completed() const;
    /// Fraction of low-margin (margin < 1) examples that were skipped; the
    /// realized decision-error rate. NaN when no low-margin examples exist.
    double audit_decision_error_rate() const;
};

struct TrainResult {
    LinearModel model;
    RunningMoments moments;
    TrainReport report;
};

/// One Pegasos gradient step: mu = 1/(l * lambda) with l = model.examples_seen,
/// w <- (1 - mu*lambda) w + mu*y*x, then projection onto the 1/sqrt(lambda)
/// ball. The caller advances examples_seen; l must be >= 1 here.
LinearModel pegasos_update(const LinearModel& model, std::span<const double> x, int y);
LinearModel pegasos_update(const LinearModel& model, const LabeledExample& ex);

/// The regularization-only step taken when a fully evaluated example already
/// has margin >= 1: w <- (1 - mu*lambda) w, then projection.
LinearModel regularization_step(const LinearModel& model);

/// y * <w, x>.
double full_margin(const LinearModel& model, std::span<const double> x, int y);
double full_margin(const LinearModel& model, const LabeledExample& ex);

/// Boundary for the training-time margin test:
/// tau = 1 + sqrt(V) * sqrt(log(1/sqrt(delta))), V = sum_j f(w_j) var_y(x_j)
/// with f per the variance formula (squared_w clamps nothing; literal_w is
/// clamped at zero since it can go negative).
double attentive_boundary(const LinearModel& model, const RunningMoments& moments, int y,
                          double delta, VarianceFormula formula = VarianceFormula::squared_w);

/// Sequentially accumulate y*w_j*x_j in policy order against the constant
/// boundary above; stopped_early means "skip this example".
stst::SequentialOutcome attentive_margin_test(const LinearModel& model, std::span<const double> x,
                                              int y, const RunningMoments& moments, double delta,
                                              const CoordinatePolicy& policy,
                                              VarianceFormula formula = VarianceFormula::squared_w);
stst::SequentialOutcome attentive_margin_test(const LinearModel& model, const LabeledExample& ex,
                                              const RunningMoments& moments, double delta,
                                              const CoordinatePolicy& policy,
                                              VarianceFormula formula = VarianceFormula::squared_w);
/// Streaming variant for callers that carry the policy RNG across examples.
stst::SequentialOutcome attentive_margin_test(const LinearModel& model, std::span<const double> x,
                                              int y, const RunningMoments& moments, double delta,
                                              const CoordinatePolicy& policy, std::mt19937_64& rng,
                                              VarianceFormula formula = VarianceFormula::squared_w);

/// Record the observed feature values for one example's evaluated coordinate
/// prefix into class y's accumulators (duplicates count once per occurrence).
void update_moments(RunningMoments& moments, std::span<const double> x, int y,
                    std::span<const std::size_t> evaluated_indices);

/// Train on a pair task. Evaluation accuracy is appended per epoch when
/// eval is non-null. Throws std::invalid_argument on an empty task, bad
/// config bounds, or features outside [-1, 1].
TrainResult train(const TrainerConfig& config, const mnist::PairTask& task,
                  const mnist::PairTask* eval = nullptr);

/// sign(<w, x>); sign(0) = +1.
int predict(const LinearModel& model, std::span<const double> x);

/// Fraction of task examples predicted correctly.
double evaluate_accuracy(const LinearModel& model, const mnist::PairTask& task);

struct PredictOutcome {
    int label = 1;
    std::size_t terms_evaluated = 0;
    bool stopped_early = false;
};

/// tau0 = sqrt(Vbar) * sqrt(log(1/sqrt(delta))) with Vbar averaging the two
/// class accumulators; the boundary for label-free early-stopped prediction.
double predict_boundary(const LinearModel& model, const RunningMoments& moments, double delta,
                        VarianceFormula formula = VarianceFormula::squared_w);

/// Accumulate w_j*x_j in policy order and stop once |S_i| >= tau0 with
/// S_i != 0; the returned label is the sign at stopping (or of the full sum).
PredictOutcome attentive_predict_with_tau(const LinearModel& model, std::span<const double> x,
                                          double tau0, const CoordinatePolicy& policy);
PredictOutcome attentive_predict_with_tau(const LinearModel& model, std::span<const double> x,
                                          double tau0, const CoordinatePolicy& policy,
                                          std::mt19937_64& rng);
PredictOutcome attentive_predict(const LinearModel& model, std::span<const double> x,
                                 const RunningMoments& moments, double delta,
                                 const CoordinatePolicy& policy);

/// Paired early-stopped evaluation over a task: accuracy plus mean features.
struct AttentiveEvalReport {
    double accuracy = 0.0;
    double mean_features = 0.0;
    std::size_t stopped = 0;
    std::size_t count = 0;
};
AttentiveEvalReport evaluate_attentive(const LinearModel& model, const RunningMoments& moments,
                                       double delta, const CoordinatePolicy& policy,
                                       const mnist::PairTask& task);

/// Versioned JSON checkpoint of (d, lambda, l, weights, moments, prior).
void save_checkpoint(const std::string& path, const LinearModel& model,
                     const RunningMoments& moments);
struct Checkpoint {
    LinearModel model;
    RunningMoments moments;
};
Checkpoint load_checkpoint(const std::string& path);

} // namespace pegasos
