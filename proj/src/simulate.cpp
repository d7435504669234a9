#include "attentive/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>

#include "attentive/rng.hpp"
#include "attentive/stst.hpp"

namespace mc {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

void check_spec(const WalkSpec& spec) {
    require(spec.n >= 1, "WalkSpec: n must be >= 1");
    std::visit(overloaded{
                   [](const Gaussian& g) {
                       require(std::isfinite(g.mean), "Gaussian: mean must be finite");
                       require(std::isfinite(g.sd) && g.sd >= 0.0, "Gaussian: sd must be >= 0");
                   },
                   [](const BoundedUniform& u) {
                       require(std::isfinite(u.lo) && std::isfinite(u.hi) && u.lo <= u.hi,
                               "BoundedUniform: need finite lo <= hi");
                   },
                   [](const RademacherBiased& r) {
                       require(r.p >= 0.0 && r.p <= 1.0, "RademacherBiased: p must be in [0,1]");
                   },
               },
               spec.increments);
}

std::mt19937_64 path_rng(std::uint64_t seed, std::size_t path_index) {
    return std::mt19937_64(attentive::derive_seed(seed, static_cast<std::uint64_t>(path_index)));
}

struct pm_one {
    std::bernoulli_distribution b;
    double operator()(std::mt19937_64& g) { return b(g) ? 1.0 : -1.0; }
};

std::normal_distribution<double> sampler_for(const Gaussian& g) {
    return std::normal_distribution<double>(g.mean, g.sd);
}
std::uniform_real_distribution<double> sampler_for(const BoundedUniform& u) {
    return std::uniform_real_distribution<double>(u.lo, u.hi);
}
pm_one sampler_for(const RademacherBiased& r) { return pm_one{std::bernoulli_distribution(r.p)}; }

double binomial_se(double p_hat, std::size_t m) {
    if (m == 0) return kNaN;
    return std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(m));
}

/// Standard error of a sample mean (unbiased variance; 0 when m < 2).
double mean_se(const std::vector<double>& xs, double mean) {
    const std::size_t m = xs.size();
    if (m < 2) return 0.0;
    double ss = 0.0;
    for (double x : xs) {
        const double d = x - mean;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(m - 1) / static_cast<double>(m));
}

// Segments with both endpoints this far below the boundary (in the exponent
// of the crossing probability) cannot realistically fire; skipping the draw
// keeps the hot loop cheap without measurable bias.
constexpr double kSegmentExponentCutoff = 45.0;

std::mt19937_64 bridge_skeleton_impl(const WalkSpec& spec, double theta, std::size_t path_index,
                                     std::vector<double>& out) {
    const auto& g = std::get<Gaussian>(spec.increments);
    auto rng = path_rng(spec.seed, path_index);
    auto dist = sampler_for(g);
    const std::size_t n = spec.n;
    out.resize(n);
    double w = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        w += dist(rng);
        out[i] = w; // raw prefix sums W_1..W_n for now
    }
    const double wn = w;
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i + 1) * inv_n;
        out[i] = theta * t + out[i] - t * wn;
    }
    out[n - 1] = theta; // pinned by construction; avoid rounding residue
    return rng;
}

} // namespace

double WalkSpec::mean_increment() const {
    return std::visit(overloaded{
                          [](const Gaussian& g) { return g.mean; },
                          [](const BoundedUniform& u) { return 0.5 * (u.lo + u.hi); },
                          [](const RademacherBiased& r) { return 2.0 * r.p - 1.0; },
                      },
                      increments);
}

double WalkSpec::var_increment() const {
    return std::visit(overloaded{
                          [](const Gaussian& g) { return g.sd * g.sd; },
                          [](const BoundedUniform& u) {
                              const double w = u.hi - u.lo;
                              return w * w / 12.0;
                          },
                          [](const RademacherBiased& r) { return 4.0 * r.p * (1.0 - r.p); },
                      },
                      increments);
}

double WalkSpec::var_full_sum() const { return static_cast<double>(n) * var_increment(); }

double WalkSpec::bound() const {
    return std::visit(overloaded{
                          [](const Gaussian&) { return std::numeric_limits<double>::infinity(); },
                          [](const BoundedUniform& u) { return std::max(std::abs(u.lo), std::abs(u.hi)); },
                          [](const RademacherBiased&) { return 1.0; },
                      },
                      increments);
}

bool WalkSpec::bounded() const { return !std::holds_alternative<Gaussian>(increments); }

namespace detail {
void bridge_skeleton(const WalkSpec& spec, double theta, std::size_t path_index,
                     std::vector<double>& out) {
    bridge_skeleton_impl(spec, theta, path_index, out);
}
} // namespace detail

EstimateReport estimate_bridge_crossing(const WalkSpec& spec, double tau, double theta,
                                        std::size_t paths, Exec exec) {
    check_spec(spec);
    require(std::holds_alternative<Gaussian>(spec.increments),
            "estimate_bridge_crossing: gaussian increments required");
    require(paths >= 1, "estimate_bridge_crossing: paths must be >= 1");
    require(std::isfinite(tau) && std::isfinite(theta), "estimate_bridge_crossing: tau and theta must be finite");
    require(tau >= theta, "estimate_bridge_crossing: tau must be >= theta");

    const double v_step = spec.var_increment();
    std::vector<std::uint8_t> crossed(paths, 0);

    attentive::for_each_index(paths, exec, [&](std::size_t p) {
        std::vector<double> b;
        auto rng = bridge_skeleton_impl(spec, theta, p, b);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        double a = 0.0; // B_0
        bool hit = false;
        for (std::size_t i = 0; i < b.size(); ++i) {
            const double bi = b[i];
            if (a >= tau || bi >= tau) {
                hit = true;
                break;
            }
            // Both endpoints below tau: the continuous bridge may still cross
            // inside the step. Conditional on the endpoints the within-step
            // crossing is Bernoulli(exp(-2 (tau-a)(tau-bi) / v_step)).
            if (v_step > 0.0) {
                const double q2 = 2.0 * (tau - a) * (tau - bi) / v_step;
                if (q2 < kSegmentExponentCutoff && unif(rng) < std::exp(-q2)) {
                    hit = true;
                    break;
                }
            }
            a = bi;
        }
        crossed[p] = hit ? 1 : 0;
    });

    std::size_t hits = 0;
    for (std::size_t p = 0; p < paths; ++p) hits += crossed[p];
    const double est = static_cast<double>(hits) / static_cast<double>(paths);
    return EstimateReport{est, binomial_se(est, paths), paths, paths};
}

EstimateReport estimate_decision_error(const WalkSpec& spec, double theta, double delta,
                                       std::size_t paths, Exec exec) {
    check_spec(spec);
    require(paths >= 1, "estimate_decision_error: paths must be >= 1");
    require(std::isfinite(theta), "estimate_decision_error: theta must be finite");
    require(delta > 0.0 && delta <= 1.0, "estimate_decision_error: delta must be in (0,1]");
    require(spec.mean_increment() > 0.0,
            "estimate_decision_error: positive-mean increments required");

    const double tau =
        stst::constant_boundary(stst::BoundarySpec{theta, delta, spec.var_full_sum()});
    const std::size_t n = spec.n;
    std::vector<std::uint8_t> low(paths, 0);     // S_n < theta
    std::vector<std::uint8_t> crossed(paths, 0); // hit tau before step n

    std::visit(
        [&](const auto& inc) {
            const auto proto = sampler_for(inc);
            attentive::for_each_index(paths, exec, [&](std::size_t p) {
                auto rng = path_rng(spec.seed, p);
                auto dist = proto;
                double s = 0.0;
                bool hit = false;
                for (std::size_t i = 1; i <= n; ++i) {
                    s += dist(rng);
                    if (!hit && i < n && s >= tau) hit = true;
                }
                low[p] = (s < theta) ? 1 : 0;
                crossed[p] = hit ? 1 : 0;
            });
        },
        spec.increments);

    std::size_t m = 0, err = 0;
    for (std::size_t p = 0; p < paths; ++p) {
        if (low[p]) {
            ++m;
            err += crossed[p];
        }
    }
    if (m == 0) return EstimateReport{kNaN, kNaN, paths, 0};
    const double est = static_cast<double>(err) / static_cast<double>(m);
    return EstimateReport{est, binomial_se(est, m), paths, m};
}

EstimateReport estimate_stopping_time(const WalkSpec& spec, double delta, std::size_t paths,
                                      Exec exec) {
    check_spec(spec);
    require(paths >= 1, "estimate_stopping_time: paths must be >= 1");
    require(delta > 0.0 && delta <= 1.0, "estimate_stopping_time: delta must be in (0,1]");
    require(spec.bounded(), "estimate_stopping_time: bounded increments required");
    require(spec.mean_increment() > 0.0,
            "estimate_stopping_time: positive-mean increments required");

    const double tau = stst::simplified_boundary(spec.var_full_sum(), delta);
    const std::size_t n = spec.n;
    std::vector<double> stop_at(paths, 0.0);

    std::visit(
        [&](const auto& inc) {
            const auto proto = sampler_for(inc);
            attentive::for_each_index(paths, exec, [&](std::size_t p) {
                auto rng = path_rng(spec.seed, p);
                auto dist = proto;
                double s = 0.0;
                std::size_t t = n;
                for (std::size_t i = 1; i <= n; ++i) {
                    s += dist(rng);
                    if (s >= tau) {
                        t = i;
                        break;
                    }
                }
                stop_at[p] = static_cast<double>(t);
            });
        },
        spec.increments);

    double sum = 0.0;
    for (double t : stop_at) sum += t;
    const double mean = sum / static_cast<double>(paths);
    return EstimateReport{mean, mean_se(stop_at, mean), paths, paths};
}

WaldReport wald_identity_check(const WalkSpec& spec, double boundary_a, std::size_t paths,
                               Exec exec) {
    check_spec(spec);
    require(paths >= 1, "wald_identity_check: paths must be >= 1");
    require(std::isfinite(boundary_a), "wald_identity_check: boundary must be finite");
    require(spec.bounded(), "wald_identity_check: bounded increments required");
    require(spec.mean_increment() > 0.0, "wald_identity_check: positive-mean increments required");

    if (boundary_a <= 0.0) {
        // S_0 = 0 already meets the boundary: T = 0 and S_T = 0 on every path.
        return WaldReport{0.0, 0.0, 0.0, 0.0, paths};
    }

    const double ex = spec.mean_increment();
    const std::size_t n = spec.n;
    std::vector<double> s_t(paths, 0.0);
    std::vector<double> t_steps(paths, 0.0);

    std::visit(
        [&](const auto& inc) {
            const auto proto = sampler_for(inc);
            attentive::for_each_index(paths, exec, [&](std::size_t p) {
                auto rng = path_rng(spec.seed, p);
                auto dist = proto;
                double s = 0.0;
                std::size_t t = n;
                for (std::size_t i = 1; i <= n; ++i) {
                    s += dist(rng);
                    if (s >= boundary_a) {
                        t = i;
                        break;
                    }
                }
                s_t[p] = s;
                t_steps[p] = static_cast<double>(t);
            });
        },
        spec.increments);

    double sum_s = 0.0, sum_t = 0.0;
    for (std::size_t p = 0; p < paths; ++p) {
        sum_s += s_t[p];
        sum_t += t_steps[p];
    }
    const double mean_s = sum_s / static_cast<double>(paths);
    const double mean_tex = ex * (sum_t / static_cast<double>(paths));

    // Paired difference D = S_T - EX*T; its mean is the discrepancy, and its
    // sample spread gives the right error bar for that mean.
    std::vector<double> diff(paths, 0.0);
    for (std::size_t p = 0; p < paths; ++p) diff[p] = s_t[p] - ex * t_steps[p];
    double mean_d = 0.0;
    for (double d : diff) mean_d += d;
    mean_d /= static_cast<double>(paths);

    return WaldReport{mean_s, mean_tex, std::abs(mean_s - mean_tex), mean_se(diff, mean_d), paths};
}

} // namespace mc
