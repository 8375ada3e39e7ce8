#include "qcool/scaling.hpp"

#include "qcool/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>

namespace qcool {

namespace {

// Kahan-compensated accumulator; keeps parallel-run reductions bit-stable
// because every reduction below runs serially in sample order.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

void parallel_for(long n, int n_threads, const std::function<void(long, long)>& body) {
    int threads = n_threads > 0 ? n_threads : static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    threads = static_cast<int>(std::min<long>(threads, n));

    if (threads <= 1) {
        body(0, n);
        return;
    }
    std::vector<std::thread> pool;
    const long chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const long lo = t * chunk;
        const long hi = std::min<long>(lo + chunk, n);
        if (lo < hi) pool.emplace_back(body, lo, hi);
    }
    for (auto& th : pool) th.join();
}

// Binomial(k, q) pmf over j = 0..k. Anchored at the mode and filled by the
// neighbour ratio T(j+1)/T(j) = (k-j) q / ((j+1)(1-q)), then normalized;
// every step is a small relative factor, so the result stays accurate to
// ~1e-13 even at k = 1e6 where direct lgamma exponentials drift to ~1e-9.
std::vector<double> binomial_pmf(long k, double q) {
    std::vector<double> pmf(static_cast<std::size_t>(k) + 1, 0.0);
    if (q <= 0.0) {
        pmf.front() = 1.0;
        return pmf;
    }
    if (q >= 1.0) {
        pmf.back() = 1.0;
        return pmf;
    }
    long mode = static_cast<long>(q * static_cast<double>(k + 1));
    mode = std::clamp(mode, 0L, k);

    pmf[static_cast<std::size_t>(mode)] = 1.0;
    for (long j = mode; j > 0; --j) {
        const double ratio =
            static_cast<double>(j) * (1.0 - q) / (static_cast<double>(k - j + 1) * q);
        pmf[static_cast<std::size_t>(j - 1)] = pmf[static_cast<std::size_t>(j)] * ratio;
        if (pmf[static_cast<std::size_t>(j - 1)] == 0.0) break;
    }
    for (long j = mode; j < k; ++j) {
        const double ratio =
            static_cast<double>(k - j) * q / (static_cast<double>(j + 1) * (1.0 - q));
        pmf[static_cast<std::size_t>(j + 1)] = pmf[static_cast<std::size_t>(j)] * ratio;
        if (pmf[static_cast<std::size_t>(j + 1)] == 0.0) break;
    }

    CompensatedSum total;
    for (double v : pmf) total.add(v);
    for (double& v : pmf) v /= total.sum;
    return pmf;
}

struct TwoLevelWalk {
    // Probability that one step yields outcome 0 given ground population w.
    double a, b;
    explicit TwoLevelWalk(const TwoLevelModel& m) : a(m.a()), b(m.b()) {}

    double p_cool(double w) const { return w * (0.5 - a) + (1.0 - w) * (0.5 - b); }

    // Posterior ground population after observing the outcome.
    double update(double w, int outcome, double p_outcome) const {
        const double factor = outcome == 0 ? 0.5 - a : 0.5 + a;
        return w * factor / p_outcome;
    }
};

}  // namespace

double TwoLevelModel::a() const { return 0.5 * std::sin(e0 * t - gamma); }
double TwoLevelModel::b() const { return 0.5 * std::sin(e1 * t - gamma); }

TwoLevelModel TwoLevelModel::from_gap(double gap, double p, double t, double gamma) {
    if (gap <= 0.0) throw std::invalid_argument("TwoLevelModel: gap must be positive");
    return TwoLevelModel{-gap, 0.0, p, t, gamma};
}

void TwoLevelModel::validate() const {
    if (!(e0 < e1)) throw std::invalid_argument("TwoLevelModel: requires E0 < E1");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("TwoLevelModel: p must lie in [0, 1]");
}

std::vector<double> mixture_pmf(const TwoLevelModel& model, long k) {
    model.validate();
    if (k < 0) throw std::invalid_argument("mixture_pmf: k must be >= 0");

    // j counts 0-outcomes; per-step 0-probability is (1/2 - a) on the ground
    // state and (1/2 - b) on the excited one.
    const double qa = 0.5 - model.a();
    const double qb = 0.5 - model.b();

    std::vector<double> pmf(static_cast<std::size_t>(k) + 1, 0.0);
    if (model.p > 0.0) {
        const auto ground = binomial_pmf(k, qa);
        for (long j = 0; j <= k; ++j) pmf[static_cast<std::size_t>(j)] += model.p * ground[j];
    }
    if (model.p < 1.0) {
        const auto excited = binomial_pmf(k, qb);
        for (long j = 0; j <= k; ++j) pmf[static_cast<std::size_t>(j)] += (1.0 - model.p) * excited[j];
    }
    return pmf;
}

ConcentrationIntervals concentration_intervals(const TwoLevelModel& model, long k) {
    model.validate();
    if (k < 1) throw std::invalid_argument("concentration_intervals: k must be >= 1");
    const double kd = static_cast<double>(k);
    const double sk = std::sqrt(kd);
    auto make = [&](double v) {
        const double center = kd * (0.5 - v);
        const double half = sk * std::sqrt(0.25 - v * v);
        return Interval{center - half, center + half};
    };
    return ConcentrationIntervals{make(model.a()), make(model.b())};
}

bool separation_satisfied(const TwoLevelModel& model, long k) {
    const auto iv = concentration_intervals(model, k);
    return iv.excited.hi < iv.ground.lo;
}

CostEstimate predicted_costs(double gap, double t, double p, double c1) {
    if (gap * t <= 0.0) throw std::invalid_argument("predicted_costs: gap * t must be positive");
    if (p <= 0.0 || p > 1.0) throw std::invalid_argument("predicted_costs: p must lie in (0, 1]");
    const double pred = c1 / ((gap * t) * (gap * t) * p);
    const double e0 = -gap;
    CostEstimate est;
    est.pred = std::lround(pred);
    est.c_bound = std::lround(3.0 * pred);
    est.c_abs = std::lround(pred * std::abs(std::sin(e0 * t)));
    return est;
}

CostEstimate MCConfig::costs() const {
    if (boundary_override) return *boundary_override;
    return predicted_costs(model.gap(), model.t, model.p, c1);
}

MCSummary run_bounded_mc(const MCConfig& config) {
    config.model.validate();
    const CostEstimate costs = config.costs();
    if (costs.c_bound <= 0 || costs.c_abs <= 0) {
        throw std::invalid_argument("run_bounded_mc: c_bound and c_abs must be positive");
    }
    if (config.n_samples < 1) throw std::invalid_argument("run_bounded_mc: n_samples must be >= 1");

    const TwoLevelWalk walk(config.model);
    const long n = config.n_samples;

    std::vector<double> fidelity(n, 0.0);
    std::vector<long> steps(n, 0);
    std::vector<std::uint8_t> reached_bound(n, 0);

    parallel_for(n, config.n_threads, [&](long lo, long hi) {
        for (long i = lo; i < hi; ++i) {
            Xoshiro256ss rng(derive_stream_seed(config.master_seed, static_cast<std::uint64_t>(i)));
            double w = config.model.p;
            long x = 0;
            long step = 0;
            bool bound = false;
            while (true) {
                if (step == costs.c_bound) {
                    bound = true;
                    break;
                }
                const double p0 = walk.p_cool(w);
                const int outcome = rng.uniform01() < p0 ? 0 : 1;
                w = walk.update(w, outcome, outcome == 0 ? p0 : 1.0 - p0);
                x += outcome == 0 ? 1 : -1;
                ++step;
                if (x <= config.reflect_threshold) {
                    w = config.model.p;
                    x = 0;
                } else if (x == costs.c_abs) {
                    break;
                }
            }
            fidelity[i] = w;
            steps[i] = step;
            reached_bound[i] = bound ? 1 : 0;
        }
    });

    MCSummary summary;
    summary.n_total = n;

    CompensatedSum mean_acc;
    long counted = 0;
    long bound_count = 0;
    CompensatedSum step_acc;
    long step_min = steps[0], step_max = steps[0];
    for (long i = 0; i < n; ++i) {
        bound_count += reached_bound[i];
        step_acc.add(static_cast<double>(steps[i]));
        step_min = std::min(step_min, steps[i]);
        step_max = std::max(step_max, steps[i]);
        if (config.filter_bound_reachers && reached_bound[i]) continue;
        mean_acc.add(fidelity[i]);
        ++counted;
    }
    if (counted == 0) throw std::runtime_error("run_bounded_mc: every trajectory reached the bound");

    summary.n_samples = counted;
    summary.mean_fidelity = mean_acc.sum / counted;
    summary.fraction_reached_bound = static_cast<double>(bound_count) / n;

    CompensatedSum var_acc;
    for (long i = 0; i < n; ++i) {
        if (config.filter_bound_reachers && reached_bound[i]) continue;
        const double d = fidelity[i] - summary.mean_fidelity;
        var_acc.add(d * d);
    }
    summary.sample_std = counted > 1 ? std::sqrt(var_acc.sum / (counted - 1)) : 0.0;
    summary.error_bar = 1.96 * summary.sample_std / std::sqrt(static_cast<double>(counted));

    summary.steps.mean = step_acc.sum / n;
    CompensatedSum step_var;
    for (long i = 0; i < n; ++i) {
        const double d = static_cast<double>(steps[i]) - summary.steps.mean;
        step_var.add(d * d);
    }
    summary.steps.stddev = n > 1 ? std::sqrt(step_var.sum / (n - 1)) : 0.0;
    summary.steps.min = step_min;
    summary.steps.max = step_max;
    return summary;
}

MCSummary run_mismatched_bounds_mc(double true_gap, double assumed_gap, MCConfig config) {
    if (true_gap <= 0.0 || assumed_gap <= 0.0) {
        throw std::invalid_argument("run_mismatched_bounds_mc: gaps must be positive");
    }
    config.model = TwoLevelModel::from_gap(true_gap, config.model.p, config.model.t, config.model.gamma);
    config.boundary_override = predicted_costs(assumed_gap, config.model.t, config.model.p, config.c1);
    return run_bounded_mc(config);
}

RefreshResult run_optimal_refresh_mc(const TwoLevelModel& model, long n_samples,
                                     std::uint64_t master_seed, double success_population,
                                     int n_threads) {
    model.validate();
    if (model.p <= 0.0 || model.p >= 1.0) {
        throw std::invalid_argument("run_optimal_refresh_mc: p must lie in (0, 1)");
    }
    if (n_samples < 1) throw std::invalid_argument("run_optimal_refresh_mc: n_samples must be >= 1");

    const TwoLevelWalk walk(model);

    RefreshResult result;
    result.success_population = success_population;
    result.stopping_steps.assign(n_samples, 0);

    parallel_for(n_samples, n_threads, [&](long lo, long hi) {
        for (long i = lo; i < hi; ++i) {
            Xoshiro256ss rng(derive_stream_seed(master_seed, static_cast<std::uint64_t>(i)));
            double w = model.p;
            long step = 0;
            while (w < success_population) {
                const double p0 = walk.p_cool(w);
                const int outcome = rng.uniform01() < p0 ? 0 : 1;
                w = walk.update(w, outcome, outcome == 0 ? p0 : 1.0 - p0);
                ++step;
                if (w < model.p) w = model.p;  // refresh to the initial state
            }
            result.stopping_steps[i] = step;
        }
    });

    CompensatedSum acc;
    for (long s : result.stopping_steps) acc.add(static_cast<double>(s));
    result.mean_steps = acc.sum / n_samples;
    CompensatedSum var;
    for (long s : result.stopping_steps) {
        const double d = static_cast<double>(s) - result.mean_steps;
        var.add(d * d);
    }
    result.std_steps = n_samples > 1 ? std::sqrt(var.sum / (n_samples - 1)) : 0.0;
    return result;
}

RefreshFit fit_refresh_scaling(const std::vector<std::pair<double, double>>& gap_p_cells, double t,
                               long n_samples, std::uint64_t master_seed, double success_population,
                               int n_threads) {
    if (gap_p_cells.empty()) throw std::invalid_argument("fit_refresh_scaling: empty sweep");

    RefreshFit fit;
    double num = 0.0, den = 0.0;
    std::uint64_t cell_index = 0;
    for (const auto& [gap, p] : gap_p_cells) {
        const TwoLevelModel model = TwoLevelModel::from_gap(gap, p, t);
        const RefreshResult res = run_optimal_refresh_mc(
            model, n_samples, derive_stream_seed(master_seed, 0xc001d00dULL + cell_index),
            success_population, n_threads);
        const double x = 1.0 / ((gap * t) * (gap * t) * p);
        num += res.mean_steps * x;
        den += x * x;
        fit.cells.push_back(RefreshCell{gap, t, p, res.mean_steps, res.std_steps, n_samples,
                                        res.mean_steps / x});
        ++cell_index;
    }
    fit.c1 = num / den;
    return fit;
}

}  // namespace qcool
