#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace qcool {

/// Two-level reduction of the cooling walk: energies E0 < E1, initial ground
/// population p, evolution time t and bias gamma. The per-step drift
/// parameters are a = sin(E0 t - gamma)/2 and b = sin(E1 t - gamma)/2.
struct TwoLevelModel {
    double e0 = -1.0;
    double e1 = 0.0;
    double p = 0.5;
    double t = 1.0;
    double gamma = 0.0;

    double gap() const { return e1 - e0; }
    double a() const;
    double b() const;

    /// Convention used throughout the sweeps: E0 = -gap, E1 = 0.
    static TwoLevelModel from_gap(double gap, double p, double t = 1.0, double gamma = 0.0);

    void validate() const;
};

/// Distribution of the number j of 0-outcomes after k feedback-free steps:
/// a p-weighted mixture of two binomials with parameters (1/2 - a) and
/// (1/2 - b). Evaluated in log space so large k stays finite.
std::vector<double> mixture_pmf(const TwoLevelModel& model, long k);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct ConcentrationIntervals {
    Interval ground;   // k(1/2 - a) -+ sqrt(k) sqrt(1/4 - a^2)
    Interval excited;  // same with b
};

ConcentrationIntervals concentration_intervals(const TwoLevelModel& model, long k);

/// True iff the two concentration intervals are disjoint with the excited
/// interval strictly below the ground one.
bool separation_satisfied(const TwoLevelModel& model, long k);

struct CostEstimate {
    long pred = 0;     // round(c1 / ((gap t)^2 p))
    long c_bound = 0;  // round(3 pred)
    long c_abs = 0;    // round(pred |sin(E0 t)|)
};

CostEstimate predicted_costs(double gap, double t, double p, double c1 = 2.7);

struct MCConfig {
    TwoLevelModel model;
    double c1 = 2.7;
    long n_samples = 10000;
    std::uint64_t master_seed = 1;
    int reflect_threshold = 0;  // reset to the initial state when x <= this
    bool filter_bound_reachers = false;
    int n_threads = 0;  // 0 = hardware concurrency
    std::optional<CostEstimate> boundary_override;  // for mismatched-gap runs

    CostEstimate costs() const;
};

struct StepCountSummary {
    double mean = 0.0;
    double stddev = 0.0;
    long min = 0;
    long max = 0;
};

struct MCSummary {
    double mean_fidelity = 0.0;
    double sample_std = 0.0;
    double error_bar = 0.0;  // 1.96 sample_std / sqrt(n_samples)
    double fraction_reached_bound = 0.0;
    long n_samples = 0;  // trajectories counted toward the mean
    long n_total = 0;
    StepCountSummary steps;
};

/// Bounded random-walk cooling run: reflective reset at x <= threshold,
/// absorbing stop at x = c_abs, hard stop at c_bound steps. The quantum state
/// is the exact two-level ground population, updated in O(1) per step.
MCSummary run_bounded_mc(const MCConfig& config);

/// Same walk, but boundaries computed from an assumed gap while the dynamics
/// use the true one.
MCSummary run_mismatched_bounds_mc(double true_gap, double assumed_gap, MCConfig config);

struct RefreshResult {
    std::vector<long> stopping_steps;
    double mean_steps = 0.0;
    double std_steps = 0.0;
    double success_population = 0.0;
};

/// Optimal-refresh run: the state is reset to the initial one whenever its
/// ground population drops below the initial value; a trajectory stops once
/// the population reaches success_population.
RefreshResult run_optimal_refresh_mc(const TwoLevelModel& model, long n_samples,
                                     std::uint64_t master_seed, double success_population = 0.95,
                                     int n_threads = 0);

struct RefreshCell {
    double gap = 0.0;
    double t = 0.0;
    double p = 0.0;
    double mean_steps = 0.0;
    double std_steps = 0.0;
    long n_samples = 0;
    double cell_c1 = 0.0;  // mean_steps * (gap t)^2 p
};

struct RefreshFit {
    double c1 = 0.0;  // least-squares slope of mean steps vs 1 / ((gap t)^2 p)
    std::vector<RefreshCell> cells;
};

/// Runs run_optimal_refresh_mc over a (gap, p) sweep and fits the single
/// multiplicative cost constant.
RefreshFit fit_refresh_scaling(const std::vector<std::pair<double, double>>& gap_p_cells, double t,
                               long n_samples, std::uint64_t master_seed,
                               double success_population = 0.95, int n_threads = 0);

}  // namespace qcool
