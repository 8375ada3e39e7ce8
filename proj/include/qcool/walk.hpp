#pragma once

#include "qcool/cooling.hpp"
#include "qcool/spectral.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace qcool {

enum class StrategyKind { evaporative, recycling };

/// Boundary policy for the feedback walk. The walker is rejected
/// (evaporative) or reset to the initial state (recycling) once its position
/// drops to reset_threshold, which must be negative.
struct Strategy {
    StrategyKind kind = StrategyKind::evaporative;
    int reset_threshold = -1;
};

struct Walker {
    int x = 0;
    QuantumState state;
    long steps_taken = 0;
    bool alive = true;       // evaporative walkers die at the boundary
    long resets = 0;         // recycling resets so far
    std::vector<std::uint8_t> outcome_log;
};

/// Outcome 0 moves the walker up, outcome 1 moves it down. The boundary is
/// applied separately by apply_boundary.
Walker step_walker(Walker w, int outcome);

Walker apply_boundary(Walker w, const Strategy& strategy, const QuantumState& initial);

struct TrajectoryStep {
    int step = 0;
    int outcome = 0;
    int x = 0;
    double energy = 0.0;  // energy of the walker's state after the boundary
    double ground_probability = 0.0;
    bool alive = true;
    long resets = 0;
};

struct Trajectory {
    std::vector<TrajectoryStep> steps;
    Walker walker;
};

/// One stochastic feedback trajectory. Outcomes are sampled from the module
/// probabilities; fully deterministic for a given seed.
Trajectory run_trajectory(const QuantumState& initial, const SpectralDecomposition& spec,
                          const CoolingParams& params, const Strategy& strategy, int n_steps,
                          std::uint64_t seed);

struct EnsembleStep {
    int step = 0;
    double total_probability = 0.0;  // yield; identically 1 under recycling
    double mean_energy = 0.0;        // over surviving (evap) or all (recycling) mass
    double ground_probability = 0.0;
    std::map<int, double> position_distribution;
};

struct ExactEnsemble {
    std::vector<EnsembleStep> per_step;  // index 0 is the initial state
};

/// Exact propagation of every measurement branch (no sampling). Branches are
/// merged when they share the walker position and the same state to 1e-12,
/// which keeps the tree polynomial. n_steps <= 25.
ExactEnsemble enumerate_outcome_tree(const QuantumState& initial, const SpectralDecomposition& spec,
                                     const CoolingParams& params, const Strategy& strategy,
                                     int n_steps);

struct StrategyComparisonRow {
    int step = 0;
    double e_evap = 0.0;
    double e_recycle = 0.0;
    double delta_e = 0.0;  // e_recycle - e_evap
    double yield_evap = 0.0;
};

std::vector<StrategyComparisonRow> compare_strategies(const QuantumState& initial,
                                                      const SpectralDecomposition& spec,
                                                      const CoolingParams& params, int n_steps);

struct SampledEnsembleStep {
    int step = 0;
    long survivors = 0;
    double mean_energy = 0.0;
    double std_error = 0.0;
    double ground_probability = 0.0;
};

struct SampledEnsemble {
    std::vector<SampledEnsembleStep> per_step;  // steps 1..n
};

/// Monte Carlo counterpart of enumerate_outcome_tree. Trajectory i draws its
/// stream from (master_seed, i); the aggregation order is fixed, so results
/// are bit-identical for any thread count.
SampledEnsemble sample_ensemble(const QuantumState& initial, const SpectralDecomposition& spec,
                                const CoolingParams& params, const Strategy& strategy, int n_steps,
                                long n_trajectories, std::uint64_t master_seed, int n_threads = 0);

}  // namespace qcool
