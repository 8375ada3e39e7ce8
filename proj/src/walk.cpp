#include "qcool/walk.hpp"

#include "qcool/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace qcool {

namespace {

struct StateStats {
    double energy = 0.0;
    double ground_prob = 0.0;
};

StateStats stats_of(const QuantumState& s, const SpectralDecomposition& spec) {
    StateStats st;
    if (s.is_pure()) {
        const Vector coeffs = spec.eigenvectors.adjoint() * s.amplitudes();
        st.energy = (coeffs.cwiseAbs2().array() * spec.energies.array()).sum();
        st.ground_prob = std::norm(coeffs[0]);
    } else {
        const Matrix d = spec.eigenvectors.adjoint() * s.density() * spec.eigenvectors;
        st.energy = (d.diagonal().real().array() * spec.energies.array()).sum();
        st.ground_prob = d(0, 0).real();
    }
    return st;
}

void check_strategy(const Strategy& strategy) {
    if (strategy.reset_threshold >= 0) {
        throw std::invalid_argument("Strategy: reset_threshold must be negative");
    }
}

bool states_equal(const QuantumState& a, const QuantumState& b, double tol) {
    if (a.is_pure() != b.is_pure() || a.dim() != b.dim()) return false;
    if (a.is_pure()) {
        return (a.amplitudes() - b.amplitudes()).cwiseAbs().maxCoeff() <= tol;
    }
    return (a.density() - b.density()).cwiseAbs().maxCoeff() <= tol;
}

int sample_outcome(const ModuleOutcome& out, Xoshiro256ss& rng) {
    const double u = rng.uniform01();
    if (out.p_heat < kUnreachableProb) return 0;
    if (out.p_cool < kUnreachableProb) return 1;
    return u < out.p_cool ? 0 : 1;
}

}  // namespace

Walker step_walker(Walker w, int outcome) {
    if (!w.alive) throw std::logic_error("step_walker: walker is not alive");
    if (outcome != 0 && outcome != 1) throw std::invalid_argument("step_walker: outcome must be 0 or 1");
    w.x += outcome == 0 ? 1 : -1;
    w.steps_taken += 1;
    w.outcome_log.push_back(static_cast<std::uint8_t>(outcome));
    return w;
}

Walker apply_boundary(Walker w, const Strategy& strategy, const QuantumState& initial) {
    check_strategy(strategy);
    if (w.x <= strategy.reset_threshold) {
        if (strategy.kind == StrategyKind::evaporative) {
            w.alive = false;
        } else {
            w.state = initial;
            w.x = 0;
            w.resets += 1;
        }
    }
    return w;
}

Trajectory run_trajectory(const QuantumState& initial, const SpectralDecomposition& spec,
                          const CoolingParams& params, const Strategy& strategy, int n_steps,
                          std::uint64_t seed) {
    check_strategy(strategy);
    if (n_steps < 1) throw std::invalid_argument("run_trajectory: n_steps must be >= 1");

    Xoshiro256ss rng(seed);
    const StateStats initial_stats = stats_of(initial, spec);

    Trajectory traj{{}, Walker{0, initial, 0, true, 0, {}}};
    traj.steps.reserve(n_steps);

    for (int step = 1; step <= n_steps && traj.walker.alive; ++step) {
        const ModuleOutcome out = apply_module(traj.walker.state, spec, params);
        const int outcome = sample_outcome(out, rng);

        const QuantumState& post = outcome == 0 ? *out.post_cool : *out.post_heat;
        const double post_energy = outcome == 0 ? *out.energy_cool : *out.energy_heat;

        traj.walker.state = post;
        traj.walker = step_walker(std::move(traj.walker), outcome);
        const long resets_before = traj.walker.resets;
        traj.walker = apply_boundary(std::move(traj.walker), strategy, initial);
        const bool was_reset = traj.walker.resets != resets_before;

        TrajectoryStep rec;
        rec.step = step;
        rec.outcome = outcome;
        rec.x = traj.walker.x;
        if (was_reset) {
            rec.energy = initial_stats.energy;
            rec.ground_probability = initial_stats.ground_prob;
        } else {
            rec.energy = post_energy;
            rec.ground_probability = stats_of(post, spec).ground_prob;
        }
        rec.alive = traj.walker.alive;
        rec.resets = traj.walker.resets;
        traj.steps.push_back(rec);
    }
    return traj;
}

ExactEnsemble enumerate_outcome_tree(const QuantumState& initial, const SpectralDecomposition& spec,
                                     const CoolingParams& params, const Strategy& strategy,
                                     int n_steps) {
    check_strategy(strategy);
    if (n_steps < 1 || n_steps > 25) {
        throw std::invalid_argument("enumerate_outcome_tree: n_steps must be in [1, 25]");
    }

    struct TreeBranch {
        int x;
        QuantumState state;
        double prob;
    };

    auto summarize = [&](int step, const std::vector<TreeBranch>& branches) {
        EnsembleStep row;
        row.step = step;
        double energy_acc = 0.0, ground_acc = 0.0;
        for (const auto& b : branches) {
            row.total_probability += b.prob;
            const StateStats st = stats_of(b.state, spec);
            energy_acc += b.prob * st.energy;
            ground_acc += b.prob * st.ground_prob;
            row.position_distribution[b.x] += b.prob;
        }
        if (row.total_probability > 0.0) {
            row.mean_energy = energy_acc / row.total_probability;
            row.ground_probability = ground_acc / row.total_probability;
        } else {
            row.mean_energy = std::nan("");
            row.ground_probability = std::nan("");
        }
        return row;
    };

    std::vector<TreeBranch> branches{{0, initial, 1.0}};
    ExactEnsemble ensemble;
    ensemble.per_step.push_back(summarize(0, branches));

    for (int step = 1; step <= n_steps; ++step) {
        std::vector<TreeBranch> next;
        next.reserve(branches.size() * 2);

        auto deposit = [&](int x, const QuantumState& state, double prob) {
            for (auto& b : next) {
                if (b.x == x && states_equal(b.state, state, kAlgebraicTol)) {
                    b.prob += prob;
                    return;
                }
            }
            next.push_back(TreeBranch{x, state, prob});
        };

        for (const auto& b : branches) {
            const ModuleOutcome out = apply_module(b.state, spec, params);
            auto child = [&](int move, double p_branch, const std::optional<QuantumState>& post) {
                if (p_branch < kUnreachableProb || !post) return;
                const int x = b.x + move;
                const double prob = b.prob * p_branch;
                if (x <= strategy.reset_threshold) {
                    if (strategy.kind == StrategyKind::recycling) deposit(0, initial, prob);
                    // evaporative: mass is rejected
                } else {
                    deposit(x, *post, prob);
                }
            };
            child(+1, out.p_cool, out.post_cool);
            child(-1, out.p_heat, out.post_heat);
        }

        branches = std::move(next);
        ensemble.per_step.push_back(summarize(step, branches));
        if (branches.empty()) break;
    }
    return ensemble;
}

std::vector<StrategyComparisonRow> compare_strategies(const QuantumState& initial,
                                                      const SpectralDecomposition& spec,
                                                      const CoolingParams& params, int n_steps) {
    const auto evap =
        enumerate_outcome_tree(initial, spec, params, Strategy{StrategyKind::evaporative, -1}, n_steps);
    const auto recy =
        enumerate_outcome_tree(initial, spec, params, Strategy{StrategyKind::recycling, -1}, n_steps);

    std::vector<StrategyComparisonRow> rows;
    rows.reserve(n_steps + 1);
    for (int step = 0; step <= n_steps; ++step) {
        StrategyComparisonRow row;
        row.step = step;
        row.e_evap = step < static_cast<int>(evap.per_step.size()) ? evap.per_step[step].mean_energy
                                                                   : std::nan("");
        row.e_recycle = recy.per_step[step].mean_energy;
        row.delta_e = row.e_recycle - row.e_evap;
        row.yield_evap =
            step < static_cast<int>(evap.per_step.size()) ? evap.per_step[step].total_probability : 0.0;
        rows.push_back(row);
    }
    return rows;
}

SampledEnsemble sample_ensemble(const QuantumState& initial, const SpectralDecomposition& spec,
                                const CoolingParams& params, const Strategy& strategy, int n_steps,
                                long n_trajectories, std::uint64_t master_seed, int n_threads) {
    check_strategy(strategy);
    if (n_steps < 1 || n_trajectories < 1) {
        throw std::invalid_argument("sample_ensemble: n_steps and n_trajectories must be >= 1");
    }

    // Per-trajectory records, reduced in trajectory order afterwards so the
    // result does not depend on the thread count.
    std::vector<double> energy(static_cast<std::size_t>(n_trajectories) * n_steps, 0.0);
    std::vector<double> ground(static_cast<std::size_t>(n_trajectories) * n_steps, 0.0);
    std::vector<std::uint8_t> live(static_cast<std::size_t>(n_trajectories) * n_steps, 0);

    auto worker = [&](long lo, long hi) {
        for (long i = lo; i < hi; ++i) {
            const Trajectory traj =
                run_trajectory(initial, spec, params, strategy, n_steps, derive_stream_seed(master_seed, i));
            for (const auto& rec : traj.steps) {
                if (!rec.alive) break;
                const std::size_t idx = static_cast<std::size_t>(i) * n_steps + (rec.step - 1);
                live[idx] = 1;
                energy[idx] = rec.energy;
                ground[idx] = rec.ground_probability;
            }
        }
    };

    int threads = n_threads > 0 ? n_threads : static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    threads = static_cast<int>(std::min<long>(threads, n_trajectories));

    if (threads == 1) {
        worker(0, n_trajectories);
    } else {
        std::vector<std::thread> pool;
        const long chunk = (n_trajectories + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const long lo = t * chunk;
            const long hi = std::min<long>(lo + chunk, n_trajectories);
            if (lo < hi) pool.emplace_back(worker, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    SampledEnsemble out;
    out.per_step.resize(n_steps);
    for (int step = 0; step < n_steps; ++step) {
        long n = 0;
        double sum = 0.0, comp = 0.0;
        double gsum = 0.0, gcomp = 0.0;
        for (long i = 0; i < n_trajectories; ++i) {
            const std::size_t idx = static_cast<std::size_t>(i) * n_steps + step;
            if (!live[idx]) continue;
            ++n;
            double y = energy[idx] - comp;
            double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            y = ground[idx] - gcomp;
            t = gsum + y;
            gcomp = (t - gsum) - y;
            gsum = t;
        }
        auto& row = out.per_step[step];
        row.step = step + 1;
        row.survivors = n;
        if (n > 0) {
            row.mean_energy = sum / n;
            row.ground_probability = gsum / n;
            double var = 0.0;
            for (long i = 0; i < n_trajectories; ++i) {
                const std::size_t idx = static_cast<std::size_t>(i) * n_steps + step;
                if (!live[idx]) continue;
                const double d = energy[idx] - row.mean_energy;
                var += d * d;
            }
            row.std_error = n > 1 ? std::sqrt(var / (n - 1) / n) : 0.0;
        } else {
            row.mean_energy = std::nan("");
            row.ground_probability = std::nan("");
            row.std_error = std::nan("");
        }
    }
    return out;
}

}  // namespace qcool
