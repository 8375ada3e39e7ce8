// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. --quick switches the long Monte Carlo runs to the reduced
// 2000-sample mode with proportionally wider bars.

#include "qcool/cli.hpp"
#include "qcool/cooling.hpp"
#include "qcool/repro.hpp"
#include "qcool/rng.hpp"
#include "qcool/scaling.hpp"
#include "qcool/spectral.hpp"
#include "qcool/walk.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace qcool;
using qcool::testing::random_hermitian;
using qcool::testing::random_pure;
using qcool::testing::random_unitary;

namespace {

constexpr double kPi = std::numbers::pi;
bool g_quick = false;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool condition, const std::string& what) {
        if (!condition) {
            pass = false;
            detail << (detail.str().empty() ? "" : "; ") << what;
        }
    }
};

CoolingParams random_params(Xoshiro256ss& rng) {
    return CoolingParams::from_gamma(4.0 * rng.uniform01() - 2.0, 2.0 * kPi * rng.uniform01() - kPi);
}

QuantumState ratio_state(const SpectralDecomposition& spec, double we, double wg) {
    return QuantumState::pure_normalized(std::sqrt(we) * spec.eigenvector(1) +
                                         std::sqrt(wg) * spec.eigenvector(0));
}

// 1. Operator completeness over 100 random (H, t, gamma), dims 2-16.
Outcome criterion_completeness() {
    Outcome out;
    Xoshiro256ss rng(101);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index dim = 2 + static_cast<Eigen::Index>(rng.next() % 15);
        const auto spec = eigendecompose(HermitianOperator(random_hermitian(dim, rng)));
        const auto jumps = jump_operators(spec, random_params(rng));
        const double residual = (jumps.lambda_minus.adjoint() * jumps.lambda_minus +
                                 jumps.lambda_plus.adjoint() * jumps.lambda_plus -
                                 Matrix::Identity(dim, dim))
                                    .cwiseAbs()
                                    .maxCoeff();
        worst = std::max(worst, residual);
    }
    out.detail << "max residual " << worst;
    out.require(worst < 1e-12, "completeness residual above 1e-12");
    return out;
}

// 2. ||Lambda_{-+} |e_k>||^2 = (1 -+ sin phi_k)/2 over 100 random instances.
Outcome criterion_eigen_norms() {
    Outcome out;
    Xoshiro256ss rng(202);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index dim = 2 + static_cast<Eigen::Index>(rng.next() % 15);
        const auto spec = eigendecompose(HermitianOperator(random_hermitian(dim, rng)));
        const auto params = random_params(rng);
        const auto jumps = jump_operators(spec, params);
        for (Eigen::Index k = 0; k < dim; ++k) {
            const double s = std::sin(eigenphase(spec.energies[k], params));
            worst = std::max(worst, std::abs((jumps.lambda_minus * spec.eigenvector(k)).squaredNorm() -
                                             0.5 * (1.0 - s)));
            worst = std::max(worst, std::abs((jumps.lambda_plus * spec.eigenvector(k)).squaredNorm() -
                                             0.5 * (1.0 + s)));
        }
    }
    out.detail << "max deviation " << worst;
    out.require(worst < 1e-12, "eigen-norm law violated beyond 1e-12");
    return out;
}

// 3. Single-module analytics for theta in {0, 10, ..., 90} deg.
Outcome criterion_single_module() {
    Outcome out;
    const auto spec = eigendecompose(HermitianOperator::sigma_z());
    double worst = 0.0;
    for (int deg = 0; deg <= 90; deg += 10) {
        const double theta = deg * kPi / 180.0;
        const auto a = single_module_analytics(theta);
        worst = std::max(worst, std::abs(a.bloch_y - std::cos(theta)));
        worst = std::max(worst, std::abs(a.bloch_z + std::sin(theta)));

        // ratio rescaling per cooling event, cross-multiplied to dodge 0/0
        const double s = std::sin(theta);
        worst = std::max(worst, std::abs(a.pop_excited * (1.0 + s) - a.pop_ground * (1.0 - s)));

        const auto params = CoolingParams::from_theta(kPi / 2.0, theta);
        const ModuleOutcome first =
            apply_module(ratio_state(spec, 0.5, 0.5), spec, params);
        if (first.post_cool && first.p_cool >= 1e-14) {
            const ModuleOutcome second = apply_module(*first.post_cool, spec, params);
            if (second.post_cool) {
                const Vector c1 = spec.eigenvectors.adjoint() * first.post_cool->amplitudes();
                const Vector c2 = spec.eigenvectors.adjoint() * second.post_cool->amplitudes();
                const double lhs = std::norm(c2[1]) * std::norm(c1[0]) * (1.0 + s);
                const double rhs = std::norm(c2[0]) * std::norm(c1[1]) * (1.0 - s);
                worst = std::max(worst, std::abs(lhs - rhs));
            }
        }
    }
    out.detail << "max deviation " << worst;
    out.require(worst < 1e-10, "single-module analytics off beyond 1e-10");
    return out;
}

// 4. theta = 0 invariance and sigma_z / sigma_x equality of the fig4a map.
Outcome criterion_theta0_invariance() {
    Outcome out;
    const auto scenario = builtin_scenario("fig4a_map");
    const auto tables = run_scenario(scenario, 42);
    const auto& table = tables[0];

    std::map<std::string, double> theta0_energy;
    std::map<std::string, double> energies;
    for (const auto& row : table.rows) {
        const std::string ham = std::get<std::string>(row[0]);
        const std::string ratio = std::get<std::string>(row[1]);
        const double theta = std::get<double>(row[2]);
        const auto step = std::get<std::int64_t>(row[3]);
        const double energy = std::get<double>(row[4]);
        if (theta == 0.0) {
            const std::string key = ham + "|" + ratio;
            const auto [it, fresh] = theta0_energy.emplace(key, energy);
            if (!fresh) {
                out.require(std::abs(it->second - energy) <= 1e-12,
                            "theta=0 energy drift for " + key + " step " + std::to_string(step));
            }
        }
        energies[ham + "|" + ratio + "|" + std::to_string(theta) + "|" + std::to_string(step)] = energy;
    }
    for (const auto& [key, energy] : energies) {
        if (key.rfind("sigma_z|", 0) == 0) {
            const std::string mirror = "sigma_x|" + key.substr(std::strlen("sigma_z|"));
            const auto it = energies.find(mirror);
            out.require(it != energies.end() && std::abs(it->second - energy) <= 1e-12,
                        "sigma_z/sigma_x mismatch at " + key);
        }
    }
    out.detail << table.rows.size() << " map entries";
    return out;
}

// 5. Evaporative oracle: steps 1 and 2 share the mean energy for all theta.
Outcome criterion_step_equality() {
    Outcome out;
    const auto spec = eigendecompose(HermitianOperator::sigma_z());
    double worst = 0.0;
    for (int deg = 0; deg <= 90; deg += 10) {
        const auto params = CoolingParams::from_theta_deg(kPi / 2.0, deg);
        const auto ensemble = enumerate_outcome_tree(ratio_state(spec, 0.5, 0.5), spec, params,
                                                     Strategy{StrategyKind::evaporative, -1}, 2);
        worst = std::max(worst,
                         std::abs(ensemble.per_step[1].mean_energy - ensemble.per_step[2].mean_energy));
    }
    out.detail << "max |E1 - E2| = " << worst;
    out.require(worst <= 1e-12, "step-1/step-2 energies differ beyond 1e-12");
    return out;
}

// 6. Ten-step strategy ordering and recycling mass conservation.
Outcome criterion_strategy_ordering() {
    Outcome out;
    const auto spec = eigendecompose(HermitianOperator::sigma_z());
    const auto params = CoolingParams::from_theta_deg(kPi / 2.0, 10.0);
    const auto initial = ratio_state(spec, 0.5, 0.5);
    const auto rows = compare_strategies(initial, spec, params, 10);
    const auto recycle = enumerate_outcome_tree(initial, spec, params,
                                                Strategy{StrategyKind::recycling, -1}, 10);
    for (const auto& row : rows) {
        out.require(row.e_evap <= row.e_recycle + 1e-12,
                    "evaporative above recycling at step " + std::to_string(row.step));
    }
    for (const auto& step : recycle.per_step) {
        out.require(std::abs(step.total_probability - 1.0) <= 1e-12,
                    "recycling mass differs from 1 at step " + std::to_string(step.step));
    }
    out.detail << "delta at step 10 = " << rows[10].e_recycle - rows[10].e_evap;
    return out;
}

// 7. Oracle vs sampler over 1e5 seeded trajectories, three steps.
Outcome criterion_sampler_consistency() {
    Outcome out;
    const auto spec = eigendecompose(HermitianOperator::sigma_z());
    struct Case {
        double we, wg, theta_deg;
        StrategyKind kind;
    };
    const std::vector<Case> cases = {{0.5, 0.5, 10.0, StrategyKind::evaporative},
                                     {0.5, 0.5, 10.0, StrategyKind::recycling},
                                     {0.8, 0.2, 30.0, StrategyKind::evaporative}};
    double worst_pull = 0.0;
    for (const auto& c : cases) {
        const auto params = CoolingParams::from_theta_deg(kPi / 2.0, c.theta_deg);
        const auto initial = ratio_state(spec, c.we, c.wg);
        const Strategy strategy{c.kind, -1};
        const auto tree = enumerate_outcome_tree(initial, spec, params, strategy, 3);
        const auto sampled = sample_ensemble(initial, spec, params, strategy, 3, 100000, 4242, 0);
        for (int step = 1; step <= 3; ++step) {
            const auto& mc = sampled.per_step[step - 1];
            const double pull =
                std::abs(mc.mean_energy - tree.per_step[step].mean_energy) / std::max(mc.std_error, 1e-15);
            worst_pull = std::max(worst_pull, pull);
        }
    }
    out.detail << "worst pull " << worst_pull << " sigma";
    out.require(worst_pull <= 4.0, "sampler deviates from the oracle beyond 4 standard errors");
    return out;
}

// 8. Boundary-constant formulas, exact integers.
Outcome criterion_cost_formulas() {
    Outcome out;
    const auto low = predicted_costs(0.01, 1.0, 0.2, 2.7);
    const auto high = predicted_costs(0.02, 1.0, 0.2, 2.7);
    out.require(low.pred == 135000 && low.c_bound == 405000 && low.c_abs == 1350,
                "gap 0.01 constants wrong");
    out.require(high.pred == 33750 && high.c_bound == 101250 && high.c_abs == 675,
                "gap 0.02 constants wrong");
    out.detail << "(135000, 405000, 1350) and (33750, 101250, 675)";
    return out;
}

// 9. Bounded-walk fidelity plateau near 0.76 at both gaps.
Outcome criterion_mc_plateau() {
    Outcome out;
    const long samples = g_quick ? 2000 : 10000;
    std::vector<MCSummary> plain, filtered;
    for (const double gap : {0.01, 0.02}) {
        MCConfig config;
        config.model = TwoLevelModel::from_gap(gap, 0.2, 1.0, 0.0);
        config.n_samples = samples;
        config.master_seed = 909;
        const auto summary = run_bounded_mc(config);
        plain.push_back(summary);
        config.filter_bound_reachers = true;
        filtered.push_back(run_bounded_mc(config));
        out.detail << "gap " << gap << ": fidelity " << summary.mean_fidelity << " +- "
                   << summary.error_bar << ", bound " << summary.fraction_reached_bound << "; ";
    }
    const double slack = g_quick ? std::sqrt(10000.0 / samples) : 1.0;
    for (std::size_t i = 0; i < plain.size(); ++i) {
        out.require(std::abs(plain[i].mean_fidelity - 0.76) <= 0.03 * slack,
                    "fidelity leaves the 0.76 plateau");
        out.require(std::abs(plain[i].fraction_reached_bound - 0.20) <= 0.05 * slack,
                    "bound-reaching fraction leaves 0.20 +- 0.05");
        out.require(filtered[i].mean_fidelity > plain[i].mean_fidelity,
                    "filtered fidelity is not strictly higher");
    }
    out.require(std::abs(plain[0].mean_fidelity - plain[1].mean_fidelity) <=
                    plain[0].error_bar + plain[1].error_bar,
                "gap means disagree beyond combined error bars");
    return out;
}

// 10. Mismatched boundaries move the fidelity beyond the combined bars.
Outcome criterion_mismatched_gap() {
    Outcome out;
    const long samples = g_quick ? 2000 : 10000;
    MCConfig config;
    config.model = TwoLevelModel::from_gap(0.02, 0.2, 1.0, 0.0);
    config.n_samples = samples;
    config.master_seed = 1010;
    const auto matched = run_bounded_mc(config);
    const auto mismatched = run_mismatched_bounds_mc(0.02, 0.01, config);
    const double distance = std::abs(matched.mean_fidelity - mismatched.mean_fidelity);
    out.detail << "matched " << matched.mean_fidelity << " vs assumed-0.01 "
               << mismatched.mean_fidelity;
    out.require(distance > matched.error_bar + mismatched.error_bar,
                "mismatched run indistinguishable from the matched one");
    return out;
}

// 11. Refresh-schedule scaling: one constant fits the (gap, p) sweep.
Outcome criterion_refresh_scaling() {
    Outcome out;
    const long samples = g_quick ? 120 : 300;
    const std::vector<std::pair<double, double>> cells = {
        {0.01, 0.1}, {0.01, 0.2}, {0.01, 0.4}, {0.02, 0.1}, {0.02, 0.2}, {0.02, 0.4}};
    const RefreshFit fit = fit_refresh_scaling(cells, 1.0, samples, 1111, 0.95, 0);
    out.detail << "c1 = " << fit.c1 << "; cells:";
    for (const auto& cell : fit.cells) {
        out.detail << " " << cell.cell_c1;
        out.require(std::abs(cell.cell_c1 - fit.c1) <= 0.3 * fit.c1,
                    "cell constant leaves the +-30% band");
    }
    for (const double p : {0.1, 0.2, 0.4}) {
        double t_small = 0.0, t_large = 0.0;
        for (const auto& cell : fit.cells) {
            if (cell.p == p && cell.gap == 0.01) t_small = cell.mean_steps;
            if (cell.p == p && cell.gap == 0.02) t_large = cell.mean_steps;
        }
        const double ratio = t_small / t_large;
        out.require(ratio >= 4.0 * 0.7 && ratio <= 4.0 * 1.3,
                    "doubling the gap misses the 4x speedup at p = " + std::to_string(p));
    }
    // cutoff sensitivity, reported alongside the fit
    const long probe = g_quick ? 60 : 150;
    for (const double cutoff : {0.90, 0.99}) {
        const RefreshFit other = fit_refresh_scaling(cells, 1.0, probe, 1111, cutoff, 0);
        out.detail << "; c1@" << cutoff << " = " << other.c1;
    }
    return out;
}

// 12. Optical path network vs the circuit route.
Outcome criterion_optical_equivalence() {
    Outcome out;
    const double residual = optical_equivalence_sweep(1000, 1212);
    out.detail << "max residual " << residual;
    out.require(residual < 1e-12, "optical equivalence residual above 1e-12");
    return out;
}

// 13. Boltzmann approximation bound on [0, 0.1].
Outcome criterion_boltzmann() {
    Outcome out;
    double worst_ratio = 0.0;
    for (int i = 0; i <= 10000; ++i) {
        const double x = 0.1 * i / 10000.0;
        const double dev = boltzmann_deviation(x, 1.0);
        out.require(dev <= 0.6 * x * x + 1e-18, "deviation exceeds 0.6 x^2");
        if (x > 0.0) worst_ratio = std::max(worst_ratio, dev / (x * x));
    }
    out.detail << "max dev / x^2 = " << worst_ratio;
    return out;
}

// 14. Repeated feedback-free modules act as an energy measurement.
Outcome criterion_qnd_limit() {
    Outcome out;
    Xoshiro256ss scenario_rng(1414);
    int collapsed = 0;
    const int scenarios = 100;
    for (int scenario = 0; scenario < scenarios; ++scenario) {
        // near-uniform ladder spectrum in a Haar-random basis
        Eigen::VectorXd energies(8);
        for (int k = 0; k < 8; ++k) {
            energies[k] = -1.0 + 2.0 * k / 7.0 + 0.04 * (scenario_rng.uniform01() - 0.5);
        }
        std::sort(energies.data(), energies.data() + 8);
        const Matrix basis = random_unitary(8, scenario_rng);
        const Matrix h = basis * energies.asDiagonal() * basis.adjoint();
        const auto spec = eigendecompose(HermitianOperator(0.5 * (h + h.adjoint())));

        const double t = 1.3 / spec.energies.cwiseAbs().maxCoeff();
        const auto params = CoolingParams::from_gamma(t, 0.0);
        if (!ordering_valid(spec, params)) {
            out.require(false, "generator produced ordering-invalid parameters");
            continue;
        }

        QuantumState state = QuantumState::pure(random_pure(8, scenario_rng));
        Xoshiro256ss traj_rng(derive_stream_seed(1414, scenario));
        for (int step = 0; step < 200; ++step) {
            const ModuleOutcome mod = apply_module(state, spec, params);
            const bool cool = mod.p_heat < 1e-14 ||
                              (mod.p_cool >= 1e-14 && traj_rng.uniform01() < mod.p_cool);
            state = cool ? *mod.post_cool : *mod.post_heat;
        }
        const Vector coeffs = spec.eigenvectors.adjoint() * state.amplitudes();
        double mean = 0.0, second = 0.0;
        for (int k = 0; k < 8; ++k) {
            const double w = std::norm(coeffs[k]);
            mean += w * spec.energies[k];
            second += w * spec.energies[k] * spec.energies[k];
        }
        const double variance = second - mean * mean;
        if (variance < 1e-3) ++collapsed;
    }
    out.detail << collapsed << "/" << scenarios << " trajectories below 1e-3 variance";
    out.require(collapsed >= 95, "fewer than 95% of trajectories collapsed");
    return out;
}

// 15. Bit-identical CSV outputs across runs and thread counts.
Outcome criterion_determinism() {
    Outcome out;
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "qcool_acceptance";
    fs::remove_all(base);

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    auto run = [&](const std::vector<std::string>& args) {
        if (cli_main(args) != 0) out.require(false, "cli invocation failed");
    };

    run({"--seed", "21", "--out", (base / "a").string(), "repro", "fig5_tradeoff"});
    run({"--seed", "21", "--out", (base / "b").string(), "repro", "fig5_tradeoff"});
    out.require(slurp(base / "a" / "fig5_tradeoff.csv") == slurp(base / "b" / "fig5_tradeoff.csv"),
                "repeated scenario runs differ");

    run({"--seed", "33", "--out", (base / "c").string(), "--threads", "1", "mc", "--gap", "0.08",
         "--p", "0.3", "--samples", "2000", "--sweep-gaps", "0.08,0.1"});
    run({"--seed", "33", "--out", (base / "d").string(), "--threads", "2", "mc", "--gap", "0.08",
         "--p", "0.3", "--samples", "2000", "--sweep-gaps", "0.08,0.1"});
    out.require(slurp(base / "c" / "mc_sweep.csv") == slurp(base / "d" / "mc_sweep.csv"),
                "1-thread vs 2-thread sweeps differ");

    run({"--seed", "55", "--out", (base / "e").string(), "walk", "--state", "1:1", "--theta-deg",
         "10", "--steps", "6", "--traj", "50"});
    run({"--seed", "55", "--out", (base / "f").string(), "walk", "--state", "1:1", "--theta-deg",
         "10", "--steps", "6", "--traj", "50"});
    out.require(slurp(base / "e" / "walk.csv") == slurp(base / "f" / "walk.csv"),
                "repeated trajectory runs differ");

    out.detail << "scenario, sweep and trajectory outputs byte-stable";
    return out;
}

struct Criterion {
    int id;
    std::string label;
    std::function<Outcome()> run;
    double limit_seconds;  // 0 = informational only
};

}  // namespace

int main(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        if (std::string(argv[i]) == "--quick") g_quick = true;
    }

    const std::vector<Criterion> criteria = {
        {1, "operator completeness", criterion_completeness, 1.0},
        {2, "eigen-norm law", criterion_eigen_norms, 1.0},
        {3, "single-module analytics", criterion_single_module, 1.0},
        {4, "theta = 0 invariance and basis equality", criterion_theta0_invariance, 1.0},
        {5, "evaporative step-1/step-2 equality", criterion_step_equality, 1.0},
        {6, "strategy ordering over ten steps", criterion_strategy_ordering, 5.0},
        {7, "oracle vs sampler consistency", criterion_sampler_consistency, 30.0},
        {8, "boundary cost formulas", criterion_cost_formulas, 1.0},
        {9, "bounded-walk fidelity plateau", criterion_mc_plateau, 0.0},
        {10, "mismatched-gap sensitivity", criterion_mismatched_gap, 0.0},
        {11, "refresh-schedule scaling", criterion_refresh_scaling, 0.0},
        {12, "optical path equivalence", criterion_optical_equivalence, 1.0},
        {13, "Boltzmann factor bound", criterion_boltzmann, 1.0},
        {14, "repeated modules approach an energy measurement", criterion_qnd_limit, 30.0},
        {15, "bit-identical outputs across runs and threads", criterion_determinism, 0.0},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = criterion.run();
        } catch (const std::exception& e) {
            outcome.pass = false;
            outcome.detail << "exception: " << e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (criterion.limit_seconds > 0.0 && seconds > criterion.limit_seconds) {
            outcome.pass = false;
            outcome.detail << "; exceeded " << criterion.limit_seconds << " s budget";
        }
        if (!outcome.pass) ++failures;
        std::printf("%s  criterion %2d: %s [%.2f s] %s\n", outcome.pass ? "PASS" : "FAIL",
                    criterion.id, criterion.label.c_str(), seconds, outcome.detail.str().c_str());
        std::fflush(stdout);
    }
    if (failures == 0) {
        std::printf("all %zu acceptance criteria passed%s\n", criteria.size(),
                    g_quick ? " (quick mode)" : "");
    } else {
        std::printf("%d acceptance criteria FAILED\n", failures);
    }
    return failures;
}
