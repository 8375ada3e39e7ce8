#pragma once

#include "qcool/cooling.hpp"
#include "qcool/spectral.hpp"
#include "qcool/table.hpp"
#include "qcool/walk.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace qcool {

/// A figure-style experiment: Hamiltonian, initial state, bias grid, step
/// count and boundary strategy. Members mirror the config-file keys.
struct Scenario {
    std::string name;
    std::string hamiltonian = "sigma_z";
    std::string initial = "1:1";  // "a:b" population ratio, "re,re" amplitudes, or a state file
    double t = 0.0;               // defaulted to pi/2 by normalize()
    std::vector<double> theta_grid_deg = {10.0};
    int steps = 3;
    Strategy strategy{StrategyKind::evaporative, -1};

    std::string canonical_description() const;
};

/// Builds alpha|e> + beta|g> (or a file-supplied state) for the given
/// spectrum. Ratio and amplitude forms require a two-level Hamiltonian.
QuantumState build_initial_state(const std::string& desc, const SpectralDecomposition& spec);

std::vector<std::string> builtin_scenario_names();
Scenario builtin_scenario(const std::string& name);
Scenario parse_scenario_config(const std::filesystem::path& path);

std::vector<ResultTable> run_scenario(const Scenario& scenario, std::uint64_t master_seed);

/// Qualitative checks for a produced table (monotone yield, conserved
/// recycling mass, theta = 0 invariance, ...). Returns human-readable
/// failure descriptions; empty means all checks passed.
std::vector<std::string> check_scenario_tables(const Scenario& scenario,
                                               const std::vector<ResultTable>& tables);

struct FidelityReport {
    double fidelity = 0.0;
    double revised_fidelity = 0.0;
    bool degenerate = false;
    std::optional<double> runner_up_fidelity;
};

/// Plain fidelity plus the fidelity after replacing rho by its dominant
/// eigenvector, which undoes depolarizing admixtures.
FidelityReport revised_fidelity_report(const QuantumState& rho, const QuantumState& theory);

struct SingleModuleAnalytics {
    double p_cool = 0.0;
    double bloch_y = 0.0;  // y coordinate in the frame where the balanced input sits on +y at theta = 0
    double bloch_z = 0.0;  // equals the sigma_z energy of the post-cool state
    double pop_excited = 0.0;
    double pop_ground = 0.0;
};

/// Post-cool readout of one module on (|e> + |g>)/sqrt(2), sigma_z, t = pi/2.
SingleModuleAnalytics single_module_analytics(double theta_rad);

/// Max amplitude residual between the beam-splitter path network and the
/// ancilla-circuit jump operators for H = sigma_z, t = pi/2.
double optical_path_equivalence(Complex alpha, Complex beta, double theta);

/// Largest residual over `trials` random (alpha, beta, theta) draws.
double optical_equivalence_sweep(int trials, std::uint64_t seed);

}  // namespace qcool
