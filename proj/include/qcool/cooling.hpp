#pragma once

#include "qcool/spectral.hpp"

#include <optional>
#include <vector>

namespace qcool {

/// Module parameters. The energy bias theta is the user-facing knob; the
/// phase-gate angle gamma = theta - pi/2 is derived from it.
struct CoolingParams {
    double t = 0.0;
    double theta = 0.0;

    double gamma() const;

    static CoolingParams from_theta(double t, double theta);
    static CoolingParams from_gamma(double t, double gamma);
    static CoolingParams from_theta_deg(double t, double theta_deg);
};

/// phi_k = E_k t - gamma.
double eigenphase(double energy, const CoolingParams& params);

enum class Branch { cool, heat };

/// Eigenweight multiplier per module application: 1 - sin(phi_k) on the cool
/// branch, 1 + sin(phi_k) on the heat branch.
double scaling_factor(double energy, const CoolingParams& params, Branch branch);

/// |(1 - sin(E t)) - exp(-E t)|, the gap between the cool-branch factor and a
/// Boltzmann weight in the small-(E t), zero-gamma regime.
double boltzmann_deviation(double energy, double t);

struct JumpPair {
    Matrix lambda_minus;
    Matrix lambda_plus;
};

/// Lambda_{-+} = (I -+ i e^{i gamma} U) / 2 with U = exp(-i H t).
JumpPair jump_operators(const SpectralDecomposition& spec, const CoolingParams& params);

// Branch probabilities below this are treated as unreachable; the
// corresponding post-state and energy are left empty instead of dividing by
// a vanishing norm.
inline constexpr double kUnreachableProb = 1e-14;

struct ModuleOutcome {
    double p_cool = 0.0;
    double p_heat = 0.0;
    std::optional<QuantumState> post_cool;
    std::optional<QuantumState> post_heat;
    double energy_in = 0.0;
    std::optional<double> energy_cool;
    std::optional<double> energy_heat;
};

/// One application of the cooling module: branch probabilities, normalized
/// post-states and their energies. Works for pure and mixed inputs.
ModuleOutcome apply_module(const QuantumState& state, const SpectralDecomposition& spec,
                           const CoolingParams& params);

struct PhaseRangeReport {
    std::vector<bool> per_level;  // phi_k wrapped to (-pi, pi] lies in [-pi/2, pi/2)
    bool all = true;
};

/// Diagnostic only: the sufficient phase-window condition. Not enforced;
/// ordering_valid is the precondition that actually matters for cooling.
PhaseRangeReport phase_range_valid(const SpectralDecomposition& spec, const CoolingParams& params);

/// True iff the cool-branch factors 1 - sin(phi_k) are non-increasing in E_k.
bool ordering_valid(const SpectralDecomposition& spec, const CoolingParams& params);

}  // namespace qcool
