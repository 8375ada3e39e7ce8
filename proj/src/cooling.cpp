#include "qcool/cooling.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qcool {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

// Branch amplitude multiplier on eigenstate k: (1 -+ i e^{-i phi_k}) / 2.
Complex branch_multiplier(double phi, Branch branch) {
    const Complex rot = std::exp(Complex(0.0, -phi));
    const Complex ipart = Complex(0.0, 1.0) * rot;
    return (branch == Branch::cool) ? (1.0 - ipart) * 0.5 : (1.0 + ipart) * 0.5;
}

double wrap_to_pi(double x) {
    const double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(x, two_pi);
    if (r > std::numbers::pi) r -= two_pi;
    if (r <= -std::numbers::pi) r += two_pi;
    return r;
}

}  // namespace

double CoolingParams::gamma() const { return theta - kHalfPi; }

CoolingParams CoolingParams::from_theta(double t, double theta) { return CoolingParams{t, theta}; }

CoolingParams CoolingParams::from_gamma(double t, double gamma) {
    return CoolingParams{t, gamma + kHalfPi};
}

CoolingParams CoolingParams::from_theta_deg(double t, double theta_deg) {
    return CoolingParams{t, theta_deg * std::numbers::pi / 180.0};
}

double eigenphase(double energy, const CoolingParams& params) {
    return energy * params.t - params.gamma();
}

double scaling_factor(double energy, const CoolingParams& params, Branch branch) {
    const double s = std::sin(eigenphase(energy, params));
    return (branch == Branch::cool) ? 1.0 - s : 1.0 + s;
}

double boltzmann_deviation(double energy, double t) {
    const double x = energy * t;
    return std::abs((1.0 - std::sin(x)) - std::exp(-x));
}

JumpPair jump_operators(const SpectralDecomposition& spec, const CoolingParams& params) {
    const Matrix u = evolution_operator(spec, params.t).entries;
    const Matrix biased = Complex(0.0, 1.0) * std::exp(Complex(0.0, params.gamma())) * u;
    const Matrix id = Matrix::Identity(spec.dim(), spec.dim());
    return JumpPair{0.5 * (id - biased), 0.5 * (id + biased)};
}

ModuleOutcome apply_module(const QuantumState& state, const SpectralDecomposition& spec,
                           const CoolingParams& params) {
    if (state.dim() != spec.dim()) {
        throw std::invalid_argument("apply_module: state/spectrum dimension mismatch");
    }
    const Eigen::Index dim = spec.dim();

    Vector mult_cool(dim), mult_heat(dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
        const double phi = eigenphase(spec.energies[k], params);
        mult_cool[k] = branch_multiplier(phi, Branch::cool);
        mult_heat[k] = branch_multiplier(phi, Branch::heat);
    }

    ModuleOutcome out;
    const Matrix& basis = spec.eigenvectors;

    if (state.is_pure()) {
        const Vector coeffs = basis.adjoint() * state.amplitudes();
        out.energy_in = (coeffs.cwiseAbs2().array() * spec.energies.array()).sum();

        auto branch = [&](const Vector& mult, std::optional<QuantumState>& post,
                          std::optional<double>& energy, double& prob) {
            const Vector scaled = mult.cwiseProduct(coeffs);
            prob = scaled.squaredNorm();
            if (prob >= kUnreachableProb) {
                const Vector normalized = scaled / std::sqrt(prob);
                energy = (normalized.cwiseAbs2().array() * spec.energies.array()).sum();
                post = QuantumState::pure_normalized(basis * normalized);
            }
        };
        branch(mult_cool, out.post_cool, out.energy_cool, out.p_cool);
        branch(mult_heat, out.post_heat, out.energy_heat, out.p_heat);
    } else {
        const Matrix d = basis.adjoint() * state.density() * basis;
        out.energy_in = (d.diagonal().real().array() * spec.energies.array()).sum();

        auto branch = [&](const Vector& mult, std::optional<QuantumState>& post,
                          std::optional<double>& energy, double& prob) {
            const Matrix scaled = mult.asDiagonal() * d * mult.conjugate().asDiagonal();
            prob = scaled.trace().real();
            if (prob >= kUnreachableProb) {
                const Matrix normalized = scaled / prob;
                energy = (normalized.diagonal().real().array() * spec.energies.array()).sum();
                post = QuantumState::mixed(basis * normalized * basis.adjoint());
            }
        };
        branch(mult_cool, out.post_cool, out.energy_cool, out.p_cool);
        branch(mult_heat, out.post_heat, out.energy_heat, out.p_heat);
    }
    return out;
}

PhaseRangeReport phase_range_valid(const SpectralDecomposition& spec, const CoolingParams& params) {
    PhaseRangeReport report;
    report.per_level.reserve(spec.dim());
    for (Eigen::Index k = 0; k < spec.dim(); ++k) {
        const double phi = wrap_to_pi(eigenphase(spec.energies[k], params));
        const bool ok = phi >= -kHalfPi && phi < kHalfPi;
        report.per_level.push_back(ok);
        report.all = report.all && ok;
    }
    return report;
}

bool ordering_valid(const SpectralDecomposition& spec, const CoolingParams& params) {
    double prev = scaling_factor(spec.energies[0], params, Branch::cool);
    for (Eigen::Index k = 1; k < spec.dim(); ++k) {
        const double factor = scaling_factor(spec.energies[k], params, Branch::cool);
        if (factor > prev + kAlgebraicTol) return false;
        prev = factor;
    }
    return true;
}

}  // namespace qcool
