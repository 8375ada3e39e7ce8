#pragma once

#include "qcool/cooling.hpp"
#include "qcool/rng.hpp"
#include "qcool/spectral.hpp"
#include "qcool/walk.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace qcool::testing {

inline Complex random_unit_complex(Xoshiro256ss& rng) {
    // Box-Muller pair; good enough as an isotropic component.
    const double u1 = std::max(rng.uniform01(), 1e-300);
    const double u2 = rng.uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phase = 2.0 * std::numbers::pi * u2;
    return Complex(r * std::cos(phase), r * std::sin(phase));
}

inline Matrix random_hermitian(Eigen::Index dim, Xoshiro256ss& rng) {
    Matrix g(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = random_unit_complex(rng);
    }
    return 0.5 * (g + g.adjoint());
}

inline Vector random_pure(Eigen::Index dim, Xoshiro256ss& rng) {
    Vector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = random_unit_complex(rng);
    return v / v.norm();
}

inline Matrix random_density(Eigen::Index dim, Xoshiro256ss& rng) {
    Matrix g(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = random_unit_complex(rng);
    }
    Matrix rho = g * g.adjoint();
    return rho / rho.trace().real();
}

// Haar-distributed unitary via QR of a Ginibre matrix.
inline Matrix random_unitary(Eigen::Index dim, Xoshiro256ss& rng) {
    Matrix g(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = random_unit_complex(rng);
    }
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < dim; ++k) {
        const Complex d = r(k, k);
        q.col(k) *= std::abs(d) > 0 ? d / std::abs(d) : Complex(1.0, 0.0);
    }
    return q;
}

struct PathOracleStep {
    double yield = 0.0;
    double mean_energy = 0.0;
    double ground_probability = 0.0;
};

// Brute-force reference for the outcome tree: walks every outcome bit string
// explicitly, carrying eigenbasis weights multiplied by the raw branch
// factors (1 -+ sin phi_k)/2. Exponential in steps; independent of both
// apply_module and enumerate_outcome_tree.
inline std::vector<PathOracleStep> path_counting_reference(std::vector<double> initial_weights,
                                                           const std::vector<double>& energies,
                                                           const CoolingParams& params,
                                                           int n_steps, StrategyKind kind,
                                                           int threshold) {
    const std::size_t levels = energies.size();
    std::vector<double> cool_factor(levels), heat_factor(levels);
    for (std::size_t k = 0; k < levels; ++k) {
        const double s = std::sin(energies[k] * params.t - params.gamma());
        cool_factor[k] = 0.5 * (1.0 - s);
        heat_factor[k] = 0.5 * (1.0 + s);
    }

    double total = 0.0;
    for (double w : initial_weights) total += w;
    for (double& w : initial_weights) w /= total;

    std::vector<PathOracleStep> acc(n_steps + 1);
    auto deposit = [&](int step, double prob, const std::vector<double>& weights) {
        double mass = 0.0, energy = 0.0;
        for (std::size_t k = 0; k < levels; ++k) {
            mass += weights[k];
            energy += weights[k] * energies[k];
        }
        acc[step].yield += prob;
        acc[step].mean_energy += prob * energy / mass;
        acc[step].ground_probability += prob * weights[0] / mass;
    };
    deposit(0, 1.0, initial_weights);

    struct Frame {
        std::vector<double> weights;  // normalized since the last reset
        int x;
        double prob;
    };

    std::vector<Frame> frontier{{initial_weights, 0, 1.0}};
    for (int step = 1; step <= n_steps; ++step) {
        std::vector<Frame> next;
        next.reserve(frontier.size() * 2);
        for (const auto& f : frontier) {
            for (int bit = 0; bit < 2; ++bit) {
                const auto& factor = bit == 0 ? cool_factor : heat_factor;
                std::vector<double> w(levels);
                double p_branch = 0.0;
                for (std::size_t k = 0; k < levels; ++k) {
                    w[k] = f.weights[k] * factor[k];
                    p_branch += w[k];
                }
                if (p_branch <= 0.0) continue;
                for (double& v : w) v /= p_branch;
                const double prob = f.prob * p_branch;
                int x = f.x + (bit == 0 ? 1 : -1);
                std::vector<double> carried = std::move(w);
                if (x <= threshold) {
                    if (kind == StrategyKind::evaporative) continue;
                    x = 0;
                    carried = initial_weights;
                }
                deposit(step, prob, carried);
                next.push_back(Frame{std::move(carried), x, prob});
            }
        }
        frontier = std::move(next);
    }
    for (auto& step : acc) {
        if (step.yield > 0.0) {
            step.mean_energy /= step.yield;
            step.ground_probability /= step.yield;
        }
    }
    return acc;
}

}  // namespace qcool::testing
