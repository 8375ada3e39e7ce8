#include "qcool/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace qcool {

namespace {

std::string entry_name(Eigen::Index i, Eigen::Index j) {
    return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

// Canonical global phase: rotate so the first component with |v_i| > 1e-12
// is real positive.
void fix_phase(Eigen::Ref<Vector> v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double mag = std::abs(v[i]);
        if (mag > 1e-12) {
            v *= std::conj(v[i]) / mag;
            return;
        }
    }
}

// Lexicographic comparison of component magnitudes, used to order
// eigenvectors inside a degenerate energy group.
bool magnitude_less(const Vector& a, const Vector& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const double ma = std::abs(a[i]);
        const double mb = std::abs(b[i]);
        if (std::abs(ma - mb) > 1e-12) return ma < mb;
    }
    return false;
}

}  // namespace

HermitianOperator::HermitianOperator(Matrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
        throw std::invalid_argument("HermitianOperator: matrix must be square and nonempty");
    }
    for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
        for (Eigen::Index j = i; j < entries_.cols(); ++j) {
            const Complex diff = entries_(i, j) - std::conj(entries_(j, i));
            if (std::abs(diff) > kHermiticityTol) {
                throw std::invalid_argument("HermitianOperator: entry " + entry_name(i, j) +
                                            " breaks Hermiticity by " + std::to_string(std::abs(diff)));
            }
        }
    }
}

HermitianOperator HermitianOperator::sigma_z() {
    Matrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return HermitianOperator(std::move(m));
}

HermitianOperator HermitianOperator::sigma_x() {
    Matrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return HermitianOperator(std::move(m));
}

HermitianOperator HermitianOperator::identity(Eigen::Index dim) {
    return HermitianOperator(Matrix::Identity(dim, dim));
}

Matrix SpectralDecomposition::reconstruct() const {
    return eigenvectors * energies.asDiagonal() * eigenvectors.adjoint();
}

SpectralDecomposition eigendecompose(const HermitianOperator& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eigendecompose: solver failed to converge");
    }

    SpectralDecomposition spec;
    spec.energies = solver.eigenvalues();  // ascending
    spec.eigenvectors = solver.eigenvectors();

    for (Eigen::Index k = 0; k < spec.dim(); ++k) {
        fix_phase(spec.eigenvectors.col(k));
    }

    // Deterministic order inside degenerate groups.
    const double scale = std::max(1.0, spec.energies.cwiseAbs().maxCoeff());
    Eigen::Index start = 0;
    while (start < spec.dim()) {
        Eigen::Index stop = start + 1;
        while (stop < spec.dim() && spec.energies[stop] - spec.energies[start] <= 1e-10 * scale) ++stop;
        if (stop - start > 1) {
            std::vector<Eigen::Index> order(stop - start);
            std::iota(order.begin(), order.end(), start);
            std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
                return magnitude_less(spec.eigenvectors.col(a), spec.eigenvectors.col(b));
            });
            Matrix block(spec.dim(), stop - start);
            for (Eigen::Index j = 0; j < stop - start; ++j) block.col(j) = spec.eigenvectors.col(order[j]);
            spec.eigenvectors.middleCols(start, stop - start) = block;
        }
        start = stop;
    }
    return spec;
}

UnitaryOperator evolution_operator(const SpectralDecomposition& spec, double t) {
    Vector phases(spec.dim());
    for (Eigen::Index k = 0; k < spec.dim(); ++k) {
        phases[k] = std::exp(Complex(0.0, -spec.energies[k] * t));
    }
    return UnitaryOperator{spec.eigenvectors * phases.asDiagonal() * spec.eigenvectors.adjoint()};
}

QuantumState QuantumState::pure(Vector amplitudes) {
    const double norm = amplitudes.norm();
    if (std::abs(norm - 1.0) > kStructuralTol) {
        throw std::invalid_argument("QuantumState::pure: norm " + std::to_string(norm) + " is not 1");
    }
    return QuantumState(std::move(amplitudes));
}

QuantumState QuantumState::pure_normalized(Vector amplitudes) {
    const double norm = amplitudes.norm();
    if (norm == 0.0) throw std::invalid_argument("QuantumState::pure_normalized: zero vector");
    return QuantumState(Vector(amplitudes / norm));
}

QuantumState QuantumState::mixed(Matrix density) {
    if (density.rows() != density.cols() || density.rows() == 0) {
        throw std::invalid_argument("QuantumState::mixed: density must be square");
    }
    const double trace = density.trace().real();
    if (std::abs(density.trace().imag()) > kStructuralTol || std::abs(trace - 1.0) > kStructuralTol) {
        throw std::invalid_argument("QuantumState::mixed: trace is not 1");
    }
    if ((density - density.adjoint()).cwiseAbs().maxCoeff() > kStructuralTol) {
        throw std::invalid_argument("QuantumState::mixed: density is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(density, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -kStructuralTol) {
        throw std::invalid_argument("QuantumState::mixed: density has eigenvalue " +
                                    std::to_string(solver.eigenvalues().minCoeff()));
    }
    return QuantumState(std::move(density));
}

Eigen::Index QuantumState::dim() const {
    return is_pure() ? std::get<Vector>(rep_).size() : std::get<Matrix>(rep_).rows();
}

const Vector& QuantumState::amplitudes() const {
    if (!is_pure()) throw std::logic_error("QuantumState: amplitudes() on a mixed state");
    return std::get<Vector>(rep_);
}

const Matrix& QuantumState::density() const {
    if (is_pure()) throw std::logic_error("QuantumState: density() on a pure state");
    return std::get<Matrix>(rep_);
}

Matrix QuantumState::density_matrix() const {
    if (is_pure()) {
        const Vector& a = std::get<Vector>(rep_);
        return a * a.adjoint();
    }
    return std::get<Matrix>(rep_);
}

double expectation(const HermitianOperator& h, const QuantumState& s) {
    if (h.dim() != s.dim()) {
        throw std::invalid_argument("expectation: dimension mismatch");
    }
    Complex value;
    if (s.is_pure()) {
        value = s.amplitudes().dot(h.matrix() * s.amplitudes());
    } else {
        value = (h.matrix() * s.density()).trace();
    }
    if (std::abs(value.imag()) > kStructuralTol) {
        throw std::runtime_error("expectation: imaginary part " + std::to_string(value.imag()));
    }
    return value.real();
}

double fidelity_with_pure(const QuantumState& rho, const QuantumState& target) {
    if (!target.is_pure()) throw std::invalid_argument("fidelity_with_pure: target must be pure");
    if (rho.dim() != target.dim()) throw std::invalid_argument("fidelity_with_pure: dimension mismatch");

    double f;
    if (rho.is_pure()) {
        f = std::norm(target.amplitudes().dot(rho.amplitudes()));
    } else {
        const Complex q = target.amplitudes().dot(rho.density() * target.amplitudes());
        if (std::abs(q.imag()) > kStructuralTol) {
            throw std::runtime_error("fidelity_with_pure: imaginary part " + std::to_string(q.imag()));
        }
        f = q.real();
    }
    if (f < -kStructuralTol || f > 1.0 + kStructuralTol) {
        throw std::runtime_error("fidelity_with_pure: value " + std::to_string(f) + " outside [0,1]");
    }
    return std::clamp(f, 0.0, 1.0);
}

DominantProjection dominant_eigenvector_projection(const QuantumState& rho) {
    const Matrix density = rho.density_matrix();
    Eigen::SelfAdjointEigenSolver<Matrix> solver(density);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("dominant_eigenvector_projection: solver failed");
    }
    const Eigen::Index top = density.rows() - 1;

    Vector leader = solver.eigenvectors().col(top);
    fix_phase(leader);

    DominantProjection out{QuantumState::pure_normalized(leader), false, std::nullopt};
    if (density.rows() > 1) {
        const double gap = solver.eigenvalues()[top] - solver.eigenvalues()[top - 1];
        if (gap < 1e-9) {
            Vector second = solver.eigenvectors().col(top - 1);
            fix_phase(second);
            out.degenerate = true;
            out.runner_up = QuantumState::pure_normalized(second);
        }
    }
    return out;
}

}  // namespace qcool
