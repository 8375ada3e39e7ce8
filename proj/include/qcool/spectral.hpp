#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <string>
#include <variant>

namespace qcool {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Tolerances used across the library: structural checks (orthonormality,
// reconstruction, normalization) at 1e-10, algebraic identities at 1e-12.
inline constexpr double kHermiticityTol = 1e-12;
inline constexpr double kStructuralTol = 1e-10;
inline constexpr double kAlgebraicTol = 1e-12;

/// A validated Hermitian matrix over a small Hilbert space (dim <= ~1024).
class HermitianOperator {
public:
    explicit HermitianOperator(Matrix entries);

    Eigen::Index dim() const { return entries_.rows(); }
    const Matrix& matrix() const { return entries_; }

    static HermitianOperator sigma_z();
    static HermitianOperator sigma_x();
    static HermitianOperator identity(Eigen::Index dim);

private:
    Matrix entries_;
};

/// Eigenpairs of a Hermitian operator, energies ascending, eigenvectors as
/// orthonormal columns with a canonical global phase (first component of
/// magnitude > 1e-12 made real positive). Within a degenerate energy group
/// the columns are ordered lexicographically by component magnitudes, so
/// identical input yields identical output.
struct SpectralDecomposition {
    RealVector energies;
    Matrix eigenvectors;

    Eigen::Index dim() const { return energies.size(); }
    Vector eigenvector(Eigen::Index k) const { return eigenvectors.col(k); }
    Matrix reconstruct() const;
};

/// Pure amplitude vector of unit norm, or density matrix of unit trace.
class QuantumState {
public:
    static QuantumState pure(Vector amplitudes);
    static QuantumState pure_normalized(Vector amplitudes);
    static QuantumState mixed(Matrix density);

    bool is_pure() const { return std::holds_alternative<Vector>(rep_); }
    Eigen::Index dim() const;

    const Vector& amplitudes() const;  // pure states only
    const Matrix& density() const;     // mixed states only
    Matrix density_matrix() const;     // projector when pure

private:
    explicit QuantumState(Vector v) : rep_(std::move(v)) {}
    explicit QuantumState(Matrix m) : rep_(std::move(m)) {}

    std::variant<Vector, Matrix> rep_;
};

struct UnitaryOperator {
    Matrix entries;
};

SpectralDecomposition eigendecompose(const HermitianOperator& h);

/// U = sum_k exp(-i E_k t) |e_k><e_k|.
UnitaryOperator evolution_operator(const SpectralDecomposition& spec, double t);

/// <psi|H|psi> for pure states, Tr(H rho) for mixed. The imaginary part must
/// vanish to 1e-10 and is discarded.
double expectation(const HermitianOperator& h, const QuantumState& s);

/// F = <target|rho|target>, clamped to [0, 1]. Target must be pure.
double fidelity_with_pure(const QuantumState& rho, const QuantumState& target);

struct DominantProjection {
    QuantumState state;
    bool degenerate = false;                 // top eigenvalue gap < 1e-9
    std::optional<QuantumState> runner_up;  // second candidate when degenerate
};

/// Eigenvector of rho with the largest eigenvalue. When the top two
/// eigenvalues are closer than 1e-9 the result is flagged and carries both
/// candidates.
DominantProjection dominant_eigenvector_projection(const QuantumState& rho);

}  // namespace qcool
