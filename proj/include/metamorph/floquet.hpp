#pragma once

#include <array>
#include <vector>

#include "metamorph/hamiltonians.hpp"
#include "metamorph/spin_core.hpp"

namespace metamorph {

// exp(-i H t) through the Hermitian eigendecomposition. Throws ArgumentError for t < 0.
UnitaryOperator propagator(const HermitianOperator& h, double duration);
// Same, for a raw matrix: (H + H^dagger)/2 is used when ||H - H^dagger||_max <= 1e-10,
// otherwise ValidationError.
UnitaryOperator propagator(const Matrix& h, double duration);

// F = U3 U2 U1 with U_k = exp(-i H_k T_k); H1 acts first. Dense reference path.
UnitaryOperator floquet_operator(const ModelParams& params, const DisorderRealization& disorder);

// One drive period factored along the structure of the three segments:
//   U1 = tensor product of single-site x-rotations,
//   U2 = diagonal phases,
//   U3 = product of commuting two-site blocks on the dimers (2k-1, 2k).
// Applying it to a state costs O(N 2^N).
class StructuredFloquet {
public:
    StructuredFloquet(const ModelParams& params, const DisorderRealization& disorder);

    int sites() const noexcept { return sites_; }
    std::size_t dimension() const noexcept { return std::size_t{1} << sites_; }

    const std::vector<Eigen::Matrix2cd>& site_rotations() const noexcept { return rotations_; }
    const Vector& interaction_phases() const noexcept { return phases_; }
    // Local basis of dimer k: index bit(2k-1) + 2 bit(2k).
    const std::vector<Eigen::Matrix4cd>& dimer_blocks() const noexcept { return dimers_; }

    // In-place F applied to every column.
    void apply(Matrix& columns) const;
    void apply(Vector& amplitudes) const;
    StateVector apply(const StateVector& psi) const;

    Matrix to_dense() const;

private:
    int sites_;
    std::vector<Eigen::Matrix2cd> rotations_;
    Vector phases_;
    std::vector<Eigen::Matrix4cd> dimers_;
};

// Structured path assembled into a dense matrix; equals floquet_operator to round-off.
UnitaryOperator fast_floquet_operator(const ModelParams& params, const DisorderRealization& disorder);

enum class PropagatorPath { dense, structured };

UnitaryOperator build_floquet(const ModelParams& params, const DisorderRealization& disorder,
                              PropagatorPath path = PropagatorPath::structured);

struct FloquetResult {
    UnitaryOperator floquet;
    std::vector<double> quasienergies;  // ascending, in (-pi/T, pi/T]
    std::vector<Complex> eigenvalues;   // Lambda_alpha, same order
    Matrix states;                      // column alpha is |Phi_alpha>
    double period = 1.0;

    std::size_t size() const noexcept { return quasienergies.size(); }
    StateVector state(std::size_t alpha, int sites) const;
};

// Quasienergies eps = -arg(Lambda)/T on the principal branch (-pi/T, pi/T]. Within a run of
// degenerate levels (gaps below 1e-10), states are ordered by their dominant configuration.
FloquetResult diagonalize_floquet(const UnitaryOperator& floquet, double period);
// Validating overload: ValidationError unless ||U^dagger U - 1||_max <= 1e-10.
FloquetResult diagonalize_floquet(const Matrix& floquet, double period);

// Principal-branch logarithm: sum_alpha eps_alpha |Phi_alpha><Phi_alpha|.
HermitianOperator effective_hamiltonian(const FloquetResult& result);

// Fraction of entries with |h_ij| > relative * max_ij |h_ij|.
double sparsity_fraction(const HermitianOperator& h, double relative = 1e-3);

// max_alpha ||F Phi_alpha - Lambda_alpha Phi_alpha||_max
double eigen_residual(const FloquetResult& result);

}  // namespace metamorph
