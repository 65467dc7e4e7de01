#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>

#include <Eigen/Dense>

namespace metamorph {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr int kMaxSites = 12;

// 2^N; throws ArgumentError unless 1 <= sites <= kMaxSites.
std::size_t hilbert_dimension(int sites);

// One z-basis spin arrangement. Bit (l-1) of the index stores site l;
// bit 0 is sigma^z = +1, bit 1 is sigma^z = -1.
struct Configuration {
    std::uint32_t index = 0;

    constexpr bool bit(int site) const { return (index >> (site - 1)) & 1u; }
    constexpr int spin(int site) const { return bit(site) ? -1 : 1; }
    constexpr Configuration flipped(int site) const { return {index ^ (1u << (site - 1))}; }

    friend constexpr bool operator==(Configuration, Configuration) = default;
};

// Validated construction: index < 2^sites.
Configuration make_configuration(int sites, std::uint64_t index);
// Configuration with the given sites (1-based) set to sigma^z = -1.
Configuration configuration_from_down_sites(int sites, std::initializer_list<int> down);

class StateVector {
public:
    StateVector(int sites, Vector amplitudes);

    static StateVector basis(int sites, Configuration c);

    int sites() const noexcept { return sites_; }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(amplitudes_.size()); }
    const Vector& amplitudes() const noexcept { return amplitudes_; }
    Complex operator[](std::size_t l) const { return amplitudes_[static_cast<Eigen::Index>(l)]; }
    double probability(std::size_t l) const { return std::norm((*this)[l]); }
    double norm() const { return amplitudes_.norm(); }

    StateVector normalized() const;

private:
    int sites_;
    Vector amplitudes_;
};

// Dense complex matrix that equals its conjugate transpose.
class HermitianOperator {
public:
    // Throws ValidationError when ||M - M^dagger||_max > tolerance; stores (M + M^dagger)/2.
    explicit HermitianOperator(Matrix m, double tolerance = 1e-12);

    const Matrix& matrix() const noexcept { return m_; }
    Eigen::Index dimension() const noexcept { return m_.rows(); }

private:
    Matrix m_;
};

// Dense complex matrix with U^dagger U = 1.
class UnitaryOperator {
public:
    // Throws ValidationError when ||U^dagger U - 1||_max > tolerance.
    explicit UnitaryOperator(Matrix m, double tolerance = 1e-10);

    // For propagators that are unitary by construction; callers own the guarantee.
    static UnitaryOperator unchecked(Matrix m);

    const Matrix& matrix() const noexcept { return m_; }
    Eigen::Index dimension() const noexcept { return m_.rows(); }

    StateVector apply(const StateVector& psi) const;

private:
    struct Unchecked {};
    UnitaryOperator(Matrix m, Unchecked) : m_(std::move(m)) {}
    Matrix m_;
};

double max_abs(const Matrix& m);
double hermiticity_defect(const Matrix& m);
double unitarity_defect(const Matrix& m);

enum class PauliAxis { x, y, z };

// sigma^axis on a 1-based site. Conventions: sigma^y|0> = i|1>, sigma^y|1> = -i|0>.
StateVector apply_pauli(PauliAxis axis, int site, const StateVector& psi);

// <psi|sigma^z_site|psi>
double local_magnetization(const StateVector& psi, int site);
// (1/N) sum_l <psi|sigma^z_l|psi>
double total_magnetization(const StateVector& psi);

// (1/N) sum_l s_l for a basis configuration; exact.
double configuration_magnetization(int sites, Configuration c);

}  // namespace metamorph
