#include "metamorph/spin_core.hpp"

#include <bit>
#include <string>

#include "metamorph/errors.hpp"

namespace metamorph {

std::size_t hilbert_dimension(int sites) {
    if (sites < 1 || sites > kMaxSites)
        throw ArgumentError("site count " + std::to_string(sites) + " outside [1, " +
                            std::to_string(kMaxSites) + "]");
    return std::size_t{1} << sites;
}

Configuration make_configuration(int sites, std::uint64_t index) {
    if (index >= hilbert_dimension(sites))
        throw ArgumentError("configuration index " + std::to_string(index) +
                            " out of range for " + std::to_string(sites) + " sites");
    return {static_cast<std::uint32_t>(index)};
}

Configuration configuration_from_down_sites(int sites, std::initializer_list<int> down) {
    hilbert_dimension(sites);
    Configuration c;
    for (int site : down) {
        if (site < 1 || site > sites)
            throw ArgumentError("site " + std::to_string(site) + " out of range");
        c.index |= 1u << (site - 1);
    }
    return c;
}

StateVector::StateVector(int sites, Vector amplitudes)
    : sites_(sites), amplitudes_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amplitudes_.size()) != hilbert_dimension(sites))
        throw ArgumentError("state vector length " + std::to_string(amplitudes_.size()) +
                            " does not match 2^" + std::to_string(sites));
}

StateVector StateVector::basis(int sites, Configuration c) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(hilbert_dimension(sites)));
    if (c.index >= v.size()) throw ArgumentError("configuration out of range");
    v[c.index] = 1.0;
    return StateVector(sites, std::move(v));
}

StateVector StateVector::normalized() const {
    const double n = norm();
    if (n == 0.0) throw ValidationError("cannot normalize the zero vector");
    return StateVector(sites_, amplitudes_ / n);
}

double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double hermiticity_defect(const Matrix& m) {
    return max_abs(m - m.adjoint());
}

double unitarity_defect(const Matrix& m) {
    return max_abs(m.adjoint() * m - Matrix::Identity(m.rows(), m.cols()));
}

HermitianOperator::HermitianOperator(Matrix m, double tolerance) {
    if (m.rows() != m.cols()) throw ValidationError("operator is not square");
    const double defect = hermiticity_defect(m);
    if (defect > tolerance)
        throw ValidationError("operator is not Hermitian (defect " + std::to_string(defect) + ")");
    m_ = (m + m.adjoint()) * 0.5;
}

UnitaryOperator::UnitaryOperator(Matrix m, double tolerance) {
    if (m.rows() != m.cols()) throw ValidationError("operator is not square");
    const double defect = unitarity_defect(m);
    if (defect > tolerance)
        throw ValidationError("operator is not unitary (defect " + std::to_string(defect) + ")");
    m_ = std::move(m);
}

UnitaryOperator UnitaryOperator::unchecked(Matrix m) {
    return UnitaryOperator(std::move(m), Unchecked{});
}

StateVector UnitaryOperator::apply(const StateVector& psi) const {
    if (static_cast<std::size_t>(m_.cols()) != psi.dimension())
        throw ArgumentError("operator and state dimensions differ");
    return StateVector(psi.sites(), m_ * psi.amplitudes());
}

namespace {

void check_site(const StateVector& psi, int site) {
    if (site < 1 || site > psi.sites())
        throw ArgumentError("site " + std::to_string(site) + " outside [1, " +
                            std::to_string(psi.sites()) + "]");
}

}  // namespace

StateVector apply_pauli(PauliAxis axis, int site, const StateVector& psi) {
    check_site(psi, site);
    const Vector& in = psi.amplitudes();
    Vector out(in.size());
    const std::uint32_t mask = 1u << (site - 1);
    const Complex i{0.0, 1.0};
    for (Eigen::Index l = 0; l < in.size(); ++l) {
        const auto c = static_cast<std::uint32_t>(l);
        const bool down = c & mask;
        switch (axis) {
            case PauliAxis::x:
                out[c ^ mask] = in[l];
                break;
            case PauliAxis::y:
                out[c ^ mask] = down ? -i * in[l] : i * in[l];
                break;
            case PauliAxis::z:
                out[l] = down ? -in[l] : in[l];
                break;
        }
    }
    return StateVector(psi.sites(), std::move(out));
}

double local_magnetization(const StateVector& psi, int site) {
    check_site(psi, site);
    const std::uint32_t mask = 1u << (site - 1);
    double m = 0.0;
    for (std::size_t l = 0; l < psi.dimension(); ++l)
        m += (l & mask) ? -psi.probability(l) : psi.probability(l);
    return m;
}

double total_magnetization(const StateVector& psi) {
    // sum_l s_l(c) = N - 2 popcount(c)
    const int n = psi.sites();
    double m = 0.0;
    for (std::size_t l = 0; l < psi.dimension(); ++l)
        m += psi.probability(l) * (n - 2 * std::popcount(static_cast<unsigned>(l)));
    return m / n;
}

double configuration_magnetization(int sites, Configuration c) {
    hilbert_dimension(sites);
    return static_cast<double>(sites - 2 * std::popcount(c.index)) / sites;
}

}  // namespace metamorph
