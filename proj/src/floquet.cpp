#include "metamorph/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "metamorph/errors.hpp"

namespace metamorph {

namespace {

constexpr double kUnitarityTolerance = 1e-10;
// Phases this close to -pi are folded onto the closed end +pi of the branch.
constexpr double kBranchSnap = 1e-10;
constexpr double kDegenerateGap = 1e-10;

const Complex kI{0.0, 1.0};

}  // namespace

UnitaryOperator propagator(const HermitianOperator& h, double duration) {
    if (!(duration >= 0.0)) throw ArgumentError("propagator duration must be nonnegative");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
    if (solver.info() != Eigen::Success) throw ValidationError("Hermitian eigendecomposition failed");
    const Vector phases = (-kI * duration * solver.eigenvalues().cast<Complex>()).array().exp();
    const Matrix& v = solver.eigenvectors();
    return UnitaryOperator(v * phases.asDiagonal() * v.adjoint(), kUnitarityTolerance);
}

UnitaryOperator propagator(const Matrix& h, double duration) {
    return propagator(HermitianOperator(h, 1e-10), duration);
}

UnitaryOperator floquet_operator(const ModelParams& params, const DisorderRealization& disorder) {
    const UnitaryOperator u1 = propagator(build_h1(params), params.t1);
    const UnitaryOperator u2 = propagator(build_h2(params, disorder), params.t2);
    const UnitaryOperator u3 = propagator(build_h3(params, disorder), params.t3);
    return UnitaryOperator(u3.matrix() * u2.matrix() * u1.matrix(), kUnitarityTolerance);
}

StructuredFloquet::StructuredFloquet(const ModelParams& params, const DisorderRealization& disorder)
    : sites_(params.sites) {
    params.validate();
    // exp(-i a t sigma^x) = cos(a t) - i sin(a t) sigma^x
    for (int l = 1; l <= sites_; ++l) {
        const double angle = params.t1 * (l % 2 == 1 ? params.rotation_rate
                                                     : params.lambda * params.rotation_rate);
        Eigen::Matrix2cd r;
        r << std::cos(angle), -kI * std::sin(angle), -kI * std::sin(angle), std::cos(angle);
        rotations_.push_back(r);
    }

    const Eigen::VectorXd diag = h2_diagonal(params, disorder);
    phases_ = (-kI * params.t2 * diag.cast<Complex>()).array().exp();

    const double t = params.t3;
    const double hop = 2.0 * (1.0 - params.lambda) * params.flip_flop;
    for (int l = 1; l < sites_; l += 2) {
        const double wa = disorder.fields[l - 1];
        const double wb = disorder.fields[l];
        // local basis: 0 = (+,+), 1 = (-,+), 2 = (+,-), 3 = (-,-)
        const double d0 = params.lambda * (wa + wb);
        const double d1 = params.lambda * (-wa + wb);
        const double d2 = params.lambda * (wa - wb);
        const double d3 = -d0;

        const double mean = 0.5 * (d1 + d2);
        const double half = 0.5 * (d1 - d2);
        const double omega = std::hypot(half, hop);
        const double sinc_t = omega > 0.0 ? std::sin(omega * t) / omega : t;
        const Complex global = std::exp(-kI * mean * t);

        Eigen::Matrix4cd b = Eigen::Matrix4cd::Zero();
        b(0, 0) = std::exp(-kI * d0 * t);
        b(3, 3) = std::exp(-kI * d3 * t);
        b(1, 1) = global * (std::cos(omega * t) - kI * sinc_t * half);
        b(2, 2) = global * (std::cos(omega * t) + kI * sinc_t * half);
        b(1, 2) = global * (-kI * sinc_t * hop);
        b(2, 1) = b(1, 2);
        dimers_.push_back(b);
    }
}

namespace {

template <class M>
void apply_structured(const std::vector<Eigen::Matrix2cd>& rotations, const Vector& phases,
                      const std::vector<Eigen::Matrix4cd>& dimers, M& m) {
    const auto dim = static_cast<std::uint32_t>(m.rows());
    const int sites = static_cast<int>(rotations.size());

    for (int l = 1; l <= sites; ++l) {
        const Eigen::Matrix2cd& r = rotations[l - 1];
        const std::uint32_t mask = 1u << (l - 1);
        for (std::uint32_t c = 0; c < dim; ++c) {
            if (c & mask) continue;
            const auto up = m.row(c).eval();
            const auto down = m.row(c | mask).eval();
            m.row(c) = r(0, 0) * up + r(0, 1) * down;
            m.row(c | mask) = r(1, 0) * up + r(1, 1) * down;
        }
    }

    m = phases.asDiagonal() * m;

    for (std::size_t k = 0; k < dimers.size(); ++k) {
        const Eigen::Matrix4cd& b = dimers[k];
        const std::uint32_t ma = 1u << (2 * k);
        const std::uint32_t mb = 1u << (2 * k + 1);
        for (std::uint32_t c = 0; c < dim; ++c) {
            if (c & (ma | mb)) continue;
            const std::array<std::uint32_t, 4> idx{c, c | ma, c | mb, c | ma | mb};
            using Row = std::decay_t<decltype(m.row(0).eval())>;
            std::array<Row, 4> rows{m.row(idx[0]).eval(), m.row(idx[1]).eval(),
                                    m.row(idx[2]).eval(), m.row(idx[3]).eval()};
            for (int i = 0; i < 4; ++i)
                m.row(idx[i]) = b(i, 0) * rows[0] + b(i, 1) * rows[1] + b(i, 2) * rows[2] +
                                b(i, 3) * rows[3];
        }
    }
}

}  // namespace

void StructuredFloquet::apply(Matrix& columns) const {
    if (static_cast<std::size_t>(columns.rows()) != dimension())
        throw ArgumentError("matrix row count does not match the Hilbert dimension");
    apply_structured(rotations_, phases_, dimers_, columns);
}

void StructuredFloquet::apply(Vector& amplitudes) const {
    if (static_cast<std::size_t>(amplitudes.size()) != dimension())
        throw ArgumentError("state length does not match the Hilbert dimension");
    apply_structured(rotations_, phases_, dimers_, amplitudes);
}

StateVector StructuredFloquet::apply(const StateVector& psi) const {
    Vector v = psi.amplitudes();
    apply(v);
    return StateVector(psi.sites(), std::move(v));
}

Matrix StructuredFloquet::to_dense() const {
    const auto dim = static_cast<Eigen::Index>(dimension());
    Matrix m = Matrix::Identity(dim, dim);
    apply(m);
    return m;
}

UnitaryOperator fast_floquet_operator(const ModelParams& params,
                                      const DisorderRealization& disorder) {
    return UnitaryOperator(StructuredFloquet(params, disorder).to_dense(), kUnitarityTolerance);
}

UnitaryOperator build_floquet(const ModelParams& params, const DisorderRealization& disorder,
                              PropagatorPath path) {
    return path == PropagatorPath::dense ? floquet_operator(params, disorder)
                                         : fast_floquet_operator(params, disorder);
}

StateVector FloquetResult::state(std::size_t alpha, int sites) const {
    return StateVector(sites, states.col(static_cast<Eigen::Index>(alpha)));
}

namespace {

// H = Re F + c Im F commutes with F and shares its eigenvectors. Levels of H that are close
// hold at most a few eigenvalues of F, which a small Schur step separates. Returns false when
// the result fails to reproduce F; callers then fall back to a full Schur decomposition.
bool split_eigenbasis(const Matrix& f, Matrix& q, std::vector<Complex>& values) {
    constexpr double mix = 0.6180339887498949;
    constexpr double cluster_gap = 1e-6;
    const Eigen::Index dim = f.rows();
    const Matrix fa = f.adjoint();
    Matrix h = (f + fa) * 0.5 + (f - fa) * Complex(0.0, -0.5 * mix);
    h = ((h + h.adjoint()) * 0.5).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    if (solver.info() != Eigen::Success) return false;
    const Eigen::VectorXd& w = solver.eigenvalues();
    const Matrix& basis = solver.eigenvectors();
    const Matrix fb = f * basis;

    q.resize(dim, dim);
    values.assign(static_cast<std::size_t>(dim), Complex{});
    for (Eigen::Index begin = 0; begin < dim;) {
        Eigen::Index end = begin + 1;
        while (end < dim && w[end] - w[end - 1] < cluster_gap) ++end;
        const Eigen::Index m = end - begin;
        if (m == 1) {
            q.col(begin) = basis.col(begin);
            values[static_cast<std::size_t>(begin)] = basis.col(begin).dot(fb.col(begin));
        } else {
            const Matrix block = basis.middleCols(begin, m).adjoint() * fb.middleCols(begin, m);
            Eigen::ComplexSchur<Matrix> schur(block);
            if (schur.info() != Eigen::Success) return false;
            q.middleCols(begin, m) = basis.middleCols(begin, m) * schur.matrixU();
            for (Eigen::Index k = 0; k < m; ++k)
                values[static_cast<std::size_t>(begin + k)] = schur.matrixT()(k, k);
        }
        begin = end;
    }

    const Eigen::Map<const Vector> lam(values.data(), dim);
    const double residual = (f * q - q * lam.asDiagonal()).cwiseAbs().maxCoeff();
    return residual <= 1e-9;
}

// Schur vectors of a normal matrix form an orthonormal eigenbasis, degenerate levels included.
void schur_eigenbasis(const Matrix& f, Matrix& q, std::vector<Complex>& values) {
    Eigen::ComplexSchur<Matrix> schur(f);
    if (schur.info() != Eigen::Success) throw ValidationError("Schur decomposition failed");
    const Matrix& t = schur.matrixT();
    const Eigen::Index dim = f.rows();
    double off_diagonal = 0.0;
    for (Eigen::Index j = 0; j < dim; ++j)
        for (Eigen::Index i = 0; i < j; ++i) off_diagonal = std::max(off_diagonal, std::abs(t(i, j)));
    if (off_diagonal > 1e-8)
        throw ValidationError("Floquet operator is not normal (Schur residue " +
                              std::to_string(off_diagonal) + ")");
    q = schur.matrixU();
    values.resize(static_cast<std::size_t>(dim));
    for (Eigen::Index a = 0; a < dim; ++a) values[static_cast<std::size_t>(a)] = t(a, a);
}

}  // namespace

FloquetResult diagonalize_floquet(const UnitaryOperator& floquet, double period) {
    if (!(period > 0.0)) throw ArgumentError("period must be positive");
    const Matrix& f = floquet.matrix();
    const Eigen::Index dim = f.rows();

    Matrix q;
    std::vector<Complex> values;
    if (!split_eigenbasis(f, q, values)) schur_eigenbasis(f, q, values);

    using std::numbers::pi;
    std::vector<double> eps(static_cast<std::size_t>(dim));
    std::vector<Complex> lambdas(eps.size());
    std::vector<std::size_t> dominant(eps.size());
    for (Eigen::Index a = 0; a < dim; ++a) {
        const Complex lam = values[static_cast<std::size_t>(a)];
        if (std::abs(std::abs(lam) - 1.0) > kUnitarityTolerance)
            throw ValidationError("Floquet eigenvalue off the unit circle");
        double phase = -std::arg(lam);  // in [-pi, pi)
        if (phase < -pi + kBranchSnap) phase = pi;
        eps[a] = phase / period;
        lambdas[a] = lam;
        Eigen::Index arg_max = 0;
        q.col(a).cwiseAbs2().maxCoeff(&arg_max);
        dominant[a] = static_cast<std::size_t>(arg_max);
    }

    std::vector<std::size_t> order(eps.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return eps[a] < eps[b]; });
    for (std::size_t begin = 0; begin < order.size();) {
        std::size_t end = begin + 1;
        while (end < order.size() && eps[order[end]] - eps[order[end - 1]] < kDegenerateGap) ++end;
        std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(begin),
                         order.begin() + static_cast<std::ptrdiff_t>(end),
                         [&](std::size_t a, std::size_t b) { return dominant[a] < dominant[b]; });
        begin = end;
    }

    // Reordering inside a degenerate run moves states only; the quasienergy column stays sorted.
    std::vector<double> sorted_eps = eps;
    std::sort(sorted_eps.begin(), sorted_eps.end());

    FloquetResult result{floquet, std::move(sorted_eps), {}, Matrix(dim, dim), period};
    result.eigenvalues.reserve(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto src = static_cast<Eigen::Index>(order[k]);
        result.eigenvalues.push_back(lambdas[order[k]]);
        result.states.col(static_cast<Eigen::Index>(k)) = q.col(src);
    }
    return result;
}

FloquetResult diagonalize_floquet(const Matrix& floquet, double period) {
    return diagonalize_floquet(UnitaryOperator(floquet, kUnitarityTolerance), period);
}

HermitianOperator effective_hamiltonian(const FloquetResult& result) {
    const Eigen::Map<const Eigen::VectorXd> eps(result.quasienergies.data(),
                                                static_cast<Eigen::Index>(result.size()));
    const Matrix h = result.states * eps.cast<Complex>().asDiagonal() * result.states.adjoint();
    return HermitianOperator(h, 1e-10);
}

double sparsity_fraction(const HermitianOperator& h, double relative) {
    const Eigen::MatrixXd mags = h.matrix().cwiseAbs();
    const double peak = mags.size() ? mags.maxCoeff() : 0.0;
    if (peak == 0.0) return 0.0;
    const auto count = (mags.array() > relative * peak).count();
    return static_cast<double>(count) / static_cast<double>(mags.size());
}

double eigen_residual(const FloquetResult& result) {
    const Matrix& f = result.floquet.matrix();
    double worst = 0.0;
    for (Eigen::Index a = 0; a < result.states.cols(); ++a) {
        const Vector r = f * result.states.col(a) -
                         result.eigenvalues[static_cast<std::size_t>(a)] * result.states.col(a);
        worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
    return worst;
}

}  // namespace metamorph
