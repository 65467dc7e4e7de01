#include "metamorph/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "metamorph/errors.hpp"
#include "oracles.hpp"

using namespace metamorph;
using std::numbers::pi;

namespace {

constexpr ReferenceKind kAllKinds[] = {ReferenceKind::poisson, ReferenceKind::goe, ReferenceKind::coe};

FloquetResult seeded_result(double lambda, std::uint64_t seed, int sites = 8) {
    const auto p = default_params(sites).with_lambda(lambda);
    return diagonalize_floquet(fast_floquet_operator(p, sample_disorder(p, seed)), p.period());
}

double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Haar unitary from the QR decomposition of a complex Ginibre matrix, phases fixed by R's diagonal.
Matrix haar_unitary(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    Matrix z(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) z(i, j) = {normal(rng), normal(rng)};
    Eigen::HouseholderQR<Matrix> qr(z);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j) q.col(j) *= r(j, j) / std::abs(r(j, j));
    return q;
}

}  // namespace

TEST(GapRatios, spec_examples) {
    const std::vector<double> equal{0.0, 0.3, 0.6, 0.9};
    const auto s = gap_ratios(equal);
    ASSERT_EQ(s.ratios.size(), 2u);
    EXPECT_NEAR(s.ratios[0], 1.0, 1e-12);
    EXPECT_NEAR(s.ratios[1], 1.0, 1e-12);

    const std::vector<double> three{0.0, 1.0, 3.0};
    EXPECT_DOUBLE_EQ(gap_ratios(three).ratios.at(0), 0.5);

    const auto r = seeded_result(0.5, 3);
    EXPECT_EQ(gap_ratios(r.quasienergies).ratios.size(), 254u);
}

TEST(GapRatios, rejects_bad_input) {
    const std::vector<double> shorty{0.0, 1.0};
    const std::vector<double> unsorted{0.0, 2.0, 1.0};
    EXPECT_THROW(gap_ratios(shorty), ArgumentError);
    EXPECT_THROW(gap_ratios(unsorted), ArgumentError);
}

TEST(GapRatios, degenerate_conventions) {
    const std::vector<double> levels{0.0, 0.0, 0.0, 1.0, 2.0};
    const auto s = gap_ratios(levels);
    ASSERT_EQ(s.ratios.size(), 3u);
    EXPECT_EQ(s.ratios[0], 1.0);
    EXPECT_EQ(s.ratios[1], 0.0);
    EXPECT_EQ(s.ratios[2], 1.0);
    EXPECT_EQ(s.degenerate_pairs, 1u);
    EXPECT_EQ(s.degenerate_single, 1u);
}

TEST(GapRatios, translation_and_scale_invariance) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> levels(40);
        for (double& e : levels) e = u(rng);
        std::sort(levels.begin(), levels.end());
        const auto base = gap_ratios(levels);
        const double shift = u(rng);
        const double scale = 0.1 + std::abs(u(rng)) * 5.0;
        std::vector<double> moved(levels), scaled(levels);
        for (double& e : moved) e += shift;
        for (double& e : scaled) e *= scale;
        const auto a = gap_ratios(moved);
        const auto b = gap_ratios(scaled);
        for (std::size_t k = 0; k < base.ratios.size(); ++k) {
            EXPECT_GE(base.ratios[k], 0.0);
            EXPECT_LE(base.ratios[k], 1.0);
            EXPECT_NEAR(a.ratios[k], base.ratios[k], 1e-9);
            EXPECT_NEAR(b.ratios[k], base.ratios[k], 1e-12);
        }
    }
}

TEST(ReferenceDensity, point_values) {
    EXPECT_DOUBLE_EQ(reference_density(ReferenceKind::poisson, 0.0), 2.0);
    EXPECT_DOUBLE_EQ(reference_density(ReferenceKind::goe, 0.0), 0.0);
    EXPECT_NEAR(reference_density(ReferenceKind::coe, 0.0), 0.0, 1e-15);
    EXPECT_NEAR(reference_density(ReferenceKind::poisson, 1.0), 0.5, 1e-15);
    EXPECT_NEAR(reference_density(ReferenceKind::goe, 1.0), 27.0 / 4.0 * 2.0 / std::pow(3.0, 2.5), 1e-15);
}

TEST(ReferenceDensity, out_of_range) {
    for (auto k : kAllKinds) {
        EXPECT_THROW(reference_density(k, -1e-9), ArgumentError);
        EXPECT_THROW(reference_density(k, 1.0 + 1e-9), ArgumentError);
        EXPECT_THROW(reference_density(k, std::nan("")), ArgumentError);
    }
    EXPECT_THROW(parse_reference_kind("gue"), ArgumentError);
    for (auto k : kAllKinds) EXPECT_EQ(parse_reference_kind(to_string(k)), k);
}

TEST(ReferenceDensity, nonnegative_and_normalized) {
    for (auto k : kAllKinds) {
        for (int i = 0; i <= 2000; ++i) EXPECT_GE(reference_density(k, i / 2000.0), 0.0);
        const double total = oracle::gauss_legendre([k](double r) { return reference_density(k, r); }, 0.0, 1.0);
        EXPECT_NEAR(total, 1.0, 1e-6) << to_string(k);
    }
}

TEST(ReferenceDensity, coe_series_joins_closed_form) {
    const double below = reference_density(ReferenceKind::coe, std::nextafter(1e-3, 0.0));
    const double above = reference_density(ReferenceKind::coe, 1e-3);
    EXPECT_NEAR(below, above, 1e-12);
}

TEST(MeanGapRatio, reference_means) {
    EXPECT_NEAR(mean_gap_ratio(ReferenceKind::poisson), 2.0 * std::log(2.0) - 1.0, 1e-9);
    EXPECT_NEAR(mean_gap_ratio(ReferenceKind::goe), 4.0 - 2.0 * std::sqrt(3.0), 1e-9);
    EXPECT_NEAR(mean_gap_ratio(ReferenceKind::coe), 0.526921686020, 1e-6);
    for (auto k : kAllKinds) {
        const double oracle_mean =
            oracle::gauss_legendre([k](double r) { return r * reference_density(k, r); }, 0.0, 1.0);
        EXPECT_NEAR(mean_gap_ratio(k), oracle_mean, 1e-9) << to_string(k);
    }
}

TEST(MeanGapRatio, sample_mean) {
    GapRatioSample s;
    s.ratios = {0.5, 1.0};
    EXPECT_DOUBLE_EQ(mean_gap_ratio(s), 0.75);
    EXPECT_THROW(mean_gap_ratio(GapRatioSample{}), ArgumentError);
}

TEST(ReferenceDensity, coe_matches_sampled_three_level_ensemble) {
    // U^T U with U Haar-distributed is a COE matrix; each eigenphase contributes the ratio
    // of its two adjacent gaps on the circle.
    std::mt19937_64 rng(41);
    RatioHistogram hist(10);
    double sum = 0.0;
    const int samples = 20000;
    for (int s = 0; s < samples; ++s) {
        const Matrix u = haar_unitary(3, rng);
        const Matrix coe = u.transpose() * u;
        Eigen::ComplexEigenSolver<Matrix> es(coe, false);
        std::array<double, 3> ph;
        for (int k = 0; k < 3; ++k) ph[k] = std::arg(es.eigenvalues()[k]);
        std::sort(ph.begin(), ph.end());
        const std::array<double, 3> gaps{ph[1] - ph[0], ph[2] - ph[1], ph[0] + 2 * pi - ph[2]};
        for (int k = 0; k < 3; ++k) {
            const double a = gaps[k], b = gaps[(k + 1) % 3];
            const double r = std::min(a, b) / std::max(a, b);
            sum += r;
            hist.add(r);
        }
    }
    EXPECT_NEAR(sum / (3.0 * samples), mean_gap_ratio(ReferenceKind::coe), 0.006);
    const auto dens = hist.densities();
    for (std::size_t b = 0; b < hist.bins(); ++b) {
        const double lo = hist.lower_edge(b), hi = hist.upper_edge(b);
        const double expected =
            oracle::gauss_legendre([](double r) { return reference_density(ReferenceKind::coe, r); }, lo, hi, 20) /
            (hi - lo);
        EXPECT_NEAR(dens[b], expected, 0.06) << "bin " << b;
    }
}

TEST(RatioHistogram, normalization_and_edges) {
    RatioHistogram h;
    EXPECT_EQ(h.bins(), 20u);
    for (double d : h.densities()) EXPECT_EQ(d, 0.0);
    h.add(0.0);
    h.add(1.0);
    h.add(0.5);
    h.add(0.049999);
    EXPECT_EQ(h.counts().front(), 2u);
    EXPECT_EQ(h.counts().back(), 1u);
    EXPECT_EQ(h.counts()[10], 1u);
    const auto d = h.densities();
    EXPECT_NEAR(std::accumulate(d.begin(), d.end(), 0.0) * h.bin_width(), 1.0, 1e-9);
    EXPECT_THROW(h.add(1.5), ArgumentError);
    EXPECT_THROW(RatioHistogram(0), ArgumentError);
}

TEST(RatioHistogram, merge_is_order_independent) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<RatioHistogram> parts(5, RatioHistogram(13));
    for (auto& part : parts)
        for (int k = 0; k < 200; ++k) part.add(u(rng));
    RatioHistogram forward(13), backward(13);
    for (const auto& part : parts) forward.merge(part);
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) backward.merge(*it);
    EXPECT_EQ(forward.counts(), backward.counts());
    EXPECT_EQ(forward.total(), 1000u);
    EXPECT_THROW(forward.merge(RatioHistogram(12)), ArgumentError);
}

TEST(ParticipationRatio, examples) {
    EXPECT_DOUBLE_EQ(participation_ratio(StateVector::basis(4, {5})), 1.0);
    const Vector uniform = Vector::Constant(16, 0.25);
    EXPECT_NEAR(participation_ratio(uniform), 16.0, 1e-12);
    Vector two = Vector::Zero(16);
    two[3] = two[9] = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(participation_ratio(two), 2.0, 1e-12);
    EXPECT_THROW(participation_ratio(Vector(Vector::Constant(4, 1.0))), ValidationError);
}

TEST(ParticipationRatio, permutation_and_phase_invariance) {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 10; ++trial) {
        Vector v(32);
        for (auto& c : v) c = {normal(rng), normal(rng)};
        v.normalize();
        const double base = participation_ratio(v);
        std::vector<int> perm(32);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        Vector shuffled(32);
        for (int k = 0; k < 32; ++k) shuffled[k] = v[perm[k]];
        EXPECT_NEAR(participation_ratio(shuffled), base, 1e-10);
        EXPECT_NEAR(participation_ratio(Vector(v * std::polar(1.0, normal(rng)))), base, 1e-10);
    }
}

TEST(FractalDimension, examples_and_monotonicity) {
    EXPECT_DOUBLE_EQ(fractal_dimension(1.0, 256.0), 0.0);
    EXPECT_DOUBLE_EQ(fractal_dimension(256.0, 256.0), 1.0);
    EXPECT_NEAR(fractal_dimension(16.0, 256.0), 0.5, 1e-15);
    double prev = -1.0;
    for (double p = 1.0; p <= 256.0; p *= 1.1) {
        const double d = fractal_dimension(p, 256.0);
        EXPECT_GT(d, prev);
        prev = d;
    }
    EXPECT_THROW(fractal_dimension(0.5, 256.0), ArgumentError);
    EXPECT_THROW(fractal_dimension(300.0, 256.0), ArgumentError);
    EXPECT_THROW(fractal_dimension(1.0, 1.0), ArgumentError);
    EXPECT_NO_THROW(fractal_dimension(1.0 - 1e-10, 256.0));
}

TEST(FloquetStateMap, identity_and_column_sums) {
    const auto id = diagonalize_floquet(Matrix::Identity(8, 8), 1.0);
    const auto map_id = floquet_state_map(id);
    EXPECT_LT((map_id - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-12);

    const auto r = seeded_result(0.3, 8);
    const auto map = floquet_state_map(r);
    ASSERT_EQ(map.rows(), 256);
    ASSERT_EQ(map.cols(), 256);
    EXPECT_GE(map.minCoeff(), 0.0);
    for (Eigen::Index a = 0; a < map.cols(); ++a) EXPECT_NEAR(map.col(a).sum(), 1.0, 1e-9);
}

TEST(FloquetStateMap, melted_crystal_has_higher_fractal_dimension) {
    const double low = mean(state_fractal_dimensions(seeded_result(0.001, 1)));
    const double mid = mean(state_fractal_dimensions(seeded_result(0.5, 1)));
    const double high = mean(state_fractal_dimensions(seeded_result(0.999, 1)));
    EXPECT_GT(mid, low);
    EXPECT_NEAR(low, 0.274343857049, 1e-6);
    EXPECT_NEAR(mid, 0.829630374839, 1e-6);
    EXPECT_NEAR(high, 0.133112701037, 1e-6);
}

TEST(ClusterFraction, counts_levels_in_windows) {
    const std::vector<double> levels{0.0, 0.05, 0.5, 1.0};
    const std::vector<double> targets{0.0, 1.0};
    EXPECT_DOUBLE_EQ(cluster_fraction(levels, targets, 0.1), 0.75);
    EXPECT_THROW(cluster_fraction(std::vector<double>{}, targets, 0.1), ArgumentError);
}

TEST(ClusterFraction, zero_lambda_regression) {
    // Disorder cancels over the four-period cycle; the Ising phases shift each orbit by a
    // quarter of its accumulated phase, which leaves one level in eight outside the windows.
    const std::vector<double> targets{0.0, pi / 2, -pi / 2, pi, -pi};
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto r = seeded_result(0.0, seed);
        EXPECT_DOUBLE_EQ(cluster_fraction(r.quasienergies, targets, 0.1 * pi), 0.875);
    }
}
