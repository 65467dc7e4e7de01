#include "metamorph/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "metamorph/errors.hpp"

namespace metamorph {

GapRatioSample gap_ratios(std::span<const double> levels, Provenance source) {
    if (levels.size() < 3) throw ArgumentError("gap ratios need at least three levels");
    if (!std::is_sorted(levels.begin(), levels.end()))
        throw ArgumentError("levels must be sorted ascending");

    GapRatioSample sample;
    sample.source = source;
    sample.ratios.reserve(levels.size() - 2);
    for (std::size_t a = 0; a + 2 < levels.size(); ++a) {
        const double d0 = levels[a + 1] - levels[a];
        const double d1 = levels[a + 2] - levels[a + 1];
        const bool tiny0 = d0 < kDegenerateGapThreshold;
        const bool tiny1 = d1 < kDegenerateGapThreshold;
        if (tiny0 && tiny1) {
            sample.ratios.push_back(1.0);
            ++sample.degenerate_pairs;
        } else if (tiny0 || tiny1) {
            sample.ratios.push_back(0.0);
            ++sample.degenerate_single;
        } else {
            sample.ratios.push_back(std::min(d0, d1) / std::max(d0, d1));
        }
    }
    return sample;
}

std::string_view to_string(ReferenceKind kind) {
    switch (kind) {
        case ReferenceKind::poisson: return "poisson";
        case ReferenceKind::goe: return "goe";
        case ReferenceKind::coe: return "coe";
    }
    return "unknown";
}

ReferenceKind parse_reference_kind(std::string_view name) {
    if (name == "poisson") return ReferenceKind::poisson;
    if (name == "goe") return ReferenceKind::goe;
    if (name == "coe") return ReferenceKind::coe;
    throw ArgumentError("unknown reference distribution '" + std::string(name) + "'");
}

namespace {

double coe_density(double r) {
    constexpr double pi = 3.14159265358979323846;
    if (r < 1e-3) {
        // Taylor expansion about 0; the closed form cancels two 1/r terms there.
        constexpr double pi2 = pi * pi;
        constexpr double pi4 = pi2 * pi2;
        constexpr double c1 = 8.0 * pi2 / 9.0 - 4.0 / 3.0;
        constexpr double c2 = 2.0 - 4.0 * pi2 / 3.0;
        constexpr double c3 = 16.0 * pi2 / 9.0 - 8.0 / 3.0 - 16.0 * pi4 / 45.0;
        constexpr double c4 = 10.0 / 3.0 - 20.0 * pi2 / 9.0 + 4.0 * pi4 / 3.0;
        return r * (c1 + r * (c2 + r * (c3 + r * c4)));
    }
    const double inner = 2.0 * pi * r / (1.0 + r);
    const double outer = 2.0 * pi / (1.0 + r);
    const double plus = std::sin(inner) / (2.0 * pi * r * r) + 1.0 / ((1.0 + r) * (1.0 + r)) +
                        std::sin(outer) / (2.0 * pi);
    const double minus = std::cos(outer) / (1.0 + r) + std::cos(inner) / (r * (1.0 + r));
    return 2.0 / 3.0 * (plus - minus);
}

}  // namespace

double reference_density(ReferenceKind kind, double r) {
    if (!(r >= 0.0 && r <= 1.0)) throw ArgumentError("ratio outside [0, 1]");
    switch (kind) {
        case ReferenceKind::poisson: return 2.0 / ((1.0 + r) * (1.0 + r));
        case ReferenceKind::goe: {
            const double q = 1.0 + r + r * r;
            return 27.0 / 4.0 * (r + r * r) / std::pow(q, 2.5);
        }
        case ReferenceKind::coe: return std::max(0.0, coe_density(r));
    }
    return 0.0;
}

double mean_gap_ratio(const GapRatioSample& sample) {
    if (sample.ratios.empty()) throw ArgumentError("empty gap-ratio sample");
    // fixed left-to-right summation order
    double sum = 0.0;
    for (double r : sample.ratios) sum += r;
    return sum / static_cast<double>(sample.ratios.size());
}

double mean_gap_ratio(ReferenceKind kind) {
    using boost::math::quadrature::gauss_kronrod;
    auto f = [kind](double r) { return r * reference_density(kind, r); };
    return gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 15, 1e-14);
}

RatioHistogram::RatioHistogram(std::size_t bins) : counts_(bins, 0) {
    if (bins == 0) throw ArgumentError("histogram needs at least one bin");
}

void RatioHistogram::add(double r) {
    if (!(r >= 0.0 && r <= 1.0)) throw ArgumentError("ratio outside [0, 1]");
    auto b = static_cast<std::size_t>(r * static_cast<double>(counts_.size()));
    if (b == counts_.size()) --b;  // r = 1 lands in the last bin
    ++counts_[b];
    ++total_;
}

void RatioHistogram::add(const GapRatioSample& sample) {
    for (double r : sample.ratios) add(r);
}

void RatioHistogram::merge(const RatioHistogram& other) {
    if (other.bins() != bins()) throw ArgumentError("histogram bin counts differ");
    for (std::size_t b = 0; b < counts_.size(); ++b) counts_[b] += other.counts_[b];
    total_ += other.total_;
}

std::vector<double> RatioHistogram::densities() const {
    std::vector<double> d(counts_.size(), 0.0);
    if (total_ == 0) return d;
    const double scale = 1.0 / (static_cast<double>(total_) * bin_width());
    for (std::size_t b = 0; b < counts_.size(); ++b) d[b] = static_cast<double>(counts_[b]) * scale;
    return d;
}

double participation_ratio(const Vector& amplitudes) {
    const double norm2 = amplitudes.squaredNorm();
    if (std::abs(norm2 - 1.0) > 1e-9)
        throw ValidationError("participation ratio needs a normalized state (norm^2 = " +
                              std::to_string(norm2) + ")");
    return 1.0 / amplitudes.cwiseAbs2().cwiseAbs2().sum();
}

double participation_ratio(const StateVector& psi) {
    return participation_ratio(psi.amplitudes());
}

double fractal_dimension(double participation, double dimension) {
    constexpr double slack = 1e-9;
    if (!(dimension >= 2.0)) throw ArgumentError("dimension must be at least 2");
    if (!(participation >= 1.0 - slack && participation <= dimension + slack))
        throw ArgumentError("participation ratio " + std::to_string(participation) +
                            " outside [1, D]");
    const double p = std::clamp(participation, 1.0, dimension);
    return std::log(p) / std::log(dimension);
}

Eigen::MatrixXd floquet_state_map(const FloquetResult& result) {
    return result.states.cwiseAbs2();
}

std::vector<double> state_fractal_dimensions(const FloquetResult& result) {
    const auto dim = static_cast<double>(result.states.rows());
    std::vector<double> d;
    d.reserve(static_cast<std::size_t>(result.states.cols()));
    for (Eigen::Index a = 0; a < result.states.cols(); ++a)
        d.push_back(fractal_dimension(participation_ratio(Vector(result.states.col(a))), dim));
    return d;
}

double cluster_fraction(std::span<const double> levels, std::span<const double> targets,
                        double window) {
    if (levels.empty()) throw ArgumentError("no levels");
    std::size_t hits = 0;
    for (double e : levels) {
        const bool near = std::any_of(targets.begin(), targets.end(),
                                      [&](double t) { return std::abs(e - t) <= window; });
        hits += near;
    }
    return static_cast<double>(hits) / static_cast<double>(levels.size());
}

}  // namespace metamorph
