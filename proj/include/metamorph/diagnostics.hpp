#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "metamorph/floquet.hpp"
#include "metamorph/spin_core.hpp"

namespace metamorph {

struct Provenance {
    double lambda = 0.0;
    std::uint64_t seed = 0;
    int sites = 0;
};

struct GapRatioSample {
    std::vector<double> ratios;  // D - 2 entries in [0, 1]
    Provenance source;
    std::size_t degenerate_pairs = 0;   // both gaps below threshold, r := 1
    std::size_t degenerate_single = 0;  // exactly one gap below threshold, r := 0
};

inline constexpr double kDegenerateGapThreshold = 1e-12;

// r_a = min(d_a, d_{a+1}) / max(d_a, d_{a+1}) over consecutive gaps of an ascending spectrum.
// The wrap-around gap of a circular spectrum is not included.
GapRatioSample gap_ratios(std::span<const double> sorted_levels, Provenance source = {});

enum class ReferenceKind { poisson, goe, coe };

std::string_view to_string(ReferenceKind kind);
ReferenceKind parse_reference_kind(std::string_view name);

// Ratio densities on [0, 1]:
//   poisson: 2 / (1 + r)^2
//   goe:     (27/4) (r + r^2) / (1 + r + r^2)^(5/2)
//   coe:     three-level circular orthogonal surmise
double reference_density(ReferenceKind kind, double r);

double mean_gap_ratio(const GapRatioSample& sample);
// Integral of r P(r) over [0, 1] by adaptive Gauss-Kronrod quadrature.
double mean_gap_ratio(ReferenceKind kind);

// Uniform bins on [0, 1]; merging sums counts, so accumulation order does not matter.
class RatioHistogram {
public:
    explicit RatioHistogram(std::size_t bins = 20);

    void add(double r);
    void add(const GapRatioSample& sample);
    void merge(const RatioHistogram& other);

    std::size_t bins() const noexcept { return counts_.size(); }
    double bin_width() const noexcept { return 1.0 / static_cast<double>(counts_.size()); }
    double lower_edge(std::size_t b) const { return static_cast<double>(b) * bin_width(); }
    double upper_edge(std::size_t b) const { return static_cast<double>(b + 1) * bin_width(); }
    double center(std::size_t b) const { return (static_cast<double>(b) + 0.5) * bin_width(); }
    const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
    std::uint64_t total() const noexcept { return total_; }
    // count / (total * width); all zero when empty.
    std::vector<double> densities() const;

private:
    std::vector<std::uint64_t> counts_;
    std::uint64_t total_ = 0;
};

// 1 / sum_l |C_l|^4. ValidationError when | ||psi||^2 - 1 | > 1e-9.
double participation_ratio(const StateVector& psi);
double participation_ratio(const Vector& amplitudes);

// ln P / ln D. ArgumentError when P lies outside [1, D] by more than 1e-9, or D < 2.
double fractal_dimension(double participation, double dimension);

// |C_{alpha,l}|^2 with rows l (configuration) and columns alpha (quasienergy index).
Eigen::MatrixXd floquet_state_map(const FloquetResult& result);

// d*_alpha for every Floquet state, in quasienergy order.
std::vector<double> state_fractal_dimensions(const FloquetResult& result);

// Fraction of levels within `window` of any of `targets`.
double cluster_fraction(std::span<const double> levels, std::span<const double> targets,
                        double window);

}  // namespace metamorph
