#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "metamorph/diagnostics.hpp"
#include "metamorph/dynamics.hpp"
#include "metamorph/floquet.hpp"
#include "metamorph/hamiltonians.hpp"

namespace metamorph {

// Counter-mode mix of (master, lambda index, realization index). For a fixed master and lambda
// index the map is a bijection of the realization index, so seeds within a row never collide.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t lambda_index,
                          std::uint64_t realization_index);

struct DiagnosticSet {
    bool ratios = true;
    bool fractal = true;
    bool dynamics = false;  // magnetization series + power spectrum from `dynamics_initial`

    friend bool operator==(const DiagnosticSet&, const DiagnosticSet&) = default;
};

struct SweepPlan {
    ModelParams base = default_params(8);
    std::vector<double> lambdas;
    std::size_t realizations = 100;
    std::uint64_t master_seed = 0;
    int periods = 64;
    DiagnosticSet diagnostics;
    std::size_t histogram_bins = 20;
    PropagatorPath path = PropagatorPath::structured;
    Configuration dynamics_initial{0};

    void validate() const;
    std::size_t cell_count() const { return lambdas.size() * realizations; }
};

// 21 uniform points on [0, 1].
std::vector<double> default_lambda_grid();

struct CellRecord {
    std::size_t lambda_index = 0;
    std::size_t realization_index = 0;
    double lambda = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> quasienergies;
    std::vector<Complex> eigenvalues;
    std::optional<GapRatioSample> ratios;
    std::optional<std::vector<double>> fractal_dimensions;
    std::optional<TimeSeries> series;
    std::optional<PowerSpectrum> power;
    std::string error;  // empty on success

    bool ok() const noexcept { return error.empty(); }
};

struct LambdaAggregate {
    double lambda = 0.0;
    RatioHistogram histogram;
    double mean_ratio = 0.0;
    std::size_t ratio_count = 0;
    std::size_t degenerate_pairs = 0;
    std::size_t degenerate_single = 0;
    std::size_t failed_cells = 0;
};

struct EnsembleResult {
    SweepPlan plan;
    std::vector<CellRecord> records;  // lambda-major: index = lambda_index * realizations + r
    std::vector<LambdaAggregate> levels;
    std::vector<double> fractal_curve;  // empty unless fractal diagnostics ran
};

// Runs one (lambda, realization) cell. Failures are recorded in CellRecord::error.
CellRecord run_cell(const SweepPlan& plan, std::size_t lambda_index, std::size_t realization_index);

EnsembleResult run_sweep(const SweepPlan& plan, std::size_t workers = 1);

// Pooled ratio statistics per lambda; records may arrive in any order.
std::vector<LambdaAggregate> aggregate_levels(const SweepPlan& plan,
                                              const std::vector<CellRecord>& records);

// d*(lambda): per-lambda mean over states and realizations. Throws ArgumentError naming the
// missing field when a successful record lacks fractal dimensions.
std::vector<double> aggregate_fractal(const EnsembleResult& result);
std::vector<double> aggregate_fractal(const SweepPlan& plan, const std::vector<CellRecord>& records);

}  // namespace metamorph
