#include "metamorph/ensemble.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <tuple>

#include "metamorph/errors.hpp"
#include "metamorph/parallel.hpp"

namespace metamorph {

namespace {

constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t lambda_index,
                          std::uint64_t realization_index) {
    std::uint64_t h = mix64(master + 0x9E3779B97F4A7C15ULL);
    h = mix64(h ^ (lambda_index * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
    h = mix64(h ^ (realization_index * 0xC2B2AE3D27D4EB4FULL + 0x165667B19E3779F9ULL));
    return h;
}

std::vector<double> default_lambda_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(static_cast<double>(i) / 20.0);
    return grid;
}

void SweepPlan::validate() const {
    base.validate();
    if (lambdas.empty()) throw ArgumentError("lambda grid is empty");
    for (double l : lambdas)
        if (!(l >= 0.0 && l <= 1.0))
            throw ArgumentError("lambda grid value " + std::to_string(l) + " outside [0, 1]");
    if (realizations < 1) throw ArgumentError("need at least one disorder realization");
    if (periods < 1) throw ArgumentError("need at least one period");
    if (histogram_bins < 1) throw ArgumentError("need at least one histogram bin");
    make_configuration(base.sites, dynamics_initial.index);
}

CellRecord run_cell(const SweepPlan& plan, std::size_t lambda_index, std::size_t realization_index) {
    CellRecord rec;
    rec.lambda_index = lambda_index;
    rec.realization_index = realization_index;
    rec.lambda = plan.lambdas.at(lambda_index);
    rec.seed = derive_seed(plan.master_seed, lambda_index, realization_index);
    try {
        const ModelParams params = plan.base.with_lambda(rec.lambda);
        const DisorderRealization disorder = sample_disorder(params, rec.seed);
        const FloquetResult floquet =
            diagonalize_floquet(build_floquet(params, disorder, plan.path), params.period());
        rec.quasienergies = floquet.quasienergies;
        rec.eigenvalues = floquet.eigenvalues;
        if (plan.diagnostics.ratios)
            rec.ratios = gap_ratios(floquet.quasienergies, {rec.lambda, rec.seed, params.sites});
        if (plan.diagnostics.fractal) rec.fractal_dimensions = state_fractal_dimensions(floquet);
        if (plan.diagnostics.dynamics) {
            rec.series = magnetization_series(StructuredFloquet(params, disorder), params.period(),
                                              plan.dynamics_initial, plan.periods);
            rec.power = power_spectrum(*rec.series);
        }
    } catch (const std::exception& e) {
        rec.error = e.what();
    }
    return rec;
}

namespace {

// Indices of `records` sorted by (lambda index, realization index).
std::vector<std::size_t> canonical_order(const std::vector<CellRecord>& records) {
    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ra = records[a];
        const auto& rb = records[b];
        return std::tie(ra.lambda_index, ra.realization_index) <
               std::tie(rb.lambda_index, rb.realization_index);
    });
    return order;
}

}  // namespace

std::vector<LambdaAggregate> aggregate_levels(const SweepPlan& plan,
                                              const std::vector<CellRecord>& records) {
    std::vector<LambdaAggregate> out;
    std::vector<double> sums(plan.lambdas.size(), 0.0);
    for (double l : plan.lambdas) out.push_back({l, RatioHistogram(plan.histogram_bins)});
    for (std::size_t idx : canonical_order(records)) {
        const CellRecord& rec = records[idx];
        LambdaAggregate& agg = out.at(rec.lambda_index);
        if (!rec.ok()) {
            ++agg.failed_cells;
            continue;
        }
        if (!rec.ratios) continue;
        agg.histogram.add(*rec.ratios);
        for (double r : rec.ratios->ratios) sums[rec.lambda_index] += r;
        agg.ratio_count += rec.ratios->ratios.size();
        agg.degenerate_pairs += rec.ratios->degenerate_pairs;
        agg.degenerate_single += rec.ratios->degenerate_single;
    }
    for (std::size_t g = 0; g < out.size(); ++g)
        out[g].mean_ratio = out[g].ratio_count ? sums[g] / static_cast<double>(out[g].ratio_count) : 0.0;
    return out;
}

std::vector<double> aggregate_fractal(const SweepPlan& plan, const std::vector<CellRecord>& records) {
    std::vector<double> sums(plan.lambdas.size(), 0.0);
    std::vector<std::size_t> counts(plan.lambdas.size(), 0);
    for (std::size_t idx : canonical_order(records)) {
        const CellRecord& rec = records[idx];
        if (!rec.ok()) continue;
        if (!rec.fractal_dimensions)
            throw ArgumentError("record (lambda " + std::to_string(rec.lambda_index) +
                                ", realization " + std::to_string(rec.realization_index) +
                                ") is missing diagnostic 'fractal_dimensions'");
        const auto& d = *rec.fractal_dimensions;
        if (d.empty()) continue;
        double s = 0.0;
        for (double v : d) s += v;
        sums.at(rec.lambda_index) += s / static_cast<double>(d.size());
        ++counts[rec.lambda_index];
    }
    std::vector<double> curve(sums.size(), 0.0);
    for (std::size_t g = 0; g < sums.size(); ++g)
        if (counts[g]) curve[g] = sums[g] / static_cast<double>(counts[g]);
    return curve;
}

std::vector<double> aggregate_fractal(const EnsembleResult& result) {
    return aggregate_fractal(result.plan, result.records);
}

EnsembleResult run_sweep(const SweepPlan& plan, std::size_t workers) {
    plan.validate();
    EnsembleResult result;
    result.plan = plan;
    result.records.resize(plan.cell_count());
    parallel_for_index(plan.cell_count(), workers, [&](std::size_t cell) {
        result.records[cell] = run_cell(plan, cell / plan.realizations, cell % plan.realizations);
    });
    result.levels = aggregate_levels(plan, result.records);
    if (plan.diagnostics.fractal) result.fractal_curve = aggregate_fractal(result);
    return result;
}

}  // namespace metamorph
