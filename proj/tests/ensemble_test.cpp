#include "metamorph/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <random>
#include <unordered_set>

#include <gtest/gtest.h>

#include "metamorph/errors.hpp"
#include "metamorph/parallel.hpp"

using namespace metamorph;

namespace {

SweepPlan small_plan() {
    SweepPlan plan;
    plan.base = default_params(6);
    plan.lambdas = {0.001, 0.5, 0.999};
    plan.realizations = 3;
    plan.master_seed = 2020;
    plan.periods = 16;
    plan.diagnostics.dynamics = true;
    return plan;
}

bool same_record(const CellRecord& a, const CellRecord& b) {
    auto same_ratios = [](const auto& x, const auto& y) {
        return x.has_value() == y.has_value() && (!x || x->ratios == y->ratios);
    };
    auto same_series = [](const auto& x, const auto& y) {
        return x.has_value() == y.has_value() && (!x || x->values == y->values);
    };
    return a.seed == b.seed && a.lambda == b.lambda && a.quasienergies == b.quasienergies &&
           a.eigenvalues == b.eigenvalues && same_ratios(a.ratios, b.ratios) &&
           a.fractal_dimensions == b.fractal_dimensions && same_series(a.series, b.series) &&
           same_series(a.power, b.power) && a.error == b.error;
}

}  // namespace

TEST(DeriveSeed, deterministic_and_sensitive) {
    EXPECT_EQ(derive_seed(7, 2, 3), derive_seed(7, 2, 3));
    EXPECT_NE(derive_seed(7, 2, 3), derive_seed(7, 3, 2));
    EXPECT_NE(derive_seed(7, 2, 3), derive_seed(8, 2, 3));
}

TEST(DeriveSeed, no_collisions_across_random_masters) {
    std::mt19937_64 rng(123);
    for (int k = 0; k < 1'000'000; ++k) {
        const std::uint64_t master = rng();
        ASSERT_NE(derive_seed(master, 0, 0), derive_seed(master, 0, 1)) << master;
    }
}

TEST(DeriveSeed, master_change_moves_every_seed) {
    std::unordered_set<std::uint64_t> seen;
    int unchanged = 0;
    for (std::uint64_t g = 0; g < 21; ++g)
        for (std::uint64_t r = 0; r < 100; ++r) {
            seen.insert(derive_seed(1, g, r));
            seen.insert(derive_seed(2, g, r));
            unchanged += derive_seed(1, g, r) == derive_seed(2, g, r);
        }
    EXPECT_EQ(unchanged, 0);
    EXPECT_EQ(seen.size(), 2u * 21u * 100u);
}

TEST(SweepPlan, validation) {
    EXPECT_NO_THROW(small_plan().validate());
    auto bad = small_plan();
    bad.lambdas = {};
    EXPECT_THROW(bad.validate(), ArgumentError);
    bad = small_plan();
    bad.lambdas = {1.5};
    EXPECT_THROW(bad.validate(), ArgumentError);
    bad = small_plan();
    bad.realizations = 0;
    EXPECT_THROW(bad.validate(), ArgumentError);
    bad = small_plan();
    bad.dynamics_initial = {64};
    EXPECT_THROW(bad.validate(), ArgumentError);
    const auto grid = default_lambda_grid();
    ASSERT_EQ(grid.size(), 21u);
    EXPECT_EQ(grid.front(), 0.0);
    EXPECT_EQ(grid.back(), 1.0);
    EXPECT_DOUBLE_EQ(grid[10], 0.5);
}

TEST(RunSweep, single_cell_equals_direct_pipeline) {
    SweepPlan plan = small_plan();
    plan.lambdas = {0.3};
    plan.realizations = 1;
    const auto result = run_sweep(plan);
    ASSERT_EQ(result.records.size(), 1u);
    const auto& rec = result.records[0];
    ASSERT_TRUE(rec.ok()) << rec.error;

    const auto p = plan.base.with_lambda(0.3);
    const auto d = sample_disorder(p, derive_seed(2020, 0, 0));
    const auto f = diagonalize_floquet(fast_floquet_operator(p, d), p.period());
    EXPECT_EQ(rec.seed, derive_seed(2020, 0, 0));
    EXPECT_EQ(rec.quasienergies, f.quasienergies);
    EXPECT_EQ(rec.ratios->ratios, gap_ratios(f.quasienergies).ratios);
    EXPECT_EQ(*rec.fractal_dimensions, state_fractal_dimensions(f));
    const auto series = magnetization_series(p, d, {0}, 16);
    EXPECT_EQ(rec.series->values, series.values);
    EXPECT_EQ(rec.power->values, power_spectrum(series).values);
    EXPECT_DOUBLE_EQ(result.levels[0].mean_ratio, mean_gap_ratio(*rec.ratios));
}

TEST(RunSweep, worker_count_independent) {
    const auto plan = small_plan();
    const auto one = run_sweep(plan, 1);
    const auto eight = run_sweep(plan, 8);
    ASSERT_EQ(one.records.size(), eight.records.size());
    for (std::size_t k = 0; k < one.records.size(); ++k) EXPECT_TRUE(same_record(one.records[k], eight.records[k])) << k;
    for (std::size_t g = 0; g < one.levels.size(); ++g) {
        EXPECT_EQ(one.levels[g].histogram.counts(), eight.levels[g].histogram.counts());
        EXPECT_EQ(one.levels[g].mean_ratio, eight.levels[g].mean_ratio);
    }
    EXPECT_EQ(one.fractal_curve, eight.fractal_curve);
}

TEST(RunSweep, cells_reproduce_from_recorded_seed) {
    const auto plan = small_plan();
    const auto result = run_sweep(plan);
    for (const auto& rec : result.records) {
        EXPECT_EQ(rec.seed, derive_seed(plan.master_seed, rec.lambda_index, rec.realization_index));
        EXPECT_TRUE(same_record(rec, run_cell(plan, rec.lambda_index, rec.realization_index)));
        const auto p = plan.base.with_lambda(rec.lambda);
        const auto f = diagonalize_floquet(fast_floquet_operator(p, sample_disorder(p, rec.seed)), p.period());
        EXPECT_EQ(rec.quasienergies, f.quasienergies);
    }
}

TEST(Aggregates, permutation_invariant) {
    const auto plan = small_plan();
    const auto result = run_sweep(plan);
    auto shuffled = result.records;
    std::mt19937_64 rng(3);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto levels = aggregate_levels(plan, shuffled);
    for (std::size_t g = 0; g < levels.size(); ++g) {
        EXPECT_EQ(levels[g].mean_ratio, result.levels[g].mean_ratio);
        EXPECT_EQ(levels[g].histogram.counts(), result.levels[g].histogram.counts());
    }
    EXPECT_EQ(aggregate_fractal(plan, shuffled), result.fractal_curve);
}

TEST(Aggregates, fractal_curve_is_mean_of_record_means) {
    const auto result = run_sweep(small_plan());
    ASSERT_EQ(result.fractal_curve.size(), 3u);
    for (std::size_t g = 0; g < 3; ++g) {
        double s = 0.0;
        int n = 0;
        for (const auto& rec : result.records) {
            if (rec.lambda_index != g) continue;
            double m = 0.0;
            for (double v : *rec.fractal_dimensions) m += v;
            s += m / static_cast<double>(rec.fractal_dimensions->size());
            ++n;
        }
        EXPECT_NEAR(result.fractal_curve[g], s / n, 1e-12);
    }
}

TEST(Aggregates, constant_record_and_missing_field) {
    SweepPlan plan;
    plan.lambdas = {0.2};
    plan.realizations = 1;
    CellRecord rec;
    rec.fractal_dimensions = std::vector<double>(256, 0.42);
    EXPECT_NEAR(aggregate_fractal(plan, {rec}).at(0), 0.42, 1e-12);
    rec.fractal_dimensions.reset();
    try {
        aggregate_fractal(plan, {rec});
        FAIL() << "expected ArgumentError";
    } catch (const ArgumentError& e) {
        EXPECT_NE(std::string(e.what()).find("fractal_dimensions"), std::string::npos);
    }
}

TEST(Aggregates, failed_cells_are_counted_not_fatal) {
    SweepPlan plan;
    plan.lambdas = {0.2};
    plan.realizations = 2;
    CellRecord good;
    good.ratios = GapRatioSample{{0.5, 1.0}, {}, 0, 0};
    good.fractal_dimensions = std::vector<double>{0.5};
    CellRecord bad;
    bad.realization_index = 1;
    bad.error = "boom";
    const auto levels = aggregate_levels(plan, {good, bad});
    EXPECT_EQ(levels[0].failed_cells, 1u);
    EXPECT_DOUBLE_EQ(levels[0].mean_ratio, 0.75);
    EXPECT_DOUBLE_EQ(aggregate_fractal(plan, {good, bad})[0], 0.5);
}

TEST(RunSweep, level_statistics_ordering) {
    SweepPlan plan;
    plan.lambdas = {0.001, 0.5, 0.999};
    plan.realizations = 10;
    plan.master_seed = 2020;
    const auto result = run_sweep(plan, default_worker_count());
    EXPECT_GT(result.levels[1].mean_ratio, result.levels[2].mean_ratio);
    EXPECT_GT(result.levels[1].mean_ratio, result.levels[0].mean_ratio);
    EXPECT_GT(result.fractal_curve[1], result.fractal_curve[0]);
    EXPECT_GT(result.fractal_curve[1], result.fractal_curve[2]);
    for (const auto& agg : result.levels) {
        EXPECT_EQ(agg.ratio_count, 10u * 254u);
        EXPECT_EQ(agg.failed_cells, 0u);
        const auto d = agg.histogram.densities();
        double total = 0.0;
        for (double v : d) total += v * agg.histogram.bin_width();
        EXPECT_NEAR(total, 1.0, 1e-9);
    }
}

TEST(Parallel, every_index_runs_once) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for_index(hits.size(), 4, [&](std::size_t i) { hits[i].fetch_add(1); });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(Parallel, exceptions_propagate) {
    EXPECT_THROW(parallel_for_index(50, 3,
                                    [](std::size_t i) {
                                        if (i == 17) throw ValidationError("cell 17");
                                    }),
                 ValidationError);
}

TEST(Parallel, worker_count_from_environment) {
    ::setenv("METAMORPH_WORKERS", "3", 1);
    EXPECT_EQ(default_worker_count(), 3u);
    ::setenv("METAMORPH_WORKERS", "zero", 1);
    EXPECT_THROW(default_worker_count(), ConfigError);
    ::setenv("METAMORPH_WORKERS", "0", 1);
    EXPECT_THROW(default_worker_count(), ConfigError);
    ::unsetenv("METAMORPH_WORKERS");
    EXPECT_GE(default_worker_count(), 1u);
}
