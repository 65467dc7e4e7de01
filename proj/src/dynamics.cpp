#include "metamorph/dynamics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "metamorph/errors.hpp"
#include "metamorph/parallel.hpp"

namespace metamorph {

double PowerSpectrum::frequency(std::size_t k) const {
    return 2.0 * std::numbers::pi * static_cast<double>(k) /
           (static_cast<double>(values.size()) * period);
}

std::vector<StateVector> evolve_stroboscopic(const UnitaryOperator& floquet, const StateVector& psi0,
                                             int periods) {
    if (periods < 0) throw ArgumentError("period count must be nonnegative");
    std::vector<StateVector> out;
    out.reserve(static_cast<std::size_t>(periods) + 1);
    out.push_back(psi0);
    for (int m = 0; m < periods; ++m) out.push_back(floquet.apply(out.back()));
    return out;
}

TimeSeries magnetization_series(const StructuredFloquet& floquet, double period,
                                Configuration initial, int periods) {
    if (periods < 1) throw ArgumentError("magnetization series needs at least one period");
    StateVector psi = StateVector::basis(floquet.sites(), initial);
    TimeSeries series;
    series.initial = initial;
    series.period = period;
    series.initial_value = total_magnetization(psi);
    series.values.reserve(static_cast<std::size_t>(periods));
    Vector v = psi.amplitudes();
    for (int m = 1; m <= periods; ++m) {
        floquet.apply(v);
        series.values.push_back(total_magnetization(StateVector(floquet.sites(), v)));
    }
    return series;
}

TimeSeries magnetization_series(const ModelParams& params, const DisorderRealization& disorder,
                                Configuration initial, int periods) {
    make_configuration(params.sites, initial.index);
    return magnetization_series(StructuredFloquet(params, disorder), params.period(), initial,
                                periods);
}

Eigen::MatrixXd magnetization_table(const StructuredFloquet& floquet, int periods) {
    if (periods < 0) throw ArgumentError("period count must be nonnegative");
    const auto dim = static_cast<Eigen::Index>(floquet.dimension());
    const int n = floquet.sites();
    Eigen::VectorXd spin_sum(dim);
    for (Eigen::Index c = 0; c < dim; ++c)
        spin_sum[c] = static_cast<double>(n - 2 * std::popcount(static_cast<unsigned>(c))) / n;

    Eigen::MatrixXd table(dim, periods + 1);
    Matrix columns = Matrix::Identity(dim, dim);
    for (int m = 0; m <= periods; ++m) {
        if (m > 0) floquet.apply(columns);
        table.col(m) = columns.cwiseAbs2().transpose() * spin_sum;
    }
    return table;
}

namespace {

// In-place iterative radix-2 transform, forward sign.
void fft_radix2(std::vector<Complex>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle = -2.0 * std::numbers::pi / static_cast<double>(len);
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                const Complex w = std::polar(1.0, angle * static_cast<double>(k));
                const Complex u = a[start + k];
                const Complex v = a[start + k + len / 2] * w;
                a[start + k] = u + v;
                a[start + k + len / 2] = u - v;
            }
        }
    }
}

}  // namespace

std::vector<Complex> dft(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n == 0) throw ArgumentError("DFT of an empty series");
    // exp(-2 pi i k n / n) = 1, so the m = n sample plays the role of index 0.
    std::vector<Complex> a(n);
    a[0] = values[n - 1];
    for (std::size_t m = 1; m < n; ++m) a[m] = values[m - 1];

    if (std::has_single_bit(n)) {
        fft_radix2(a);
    } else {
        std::vector<Complex> out(n);
        for (std::size_t k = 0; k < n; ++k) {
            Complex acc = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                acc += a[j] * std::polar(1.0, -2.0 * std::numbers::pi *
                                                  static_cast<double>((k * j) % n) /
                                                  static_cast<double>(n));
            out[k] = acc;
        }
        a = std::move(out);
    }
    for (auto& c : a) c /= static_cast<double>(n);
    return a;
}

std::vector<Complex> dft(const TimeSeries& series) { return dft(series.values); }

PowerSpectrum power_spectrum(const TimeSeries& series) {
    PowerSpectrum p;
    p.period = series.period;
    for (const Complex& c : dft(series)) p.values.push_back(std::norm(c));
    return p;
}

double spectrum_fidelity(std::span<const double> reference, std::span<const double> spectrum) {
    if (reference.size() != spectrum.size())
        throw ArgumentError("power spectra have different lengths");
    double dot = 0.0, ref2 = 0.0, spec2 = 0.0;
    for (std::size_t k = 0; k < reference.size(); ++k) {
        dot += reference[k] * spectrum[k];
        ref2 += reference[k] * reference[k];
        spec2 += spectrum[k] * spectrum[k];
    }
    const double ref_norm = std::sqrt(ref2);
    const double spec_norm = std::sqrt(spec2);
    if (ref_norm < kZeroPowerNorm || spec_norm < kZeroPowerNorm)
        throw UndefinedFidelityError("power spectrum fidelity undefined for a zero spectrum");
    const double cosine = std::clamp(dot / (ref_norm * spec_norm), 0.0, 1.0);
    return std::sqrt(cosine);
}

double spectrum_fidelity(const PowerSpectrum& reference, const PowerSpectrum& spectrum) {
    return spectrum_fidelity(reference.values, spectrum.values);
}

namespace {

// Power spectra of M(mT), m = 1..n, for every initial configuration; row i = configuration.
Eigen::MatrixXd power_table(const ModelParams& params, const DisorderRealization& disorder,
                            int periods) {
    const Eigen::MatrixXd mags = magnetization_table(StructuredFloquet(params, disorder), periods);
    Eigen::MatrixXd power(mags.rows(), periods);
    std::vector<double> row(static_cast<std::size_t>(periods));
    for (Eigen::Index i = 0; i < mags.rows(); ++i) {
        for (int m = 1; m <= periods; ++m) row[static_cast<std::size_t>(m - 1)] = mags(i, m);
        const auto coeffs = dft(row);
        for (int k = 0; k < periods; ++k) power(i, k) = std::norm(coeffs[static_cast<std::size_t>(k)]);
    }
    return power;
}

double fidelity_or_nan(const Eigen::MatrixXd& ref, const Eigen::MatrixXd& spec, Eigen::Index i,
                       std::size_t& undefined) {
    const Eigen::VectorXd a = ref.row(i).transpose();
    const Eigen::VectorXd b = spec.row(i).transpose();
    try {
        return spectrum_fidelity(std::span<const double>(a.data(), static_cast<std::size_t>(a.size())),
                                 std::span<const double>(b.data(), static_cast<std::size_t>(b.size())));
    } catch (const UndefinedFidelityError&) {
        ++undefined;
        return std::numeric_limits<double>::quiet_NaN();
    }
}

}  // namespace

FidelityMaps fidelity_map(const ModelParams& base, const DisorderRealization& disorder,
                          std::span<const double> lambdas, int periods, std::size_t workers) {
    if (periods < 1) throw ArgumentError("fidelity map needs at least one period");
    for (double l : lambdas)
        if (!(l >= 0.0 && l <= 1.0)) throw ArgumentError("lambda grid value outside [0, 1]");

    const Eigen::MatrixXd ref4 = power_table(base.with_lambda(0.0), disorder, periods);
    const Eigen::MatrixXd ref2 = power_table(base.with_lambda(1.0), disorder, periods);

    const auto dim = ref4.rows();
    const auto cols = static_cast<Eigen::Index>(lambdas.size());
    FidelityMaps maps;
    maps.lambdas.assign(lambdas.begin(), lambdas.end());
    maps.four_t.resize(dim, cols);
    maps.two_t.resize(dim, cols);

    std::vector<std::size_t> undefined4(lambdas.size(), 0), undefined2(lambdas.size(), 0);
    parallel_for_index(lambdas.size(), workers, [&](std::size_t g) {
        const Eigen::MatrixXd power = power_table(base.with_lambda(lambdas[g]), disorder, periods);
        const auto col = static_cast<Eigen::Index>(g);
        for (Eigen::Index i = 0; i < dim; ++i) {
            maps.four_t(i, col) = fidelity_or_nan(ref4, power, i, undefined4[g]);
            maps.two_t(i, col) = fidelity_or_nan(ref2, power, i, undefined2[g]);
        }
    });
    for (std::size_t g = 0; g < lambdas.size(); ++g) {
        maps.undefined_four_t += undefined4[g];
        maps.undefined_two_t += undefined2[g];
    }
    return maps;
}

WalkRecord walk_populations(const ModelParams& params, const DisorderRealization& disorder,
                            Configuration initial, int periods) {
    if (periods < 0) throw ArgumentError("period count must be nonnegative");
    make_configuration(params.sites, initial.index);
    const StructuredFloquet floquet(params, disorder);
    const auto dim = static_cast<Eigen::Index>(floquet.dimension());
    WalkRecord walk;
    walk.initial = initial;
    walk.populations.resize(periods + 1, dim);
    Vector v = StateVector::basis(params.sites, initial).amplitudes();
    for (int m = 0; m <= periods; ++m) {
        if (m > 0) floquet.apply(v);
        walk.populations.row(m) = v.cwiseAbs2().transpose();
    }
    return walk;
}

std::vector<std::size_t> walk_support(const WalkRecord& walk, double threshold) {
    std::vector<std::size_t> support;
    const Eigen::VectorXd peak = walk.populations.colwise().maxCoeff().transpose();
    for (Eigen::Index l = 0; l < peak.size(); ++l)
        if (peak[l] > threshold) support.push_back(static_cast<std::size_t>(l));
    return support;
}

}  // namespace metamorph
