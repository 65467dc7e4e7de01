#pragma once

#include <span>
#include <vector>

#include "metamorph/floquet.hpp"
#include "metamorph/hamiltonians.hpp"

namespace metamorph {

// M(mT) for m = 1..n; M(0) is kept separately since the transform window starts at m = 1.
struct TimeSeries {
    std::vector<double> values;
    double initial_value = 0.0;
    double period = 1.0;
    Configuration initial;
};

struct PowerSpectrum {
    std::vector<double> values;  // |M(k)|^2, k = 0..n-1
    double period = 1.0;

    std::size_t size() const noexcept { return values.size(); }
    // omega_k = 2 pi k / (n T)
    double frequency(std::size_t k) const;
};

struct WalkRecord {
    Eigen::MatrixXd populations;  // row m = period, column l = configuration
    Configuration initial;
};

// psi_m = F^m psi_0 for m = 0..n by repeated application.
std::vector<StateVector> evolve_stroboscopic(const UnitaryOperator& floquet, const StateVector& psi0,
                                             int periods);

TimeSeries magnetization_series(const ModelParams& params, const DisorderRealization& disorder,
                                Configuration initial, int periods);
TimeSeries magnetization_series(const StructuredFloquet& floquet, double period,
                                Configuration initial, int periods);

// Total magnetization of F^m |i> for every configuration i (rows) and m = 0..n (columns).
Eigen::MatrixXd magnetization_table(const StructuredFloquet& floquet, int periods);

// (1/n) sum_{m=1}^{n} exp(-2 pi i k m / n) x_m, k = 0..n-1, where x_m = values[m-1].
std::vector<Complex> dft(std::span<const double> values);
std::vector<Complex> dft(const TimeSeries& series);

PowerSpectrum power_spectrum(const TimeSeries& series);

// sqrt(V_ref . V / (|V_ref| |V|)). UndefinedFidelityError when either vector has norm below
// kZeroPowerNorm; ArgumentError on a length mismatch.
double spectrum_fidelity(const PowerSpectrum& reference, const PowerSpectrum& spectrum);
double spectrum_fidelity(std::span<const double> reference, std::span<const double> spectrum);

inline constexpr double kZeroPowerNorm = 1e-16;

// Fidelities against the lambda = 0 (4T) and lambda = 1 (2T) power spectra, one shared disorder
// realization. Matrices are configurations x lambdas; undefined cells hold NaN.
struct FidelityMaps {
    std::vector<double> lambdas;
    Eigen::MatrixXd four_t;
    Eigen::MatrixXd two_t;
    std::size_t undefined_four_t = 0;
    std::size_t undefined_two_t = 0;
};

FidelityMaps fidelity_map(const ModelParams& base, const DisorderRealization& disorder,
                          std::span<const double> lambdas, int periods, std::size_t workers = 1);

// populations[m][l] = |<l|F^m|i>|^2, m = 0..n.
WalkRecord walk_populations(const ModelParams& params, const DisorderRealization& disorder,
                            Configuration initial, int periods);

// Configurations whose population exceeds `threshold` at some period, ascending.
std::vector<std::size_t> walk_support(const WalkRecord& walk, double threshold);

}  // namespace metamorph
