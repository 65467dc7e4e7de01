#include "metamorph/hamiltonians.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "metamorph/errors.hpp"

namespace metamorph {

void ModelParams::validate() const {
    if (sites < 2 || sites > kMaxSites || sites % 2 != 0)
        throw ArgumentError("site count must be even and within [2, " + std::to_string(kMaxSites) +
                            "], got " + std::to_string(sites));
    if (!(t1 > 0.0) || !(t2 > 0.0) || !(t3 > 0.0))
        throw ArgumentError("segment durations must be positive");
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw ArgumentError("lambda must lie in [0, 1], got " + std::to_string(lambda));
    if (!(disorder_bound >= 0.0)) throw ArgumentError("disorder bound must be nonnegative");
    for (double v : {rotation_rate, ising_strength, ising_exponent, flip_flop, disorder_bound})
        if (!std::isfinite(v)) throw ArgumentError("coupling is not finite");
}

ModelParams default_params(int sites) {
    using std::numbers::pi;
    ModelParams p;
    p.sites = sites;
    p.t1 = p.t2 = p.t3 = 1.0 / 3.0;
    p.rotation_rate = (pi / 2) / p.t1;
    p.ising_strength = 0.15 / p.t2;
    p.ising_exponent = 1.51;
    p.disorder_bound = pi / p.t3;
    p.flip_flop = (pi / 4) / p.t3;
    p.validate();
    return p;
}

DisorderRealization sample_disorder(const ModelParams& params, std::uint64_t seed) {
    params.validate();
    std::mt19937_64 engine(seed);
    DisorderRealization d;
    d.seed = seed;
    d.fields.reserve(static_cast<std::size_t>(params.sites));
    for (int l = 0; l < params.sites; ++l) {
        // 53-bit mantissa draw; fixed mapping keeps realizations identical across standard libraries.
        const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
        d.fields.push_back(params.disorder_bound * u);
    }
    return d;
}

double ising_coupling(const ModelParams& params, int l, int m) {
    return params.ising_strength / std::pow(std::abs(l - m), params.ising_exponent);
}

namespace {

void check_disorder(const ModelParams& params, const DisorderRealization& disorder) {
    if (disorder.fields.size() != static_cast<std::size_t>(params.sites))
        throw ArgumentError("disorder realization has " + std::to_string(disorder.fields.size()) +
                            " fields for " + std::to_string(params.sites) + " sites");
}

}  // namespace

Eigen::VectorXd h2_diagonal(const ModelParams& params, const DisorderRealization& disorder) {
    params.validate();
    check_disorder(params, disorder);
    const int n = params.sites;
    const auto dim = static_cast<Eigen::Index>(params.dimension());
    Eigen::VectorXd diag(dim);
    for (Eigen::Index c = 0; c < dim; ++c) {
        const Configuration conf{static_cast<std::uint32_t>(c)};
        double e = 0.0;
        for (int l = 1; l <= n; ++l)
            for (int m = l + 1; m <= n; ++m)
                e += ising_coupling(params, l, m) * conf.spin(l) * conf.spin(m);
        double field = 0.0;
        for (int l = 1; l <= n; ++l) field += disorder.fields[l - 1] * conf.spin(l);
        diag[c] = e + (1.0 - params.lambda) * field;
    }
    return diag;
}

HermitianOperator build_h1(const ModelParams& params) {
    params.validate();
    const auto dim = static_cast<Eigen::Index>(params.dimension());
    Matrix h = Matrix::Zero(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c) {
        const Configuration conf{static_cast<std::uint32_t>(c)};
        for (int l = 1; l <= params.sites; ++l) {
            const double amplitude =
                (l % 2 == 1) ? params.rotation_rate : params.lambda * params.rotation_rate;
            h(conf.flipped(l).index, c) += amplitude;
        }
    }
    return HermitianOperator(std::move(h));
}

HermitianOperator build_h2(const ModelParams& params, const DisorderRealization& disorder) {
    const Eigen::VectorXd diag = h2_diagonal(params, disorder);
    return HermitianOperator(diag.cast<Complex>().asDiagonal().toDenseMatrix());
}

HermitianOperator build_h3(const ModelParams& params, const DisorderRealization& disorder) {
    params.validate();
    check_disorder(params, disorder);
    const auto dim = static_cast<Eigen::Index>(params.dimension());
    Matrix h = Matrix::Zero(dim, dim);
    const double hop = (1.0 - params.lambda) * params.flip_flop;
    for (Eigen::Index c = 0; c < dim; ++c) {
        const Configuration conf{static_cast<std::uint32_t>(c)};
        // (XX + YY) = 2 (|01><10| + |10><01|) on each dimer
        for (int l = 1; l < params.sites; l += 2) {
            if (conf.bit(l) != conf.bit(l + 1))
                h(conf.flipped(l).flipped(l + 1).index, c) += 2.0 * hop;
        }
        double field = 0.0;
        for (int l = 1; l <= params.sites; ++l) field += disorder.fields[l - 1] * conf.spin(l);
        h(c, c) += params.lambda * field;
    }
    return HermitianOperator(std::move(h));
}

}  // namespace metamorph
