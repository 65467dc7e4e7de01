#pragma once

#include <cstdint>
#include <vector>

#include "metamorph/spin_core.hpp"

namespace metamorph {

// Couplings of the three-segment drive (hbar = 1). Segment k lasts duration[k].
struct ModelParams {
    int sites = 8;
    double lambda = 0.0;
    double t1 = 1.0 / 3.0;
    double t2 = 1.0 / 3.0;
    double t3 = 1.0 / 3.0;
    double rotation_rate = 0.0;   // g
    double ising_strength = 0.0;  // J0
    double ising_exponent = 0.0;  // mu
    double flip_flop = 0.0;       // Jxy, on the dimer bonds (2k-1, 2k)
    double disorder_bound = 0.0;  // W

    double period() const noexcept { return t1 + t2 + t3; }
    std::size_t dimension() const { return hilbert_dimension(sites); }

    // Throws ArgumentError on odd/out-of-range N, nonpositive durations, lambda outside [0,1].
    void validate() const;

    ModelParams with_lambda(double l) const {
        ModelParams p = *this;
        p.lambda = l;
        return p;
    }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// T = 1, T1 = T2 = T3 = 1/3, g T1 = pi/2, J0 T2 = 0.15, mu = 1.51, W T3 = pi, Jxy T3 = pi/4.
ModelParams default_params(int sites);

struct DisorderRealization {
    std::vector<double> fields;  // W_l for sites 1..N, stored at [l-1]
    std::uint64_t seed = 0;
};

// N independent uniform draws on [0, W] from mt19937_64(seed).
DisorderRealization sample_disorder(const ModelParams& params, std::uint64_t seed);

// J0 / |l - m|^mu, open chain.
double ising_coupling(const ModelParams& params, int l, int m);

// Diagonal of H2: sum_{l<m} J_lm s_l s_m + (1 - lambda) sum_l W_l s_l.
Eigen::VectorXd h2_diagonal(const ModelParams& params, const DisorderRealization& disorder);

// g sum_{odd l} sigma^x_l + lambda g sum_{even l} sigma^x_l
HermitianOperator build_h1(const ModelParams& params);
HermitianOperator build_h2(const ModelParams& params, const DisorderRealization& disorder);
// (1 - lambda) Jxy sum_k (XX + YY)_{2k-1,2k} + lambda sum_l W_l sigma^z_l
HermitianOperator build_h3(const ModelParams& params, const DisorderRealization& disorder);

}  // namespace metamorph
