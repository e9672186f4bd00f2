#pragma once

#include <Eigen/Core>

#include <vector>

#include "fri/estimators.hpp"
#include "fri/signal.hpp"

namespace fri {

struct CrbResult {
    /// Lower bound on the standard deviation of each t_k. +inf when the
    /// Fisher matrix is singular.
    std::vector<double> per_location_std;
    double fisher_condition = 0.0;
    bool bounded = true;
};

/// Jacobian of the noiseless samples with respect to
/// (a_0..a_{K-1}, t_0..t_{K-1}); N x 2K, analytic.
Eigen::MatrixXd sample_jacobian(const DiracStream& stream, const SamplingConfig& config);

/// Cramer-Rao bound for the Gaussian sample model y = f(theta) + N(0, sigma^2 I).
CrbResult crlb_location_std(const DiracStream& stream, const SamplingConfig& config, double sigma);

/// Breakdown PSNR (dB) below which a subspace swap becomes possible for two
/// equal-amplitude Diracs separated by delta_t_over_T sampling intervals.
/// Valid only for K = 2 with a_0 = a_1.
double breakdown_psnr(double delta_t_over_T, int order, double lambda);

/// f_sd: RMS of the circular deviation of the matched k-th location over all
/// records. Each record is matched to the truth with match_estimates first.
double location_std(const std::vector<EstimateRecord>& estimates, const DiracStream& stream,
                    std::size_t k);

} // namespace fri
