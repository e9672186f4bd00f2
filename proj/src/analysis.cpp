#include "fri/analysis.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

#include "fri/error.hpp"

namespace fri {

Eigen::MatrixXd sample_jacobian(const DiracStream& stream, const SamplingConfig& config)
{
    if (stream.period() != config.period()) {
        throw InvalidArgument("stream period does not match sampling period");
    }
    const int n_samples = config.num_samples();
    const int K = static_cast<int>(stream.size());
    const double T = config.interval();

    Eigen::MatrixXd J(n_samples, 2 * K);
    for (int k = 0; k < K; ++k) {
        const double a = stream.amplitudes()[k];
        const double x = stream.locations()[k] / T;
        for (int n = 0; n < n_samples; ++n) {
            cdouble d_amp{}, d_loc{};
            for (int m = 0; m < config.num_moments(); ++m) {
                const double w = config.omega(m);
                const cdouble phase = std::polar(1.0, w * (x - n));
                d_amp += phase;
                d_loc += cdouble(0.0, a * w / T) * phase;
            }
            J(n, k) = d_amp.real() / n_samples;
            J(n, K + k) = d_loc.real() / n_samples;
        }
    }
    return J;
}

CrbResult crlb_location_std(const DiracStream& stream, const SamplingConfig& config, double sigma)
{
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw InvalidArgument("noise standard deviation must be positive");
    }
    const Eigen::MatrixXd J = sample_jacobian(stream, config);
    const Eigen::MatrixXd gram = J.transpose() * J;
    const auto K = static_cast<Eigen::Index>(stream.size());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();

    CrbResult out;
    if (!(lo > 1e-14 * hi)) {
        out.bounded = false;
        out.fisher_condition = std::numeric_limits<double>::infinity();
        out.per_location_std.assign(K, std::numeric_limits<double>::infinity());
        return out;
    }
    out.fisher_condition = hi / lo;

    // F^-1 = sigma^2 (J^T J)^-1, so the bound is sigma * sqrt(diag (J^T J)^-1).
    const Eigen::MatrixXd inv = gram.ldlt().solve(Eigen::MatrixXd::Identity(2 * K, 2 * K));
    for (Eigen::Index k = 0; k < K; ++k) {
        out.per_location_std.push_back(sigma * std::sqrt(inv(K + k, K + k)));
    }
    return out;
}

double breakdown_psnr(double delta_t_over_T, int order, double lambda)
{
    if (order < 0 || order % 2 != 0) {
        throw InvalidArgument("reproduction order P must be even and non-negative");
    }
    if (!(lambda > 0.0) || !std::isfinite(delta_t_over_T) || delta_t_over_T < 0.0) {
        throw InvalidArgument("breakdown PSNR needs lambda > 0 and a finite separation >= 0");
    }
    const double M = order / 2 + 1.0;
    const double x = 0.5 * lambda * delta_t_over_T;

    // gap = M - sin(M x) / sin(x); the ratio has removable singularities at x = l*pi.
    double gap = 0.0;
    const double turns = std::round(x / kPi);
    const double r = x - turns * kPi;
    if (turns == 0.0 && std::abs(r) < 1e-4) {
        gap = M * (M * M - 1.0) * r * r / 6.0 * (1.0 - (3.0 * M * M - 7.0) * r * r / 60.0);
    } else if (std::abs(std::sin(x)) < 1e-12) {
        const long l = static_cast<long>(turns);
        const double sign = ((l * static_cast<long>(M - 1.0)) % 2 == 0) ? 1.0 : -1.0;
        gap = M - M * sign;
    } else {
        gap = M - std::sin(M * x) / std::sin(x);
    }
    if (gap == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return 10.0 * std::log10(8.0 * M * std::log(M) / (gap * gap));
}

double location_std(const std::vector<EstimateRecord>& estimates, const DiracStream& stream,
                    std::size_t k)
{
    if (estimates.empty()) {
        throw InvalidArgument("location_std needs at least one estimate");
    }
    if (k >= stream.size()) {
        throw InvalidArgument("Dirac index out of range");
    }
    const auto& truth = stream.locations();
    double sum_sq = 0.0;
    for (const auto& rec : estimates) {
        const auto perm = match_estimates(rec.locations, truth, stream.period());
        const double d = circular_difference(rec.locations[perm[k]], truth[k], stream.period());
        sum_sq += d * d;
    }
    return std::sqrt(sum_sq / static_cast<double>(estimates.size()));
}

} // namespace fri
