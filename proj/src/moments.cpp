#include "fri/moments.hpp"

#include <algorithm>
#include <cmath>

#include "fri/error.hpp"

namespace fri {

double MomentVector::symmetry_defect() const
{
    const std::size_t n = values.size();
    double worst = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        worst = std::max(worst, std::abs(values[n - 1 - m] - std::conj(values[m])));
    }
    return worst;
}

CoefficientMatrix coefficients(const SamplingConfig& config)
{
    const int rows = config.num_moments();
    const int cols = config.num_samples();
    ComplexMatrix c(rows, cols);
    for (int m = 0; m < rows; ++m) {
        for (int n = 0; n < cols; ++n) {
            c(m, n) = std::polar(1.0, config.omega(m) * n);
        }
    }
    return {std::move(c), config};
}

MomentVector samples_to_moments(const SampleVector& y)
{
    const auto& config = y.config;
    if (static_cast<int>(y.values.size()) != config.num_samples()) {
        throw InvalidArgument("sample vector length does not match N");
    }
    MomentVector s{std::vector<cdouble>(config.num_moments()), config};
    for (int m = 0; m < config.num_moments(); ++m) {
        cdouble acc{};
        for (int n = 0; n < config.num_samples(); ++n) {
            acc += std::polar(1.0, config.omega(m) * n) * y.values[n];
        }
        s.values[m] = acc;
    }
    return s;
}

SampleVector moments_to_samples(const MomentVector& s, double symmetry_tol)
{
    if (static_cast<int>(s.values.size()) != s.config.num_moments()) {
        throw InvalidArgument("moment vector length does not match P + 1");
    }
    double scale = 1.0;
    for (const auto& v : s.values) {
        scale = std::max(scale, std::abs(v));
    }
    if (s.symmetry_defect() > symmetry_tol * scale) {
        throw InvalidArgument("moments are not conjugate symmetric; samples would be complex");
    }
    return {inverse_fourier_map(s.values, s.config).values, s.config};
}

MomentVector exact_moments(const DiracStream& stream, const SamplingConfig& config)
{
    // b_k u_k^m with b_k = a_k e^{j w0 t_k/T}, u_k = e^{j lambda t_k/T}.
    const double T = config.interval();
    MomentVector s{std::vector<cdouble>(config.num_moments(), cdouble{}), config};
    for (std::size_t k = 0; k < stream.size(); ++k) {
        const double x = stream.locations()[k] / T;
        const cdouble b = stream.amplitudes()[k] * std::polar(1.0, config.omega0() * x);
        for (int m = 0; m < config.num_moments(); ++m) {
            s.values[m] += b * std::polar(1.0, config.lambda() * x * m);
        }
    }
    return s;
}

ComplexMatrix toeplitz_from_moments(std::span<const cdouble> s, Eigen::Index cols)
{
    const auto len = static_cast<Eigen::Index>(s.size());
    if (cols < 1 || cols > len) {
        throw InvalidArgument("Toeplitz column count out of range");
    }
    const Eigen::Index rows = len - cols + 1;
    ComplexMatrix t(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            t(i, j) = s[cols - 1 + i - j];
        }
    }
    return t;
}

} // namespace fri
