#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace fri {

using cdouble = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Acquisition geometry for the maximum-order eMOMS setting: N samples per
/// period, reproduction of P + 1 = N exponentials at
/// omega_m = omega_0 + m * lambda with omega_0 = -P*pi/(P+1),
/// lambda = 2*pi/(P+1).
///
/// N must be odd so that the frequency set is symmetric about zero and the
/// samples are real.
class SamplingConfig {
public:
    SamplingConfig(int num_samples, double period);

    int num_samples() const noexcept { return n_; }
    double period() const noexcept { return tau_; }
    double interval() const noexcept { return tau_ / n_; }
    int order() const noexcept { return n_ - 1; }
    int num_moments() const noexcept { return n_; }
    double omega0() const noexcept { return -order() * kPi / n_; }
    double lambda() const noexcept { return 2.0 * kPi / n_; }
    double omega(int m) const noexcept { return omega0() + m * lambda(); }

    friend bool operator==(const SamplingConfig&, const SamplingConfig&) = default;

private:
    int n_;
    double tau_;
};

/// Ground truth: one period of a tau-periodic stream of K Diracs.
/// Locations are strictly increasing inside [-tau/2, tau/2); amplitudes > 0.
class DiracStream {
public:
    DiracStream(std::vector<double> locations, std::vector<double> amplitudes, double period);

    /// Builds a stream from unordered (location, amplitude) pairs, sorting by
    /// location and wrapping locations into [-tau/2, tau/2).
    static DiracStream from_unsorted(std::vector<double> locations,
                                     std::vector<double> amplitudes, double period);

    std::size_t size() const noexcept { return t_.size(); }
    const std::vector<double>& locations() const noexcept { return t_; }
    const std::vector<double>& amplitudes() const noexcept { return a_; }
    double period() const noexcept { return tau_; }

private:
    std::vector<double> t_;
    std::vector<double> a_;
    double tau_;
};

struct SampleVector {
    std::vector<double> values;
    SamplingConfig config;

    double peak() const;
};

/// Additive white Gaussian noise referenced to the peak sample:
/// PSNR = 10 log10(max_n |y[n]|^2 / sigma^2).
struct NoiseSpec {
    double psnr_db = 0.0;
    std::uint64_t seed = 0;

    double sigma_for(const SampleVector& clean) const;
};

/// Result of the inverse Fourier map before the imaginary part is dropped.
struct SynthesisResult {
    std::vector<double> values;
    double max_imag = 0.0;
};

/// y[n] = (1/N) sum_m s[m] exp(-j omega_m n). Shared by the sample
/// synthesizer and the moment-to-sample map.
SynthesisResult inverse_fourier_map(std::span<const cdouble> moments, const SamplingConfig& config);

/// s[m] = sum_k a_k exp(j omega_m t_k / T).
std::vector<cdouble> stream_moments(const DiracStream& stream, const SamplingConfig& config);

/// Noiseless samples obtained by Fourier synthesis of the stream's moments.
SampleVector synthesize_samples(const DiracStream& stream, const SamplingConfig& config);

/// Same as synthesize_samples but also reports the discarded imaginary residue.
SynthesisResult synthesize_samples_detailed(const DiracStream& stream,
                                            const SamplingConfig& config);

/// Periodic sinc D(x) = sin(pi x) / sin(pi x / N), equal to N at x = 0 mod N.
double dirichlet_kernel(double x, int n);

/// Time-domain route: y[n] = (1/N) sum_k a_k D(t_k/T - n).
SampleVector dirichlet_samples(const DiracStream& stream, const SamplingConfig& config);

/// y + eps, eps ~ N(0, sigma^2) i.i.d. from Rng(seed).
SampleVector add_noise(const SampleVector& samples, double sigma, std::uint64_t seed);

/// add_noise with sigma derived from the PSNR against `samples` itself.
SampleVector add_noise(const SampleVector& samples, const NoiseSpec& noise);

/// Distance on the circle of circumference `period`, in (-period/2, period/2].
double circular_difference(double a, double b, double period);

/// Wraps t into [-period/2, period/2).
double wrap_location(double t, double period);

} // namespace fri
