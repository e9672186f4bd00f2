#include "fri/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fri/error.hpp"
#include "fri/random.hpp"

namespace fri {

SamplingConfig::SamplingConfig(int num_samples, double period) : n_(num_samples), tau_(period)
{
    if (num_samples < 1 || num_samples % 2 == 0) {
        throw InvalidArgument("number of samples must be a positive odd integer, got " +
                              std::to_string(num_samples));
    }
    if (!(period > 0.0) || !std::isfinite(period)) {
        throw InvalidArgument("period must be positive and finite");
    }
}

DiracStream::DiracStream(std::vector<double> locations, std::vector<double> amplitudes,
                         double period)
    : t_(std::move(locations)), a_(std::move(amplitudes)), tau_(period)
{
    if (!(period > 0.0) || !std::isfinite(period)) {
        throw InvalidArgument("period must be positive and finite");
    }
    if (t_.empty()) {
        throw InvalidArgument("a Dirac stream needs at least one Dirac");
    }
    if (t_.size() != a_.size()) {
        throw InvalidArgument("locations and amplitudes differ in length");
    }
    for (std::size_t k = 0; k < t_.size(); ++k) {
        if (!(t_[k] >= -tau_ / 2) || !(t_[k] < tau_ / 2)) {
            throw InvalidArgument("location outside [-tau/2, tau/2)");
        }
        if (k > 0 && !(t_[k] > t_[k - 1])) {
            throw InvalidArgument("locations must be strictly increasing");
        }
        if (!(a_[k] > 0.0) || !std::isfinite(a_[k])) {
            throw InvalidArgument("amplitudes must be positive and finite");
        }
    }
}

DiracStream DiracStream::from_unsorted(std::vector<double> locations,
                                       std::vector<double> amplitudes, double period)
{
    if (locations.size() != amplitudes.size()) {
        throw InvalidArgument("locations and amplitudes differ in length");
    }
    std::vector<std::size_t> order(locations.size());
    std::iota(order.begin(), order.end(), 0);
    for (auto& t : locations) {
        t = wrap_location(t, period);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return locations[i] < locations[j]; });
    std::vector<double> t, a;
    t.reserve(order.size());
    a.reserve(order.size());
    for (auto i : order) {
        t.push_back(locations[i]);
        a.push_back(amplitudes[i]);
    }
    return DiracStream(std::move(t), std::move(a), period);
}

double SampleVector::peak() const
{
    double p = 0.0;
    for (double v : values) {
        p = std::max(p, std::abs(v));
    }
    return p;
}

double NoiseSpec::sigma_for(const SampleVector& clean) const
{
    return clean.peak() * std::pow(10.0, -psnr_db / 20.0);
}

SynthesisResult inverse_fourier_map(std::span<const cdouble> moments, const SamplingConfig& config)
{
    const int n_samples = config.num_samples();
    if (static_cast<int>(moments.size()) != config.num_moments()) {
        throw InvalidArgument("moment vector length does not match P + 1");
    }
    SynthesisResult out;
    out.values.resize(n_samples);
    for (int n = 0; n < n_samples; ++n) {
        cdouble acc{};
        for (int m = 0; m < config.num_moments(); ++m) {
            acc += moments[m] * std::polar(1.0, -config.omega(m) * n);
        }
        acc /= static_cast<double>(n_samples);
        out.values[n] = acc.real();
        out.max_imag = std::max(out.max_imag, std::abs(acc.imag()));
    }
    return out;
}

std::vector<cdouble> stream_moments(const DiracStream& stream, const SamplingConfig& config)
{
    if (stream.period() != config.period()) {
        throw InvalidArgument("stream period does not match sampling period");
    }
    const double T = config.interval();
    std::vector<cdouble> s(config.num_moments());
    for (int m = 0; m < config.num_moments(); ++m) {
        cdouble acc{};
        for (std::size_t k = 0; k < stream.size(); ++k) {
            acc += stream.amplitudes()[k] * std::polar(1.0, config.omega(m) * stream.locations()[k] / T);
        }
        s[m] = acc;
    }
    return s;
}

SynthesisResult synthesize_samples_detailed(const DiracStream& stream, const SamplingConfig& config)
{
    const auto s = stream_moments(stream, config);
    return inverse_fourier_map(s, config);
}

SampleVector synthesize_samples(const DiracStream& stream, const SamplingConfig& config)
{
    return {synthesize_samples_detailed(stream, config).values, config};
}

double dirichlet_kernel(double x, int n)
{
    // Reduce x to [-N/2, N/2); for odd N the kernel has period N.
    const double period = static_cast<double>(n);
    double r = std::fmod(x, period);
    if (r >= period / 2) r -= period;
    if (r < -period / 2) r += period;

    const double px = kPi * r;
    if (std::abs(r) < 1e-5) {
        // sin(pi r)/sin(pi r/N) = N (1 - (pi r)^2 (1 - 1/N^2) / 6 + O(r^4))
        return period * (1.0 - px * px * (1.0 - 1.0 / (period * period)) / 6.0);
    }
    return std::sin(px) / std::sin(px / period);
}

SampleVector dirichlet_samples(const DiracStream& stream, const SamplingConfig& config)
{
    if (stream.period() != config.period()) {
        throw InvalidArgument("stream period does not match sampling period");
    }
    const int n_samples = config.num_samples();
    const double T = config.interval();
    SampleVector y{std::vector<double>(n_samples, 0.0), config};
    for (int n = 0; n < n_samples; ++n) {
        double acc = 0.0;
        for (std::size_t k = 0; k < stream.size(); ++k) {
            acc += stream.amplitudes()[k] * dirichlet_kernel(stream.locations()[k] / T - n, n_samples);
        }
        y.values[n] = acc / n_samples;
    }
    return y;
}

SampleVector add_noise(const SampleVector& samples, double sigma, std::uint64_t seed)
{
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw InvalidArgument("noise standard deviation must be positive");
    }
    Rng rng(seed);
    SampleVector out = samples;
    for (double& v : out.values) {
        if (!std::isfinite(v)) {
            throw InvalidArgument("samples must be finite");
        }
        v += sigma * rng.gaussian();
    }
    return out;
}

SampleVector add_noise(const SampleVector& samples, const NoiseSpec& noise)
{
    return add_noise(samples, noise.sigma_for(samples), noise.seed);
}

double circular_difference(double a, double b, double period)
{
    double d = std::fmod(a - b, period);
    if (d > period / 2) d -= period;
    if (d <= -period / 2) d += period;
    return d;
}

double wrap_location(double t, double period)
{
    if (t >= -period / 2 && t < period / 2) {
        return t;
    }
    double w = std::fmod(t + period / 2, period);
    if (w < 0) w += period;
    w -= period / 2;
    // fmod round-off can land exactly on +period/2.
    if (w >= period / 2) w -= period;
    return w;
}

} // namespace fri
