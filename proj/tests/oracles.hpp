#pragma once

// Test-only reference computations. Nothing here calls the code paths it is
// used to check: samples come from the time-domain Dirichlet route, sums are
// evaluated term by term, and matchings are enumerated explicitly.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <vector>

#include "fri/random.hpp"
#include "fri/signal.hpp"

namespace fri::test {

/// Random stream with U(lo, hi) * tau locations and U(0.5, 10) amplitudes;
/// redrawn until all circular gaps are at least min_gap * tau.
inline DiracStream random_stream(Rng& rng, int K, double tau, double min_gap = 0.0)
{
    for (;;) {
        std::vector<double> t, a;
        for (int k = 0; k < K; ++k) t.push_back(tau * rng.uniform(-0.5, 0.5));
        for (int k = 0; k < K; ++k) a.push_back(rng.uniform(0.5, 10.0));
        bool ok = true;
        for (int i = 0; i < K && ok; ++i) {
            for (int j = i + 1; j < K && ok; ++j) {
                ok = std::abs(circular_difference(t[i], t[j], tau)) > std::max(min_gap * tau, 1e-12);
            }
        }
        if (ok) return DiracStream::from_unsorted(t, a, tau);
    }
}

/// Two-Dirac stream with first location uniform and the second at a
/// log-uniform separation in [min_gap, max_gap] * tau.
inline DiracStream random_pair(Rng& rng, double tau, double min_gap, double max_gap)
{
    const double gap = std::pow(10.0, rng.uniform(std::log10(min_gap), std::log10(max_gap)));
    const double t0 = tau * rng.uniform(-0.5, 0.5);
    return DiracStream::from_unsorted({t0, t0 + gap * tau},
                                      {rng.uniform(0.5, 10.0), rng.uniform(0.5, 10.0)}, tau);
}

/// sum_k b_k u_k^m evaluated term by term with explicit powers.
inline std::vector<cdouble> moments_by_definition(const DiracStream& stream,
                                                  const SamplingConfig& config)
{
    const double T = config.interval();
    std::vector<cdouble> s(config.num_moments());
    for (int m = 0; m < config.num_moments(); ++m) {
        for (std::size_t k = 0; k < stream.size(); ++k) {
            const double x = stream.locations()[k] / T;
            const cdouble b = stream.amplitudes()[k] * std::exp(cdouble(0.0, config.omega0() * x));
            const cdouble u = std::exp(cdouble(0.0, config.lambda() * x));
            s[m] += b * std::pow(u, m);
        }
    }
    return s;
}

/// Central-difference Jacobian of dirichlet_samples with respect to
/// (a_0..a_{K-1}, t_0..t_{K-1}); location step h_t (signal-time units).
inline Eigen::MatrixXd finite_difference_jacobian(const DiracStream& stream,
                                                  const SamplingConfig& config, double h_t)
{
    const int K = static_cast<int>(stream.size());
    const int N = config.num_samples();
    Eigen::MatrixXd J(N, 2 * K);
    auto eval = [&](std::vector<double> t, std::vector<double> a) {
        // Construct directly; small steps keep the ordering intact.
        return dirichlet_samples(DiracStream(std::move(t), std::move(a), stream.period()), config).values;
    };
    for (int k = 0; k < K; ++k) {
        const double h_a = 1e-6 * stream.amplitudes()[k];
        auto ap = stream.amplitudes(), am = stream.amplitudes();
        ap[k] += h_a;
        am[k] -= h_a;
        const auto yp = eval(stream.locations(), ap);
        const auto ym = eval(stream.locations(), am);
        for (int n = 0; n < N; ++n) J(n, k) = (yp[n] - ym[n]) / (2 * h_a);

        auto tp = stream.locations(), tm = stream.locations();
        tp[k] += h_t;
        tm[k] -= h_t;
        const auto zp = eval(tp, stream.amplitudes());
        const auto zm = eval(tm, stream.amplitudes());
        for (int n = 0; n < N; ++n) J(n, K + k) = (zp[n] - zm[n]) / (2 * h_t);
    }
    return J;
}

/// CRB on locations from an arbitrary Jacobian: sigma * sqrt(diag((J^T J)^-1)).
inline std::vector<double> crb_from_jacobian(const Eigen::MatrixXd& J, double sigma)
{
    const Eigen::MatrixXd inv = (J.transpose() * J).inverse();
    const auto K = J.cols() / 2;
    std::vector<double> out;
    for (Eigen::Index k = 0; k < K; ++k) out.push_back(sigma * std::sqrt(inv(K + k, K + k)));
    return out;
}

/// Exhaustive matching: every permutation scored, minimum kept, first in
/// lexicographic order on ties.
inline std::vector<std::size_t> brute_force_matching(const std::vector<double>& t_hat,
                                                     const std::vector<double>& t_true, double tau)
{
    std::vector<std::vector<std::size_t>> perms;
    std::vector<std::size_t> p(t_hat.size());
    std::iota(p.begin(), p.end(), 0);
    do perms.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));

    auto circ = [tau](double d) {
        d = std::fmod(d, tau);
        if (d > tau / 2) d -= tau;
        if (d < -tau / 2) d += tau;
        return std::abs(d);
    };
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> arg;
    for (const auto& q : perms) {
        double c = 0.0;
        for (std::size_t k = 0; k < q.size(); ++k) c += circ(t_hat[q[k]] - t_true[k]);
        if (c < best) {
            best = c;
            arg = q;
        }
    }
    return arg;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs_diff(const std::vector<cdouble>& a, const std::vector<cdouble>& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// Largest distance from an estimated root to its nearest true root.
inline double root_set_error(const std::vector<cdouble>& est, const std::vector<cdouble>& truth)
{
    double worst = 0.0;
    for (const auto& e : est) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& t : truth) best = std::min(best, std::abs(e - t));
        worst = std::max(worst, best);
    }
    return worst;
}

inline std::vector<cdouble> true_roots(const DiracStream& stream, const SamplingConfig& config)
{
    std::vector<cdouble> u;
    for (double t : stream.locations()) {
        u.push_back(std::exp(cdouble(0.0, config.lambda() * t / config.interval())));
    }
    return u;
}

} // namespace fri::test
