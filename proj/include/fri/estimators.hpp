#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fri/moments.hpp"

namespace fri {

enum class Method {
    prony,
    prony_cadzow,
    matrix_pencil,
    matrix_pencil_cadzow,
    nn_direct,
    nn_denoise_pencil,
};

std::string_view to_string(Method m);
Method parse_method(std::string_view name);

/// Methods implemented natively (the nn_* entries only arrive via ingestion).
bool is_native(Method m);

/// One method's estimate for one realization.
struct EstimateRecord {
    Method method = Method::matrix_pencil;
    std::vector<double> locations;  ///< sorted ascending, in [-tau/2, tau/2)
    std::vector<double> amplitudes; ///< aligned with `locations`; NaN if unknown
    double period = 1.0;

    // Routing keys for ingested records and sweep bookkeeping.
    double psnr_db = 0.0;
    double delta_t = 0.0;
    long realization = 0;

    std::map<std::string, double> diagnostics;
};

struct CadzowOptions {
    int max_iters = 20;
    double tol = 1e-8;
};

struct CadzowResult {
    MomentVector moments;
    int iterations = 0;
    /// sigma_{K+1} / sigma_1 of the Toeplitz matrix at the start of each iteration.
    std::vector<double> singular_ratio_history;
};

/// Annihilating filter h (length K+1): the right singular vector of the
/// smallest singular value of the (P+1-K) x (K+1) Toeplitz matrix
/// S[i][j] = s[K+i-j]. Unit norm, phase fixed so that h[0] is real positive.
ComplexVector annihilating_filter(const MomentVector& s, int num_diracs);

/// Prony's method: the K roots of sum_j h[j] z^{K-j}.
std::vector<cdouble> prony(const MomentVector& s, int num_diracs);

/// Alternating projection onto rank-K matrices and Toeplitz structure,
/// on the near-square Toeplitz embedding of s.
CadzowResult cadzow(const MomentVector& s, int num_diracs, CadzowOptions options = {});

/// Default pencil parameter floor((P+1)/2).
int default_pencil_parameter(const SamplingConfig& config);

/// Matrix pencil on the (P+1-L) x (L+1) Hankel matrix H[i][j] = s[i+j].
std::vector<cdouble> matrix_pencil(const MomentVector& s, int num_diracs, int pencil_L);

/// t_k = (T / lambda) arg(u_k / |u_k|), arg in [-pi, pi), sorted ascending.
std::vector<double> roots_to_locations(const std::vector<cdouble>& roots,
                                       const SamplingConfig& config);

struct AmplitudeFit {
    std::vector<double> amplitudes;
    /// |Im(b_k exp(-j omega_0 t_k / T))| per Dirac.
    std::vector<double> imag_residue;
    /// True when some residue exceeds 0.1 |b_k|.
    bool suspicious = false;
};

/// Least squares fit of s[m] ~ sum_k b_k u_k^m for fixed locations.
AmplitudeFit recover_amplitudes(const MomentVector& s, const std::vector<double>& locations);

/// Worst distance from any root r to the nearest 1/conj(r') in the set.
/// Zero for any set of unit-modulus roots; moments of real samples are
/// invariant under r -> 1/conj(r).
double reciprocal_conjugate_defect(const std::vector<cdouble>& roots);

/// perm[k] = index into t_hat assigned to t_true[k]; minimizes the summed
/// circular distance, ties broken by the lexicographically smallest perm.
std::vector<std::size_t> match_estimates(const std::vector<double>& t_hat,
                                         const std::vector<double>& t_true, double period);

struct EstimatorOptions {
    std::optional<int> pencil_L;
    CadzowOptions cadzow;
};

/// Full pipeline from samples to an EstimateRecord for a native method.
EstimateRecord estimate(const SampleVector& y, int num_diracs, Method method,
                        const EstimatorOptions& options = {});

} // namespace fri
