#pragma once

#include <Eigen/Core>

#include <vector>

#include "fri/signal.hpp"

namespace fri {

using ComplexMatrix = Eigen::Matrix<cdouble, Eigen::Dynamic, Eigen::Dynamic>;
using ComplexVector = Eigen::Matrix<cdouble, Eigen::Dynamic, 1>;

/// Exponential reproduction coefficients c_{m,n} = exp(j omega_m n),
/// (P+1) x N. Rows are orthogonal with squared norm N.
struct CoefficientMatrix {
    ComplexMatrix entries;
    SamplingConfig config;
};

/// Exponential moments s[m] = sum_k b_k u_k^m, m = 0..P, with
/// b_k = a_k exp(j omega_0 t_k / T) and u_k = exp(j lambda t_k / T).
struct MomentVector {
    std::vector<cdouble> values;
    SamplingConfig config;

    /// max_m |s[P-m] - conj(s[m])|
    double symmetry_defect() const;
};

CoefficientMatrix coefficients(const SamplingConfig& config);

MomentVector samples_to_moments(const SampleVector& y);

/// Inverse map. Rejects moments that are not conjugate symmetric within
/// `symmetry_tol` (relative to the largest moment), since those correspond to
/// complex samples.
SampleVector moments_to_samples(const MomentVector& s, double symmetry_tol = 1e-9);

/// Moments of a stream evaluated directly from the right-hand side of the
/// moment identity.
MomentVector exact_moments(const DiracStream& stream, const SamplingConfig& config);

/// rows x cols Toeplitz matrix T[i][j] = s[cols - 1 + i - j] with
/// rows + cols - 1 = s.size().
ComplexMatrix toeplitz_from_moments(std::span<const cdouble> s, Eigen::Index cols);

} // namespace fri
