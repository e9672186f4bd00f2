#include "fri/estimators.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "fri/error.hpp"

namespace fri {

namespace {

constexpr std::array<std::pair<Method, std::string_view>, 6> kMethodNames{{
    {Method::prony, "prony"},
    {Method::prony_cadzow, "prony_cadzow"},
    {Method::matrix_pencil, "matrix_pencil"},
    {Method::matrix_pencil_cadzow, "matrix_pencil_cadzow"},
    {Method::nn_direct, "nn_direct"},
    {Method::nn_denoise_pencil, "nn_denoise_pencil"},
}};

void check_order(const MomentVector& s, int num_diracs)
{
    if (num_diracs < 1) {
        throw InvalidArgument("number of Diracs must be at least 1");
    }
    if (static_cast<int>(s.values.size()) < 2 * num_diracs) {
        throw InvalidArgument("need at least 2K moments to estimate K Diracs");
    }
}

std::vector<cdouble> eigenvalues(const ComplexMatrix& m)
{
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw NumericalFailure("eigenvalue iteration did not converge");
    }
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

} // namespace

std::string_view to_string(Method m)
{
    for (const auto& [method, name] : kMethodNames) {
        if (method == m) return name;
    }
    return "unknown";
}

Method parse_method(std::string_view name)
{
    for (const auto& [method, n] : kMethodNames) {
        if (n == name) return method;
    }
    throw InvalidArgument("unknown method '" + std::string(name) + "'");
}

bool is_native(Method m)
{
    return m != Method::nn_direct && m != Method::nn_denoise_pencil;
}

ComplexVector annihilating_filter(const MomentVector& s, int num_diracs)
{
    check_order(s, num_diracs);
    const int K = num_diracs;
    const ComplexMatrix S = toeplitz_from_moments(s.values, K + 1);

    Eigen::JacobiSVD<ComplexMatrix> svd(S, Eigen::ComputeFullV);
    ComplexVector h = svd.matrixV().col(K);
    if (h.norm() == 0.0 || std::abs(h(0)) < 1e-14 * h.norm()) {
        throw NumericalFailure("degenerate annihilating filter");
    }
    h *= std::abs(h(0)) / h(0);
    return h / h.norm();
}

std::vector<cdouble> prony(const MomentVector& s, int num_diracs)
{
    const int K = num_diracs;
    const ComplexVector h = annihilating_filter(s, num_diracs);

    // Roots of h[0] z^K + h[1] z^{K-1} + ... + h[K] via the companion matrix.
    ComplexMatrix companion = ComplexMatrix::Zero(K, K);
    for (int j = 0; j < K; ++j) {
        companion(0, j) = -h(j + 1) / h(0);
    }
    for (int i = 1; i < K; ++i) {
        companion(i, i - 1) = 1.0;
    }
    return eigenvalues(companion);
}

CadzowResult cadzow(const MomentVector& s, int num_diracs, CadzowOptions options)
{
    check_order(s, num_diracs);
    if (options.max_iters < 1) {
        throw InvalidArgument("Cadzow needs at least one iteration");
    }
    const int K = num_diracs;
    const auto len = static_cast<Eigen::Index>(s.values.size());
    const Eigen::Index cols = (len - 1) / 2 + 1;
    const Eigen::Index rows = len - cols + 1;

    CadzowResult result{s, 0, {}};
    std::vector<cdouble>& current = result.moments.values;
    std::vector<int> counts(len, 0);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            ++counts[cols - 1 + i - j];
        }
    }

    for (int iter = 0; iter < options.max_iters; ++iter) {
        const ComplexMatrix T = toeplitz_from_moments(current, cols);
        Eigen::JacobiSVD<ComplexMatrix> svd(T, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        const double ratio = sv(0) > 0.0 ? sv(K) / sv(0) : 0.0;
        result.singular_ratio_history.push_back(ratio);
        result.iterations = iter + 1;
        if (ratio < options.tol) {
            break;
        }

        const ComplexMatrix low_rank = svd.matrixU().leftCols(K) *
                                       sv.head(K).asDiagonal() *
                                       svd.matrixV().leftCols(K).adjoint();
        std::vector<cdouble> averaged(len, cdouble{});
        for (Eigen::Index i = 0; i < rows; ++i) {
            for (Eigen::Index j = 0; j < cols; ++j) {
                averaged[cols - 1 + i - j] += low_rank(i, j);
            }
        }
        for (Eigen::Index m = 0; m < len; ++m) {
            current[m] = averaged[m] / static_cast<double>(counts[m]);
        }
    }
    return result;
}

int default_pencil_parameter(const SamplingConfig& config)
{
    return config.num_moments() / 2;
}

std::vector<cdouble> matrix_pencil(const MomentVector& s, int num_diracs, int pencil_L)
{
    check_order(s, num_diracs);
    const int K = num_diracs;
    const int len = static_cast<int>(s.values.size());
    if (pencil_L < K || pencil_L > len - K) {
        throw InvalidArgument("pencil parameter must satisfy K <= L <= P+1-K");
    }

    const int rows = len - pencil_L;
    const int cols = pencil_L + 1;
    ComplexMatrix H(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            H(i, j) = s.values[i + j];
        }
    }

    Eigen::JacobiSVD<ComplexMatrix> svd(H, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (!(sv(0) > 0.0) || sv(K - 1) <= 1e-13 * sv(0)) {
        throw NumericalFailure("rank collapse: fewer than K significant singular values");
    }

    // Rows of H live in the span of conj(V); the Vandermonde basis
    // (u_k^j)_j is shift invariant within it.
    const ComplexMatrix basis = svd.matrixV().leftCols(K).conjugate();
    const ComplexMatrix upper = basis.topRows(cols - 1);
    const ComplexMatrix lower = basis.bottomRows(cols - 1);
    const ComplexMatrix pencil = upper.colPivHouseholderQr().solve(lower);
    return eigenvalues(pencil);
}

std::vector<double> roots_to_locations(const std::vector<cdouble>& roots,
                                       const SamplingConfig& config)
{
    if (roots.empty()) {
        throw InvalidArgument("no roots to convert");
    }
    std::vector<double> t;
    t.reserve(roots.size());
    const double scale = config.interval() / config.lambda();
    for (const auto& u : roots) {
        if (!(std::abs(u) > 0.0) || !std::isfinite(std::abs(u))) {
            throw NumericalFailure("root at zero or infinity has no location");
        }
        double angle = std::arg(u / std::abs(u));
        if (angle >= kPi) angle -= 2.0 * kPi;
        t.push_back(wrap_location(scale * angle, config.period()));
    }
    std::sort(t.begin(), t.end());
    return t;
}

AmplitudeFit recover_amplitudes(const MomentVector& s, const std::vector<double>& locations)
{
    const auto& config = s.config;
    const int K = static_cast<int>(locations.size());
    if (K < 1) {
        throw InvalidArgument("no locations given");
    }
    for (int i = 0; i < K; ++i) {
        for (int j = i + 1; j < K; ++j) {
            if (std::abs(circular_difference(locations[i], locations[j], config.period())) < 1e-12) {
                throw NumericalFailure("location collision makes the Vandermonde system singular");
            }
        }
    }

    const double T = config.interval();
    const int rows = static_cast<int>(s.values.size());
    ComplexMatrix V(rows, K);
    for (int m = 0; m < rows; ++m) {
        for (int k = 0; k < K; ++k) {
            V(m, k) = std::polar(1.0, config.lambda() * m * locations[k] / T);
        }
    }
    const ComplexVector rhs = Eigen::Map<const ComplexVector>(s.values.data(), rows);
    const ComplexVector b = V.colPivHouseholderQr().solve(rhs);

    AmplitudeFit fit;
    for (int k = 0; k < K; ++k) {
        const cdouble a = b(k) * std::polar(1.0, -config.omega0() * locations[k] / T);
        fit.amplitudes.push_back(a.real());
        fit.imag_residue.push_back(std::abs(a.imag()));
        if (std::abs(a.imag()) > 0.1 * std::abs(b(k))) {
            fit.suspicious = true;
        }
    }
    return fit;
}

double reciprocal_conjugate_defect(const std::vector<cdouble>& roots)
{
    double worst = 0.0;
    for (const auto& r : roots) {
        const cdouble mirror = 1.0 / std::conj(r);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& q : roots) {
            best = std::min(best, std::abs(q - mirror));
        }
        worst = std::max(worst, best);
    }
    return worst;
}

std::vector<std::size_t> match_estimates(const std::vector<double>& t_hat,
                                         const std::vector<double>& t_true, double period)
{
    if (t_hat.size() != t_true.size()) {
        throw InvalidArgument("estimate and truth have different numbers of Diracs");
    }
    if (t_hat.size() > 8) {
        throw InvalidArgument("exhaustive matching supports at most 8 Diracs");
    }
    std::vector<std::size_t> perm(t_hat.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::size_t> best = perm;
    double best_cost = std::numeric_limits<double>::infinity();
    do {
        double cost = 0.0;
        for (std::size_t k = 0; k < perm.size(); ++k) {
            cost += std::abs(circular_difference(t_hat[perm[k]], t_true[k], period));
        }
        if (cost < best_cost) {
            best_cost = cost;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

EstimateRecord estimate(const SampleVector& y, int num_diracs, Method method,
                        const EstimatorOptions& options)
{
    if (!is_native(method)) {
        throw InvalidArgument("method '" + std::string(to_string(method)) +
                              "' is not implemented natively");
    }
    const auto& config = y.config;
    MomentVector s = samples_to_moments(y);

    EstimateRecord rec;
    rec.method = method;
    rec.period = config.period();

    if (method == Method::prony_cadzow || method == Method::matrix_pencil_cadzow) {
        auto denoised = cadzow(s, num_diracs, options.cadzow);
        rec.diagnostics["cadzow_iterations"] = denoised.iterations;
        rec.diagnostics["cadzow_final_ratio"] = denoised.singular_ratio_history.back();
        s = std::move(denoised.moments);
    }

    std::vector<cdouble> roots;
    if (method == Method::prony || method == Method::prony_cadzow) {
        roots = prony(s, num_diracs);
    } else {
        roots = matrix_pencil(s, num_diracs, options.pencil_L.value_or(default_pencil_parameter(config)));
    }
    rec.diagnostics["reciprocal_conjugate_defect"] = reciprocal_conjugate_defect(roots);

    rec.locations = roots_to_locations(roots, config);
    try {
        auto fit = recover_amplitudes(s, rec.locations);
        rec.amplitudes = std::move(fit.amplitudes);
        rec.diagnostics["amplitude_imag_residue"] =
            *std::max_element(fit.imag_residue.begin(), fit.imag_residue.end());
        rec.diagnostics["reconstruction_suspicious"] = fit.suspicious ? 1.0 : 0.0;
    } catch (const NumericalFailure&) {
        // Locations remain usable; amplitudes are undefined for collided roots.
        rec.amplitudes.assign(rec.locations.size(), std::numeric_limits<double>::quiet_NaN());
        rec.diagnostics["reconstruction_suspicious"] = 1.0;
    }
    return rec;
}

} // namespace fri
