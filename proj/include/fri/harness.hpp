#pragma once

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fri/estimators.hpp"
#include "fri/signal.hpp"

namespace fri {

/// Monte Carlo sweep over a PSNR x separation grid. Realization r of cell
/// (psnr index i, delta index j) is corrupted with seed
/// derive_seed(base_seed, {i, j, r}); all methods at a cell see the same
/// noisy samples.
struct SweepConfig {
    int N = 21;
    double tau = 1.0;
    int K = 2;
    std::vector<double> amplitudes{2.0, 2.0};
    double t0 = 0.0;
    std::vector<double> delta_grid;
    std::vector<double> psnr_grid_db;
    int realizations = 1000;
    std::uint64_t base_seed = 20200504;
    std::vector<Method> methods{Method::matrix_pencil, Method::matrix_pencil_cadzow,
                                Method::prony_cadzow};
    int pencil_L = 0; ///< 0 selects floor(N/2)
    CadzowOptions cadzow;

    /// N=21, tau=1, K=2, a={2,2}, t0=0, delta in 10^-3..10^-0.5 step 10^0.25,
    /// PSNR in -5..70 dB step 5, 1000 realizations.
    static SweepConfig defaults();

    void validate() const;
    SamplingConfig sampling() const { return {N, tau}; }
    EstimatorOptions estimator_options() const;

    /// Stream with t_k = t0 + k * delta (wrapped into the period).
    DiracStream stream_for(double delta) const;

    /// Equal amplitudes and K = 2: the breakdown formula applies.
    bool breakdown_formula_applies() const;

    nlohmann::json to_json() const;
    static SweepConfig from_json(const nlohmann::json& j);

    /// FNV-1a 64 over to_json().dump(), as 16 hex digits.
    std::string hash() const;
};

/// FNV-1a 64 over j.dump(), as 16 hex digits.
std::string config_hash(const nlohmann::json& j);

std::vector<double> log_grid(double lo_exp, double hi_exp, double step_exp);
std::vector<double> linear_grid(double lo, double hi, double step);

struct SweepRow {
    double psnr_db = 0.0;
    double delta_t = 0.0;
    Method method = Method::matrix_pencil;
    std::size_t k = 0;
    double f_sd = 0.0;
    double crb_std = 0.0;
    double breakdown_psnr_db = 0.0; ///< NaN when the formula does not apply
    long i_effective = 0;
    long failure_count = 0;
};

struct SweepReport {
    std::string config_hash;
    std::vector<SweepRow> rows;

    /// Header: psnr_db,delta_t,method,k,f_sd,crb_std,breakdown_psnr_db,
    /// I_effective,failure_count,config_hash
    void write_csv(std::ostream& os) const;

    const SweepRow* find(double psnr_db, double delta_t, Method method, std::size_t k) const;
};

SweepReport run_sweep(const SweepConfig& cfg, int workers = 1);

/// Per-realization estimates for a single-separation config, in the
/// estimate CSV schema. Failed realizations are omitted.
std::vector<EstimateRecord> run_scatter(const SweepConfig& cfg, int workers = 1);

/// Scores records (native or ingested) against the truth implied by `cfg`,
/// grouping by (method, psnr_db, delta_t).
SweepReport score_estimates(const std::vector<EstimateRecord>& records, const SweepConfig& cfg);

/// Header: method,psnr_db,delta_t,realization,k,t_hat,a_hat
void write_estimates_csv(std::ostream& os, const std::vector<EstimateRecord>& records);

std::vector<EstimateRecord> ingest_estimates(std::istream& is, double period = 1.0);
std::vector<EstimateRecord> ingest_estimates(const std::filesystem::path& path,
                                             double period = 1.0);

struct DatasetSpec {
    long size = 100000;
    double psnr_db = 20.0;
    int K = 2;
    int N = 21;
    double tau = 1.0;
    double location_lo = -0.5;
    double location_hi = 0.5;
    double amplitude_lo = 0.5;
    double amplitude_hi = 10.0;
    std::uint64_t seed = 1;
};

/// Header: psnr_db,sigma,y0..y{N-1},ynoisy0..ynoisy{N-1},t0..t{K-1},a0..a{K-1}.
/// Row r uses Rng(derive_seed(seed, {r})) for the stream and
/// derive_seed(seed, {r, 1}) for the noise. Locations are scaled by tau.
void export_dataset(const DatasetSpec& spec, std::ostream& os);
void export_dataset(const DatasetSpec& spec, const std::filesystem::path& path);

/// JSON sidecar next to a CSV output: {"config": ..., "config_hash": ...}.
void write_sidecar(const std::filesystem::path& csv_path, const nlohmann::json& config,
                   const std::string& hash);

/// Fixed 17-significant-digit rendering used by every CSV writer.
std::string format_double(double v);

} // namespace fri
