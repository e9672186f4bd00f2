#include "fri/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "fri/analysis.hpp"
#include "fri/error.hpp"
#include "fri/random.hpp"

namespace fri {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Runs body(i) for i in [0, count) on `workers` threads. Each index is
/// handled exactly once; results must be written to per-index slots.
template <typename Body>
void parallel_for(std::size_t count, int workers, Body&& body)
{
    if (workers <= 0) {
        workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    }
    if (workers == 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&] {
        try {
            for (std::size_t i = next++; i < count; i = next++) body(i);
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = count;
        }
    };
    std::vector<std::thread> pool;
    const auto n = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
    for (std::size_t w = 0; w < n; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string strip_cr(std::string s)
{
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

double parse_double(const std::string& text, std::size_t line, const char* column)
{
    double v = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) {
        throw ParseError(std::string("column '") + column + "': cannot parse '" + text + "'", line);
    }
    return v;
}

long parse_long(const std::string& text, std::size_t line, const char* column)
{
    long v = 0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) {
        throw ParseError(std::string("column '") + column + "': cannot parse '" + text + "'", line);
    }
    return v;
}

bool close(double a, double b)
{
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

bool all_finite(const std::vector<double>& v)
{
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

std::uint64_t fnv1a(const std::string& text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

struct CellTruth {
    DiracStream stream;
    double sigma;
    CrbResult crb;
    double breakdown_db;
};

CellTruth cell_truth(const SweepConfig& cfg, double psnr_db, double delta)
{
    const SamplingConfig sampling = cfg.sampling();
    DiracStream stream = cfg.stream_for(delta);
    const SampleVector clean = synthesize_samples(stream, sampling);
    const double sigma = NoiseSpec{psnr_db, 0}.sigma_for(clean);
    CrbResult crb = crlb_location_std(stream, sampling, sigma);
    const double breakdown = cfg.breakdown_formula_applies()
                                 ? breakdown_psnr(std::abs(delta) / sampling.interval(),
                                                  sampling.order(), sampling.lambda())
                                 : kNaN;
    return {std::move(stream), sigma, std::move(crb), breakdown};
}

void append_rows(SweepReport& report, const CellTruth& truth, double psnr_db, double delta,
                 Method method, const std::vector<EstimateRecord>& ok, long failures)
{
    for (std::size_t k = 0; k < truth.stream.size(); ++k) {
        SweepRow row;
        row.psnr_db = psnr_db;
        row.delta_t = delta;
        row.method = method;
        row.k = k;
        row.f_sd = ok.empty() ? kNaN : location_std(ok, truth.stream, k);
        row.crb_std = truth.crb.per_location_std[k];
        row.breakdown_psnr_db = truth.breakdown_db;
        row.i_effective = static_cast<long>(ok.size());
        row.failure_count = failures;
        report.rows.push_back(row);
    }
}

} // namespace

std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> log_grid(double lo_exp, double hi_exp, double step_exp)
{
    const auto count = static_cast<long>(std::llround((hi_exp - lo_exp) / step_exp)) + 1;
    std::vector<double> grid;
    for (long i = 0; i < count; ++i) {
        grid.push_back(std::pow(10.0, lo_exp + static_cast<double>(i) * step_exp));
    }
    return grid;
}

std::vector<double> linear_grid(double lo, double hi, double step)
{
    const auto count = static_cast<long>(std::llround((hi - lo) / step)) + 1;
    std::vector<double> grid;
    for (long i = 0; i < count; ++i) {
        grid.push_back(lo + static_cast<double>(i) * step);
    }
    return grid;
}

SweepConfig SweepConfig::defaults()
{
    SweepConfig cfg;
    cfg.delta_grid = log_grid(-3.0, -0.5, 0.25);
    cfg.psnr_grid_db = linear_grid(-5.0, 70.0, 5.0);
    return cfg;
}

EstimatorOptions SweepConfig::estimator_options() const
{
    EstimatorOptions opts;
    if (pencil_L > 0) opts.pencil_L = pencil_L;
    opts.cadzow = cadzow;
    return opts;
}

DiracStream SweepConfig::stream_for(double delta) const
{
    std::vector<double> t;
    for (int k = 0; k < K; ++k) t.push_back(t0 + k * delta);
    return DiracStream::from_unsorted(std::move(t), amplitudes, tau);
}

bool SweepConfig::breakdown_formula_applies() const
{
    return K == 2 && amplitudes.size() == 2 && amplitudes[0] == amplitudes[1];
}

void SweepConfig::validate() const
{
    const SamplingConfig sampling = this->sampling();
    if (K < 1 || static_cast<int>(amplitudes.size()) != K) {
        throw InvalidArgument("K must be >= 1 and match the number of amplitudes");
    }
    if (2 * K > sampling.num_moments()) {
        throw InvalidArgument("need N >= 2K");
    }
    if (delta_grid.empty() || psnr_grid_db.empty()) {
        throw InvalidArgument("sweep grids must be nonempty");
    }
    if (realizations < 1) {
        throw InvalidArgument("need at least one realization");
    }
    if (methods.empty()) {
        throw InvalidArgument("no methods requested");
    }
    for (auto m : methods) {
        if (!is_native(m)) {
            throw InvalidArgument("method '" + std::string(to_string(m)) +
                                  "' cannot be run by the sweep; ingest its estimates instead");
        }
    }
    if (pencil_L != 0 && (pencil_L < K || pencil_L > sampling.num_moments() - K)) {
        throw InvalidArgument("pencil_L must satisfy K <= L <= N-K");
    }
    if (cadzow.max_iters < 1 || !(cadzow.tol > 0.0)) {
        throw InvalidArgument("Cadzow needs max_iters >= 1 and tol > 0");
    }
    for (double d : delta_grid) {
        (void)stream_for(d);
    }
}

nlohmann::json SweepConfig::to_json() const
{
    nlohmann::json methods_json = nlohmann::json::array();
    for (auto m : methods) methods_json.push_back(std::string(to_string(m)));
    return {
        {"N", N},
        {"tau", tau},
        {"K", K},
        {"amplitudes", amplitudes},
        {"t0", t0},
        {"delta_grid", delta_grid},
        {"psnr_grid_db", psnr_grid_db},
        {"realizations", realizations},
        {"base_seed", base_seed},
        {"methods", methods_json},
        {"pencil_L", pencil_L},
        {"cadzow_max_iters", cadzow.max_iters},
        {"cadzow_tol", cadzow.tol},
    };
}

SweepConfig SweepConfig::from_json(const nlohmann::json& j)
{
    SweepConfig cfg = defaults();
    if (!j.is_object()) {
        throw InvalidArgument("sweep config must be a JSON object");
    }
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "N") cfg.N = value.get<int>();
            else if (key == "tau") cfg.tau = value.get<double>();
            else if (key == "K") cfg.K = value.get<int>();
            else if (key == "amplitudes") cfg.amplitudes = value.get<std::vector<double>>();
            else if (key == "t0") cfg.t0 = value.get<double>();
            else if (key == "delta_grid") cfg.delta_grid = value.get<std::vector<double>>();
            else if (key == "psnr_grid_db") cfg.psnr_grid_db = value.get<std::vector<double>>();
            else if (key == "realizations") cfg.realizations = value.get<int>();
            else if (key == "base_seed") cfg.base_seed = value.get<std::uint64_t>();
            else if (key == "pencil_L") cfg.pencil_L = value.get<int>();
            else if (key == "cadzow_max_iters") cfg.cadzow.max_iters = value.get<int>();
            else if (key == "cadzow_tol") cfg.cadzow.tol = value.get<double>();
            else if (key == "methods") {
                cfg.methods.clear();
                for (const auto& m : value) cfg.methods.push_back(parse_method(m.get<std::string>()));
            } else {
                throw InvalidArgument("unknown sweep config key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("bad sweep config: ") + e.what());
    }
    return cfg;
}

std::string config_hash(const nlohmann::json& j)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
    return buf;
}

std::string SweepConfig::hash() const
{
    return config_hash(to_json());
}

void SweepReport::write_csv(std::ostream& os) const
{
    os << "psnr_db,delta_t,method,k,f_sd,crb_std,breakdown_psnr_db,I_effective,failure_count,"
          "config_hash\n";
    for (const auto& r : rows) {
        os << format_double(r.psnr_db) << ',' << format_double(r.delta_t) << ','
           << to_string(r.method) << ',' << r.k << ',' << format_double(r.f_sd) << ','
           << format_double(r.crb_std) << ',' << format_double(r.breakdown_psnr_db) << ','
           << r.i_effective << ',' << r.failure_count << ',' << config_hash << '\n';
    }
}

const SweepRow* SweepReport::find(double psnr_db, double delta_t, Method method,
                                  std::size_t k) const
{
    for (const auto& r : rows) {
        if (r.method == method && r.k == k && close(r.psnr_db, psnr_db) && close(r.delta_t, delta_t)) {
            return &r;
        }
    }
    return nullptr;
}

SweepReport run_sweep(const SweepConfig& cfg, int workers)
{
    cfg.validate();
    const SamplingConfig sampling = cfg.sampling();
    const EstimatorOptions options = cfg.estimator_options();
    const auto num_methods = cfg.methods.size();
    const auto I = static_cast<std::size_t>(cfg.realizations);

    SweepReport report{cfg.hash(), {}};
    for (std::size_t i = 0; i < cfg.psnr_grid_db.size(); ++i) {
        for (std::size_t j = 0; j < cfg.delta_grid.size(); ++j) {
            const double psnr = cfg.psnr_grid_db[i];
            const double delta = cfg.delta_grid[j];
            const CellTruth truth = cell_truth(cfg, psnr, delta);
            const SampleVector clean = synthesize_samples(truth.stream, sampling);

            // slots[method * I + r]
            std::vector<std::optional<EstimateRecord>> slots(num_methods * I);
            parallel_for(I, workers, [&](std::size_t r) {
                const SampleVector noisy = add_noise(clean, truth.sigma, derive_seed(cfg.base_seed, {i, j, r}));
                for (std::size_t q = 0; q < num_methods; ++q) {
                    try {
                        slots[q * I + r] = estimate(noisy, cfg.K, cfg.methods[q], options);
                    } catch (const NumericalFailure&) {
                    }
                }
            });

            for (std::size_t q = 0; q < num_methods; ++q) {
                std::vector<EstimateRecord> ok;
                long failures = 0;
                for (std::size_t r = 0; r < I; ++r) {
                    auto& slot = slots[q * I + r];
                    if (slot) ok.push_back(std::move(*slot));
                    else ++failures;
                }
                append_rows(report, truth, psnr, delta, cfg.methods[q], ok, failures);
            }
        }
    }
    return report;
}

std::vector<EstimateRecord> run_scatter(const SweepConfig& cfg, int workers)
{
    cfg.validate();
    if (cfg.delta_grid.size() != 1) {
        throw InvalidArgument("scatter runs take exactly one separation");
    }
    const SamplingConfig sampling = cfg.sampling();
    const EstimatorOptions options = cfg.estimator_options();
    const auto num_methods = cfg.methods.size();
    const auto I = static_cast<std::size_t>(cfg.realizations);
    const double delta = cfg.delta_grid.front();

    std::vector<EstimateRecord> out;
    for (std::size_t i = 0; i < cfg.psnr_grid_db.size(); ++i) {
        const double psnr = cfg.psnr_grid_db[i];
        const CellTruth truth = cell_truth(cfg, psnr, delta);
        const SampleVector clean = synthesize_samples(truth.stream, sampling);

        std::vector<std::optional<EstimateRecord>> slots(num_methods * I);
        parallel_for(I, workers, [&](std::size_t r) {
            const SampleVector noisy = add_noise(clean, truth.sigma, derive_seed(cfg.base_seed, {i, 0, r}));
            for (std::size_t q = 0; q < num_methods; ++q) {
                try {
                    auto rec = estimate(noisy, cfg.K, cfg.methods[q], options);
                    rec.psnr_db = psnr;
                    rec.delta_t = delta;
                    rec.realization = static_cast<long>(r);
                    slots[q * I + r] = std::move(rec);
                } catch (const NumericalFailure&) {
                }
            }
        });
        for (auto& slot : slots) {
            if (slot) out.push_back(std::move(*slot));
        }
    }
    return out;
}

SweepReport score_estimates(const std::vector<EstimateRecord>& records, const SweepConfig& cfg)
{
    // Groups keep the order in which their keys first appear.
    using Key = std::tuple<int, double, double>;
    std::map<Key, std::size_t> index;
    struct Group {
        Key key;
        std::vector<EstimateRecord> ok;
        long failures = 0;
    };
    std::vector<Group> groups;
    for (const auto& rec : records) {
        if (static_cast<int>(rec.locations.size()) != cfg.K) {
            throw InvalidArgument("record has " + std::to_string(rec.locations.size()) +
                                  " locations, config expects K=" + std::to_string(cfg.K));
        }
        const Key key{static_cast<int>(rec.method), rec.psnr_db, rec.delta_t};
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, groups.size()).first;
            groups.push_back({key, {}, 0});
        }
        auto& g = groups[it->second];
        if (all_finite(rec.locations)) g.ok.push_back(rec);
        else ++g.failures;
    }

    SweepReport report{cfg.hash(), {}};
    for (const auto& g : groups) {
        const auto& [method, psnr, delta] = g.key;
        const CellTruth truth = cell_truth(cfg, psnr, delta);
        append_rows(report, truth, psnr, delta, static_cast<Method>(method), g.ok, g.failures);
    }
    return report;
}

void write_estimates_csv(std::ostream& os, const std::vector<EstimateRecord>& records)
{
    os << "method,psnr_db,delta_t,realization,k,t_hat,a_hat\n";
    for (const auto& rec : records) {
        for (std::size_t k = 0; k < rec.locations.size(); ++k) {
            const double a = k < rec.amplitudes.size() ? rec.amplitudes[k] : kNaN;
            os << to_string(rec.method) << ',' << format_double(rec.psnr_db) << ','
               << format_double(rec.delta_t) << ',' << rec.realization << ',' << k << ','
               << format_double(rec.locations[k]) << ',' << format_double(a) << '\n';
        }
    }
}

std::vector<EstimateRecord> ingest_estimates(std::istream& is, double period)
{
    static const std::string kHeader = "method,psnr_db,delta_t,realization,k,t_hat,a_hat";
    std::string line;
    if (!std::getline(is, line) || strip_cr(line) != kHeader) {
        throw ParseError("expected header '" + kHeader + "'", 1);
    }

    struct Pending {
        EstimateRecord rec;
        std::map<long, std::pair<double, double>> by_k;
    };
    using Key = std::tuple<int, double, double, long>;
    std::map<Key, std::size_t> index;
    std::vector<Pending> pending;

    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != 7) {
            throw ParseError("expected 7 fields, found " + std::to_string(fields.size()), line_no);
        }
        Method method;
        try {
            method = parse_method(fields[0]);
        } catch (const InvalidArgument& e) {
            throw ParseError(e.what(), line_no);
        }
        const double psnr = parse_double(fields[1], line_no, "psnr_db");
        const double delta = parse_double(fields[2], line_no, "delta_t");
        const long realization = parse_long(fields[3], line_no, "realization");
        const long k = parse_long(fields[4], line_no, "k");
        const double t_hat = parse_double(fields[5], line_no, "t_hat");
        const double a_hat = fields[6].empty() ? kNaN : parse_double(fields[6], line_no, "a_hat");
        if (k < 0) {
            throw ParseError("negative Dirac index", line_no);
        }

        const Key key{static_cast<int>(method), psnr, delta, realization};
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, pending.size()).first;
            Pending p;
            p.rec.method = method;
            p.rec.psnr_db = psnr;
            p.rec.delta_t = delta;
            p.rec.realization = realization;
            p.rec.period = period;
            pending.push_back(std::move(p));
        }
        auto& by_k = pending[it->second].by_k;
        if (!by_k.emplace(k, std::make_pair(t_hat, a_hat)).second) {
            throw ParseError("duplicate k=" + std::to_string(k) + " for this realization", line_no);
        }
    }

    std::vector<EstimateRecord> out;
    out.reserve(pending.size());
    for (auto& p : pending) {
        if (p.by_k.rbegin()->first != static_cast<long>(p.by_k.size()) - 1) {
            throw ParseError("realization " + std::to_string(p.rec.realization) +
                                 " has non-contiguous Dirac indices",
                             line_no);
        }
        std::vector<std::pair<double, double>> pairs;
        for (const auto& [k, ta] : p.by_k) {
            const double t = std::isfinite(ta.first) ? wrap_location(ta.first, period) : ta.first;
            pairs.emplace_back(t, ta.second);
        }
        std::stable_sort(pairs.begin(), pairs.end(),
                         [](const auto& x, const auto& y) { return x.first < y.first; });
        for (const auto& [t, a] : pairs) {
            p.rec.locations.push_back(t);
            p.rec.amplitudes.push_back(a);
        }
        out.push_back(std::move(p.rec));
    }
    return out;
}

std::vector<EstimateRecord> ingest_estimates(const std::filesystem::path& path, double period)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open estimate file " + path.string());
    }
    return ingest_estimates(in, period);
}

void export_dataset(const DatasetSpec& spec, std::ostream& os)
{
    if (spec.size < 0) {
        throw InvalidArgument("dataset size must be non-negative");
    }
    if (!(spec.location_lo < spec.location_hi) || spec.location_lo < -0.5 || spec.location_hi > 0.5) {
        throw InvalidArgument("location law must lie inside [-0.5, 0.5) periods");
    }
    if (!(spec.amplitude_lo > 0.0) || !(spec.amplitude_lo < spec.amplitude_hi)) {
        throw InvalidArgument("amplitude law must be a positive interval");
    }
    const SamplingConfig sampling(spec.N, spec.tau);
    if (spec.K < 1 || 2 * spec.K > spec.N) {
        throw InvalidArgument("dataset K must satisfy 1 <= K and 2K <= N");
    }

    os << "psnr_db,sigma";
    for (int n = 0; n < spec.N; ++n) os << ",y" << n;
    for (int n = 0; n < spec.N; ++n) os << ",ynoisy" << n;
    for (int k = 0; k < spec.K; ++k) os << ",t" << k;
    for (int k = 0; k < spec.K; ++k) os << ",a" << k;
    os << '\n';

    for (long r = 0; r < spec.size; ++r) {
        Rng rng(derive_seed(spec.seed, {static_cast<std::uint64_t>(r)}));
        std::optional<DiracStream> stream;
        while (!stream) {
            std::vector<double> t, a;
            for (int k = 0; k < spec.K; ++k) {
                t.push_back(spec.tau * rng.uniform(spec.location_lo, spec.location_hi));
            }
            for (int k = 0; k < spec.K; ++k) {
                a.push_back(rng.uniform(spec.amplitude_lo, spec.amplitude_hi));
            }
            try {
                stream = DiracStream::from_unsorted(std::move(t), std::move(a), spec.tau);
            } catch (const InvalidArgument&) {
                // coincident draw; redraw from the same generator
            }
        }
        const SampleVector clean = synthesize_samples(*stream, sampling);
        const double sigma = NoiseSpec{spec.psnr_db, 0}.sigma_for(clean);
        const SampleVector noisy =
            add_noise(clean, sigma, derive_seed(spec.seed, {static_cast<std::uint64_t>(r), 1}));

        os << format_double(spec.psnr_db) << ',' << format_double(sigma);
        for (double v : clean.values) os << ',' << format_double(v);
        for (double v : noisy.values) os << ',' << format_double(v);
        for (double v : stream->locations()) os << ',' << format_double(v);
        for (double v : stream->amplitudes()) os << ',' << format_double(v);
        os << '\n';
    }
}

void export_dataset(const DatasetSpec& spec, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open " + path.string() + " for writing");
    }
    export_dataset(spec, out);
    if (!out) {
        throw Error("write to " + path.string() + " failed");
    }
}

void write_sidecar(const std::filesystem::path& csv_path, const nlohmann::json& config,
                   const std::string& hash)
{
    auto sidecar = csv_path;
    sidecar += ".json";
    std::ofstream out(sidecar, std::ios::binary);
    if (!out) {
        throw Error("cannot open " + sidecar.string() + " for writing");
    }
    out << nlohmann::json{{"config", config}, {"config_hash", hash}}.dump(2) << '\n';
}

} // namespace fri
