// fri: command line front end for the FRI reconstruction library.

#include "CLI11.hpp"
#include "json.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fri/analysis.hpp"
#include "fri/error.hpp"
#include "fri/estimators.hpp"
#include "fri/harness.hpp"
#include "fri/signal.hpp"

namespace {

using fri::format_double;

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "-";
    int workers = 1;
    std::vector<std::string> methods;
};

void add_common(CLI::App* app, Common& c)
{
    app->add_option("--config", c.config, "JSON config file")->check(CLI::ExistingFile);
    app->add_option("--seed", c.seed, "base seed");
    app->add_option("--out", c.out, "output path, '-' for stdout");
    app->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
    app->add_option("--method", c.methods, "estimation method(s)")->delimiter(',');
}

/// Output stream for --out; '-' writes to stdout.
class Output {
public:
    explicit Output(const std::string& path)
    {
        if (path != "-") {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw fri::Error("cannot open " + path + " for writing");
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }
    void finish()
    {
        stream().flush();
        if (!stream()) throw fri::Error("write failed");
    }

private:
    std::unique_ptr<std::ofstream> file_;
};

nlohmann::json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw fri::Error("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw fri::InvalidArgument(path + ": " + e.what());
    }
}

fri::SweepConfig load_sweep_config(const Common& c)
{
    auto cfg = c.config.empty() ? fri::SweepConfig::defaults()
                                : fri::SweepConfig::from_json(read_json(c.config));
    if (c.seed) cfg.base_seed = *c.seed;
    if (!c.methods.empty()) {
        cfg.methods.clear();
        for (const auto& m : c.methods) cfg.methods.push_back(fri::parse_method(m));
    }
    return cfg;
}

fri::Method single_method(const Common& c, fri::Method fallback)
{
    if (c.methods.empty()) return fallback;
    if (c.methods.size() != 1) throw fri::InvalidArgument("this command takes a single --method");
    return fri::parse_method(c.methods.front());
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_number(const std::string& s, long line)
{
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw fri::ParseError("not a number: '" + s + "'", line);
    }
    return v;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
    int n = 21;
    double tau = 1.0;
    std::vector<double> locations;
    std::vector<double> amplitudes;
    std::optional<double> psnr;
};

void run_synth(const Common& c, const SynthArgs& a)
{
    const fri::SamplingConfig cfg(a.n, a.tau);
    const auto stream = fri::DiracStream::from_unsorted(a.locations, a.amplitudes, a.tau);
    const auto y = fri::synthesize_samples(stream, cfg);
    auto noisy = y;
    if (a.psnr) noisy = fri::add_noise(y, fri::NoiseSpec{*a.psnr, c.seed.value_or(1)});

    Output out(c.out);
    auto& os = out.stream();
    os << "n,y,ynoisy\n";
    for (int n = 0; n < a.n; ++n) {
        os << n << ',' << format_double(y.values[n]) << ',' << format_double(noisy.values[n]) << '\n';
    }
    out.finish();
}

struct EstimateArgs {
    std::string in;
    int k = 2;
    double tau = 1.0;
    std::string prefix = "y";
    std::string label;
    int pencil_L = 0;
};

void run_estimate(const Common& c, const EstimateArgs& a)
{
    std::ifstream in(a.in);
    if (!in) throw fri::Error("cannot open " + a.in);
    std::string line;
    if (!std::getline(in, line)) throw fri::ParseError("missing header", 1);
    const auto header = split(line);

    // Sample columns are prefix0..prefix{N-1}; routing columns are optional.
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    std::vector<std::size_t> sample_cols;
    for (int n = 0;; ++n) {
        auto it = col.find(a.prefix + std::to_string(n));
        if (it == col.end()) break;
        sample_cols.push_back(it->second);
    }
    if (sample_cols.empty()) {
        throw fri::ParseError("no columns named " + a.prefix + "0, " + a.prefix + "1, ...", 1);
    }
    auto optional_col = [&](const char* name) -> std::optional<std::size_t> {
        auto it = col.find(name);
        return it == col.end() ? std::nullopt : std::optional<std::size_t>(it->second);
    };
    const auto psnr_col = optional_col("psnr_db");
    const auto delta_col = optional_col("delta_t");
    const auto real_col = optional_col("realization");

    const fri::SamplingConfig sampling(static_cast<int>(sample_cols.size()), a.tau);
    const fri::Method method = single_method(c, fri::Method::matrix_pencil);
    fri::EstimatorOptions opts;
    if (a.pencil_L > 0) opts.pencil_L = a.pencil_L;
    const auto label = a.label.empty() ? method : fri::parse_method(a.label);

    std::vector<fri::EstimateRecord> records;
    long lineno = 1;
    long row = 0;
    long failures = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != header.size()) {
            throw fri::ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                                      std::to_string(f.size()),
                                  lineno);
        }
        fri::SampleVector y{{}, sampling};
        for (auto i : sample_cols) y.values.push_back(parse_number(f[i], lineno));

        fri::EstimateRecord rec;
        try {
            rec = fri::estimate(y, a.k, method, opts);
        } catch (const fri::NumericalFailure&) {
            // Written as NaN locations so scoring counts the failure.
            ++failures;
            rec.locations.assign(a.k, std::numeric_limits<double>::quiet_NaN());
            rec.amplitudes.assign(a.k, std::numeric_limits<double>::quiet_NaN());
            rec.period = a.tau;
        }
        rec.method = label;
        rec.psnr_db = psnr_col ? parse_number(f[*psnr_col], lineno) : 0.0;
        rec.delta_t = delta_col ? parse_number(f[*delta_col], lineno) : 0.0;
        rec.realization = real_col ? static_cast<long>(parse_number(f[*real_col], lineno)) : row;
        records.push_back(std::move(rec));
        ++row;
    }

    Output out(c.out);
    fri::write_estimates_csv(out.stream(), records);
    out.finish();
    if (failures > 0) std::cerr << "estimate: " << failures << " of " << row << " rows failed\n";
}

struct SweepArgs {
    std::optional<int> realizations;
    std::vector<double> psnr;
    std::vector<double> delta;
};

void apply_overrides(fri::SweepConfig& cfg, const SweepArgs& a)
{
    if (a.realizations) cfg.realizations = *a.realizations;
    if (!a.psnr.empty()) cfg.psnr_grid_db = a.psnr;
    if (!a.delta.empty()) cfg.delta_grid = a.delta;
}

void run_sweep_cmd(const Common& c, const SweepArgs& a)
{
    auto cfg = load_sweep_config(c);
    apply_overrides(cfg, a);
    cfg.validate();
    const auto report = fri::run_sweep(cfg, c.workers);
    Output out(c.out);
    report.write_csv(out.stream());
    out.finish();
    if (c.out != "-") fri::write_sidecar(c.out, cfg.to_json(), cfg.hash());
}

void run_scatter_cmd(const Common& c, SweepArgs a)
{
    auto cfg = load_sweep_config(c);
    // Scatter defaults: 100 realizations at a single 1e-2 separation.
    if (c.config.empty()) {
        cfg.realizations = 100;
        cfg.delta_grid = {1e-2};
    }
    apply_overrides(cfg, a);
    cfg.validate();
    const auto records = fri::run_scatter(cfg, c.workers);
    Output out(c.out);
    fri::write_estimates_csv(out.stream(), records);
    out.finish();
    if (c.out != "-") fri::write_sidecar(c.out, cfg.to_json(), cfg.hash());
}

struct CrbArgs {
    int n = 21;
    double tau = 1.0;
    std::vector<double> locations;
    std::vector<double> amplitudes;
    std::vector<double> psnr;
    std::optional<double> sigma;
};

void run_crb(const Common& c, const CrbArgs& a)
{
    const fri::SamplingConfig cfg(a.n, a.tau);
    const auto stream = fri::DiracStream::from_unsorted(a.locations, a.amplitudes, a.tau);
    const auto clean = fri::synthesize_samples(stream, cfg);

    std::vector<std::pair<double, double>> levels; // (psnr, sigma)
    if (a.sigma) {
        levels.emplace_back(20.0 * std::log10(clean.peak() / *a.sigma), *a.sigma);
    } else {
        const auto grid = a.psnr.empty() ? fri::SweepConfig::defaults().psnr_grid_db : a.psnr;
        for (double p : grid) levels.emplace_back(p, fri::NoiseSpec{p, 0}.sigma_for(clean));
    }

    Output out(c.out);
    auto& os = out.stream();
    os << "psnr_db,sigma,k,t,crb_std\n";
    for (const auto& [psnr, sigma] : levels) {
        const auto crb = fri::crlb_location_std(stream, cfg, sigma);
        for (std::size_t k = 0; k < stream.size(); ++k) {
            os << format_double(psnr) << ',' << format_double(sigma) << ',' << k << ','
               << format_double(stream.locations()[k]) << ','
               << format_double(crb.per_location_std[k]) << '\n';
        }
    }
    out.finish();
}

struct BreakdownArgs {
    std::vector<double> over_T;
    std::vector<double> delta;
    int n = 21;
    double tau = 1.0;
};

void run_breakdown(const Common& c, const BreakdownArgs& a)
{
    const fri::SamplingConfig cfg(a.n, a.tau);
    std::vector<double> ratios = a.over_T;
    for (double d : a.delta) ratios.push_back(d / cfg.interval());
    if (ratios.empty()) {
        for (double d : fri::SweepConfig::defaults().delta_grid) ratios.push_back(d / cfg.interval());
    }
    Output out(c.out);
    auto& os = out.stream();
    os << "delta_t_over_T,breakdown_psnr_db\n";
    for (double r : ratios) {
        os << format_double(r) << ',' << format_double(fri::breakdown_psnr(r, cfg.order(), cfg.lambda()))
           << '\n';
    }
    out.finish();
}

void run_dataset(const Common& c, fri::DatasetSpec spec)
{
    if (!c.config.empty()) {
        for (const auto& [key, v] : read_json(c.config).items()) {
            if (key == "size") spec.size = v.get<long>();
            else if (key == "psnr_db") spec.psnr_db = v.get<double>();
            else if (key == "K") spec.K = v.get<int>();
            else if (key == "N") spec.N = v.get<int>();
            else if (key == "tau") spec.tau = v.get<double>();
            else if (key == "seed") spec.seed = v.get<std::uint64_t>();
            else throw fri::InvalidArgument("unknown dataset config key '" + key + "'");
        }
    }
    if (c.seed) spec.seed = *c.seed;

    Output out(c.out);
    fri::export_dataset(spec, out.stream());
    out.finish();
    if (c.out != "-") {
        const nlohmann::json j{{"size", spec.size}, {"psnr_db", spec.psnr_db}, {"K", spec.K},
                               {"N", spec.N},       {"tau", spec.tau},         {"seed", spec.seed},
                               {"location_law", {spec.location_lo, spec.location_hi}},
                               {"amplitude_law", {spec.amplitude_lo, spec.amplitude_hi}}};
        fri::write_sidecar(c.out, j, fri::config_hash(j));
    }
}

void run_ingest(const Common& c, const std::string& in)
{
    auto cfg = load_sweep_config(c);
    const auto records = fri::ingest_estimates(std::filesystem::path(in), cfg.tau);
    const auto report = fri::score_estimates(records, cfg);
    Output out(c.out);
    report.write_csv(out.stream());
    out.finish();
    if (c.out != "-") fri::write_sidecar(c.out, cfg.to_json(), cfg.hash());
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Finite rate of innovation reconstruction of periodic Dirac streams"};
    app.require_subcommand(1);

    Common common;

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "synthesize (noisy) samples of a Dirac stream");
    add_common(synth, common);
    synth->add_option("--n", synth_args.n, "number of samples (odd)");
    synth->add_option("--tau", synth_args.tau, "period");
    synth->add_option("--locations", synth_args.locations)->required()->delimiter(',');
    synth->add_option("--amplitudes", synth_args.amplitudes)->required()->delimiter(',');
    synth->add_option("--psnr", synth_args.psnr, "add noise at this PSNR (dB)");

    EstimateArgs est_args;
    auto* est = app.add_subcommand("estimate", "estimate Dirac locations from sample rows");
    add_common(est, common);
    est->add_option("--in", est_args.in, "samples CSV")->required()->check(CLI::ExistingFile);
    est->add_option("--k", est_args.k, "number of Diracs");
    est->add_option("--tau", est_args.tau, "period");
    est->add_option("--columns", est_args.prefix, "sample column prefix (y, ynoisy, ...)");
    est->add_option("--label", est_args.label, "method name written to the output");
    est->add_option("--pencil-L", est_args.pencil_L, "matrix pencil parameter");

    SweepArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep over PSNR and separation");
    add_common(sweep, common);
    auto* scatter = app.add_subcommand("scatter", "per-realization estimates at one separation");
    add_common(scatter, common);
    for (auto* sub : {sweep, scatter}) {
        sub->add_option("--realizations", sweep_args.realizations);
        sub->add_option("--psnr", sweep_args.psnr, "PSNR grid (dB)")->delimiter(',');
        sub->add_option("--delta", sweep_args.delta, "separation grid")->delimiter(',');
    }

    CrbArgs crb_args;
    auto* crb = app.add_subcommand("crb", "Cramer-Rao bound on the locations");
    add_common(crb, common);
    crb->add_option("--n", crb_args.n);
    crb->add_option("--tau", crb_args.tau);
    crb->add_option("--locations", crb_args.locations)->required()->delimiter(',');
    crb->add_option("--amplitudes", crb_args.amplitudes)->required()->delimiter(',');
    auto* crb_psnr = crb->add_option("--psnr", crb_args.psnr, "PSNR values (dB)")->delimiter(',');
    crb->add_option("--sigma", crb_args.sigma, "noise standard deviation")->excludes(crb_psnr);

    BreakdownArgs bd_args;
    auto* bd = app.add_subcommand("breakdown", "predicted breakdown PSNR for two equal Diracs");
    add_common(bd, common);
    bd->add_option("--delta-over-T", bd_args.over_T)->delimiter(',');
    bd->add_option("--delta", bd_args.delta, "separation in signal time")->delimiter(',');
    bd->add_option("--n", bd_args.n);
    bd->add_option("--tau", bd_args.tau);

    fri::DatasetSpec ds;
    auto* dataset = app.add_subcommand("dataset", "export a training dataset");
    add_common(dataset, common);
    dataset->add_option("--size", ds.size);
    dataset->add_option("--psnr", ds.psnr_db);
    dataset->add_option("--k", ds.K);
    dataset->add_option("--n", ds.N);
    dataset->add_option("--tau", ds.tau);

    std::string ingest_in;
    auto* ingest = app.add_subcommand("ingest", "score an estimate CSV against a sweep config");
    add_common(ingest, common);
    ingest->add_option("--in", ingest_in, "estimate CSV")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth) run_synth(common, synth_args);
        else if (*est) run_estimate(common, est_args);
        else if (*sweep) run_sweep_cmd(common, sweep_args);
        else if (*scatter) run_scatter_cmd(common, sweep_args);
        else if (*crb) run_crb(common, crb_args);
        else if (*bd) run_breakdown(common, bd_args);
        else if (*dataset) run_dataset(common, ds);
        else if (*ingest) run_ingest(common, ingest_in);
    } catch (const fri::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
