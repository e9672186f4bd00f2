#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "fri/analysis.hpp"
#include "fri/error.hpp"
#include "fri/harness.hpp"

using namespace fri;

namespace {

SweepConfig small_config()
{
    SweepConfig cfg = SweepConfig::defaults();
    cfg.delta_grid = {0.1};
    cfg.psnr_grid_db = {30.0};
    cfg.realizations = 20;
    return cfg;
}

std::string report_csv(const SweepReport& r)
{
    std::ostringstream os;
    r.write_csv(os);
    return os.str();
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) out.push_back(f);
    return out;
}

std::filesystem::path temp_path(const std::string& name)
{
    return std::filesystem::temp_directory_path() / ("fri_test_" + name);
}

} // namespace

TEST_CASE("default sweep config reproduces the reference grid")
{
    const auto cfg = SweepConfig::defaults();
    CHECK(cfg.N == 21);
    CHECK(cfg.tau == 1.0);
    CHECK(cfg.K == 2);
    CHECK(cfg.amplitudes == std::vector<double>{2.0, 2.0});
    CHECK(cfg.t0 == 0.0);
    CHECK(cfg.realizations == 1000);
    REQUIRE(cfg.delta_grid.size() == 11);
    CHECK(cfg.delta_grid.front() == doctest::Approx(1e-3));
    CHECK(cfg.delta_grid[4] == 0.01);
    CHECK(cfg.delta_grid[8] == 0.1);
    CHECK(cfg.delta_grid.back() == doctest::Approx(std::pow(10.0, -0.5)));
    REQUIRE(cfg.psnr_grid_db.size() == 16);
    CHECK(cfg.psnr_grid_db.front() == -5.0);
    CHECK(cfg.psnr_grid_db.back() == 70.0);
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.breakdown_formula_applies());
}

TEST_CASE("sweep config validation and JSON round trip")
{
    auto cfg = small_config();
    cfg.pencil_L = 8;
    cfg.methods = {Method::prony, Method::matrix_pencil};
    const auto back = SweepConfig::from_json(cfg.to_json());
    CHECK(back.to_json() == cfg.to_json());
    CHECK(back.hash() == cfg.hash());
    CHECK(back.hash().size() == 16);

    auto other = cfg;
    other.base_seed += 1;
    CHECK(other.hash() != cfg.hash());

    CHECK_THROWS_AS(SweepConfig::from_json({{"bogus", 1}}), InvalidArgument);
    CHECK_THROWS_AS(SweepConfig::from_json({{"N", "many"}}), InvalidArgument);
    CHECK_THROWS_AS(SweepConfig::from_json({{"methods", {"esprit"}}}), InvalidArgument);

    auto bad = small_config();
    bad.psnr_grid_db.clear();
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = small_config();
    bad.realizations = 0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = small_config();
    bad.methods = {Method::nn_direct};
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = small_config();
    bad.amplitudes = {1.0};
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = small_config();
    bad.pencil_L = 20;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("near-noiseless sweep cell is exact")
{
    auto cfg = small_config();
    cfg.psnr_grid_db = {200.0};
    cfg.realizations = 10;
    const auto report = run_sweep(cfg);
    // one row per (cell x method x k)
    CHECK(report.rows.size() == cfg.methods.size() * 2);
    for (std::size_t k = 0; k < 2; ++k) {
        const auto* row = report.find(200.0, 0.1, Method::matrix_pencil, k);
        REQUIRE(row != nullptr);
        CHECK(row->f_sd < 1e-7);
        CHECK(row->i_effective == 10);
        CHECK(row->failure_count == 0);
        CHECK(row->crb_std > 0.0);
        CHECK(row->breakdown_psnr_db == doctest::Approx(breakdown_psnr(2.1, 20, 2 * kPi / 21)));
    }
}

TEST_CASE("sweep output is deterministic and independent of worker count")
{
    auto cfg = small_config();
    cfg.delta_grid = {0.01, 0.1};
    cfg.psnr_grid_db = {20.0, 40.0};
    const auto a = report_csv(run_sweep(cfg, 1));
    const auto b = report_csv(run_sweep(cfg, 1));
    const auto c = report_csv(run_sweep(cfg, 3));
    CHECK(a == b);
    CHECK(a == c);

    std::istringstream is(a);
    std::string line;
    std::getline(is, line);
    CHECK(line == "psnr_db,delta_t,method,k,f_sd,crb_std,breakdown_psnr_db,I_effective,failure_count,config_hash");
    int rows = 0;
    while (std::getline(is, line)) {
        ++rows;
        const auto fields = split(line);
        REQUIRE(fields.size() == 10);
        CHECK(fields.back() == cfg.hash());
        CHECK(std::stod(fields[4]) >= 0.0);
    }
    CHECK(rows == 2 * 2 * 3 * 2);
}

TEST_CASE("unequal amplitudes carry no breakdown overlay")
{
    auto cfg = small_config();
    cfg.amplitudes = {1.0, 3.0};
    cfg.realizations = 3;
    const auto report = run_sweep(cfg);
    CHECK(std::isnan(report.rows.front().breakdown_psnr_db));
}

TEST_CASE("moderate noise at wide separation follows the CRB")
{
    auto cfg = small_config();
    cfg.psnr_grid_db = {50.0};
    cfg.realizations = 300;
    cfg.methods = {Method::matrix_pencil};
    const auto* row = run_sweep(cfg).find(50.0, 0.1, Method::matrix_pencil, 0);
    REQUIRE(row != nullptr);
    CHECK(row->f_sd < 2.0 * row->crb_std);
    CHECK(row->f_sd > 0.5 * row->crb_std);
}

TEST_CASE("scatter runs")
{
    auto cfg = SweepConfig::defaults();
    cfg.delta_grid = {0.01};
    cfg.psnr_grid_db = {30.0, 50.0, 70.0};
    cfg.realizations = 100;
    cfg.methods = {Method::matrix_pencil};
    const auto recs = run_scatter(cfg);
    std::ostringstream os;
    write_estimates_csv(os, recs);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "method,psnr_db,delta_t,realization,k,t_hat,a_hat");
    std::map<std::tuple<std::string, std::string, std::string>, int> counts;
    while (std::getline(is, line)) {
        const auto f = split(line);
        ++counts[{f[0], f[1], f[4]}];
    }
    CHECK(counts.size() == 3 * 2);
    for (const auto& [key, n] : counts) CHECK(n == 100);

    cfg.delta_grid = {0.1, 0.2};
    CHECK_THROWS_AS(run_scatter(cfg), InvalidArgument);
}

TEST_CASE("scatter points collapse onto the truth without noise and are unbiased at high PSNR")
{
    auto cfg = SweepConfig::defaults();
    cfg.delta_grid = {0.1};
    cfg.psnr_grid_db = {250.0};
    cfg.realizations = 20;
    cfg.methods = {Method::matrix_pencil, Method::prony_cadzow};
    for (const auto& rec : run_scatter(cfg)) {
        CHECK(std::abs(rec.locations[0] - 0.0) < 1e-9);
        CHECK(std::abs(rec.locations[1] - 0.1) < 1e-9);
    }

    cfg.psnr_grid_db = {70.0};
    cfg.realizations = 100;
    cfg.methods = {Method::matrix_pencil};
    double mean = 0.0;
    const auto recs = run_scatter(cfg);
    for (const auto& rec : recs) mean += rec.locations[1];
    mean /= static_cast<double>(recs.size());
    CHECK(std::abs(mean - 0.1) < 1e-4);
}

TEST_CASE("estimate files round-trip through ingestion")
{
    auto cfg = small_config();
    cfg.psnr_grid_db = {25.0};
    cfg.realizations = 50;
    const auto recs = run_scatter(cfg);
    std::stringstream ss;
    write_estimates_csv(ss, recs);
    const auto back = ingest_estimates(ss);
    REQUIRE(back.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
        CHECK(back[i].method == recs[i].method);
        CHECK(back[i].realization == recs[i].realization);
        CHECK(back[i].psnr_db == recs[i].psnr_db);
        CHECK(back[i].delta_t == recs[i].delta_t);
        CHECK(back[i].locations == recs[i].locations);
        CHECK(back[i].amplitudes == recs[i].amplitudes);
    }

    // Scored ingested estimates reproduce the native sweep exactly.
    const auto native = report_csv(run_sweep(cfg));
    const auto scored = report_csv(score_estimates(back, cfg));
    CHECK(native == scored);
}

TEST_CASE("ingest examples and errors")
{
    std::istringstream two("method,psnr_db,delta_t,realization,k,t_hat,a_hat\n"
                           "nn_direct,30,0.01,0,0,0.001,\n"
                           "nn_direct,30,0.01,1,0,-0.002,\n");
    const auto recs = ingest_estimates(two);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].method == Method::nn_direct);
    CHECK(recs[1].locations[0] == -0.002);
    CHECK(std::isnan(recs[0].amplitudes[0]));

    std::istringstream pair("method,psnr_db,delta_t,realization,k,t_hat,a_hat\r\n"
                            "nn_denoise_pencil,30,0.01,4,1,0.0101,2\r\n"
                            "nn_denoise_pencil,30,0.01,4,0,0.0002,2.1\r\n");
    const auto p = ingest_estimates(pair);
    REQUIRE(p.size() == 1);
    CHECK(p[0].locations == std::vector<double>{0.0002, 0.0101});
    CHECK(p[0].amplitudes == std::vector<double>{2.1, 2.0});

    auto error_line = [](const std::string& text) -> std::size_t {
        std::istringstream is(text);
        try {
            ingest_estimates(is);
        } catch (const ParseError& e) {
            return e.line();
        }
        return 0;
    };
    const std::string header = "method,psnr_db,delta_t,realization,k,t_hat,a_hat\n";
    CHECK(error_line(header + "nn_direct,30,0.01,zero,0,0.1,1\n") == 2);
    CHECK(error_line(header + "nn_direct,30,0.01,0,0,0.1\n") == 2);
    CHECK(error_line(header + "nn_direct,30,0.01,0,0,0.1,1\nmagic,30,0.01,0,1,0.1,1\n") == 3);
    CHECK(error_line(header + "nn_direct,30,0.01,0,0,0.1,1\nnn_direct,30,0.01,0,0,0.2,1\n") == 3);
    CHECK(error_line("t_hat,method\n") == 1);

    try {
        std::istringstream is(header + "nn_direct,30,0.01,zero,0,0.1,1\n");
        ingest_estimates(is);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("ingested failures are counted, not scored")
{
    auto cfg = small_config();
    std::istringstream is("method,psnr_db,delta_t,realization,k,t_hat,a_hat\n"
                          "nn_direct,30,0.1,0,0,0.001,\n"
                          "nn_direct,30,0.1,0,1,0.101,\n"
                          "nn_direct,30,0.1,1,0,nan,\n"
                          "nn_direct,30,0.1,1,1,nan,\n");
    const auto report = score_estimates(ingest_estimates(is), cfg);
    const auto* row = report.find(30.0, 0.1, Method::nn_direct, 0);
    REQUIRE(row != nullptr);
    CHECK(row->i_effective == 1);
    CHECK(row->failure_count == 1);
    CHECK(row->f_sd == doctest::Approx(0.001));
}

TEST_CASE("dataset export: schema and determinism")
{
    DatasetSpec spec;
    spec.size = 3;
    spec.psnr_db = 15.0;
    spec.seed = 77;
    std::ostringstream a, b;
    export_dataset(spec, a);
    export_dataset(spec, b);
    CHECK(a.str() == b.str());

    std::istringstream is(a.str());
    std::string line;
    std::getline(is, line);
    const auto header = split(line);
    REQUIRE(header.size() == 2 + 21 + 21 + 2 + 2);
    CHECK(header[0] == "psnr_db");
    CHECK(header[1] == "sigma");
    CHECK(header[2] == "y0");
    CHECK(header[22] == "y20");
    CHECK(header[23] == "ynoisy0");
    CHECK(header[44] == "t0");
    CHECK(header[47] == "a1");
    int rows = 0;
    while (std::getline(is, line)) {
        ++rows;
        const auto f = split(line);
        REQUIRE(f.size() == header.size());
        CHECK(std::stod(f[0]) == 15.0);
        // 17 significant digits reproduce the double exactly
        const double t0 = std::stod(f[44]);
        CHECK(format_double(t0) == f[44]);
        CHECK(t0 < std::stod(f[45]));
        // sigma matches the peak-referenced PSNR of the clean row
        double peak = 0.0;
        for (int n = 0; n < 21; ++n) peak = std::max(peak, std::abs(std::stod(f[2 + n])));
        CHECK(std::stod(f[1]) == doctest::Approx(peak * std::pow(10.0, -15.0 / 20)));
    }
    CHECK(rows == 3);

    DatasetSpec other = spec;
    other.seed = 78;
    std::ostringstream c;
    export_dataset(other, c);
    CHECK(c.str() != a.str());

    const auto path = temp_path("dataset.csv");
    export_dataset(spec, path);
    std::ifstream in(path);
    std::stringstream from_file;
    from_file << in.rdbuf();
    CHECK(from_file.str() == a.str());
    std::filesystem::remove(path);

    DatasetSpec bad = spec;
    bad.amplitude_lo = 0.0;
    CHECK_THROWS_AS(export_dataset(bad, a), InvalidArgument);
    CHECK_THROWS_AS(export_dataset(spec, std::filesystem::path("/nonexistent/dir/x.csv")), Error);
}

TEST_CASE("dataset export follows the training laws")
{
    DatasetSpec spec;
    spec.size = 100000;
    spec.psnr_db = 10.0;
    spec.seed = 2020;
    const auto path = temp_path("dataset_large.csv");
    export_dataset(spec, path);

    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    double t_sum = 0.0, a_sum = 0.0;
    long rows = 0;
    std::set<double> psnr_values;
    while (std::getline(in, line)) {
        const auto f = split(line);
        psnr_values.insert(std::stod(f[0]));
        t_sum += std::stod(f[44]) + std::stod(f[45]);
        a_sum += std::stod(f[46]) + std::stod(f[47]);
        ++rows;
    }
    std::filesystem::remove(path);
    CHECK(rows == 100000);
    CHECK(psnr_values == std::set<double>{10.0});
    CHECK(std::abs(t_sum / (2.0 * rows)) < 0.005);
    CHECK(std::abs(a_sum / (2.0 * rows) - 5.25) < 0.05);
}

TEST_CASE("sidecar echoes the config and hash")
{
    const auto cfg = small_config();
    const auto path = temp_path("report.csv");
    write_sidecar(path, cfg.to_json(), cfg.hash());
    auto sidecar = path;
    sidecar += ".json";
    std::ifstream in(sidecar);
    const auto j = nlohmann::json::parse(in);
    CHECK(j.at("config_hash") == cfg.hash());
    CHECK(SweepConfig::from_json(j.at("config")).hash() == cfg.hash());
    std::filesystem::remove(sidecar);
}
