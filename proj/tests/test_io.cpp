#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "tomo/io.hpp"
#include "tomo/recon.hpp"
#include "tomo/run.hpp"

using namespace tomo;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE(is.good());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// Fresh scratch directory per test run.
fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("tomo_io_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

ImageGrid tiny_image(std::initializer_list<double> vals, int w, int h) {
    ImageGrid x;
    x.width = w;
    x.height = h;
    x.values = vals;
    return x;
}

}  // namespace

TEST_CASE("config round-trips through serialize and parse") {
    RunConfig cfg;
    cfg.subcommand = "dose-study";
    cfg.base_seed = 123456789012345ull;
    cfg.out_dir = "results/run1";
    cfg.threads = 3;
    cfg.grid_size = 96;
    cfg.n_det = 80;
    cfg.theta_max = 72.5;
    cfg.n_proj = 17;
    cfg.phantom = "pixel-sparse";
    cfg.k_target = 0.12345678901234567;
    cfg.total_counts = 4e5;
    cfg.solver = "l1";
    cfg.epsilon = 1e-3;
    cfg.nonneg = true;
    cfg.max_iters = 777;
    cfg.k_values = {0.05, 0.1, 0.2};
    cfg.mu_values = {0.25, 0.5, 1.0, 2.0};
    cfg.n_e_values = {1e4, 4e4};
    cfg.n_p_values = {8, 16, 32};
    cfg.theta_values = {45.0, 90.0};
    cfg.eps_grid = {0.001, 0.01, 0.1};
    cfg.eps_points = 7;
    cfg.boundary_level = 0.9;
    cfg.window_lo = 0.0;
    cfg.window_hi = 1.0;
    cfg.pgm_binary = false;
    cfg.write_images = true;
    cfg.dump_matrix = true;

    const RunConfig back = parse_config(serialize_config(cfg));
    CHECK(back == cfg);

    // Defaults survive the trip too.
    CHECK(parse_config(serialize_config(RunConfig{})) == RunConfig{});
}

TEST_CASE("config parser applies defaults for missing keys") {
    const RunConfig cfg = parse_config("");
    CHECK(cfg.subcommand.empty());
    CHECK(cfg.solver == "tv");
    CHECK(cfg.phantom == "ptc-like");
    CHECK(cfg.rmse_threshold == 0.05);
    CHECK(cfg.c_alpha_stop == -0.95);
    CHECK(cfg.resid_band == 1e-4);
    CHECK(cfg.window_lo == 0.01);
    CHECK(cfg.window_hi == 0.05);
    CHECK(cfg.eps_points == 12);
    CHECK(cfg.theta_max == 90.0);
    CHECK(cfg.pgm_binary);
}

TEST_CASE("config parser handles comments, blanks, and lists") {
    const RunConfig cfg = parse_config(
        "# full-line comment\n"
        "\n"
        "   epsilon = 2.5   # trailing comment\n"
        "k_values = 0.1, 0.2,0.3\n"
        "n_p_values = 8 , 16\n"
        "eps_grid =\n"
        "nonneg = 1\n");
    CHECK(cfg.epsilon == 2.5);
    CHECK(cfg.k_values == std::vector<double>{0.1, 0.2, 0.3});
    CHECK(cfg.n_p_values == std::vector<int>{8, 16});
    CHECK(cfg.eps_grid.empty());
    CHECK(cfg.nonneg);
}

TEST_CASE("config parser rejects malformed input with the offending key") {
    auto message_of = [](const std::string& text) {
        try {
            parse_config(text);
        } catch (const std::invalid_argument& e) {
            return std::string(e.what());
        }
        return std::string();
    };

    CHECK(message_of("epsilonn = 1\n").find("epsilonn") != std::string::npos);
    CHECK(message_of("epsilon = 1\nepsilon = 2\n").find("duplicate") !=
          std::string::npos);
    CHECK(message_of("grid_size = abc\n").find("grid_size") != std::string::npos);
    CHECK(message_of("grid_size = 12fish\n").find("12fish") != std::string::npos);
    CHECK(message_of("just some words\n").find("key = value") != std::string::npos);
    CHECK(message_of("= 3\n").find("missing key") != std::string::npos);
    CHECK(message_of("base_seed = -1\n").find("base_seed") != std::string::npos);
    CHECK(message_of("nonneg = yes\n").find("nonneg") != std::string::npos);
    CHECK(message_of("solver = cg\n").find("cg") != std::string::npos);
    CHECK(message_of("phantom = blob\n").find("blob") != std::string::npos);
    CHECK(message_of("subcommand = nonsense\n").find("nonsense") !=
          std::string::npos);
}

TEST_CASE("parse_config_file reports unreadable paths") {
    CHECK_THROWS_AS(parse_config_file("/nonexistent/config.cfg"),
                    std::runtime_error);
}

TEST_CASE("pgm writer windows and encodes 16-bit samples") {
    // Window (0.01, 0.05): endpoints clamp, the carbon level sits mid-scale.
    const ImageGrid x =
        tiny_image({0.01, 0.03, 0.05, -1.0, 2.0, 0.02}, 3, 2);

    SUBCASE("binary P5") {
        std::ostringstream os(std::ios::binary);
        write_image(x, os, 0.01, 0.05, true);
        const std::string s = os.str();
        const std::string header = "P5\n3 2\n65535\n";
        REQUIRE(s.size() == header.size() + 12);
        CHECK(s.compare(0, header.size(), header) == 0);
        auto sample = [&](int i) {
            const auto hi = static_cast<unsigned char>(s[header.size() + 2 * i]);
            const auto lo = static_cast<unsigned char>(s[header.size() + 2 * i + 1]);
            return (static_cast<unsigned>(hi) << 8) | lo;  // big-endian
        };
        CHECK(sample(0) == 0u);
        CHECK(sample(1) == 32767u);  // (0.03-0.01)/0.04 rounds just below 1/2
        CHECK(sample(2) == 65535u);
        CHECK(sample(3) == 0u);      // below window
        CHECK(sample(4) == 65535u);  // above window
        CHECK(sample(5) == 16384u);  // quarter point, rounded half-up
    }

    SUBCASE("ascii P2") {
        std::ostringstream os;
        write_image(x, os, 0.01, 0.05, false);
        CHECK(os.str() == "P2\n3 2\n65535\n0 32767 65535\n0 65535 16384\n");
    }

    SUBCASE("non-finite samples are rejected") {
        const ImageGrid bad = tiny_image({std::nan("")}, 1, 1);
        std::ostringstream os;
        CHECK_THROWS_AS(write_image(bad, os, 0.0, 1.0, false),
                        std::invalid_argument);
    }

    SUBCASE("degenerate window is rejected") {
        std::ostringstream os;
        CHECK_THROWS_AS(write_image(x, os, 0.05, 0.05, true),
                        std::invalid_argument);
        CHECK_THROWS_AS(write_image(x, os, 0.06, 0.05, true),
                        std::invalid_argument);
    }
}

TEST_CASE("csv emitters use pinned headers and nine significant digits") {
    SUBCASE("study records") {
        StudyRecord r;
        r.study = "dose-study";
        r.n_proj = 16;
        r.dose = 2e5;
        r.theta_max_deg = 67.5;
        r.epsilon = 0.123456789123;
        r.optimal_epsilon = 0.123456789123;
        r.optimal_rmse = 0.00123456789123;
        r.converged = true;
        r.seed = 42;
        r.wall_time = 123.0;  // informational only, never serialized
        std::ostringstream os;
        write_study_csv({r}, os);
        CHECK(os.str() ==
              "study,n_proj,dose,theta_max,epsilon,optimal_epsilon,optimal_rmse,"
              "converged,seed\n"
              "dose-study,16,200000,67.5,0.123456789,0.123456789,0.00123456789,"
              "1,42\n");

        std::ostringstream empty;
        write_study_csv({}, empty);
        CHECK(empty.str() ==
              "study,n_proj,dose,theta_max,epsilon,optimal_epsilon,optimal_rmse,"
              "converged,seed\n");
    }

    SUBCASE("phase diagram cells") {
        PhaseDiagramCell c;
        c.k = 0.1;
        c.mu = 0.5;
        c.n_trials = 10;
        c.n_recovered = 7;
        c.fraction = 0.7;
        std::ostringstream os;
        write_cells_csv({c}, os);
        CHECK(os.str() == "k,mu,n_trials,n_recovered,fraction\n0.1,0.5,10,7,0.7\n");
    }

    SUBCASE("boundary") {
        std::ostringstream os;
        write_boundary_csv({{0.1, 0.25}, {0.2, 0.5}}, os);
        CHECK(os.str() == "k,mu\n0.1,0.25\n0.2,0.5\n");
    }

    SUBCASE("epsilon curve") {
        EpsSweepPoint p;
        p.epsilon = 1e-3;
        p.rmse = 0.25;
        p.converged = false;
        std::ostringstream os;
        write_curve_csv({p}, os);
        CHECK(os.str() == "epsilon,rmse,converged\n0.001,0.25,0\n");
    }

    SUBCASE("solver diagnostics are one-indexed") {
        ReconResult res;
        res.diagnostics.resize(2);
        res.diagnostics[0] = {2.0, 10.0, -0.5, 1.0, 0.125};
        res.diagnostics[1] = {1.5, 9.0, -0.75, 0.995, 0.125};
        std::ostringstream os;
        write_diagnostics_csv(res, os);
        CHECK(os.str() ==
              "iteration,residual,objective,c_alpha,beta,alpha\n"
              "1,2,10,-0.5,1,0.125\n"
              "2,1.5,9,-0.75,0.995,0.125\n");
    }

    SUBCASE("sinogram table") {
        Sinogram b;
        b.n_proj = 2;
        b.n_det = 3;
        b.values = {1.0, 0.5, 0.0, 2.25, 1e-3, 4.0};
        std::ostringstream os;
        write_sinogram_csv(b, os);
        CHECK(os.str() == "1,0.5,0\n2.25,0.001,4\n");
    }
}

TEST_CASE("csv file writers fail loudly on bad paths") {
    CHECK_THROWS_AS(write_study_csv({}, "/nonexistent_dir/records.csv"),
                    std::runtime_error);
    const ImageGrid x = tiny_image({0.5}, 1, 1);
    CHECK_THROWS_AS(write_image(x, "/nonexistent_dir/x.pgm", 0.0, 1.0),
                    std::runtime_error);
}

TEST_CASE("run_subcommand writes the documented files per subcommand") {
    std::ostringstream log;

    SUBCASE("phantom") {
        const fs::path dir = scratch_dir("phantom");
        RunConfig cfg;
        cfg.subcommand = "phantom";
        cfg.phantom = "pixel-sparse";
        cfg.grid_size = 16;
        cfg.out_dir = dir.string();
        const auto files = run_subcommand(cfg, log);
        REQUIRE(files.size() == 1);
        CHECK(files[0] == (dir / "phantom.pgm").string());
        CHECK(slurp(files[0]).substr(0, 3) == "P5\n");
    }

    SUBCASE("project, optionally with the matrix dump") {
        const fs::path dir = scratch_dir("project");
        RunConfig cfg;
        cfg.subcommand = "project";
        cfg.phantom = "pixel-sparse";
        cfg.grid_size = 16;
        cfg.n_proj = 8;
        cfg.out_dir = dir.string();
        auto files = run_subcommand(cfg, log);
        REQUIRE(files.size() == 1);
        CHECK(files[0] == (dir / "sinogram.csv").string());

        cfg.dump_matrix = true;
        cfg.out_dir = (dir / "with_matrix").string();
        files = run_subcommand(cfg, log);
        REQUIRE(files.size() == 2);
        CHECK(fs::path(files[1]).filename() == "matrix.txt");
    }

    SUBCASE("reconstruct") {
        const fs::path dir = scratch_dir("reconstruct");
        RunConfig cfg;
        cfg.subcommand = "reconstruct";
        cfg.phantom = "pixel-sparse";
        cfg.grid_size = 12;
        cfg.solver = "l1";
        cfg.max_iters = 5000;
        cfg.out_dir = dir.string();
        const auto files = run_subcommand(cfg, log);
        REQUIRE(files.size() == 3);
        CHECK(fs::path(files[0]).filename() == "recon.pgm");
        CHECK(fs::path(files[1]).filename() == "diagnostics.csv");
        CHECK(fs::path(files[2]).filename() == "summary.csv");
        const std::string summary = slurp(files[2]);
        CHECK(summary.find("reconstruct,") != std::string::npos);
        CHECK(slurp(files[1]).substr(0, 10) == "iteration,");
    }

    SUBCASE("reruns are byte-identical") {
        RunConfig cfg;
        cfg.subcommand = "project";
        cfg.phantom = "pixel-sparse";
        cfg.grid_size = 16;
        cfg.n_proj = 8;
        cfg.total_counts = 1e5;
        cfg.base_seed = 99;

        const fs::path a = scratch_dir("rerun_a");
        cfg.out_dir = a.string();
        run_subcommand(cfg, log);
        const fs::path b = scratch_dir("rerun_b");
        cfg.out_dir = b.string();
        run_subcommand(cfg, log);
        CHECK(slurp((a / "sinogram.csv").string()) ==
              slurp((b / "sinogram.csv").string()));
    }

    SUBCASE("configuration errors") {
        RunConfig cfg;
        CHECK_THROWS_AS(run_subcommand(cfg, log), std::invalid_argument);

        cfg.subcommand = "wedge-study";
        cfg.theta_values = {90.0};
        cfg.n_p_values = {8};
        cfg.total_counts = 0.0;  // wedge study needs a dose
        cfg.out_dir = scratch_dir("errors").string();
        CHECK_THROWS_AS(run_subcommand(cfg, log), std::invalid_argument);

        cfg.subcommand = "eps-sweep";  // ideal data needs an explicit grid
        cfg.eps_grid = {};
        CHECK_THROWS_AS(run_subcommand(cfg, log), std::invalid_argument);

        cfg.subcommand = "phase-diagram";
        cfg.k_values = {};
        CHECK_THROWS_AS(run_subcommand(cfg, log), std::invalid_argument);

        cfg.subcommand = "reconstruct";
        cfg.threads = 0;
        CHECK_THROWS_AS(run_subcommand(cfg, log), std::invalid_argument);
    }
}
