#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "kerr/config.hpp"
#include "kerr/errors.hpp"
#include "kerr/io.hpp"
#include "kerr/runner.hpp"

using namespace kerr;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("config parsing") {
    SUBCASE("sections, comments, typed getters") {
        const auto cfg = ExperimentConfig::parse_string(
            "# comment\n"
            "[experiment]\n"
            "type = fdtd   # trailing comment\n"
            "h = 0.01\n"
            "sweep = 0.04 0.02 0.01\n"
            "flag = true\n",
            "t.cfg");
        CHECK(cfg.get_string("experiment", "type") == "fdtd");
        CHECK(cfg.get_double("experiment", "h") == doctest::Approx(0.01));
        CHECK(cfg.get_doubles("experiment", "sweep").size() == 3);
        CHECK(cfg.get_bool("experiment", "flag", false));
        CHECK(cfg.get_double("experiment", "missing", 7.0) == 7.0);
        CHECK_FALSE(cfg.has("experiment", "missing"));
    }
    SUBCASE("diagnostics carry line numbers") {
        CHECK_THROWS_WITH_AS(ExperimentConfig::parse_string("[a]\nx 3\n", "f.cfg"),
                             doctest::Contains("f.cfg:2"), ConfigError);
        CHECK_THROWS_WITH_AS(ExperimentConfig::parse_string("x = 3\n", "f.cfg"),
                             doctest::Contains("outside any [section]"), ConfigError);
        CHECK_THROWS_WITH_AS(ExperimentConfig::parse_string("[a]\nx = 1\nx = 2\n", "f.cfg"),
                             doctest::Contains("duplicate key"), ConfigError);
        const auto cfg = ExperimentConfig::parse_string("[a]\nx = 3q\n", "f.cfg");
        CHECK_THROWS_WITH_AS(cfg.get_double("a", "x"), doctest::Contains("f.cfg:2"), ConfigError);
    }
}

TEST_CASE("binary grid round trip") {
    const fs::path dir = fresh_dir("kerr_io_grid");
    const Grid3D grid({-1, -2, 0}, {0.5, 0.25, 1.0}, {4, 6, 3});
    ScalarField f(grid.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::sin(double(i)) * 1e3;
    write_grid_field(dir / "f.f64", grid, f, "test_field");
    const auto [g2, f2] = read_grid_field(dir / "f.f64");
    CHECK(g2.counts == grid.counts);
    CHECK(g2.origin.x == grid.origin.x);
    CHECK(g2.spacing.y == grid.spacing.y);
    REQUIRE(f2.size() == f.size());
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(f2[i] == f[i]);
}

TEST_CASE("sinogram and trace round trips") {
    const fs::path dir = fresh_dir("kerr_io_sino");
    Sinogram sino(2, 5, 7);
    sino.offset_min = -2;
    sino.offset_max = 2;
    sino.z_min = -0.5;
    sino.z_max = 0.5;
    sino.e0 = 1.25;
    for (std::size_t i = 0; i < sino.data.size(); ++i) sino.data[i] = double(i) * 0.125;
    write_sinogram(dir / "s.f64", sino);
    const Sinogram s2 = read_sinogram(dir / "s.f64");
    CHECK(s2.n_angles == 5);
    CHECK(s2.e0 == 1.25);
    CHECK(s2.data == sino.data);

    DetectorTrace tr;
    tr.position = 16;
    tr.t0 = 1.5;
    tr.dt = 0.003;
    tr.h = 0.01;
    tr.e0 = 1.25;
    tr.background = 1.25;
    tr.amp_scale = 0.01;
    tr.beam_a2 = 1;
    tr.beam_a3 = 0.5;
    tr.beam_launch = 3;
    tr.beam_window_inner = 0.6;
    tr.beam_window_outer = 1.5;
    tr.chi_description = "test";
    for (int i = 0; i < 64; ++i) {
        tr.e2.push_back(std::cos(i * 0.3) * 1e-2);
        tr.e3.push_back(1.25 + std::sin(i * 0.3) * 1e-2);
    }
    write_trace(dir / "t.csv", tr);
    const DetectorTrace t2 = read_trace(dir / "t.csv");
    CHECK(t2.e2.size() == tr.e2.size());
    // 17 significant digits round-trip doubles exactly
    for (std::size_t i = 0; i < tr.e2.size(); ++i) {
        CHECK(t2.e2[i] == tr.e2[i]);
        CHECK(t2.e3[i] == tr.e3[i]);
    }
    CHECK(t2.beam_window_outer == 1.5);
}

TEST_CASE("fdtd runner writes artifacts and a complete manifest") {
    const fs::path dir = fresh_dir("kerr_run_fdtd");
    const std::string config =
        "[experiment]\n"
        "type = fdtd\n"
        "h = 0.04\n"
        "output_dir = " + dir.string() + "\n"
        "[chi1d]\n"
        "kind = gaussian\n"
        "amplitude = 1\ncenter = 10\nsigma = 0.4\nradius = 1.9\n"
        "[beam]\n"
        "a2 = 1\na3 = 1\n"
        "[fdtd]\n"
        "e0 = 1.25\nT = 15\n";
    const auto cfg = ExperimentConfig::parse_string(config, "fdtd.cfg");
    const RunOutput out = run("fdtd", cfg);
    CHECK(fs::exists(dir / "trace.csv"));
    CHECK(fs::exists(out.manifest));

    // manifest completeness: every file in the directory except the manifest
    // itself is listed, with a hash
    std::ifstream in(out.manifest);
    nlohmann::json j;
    in >> j;
    std::set<std::string> listed;
    for (const auto& entry : j.at("files")) {
        listed.insert(entry.at("path").get<std::string>());
        CHECK(entry.at("hash").get<std::string>().substr(0, 8) == "fnv1a64:");
    }
    std::set<std::string> present;
    for (const auto& p : fs::directory_iterator(dir))
        if (p.path().filename() != "manifest.json")
            present.insert(fs::relative(p.path(), dir).string());
    CHECK(listed == present);

    // measured shifts recorded for a biased run through a medium
    CHECK(j.at("notes").contains("delta2"));
    CHECK(j.at("notes").contains("tau_predicted"));
}

TEST_CASE("determinism: same config and seed give identical artifact hashes") {
    const fs::path dir1 = fresh_dir("kerr_det_1");
    const fs::path dir2 = fresh_dir("kerr_det_2");
    auto config = [](const fs::path& dir) {
        return "[experiment]\n"
               "type = forward\n"
               "h = 0.02\n"
               "seed = 42\n"
               "output_dir = " + dir.string() + "\n"
               "[chi]\n"
               "random_bumps = 3\n"
               "support_radius = 2\ndomain_radius = 6\n"
               "[beam]\n"
               "core_radius = 2.3\nouter_radius = 3.1\nlaunch = -4.5\n"
               "window_inner = 0.8\nwindow_outer = 1.6\n"
               "[forward]\n"
               "e0 = 1\noffsets = 0 0.5 1\n";
    };
    const RunOutput o1 =
        run("forward", ExperimentConfig::parse_string(config(dir1), "a.cfg"));
    const RunOutput o2 =
        run("forward", ExperimentConfig::parse_string(config(dir2), "b.cfg"));

    auto hashes = [](const fs::path& manifest) {
        std::ifstream in(manifest);
        nlohmann::json j;
        in >> j;
        std::map<std::string, std::string> h;
        for (const auto& e : j.at("files"))
            h[e.at("path").get<std::string>()] = e.at("hash").get<std::string>();
        return h;
    };
    CHECK(hashes(o1.manifest) == hashes(o2.manifest));
}

TEST_CASE("forward run flags zero retardation") {
    const fs::path dir = fresh_dir("kerr_fwd_zero");
    const std::string config =
        "[experiment]\n"
        "type = forward\nh = 0.02\noutput_dir = " + dir.string() + "\n"
        "[chi]\n"
        "support_radius = 2\ndomain_radius = 6\n"
        "[beam]\n"
        "core_radius = 2.3\nouter_radius = 3.1\nlaunch = -4.5\n"
        "window_inner = 0.8\nwindow_outer = 1.6\n"
        "[forward]\n"
        "e0 = 1\noffsets = 0\ndetector_plane = 2\n";
    const RunOutput out = run("forward", ExperimentConfig::parse_string(config, "z.cfg"));
    std::ifstream in(out.manifest);
    nlohmann::json j;
    in >> j;
    CHECK(j.at("notes").at("zero_retardation").get<std::string>() == "true");
}

TEST_CASE("extract and reconstruct file interfaces") {
    const fs::path dir = fresh_dir("kerr_extract");

    // synthesize a trace through the forward subcommand, then extract
    const std::string config =
        "[experiment]\n"
        "type = forward\nh = 0.015\noutput_dir = " + dir.string() + "\n"
        "[chi]\n"
        "bumps = 1 0.2 0.1 0 0.4\n"
        "support_radius = 2\ndomain_radius = 6\n"
        "[beam]\n"
        "core_radius = 2.3\nouter_radius = 3.1\nlaunch = -4.5\n"
        "window_inner = 0.8\nwindow_outer = 1.6\n"
        "[forward]\n"
        "e0 = 1.1\noffsets = 0.1\n";
    run("forward", ExperimentConfig::parse_string(config, "f.cfg"));

    const fs::path xdir = fresh_dir("kerr_extract_out");
    const RunOutput out = run_extract(dir / "trace_0.csv", 5.0, 8.5, xdir);
    CHECK(fs::exists(xdir / "extract.csv"));

    std::ifstream csv(xdir / "extract.csv");
    std::string header, row;
    std::getline(csv, header);
    std::getline(csv, row);
    std::replace(row.begin(), row.end(), ',', ' ');
    std::istringstream ss(row);
    double c, s, n;
    ss >> c >> s >> n;
    // cos^2 + sin^2 stays near one
    CHECK(c * c + s * s == doctest::Approx(1.0).epsilon(0.1));
    CHECK(n > 1e-8);

    // reconstruct round trip on a tiny analytic-radon sinogram
    Sinogram sino(1, 30, 48);
    sino.offset_min = -2;
    sino.offset_max = 2;
    sino.e0 = 1;
    for (std::size_t a = 0; a < sino.n_angles; ++a)
        for (std::size_t o = 0; o < sino.n_offsets; ++o) {
            const double p = sino.offset(o);
            sino.at(0, a, o) = std::exp(-p * p * 2.0);
        }
    const fs::path sdir = fresh_dir("kerr_recon");
    write_sinogram(sdir / "s.f64", sino);
    const RunOutput rec = run_reconstruct(sdir / "s.f64", sdir / "chi.f64", 32);
    CHECK(fs::exists(sdir / "chi.f64"));
    const auto [grid, values] = read_grid_field(sdir / "chi.f64");
    CHECK(grid.counts[0] == 32);
    CHECK(values.size() == grid.size());
}

TEST_CASE("gridded susceptibility can be supplied through the config") {
    const fs::path dir = fresh_dir("kerr_chi_grid");
    const Grid3D grid = Grid3D::cube(2.5, 21);
    ScalarField samples(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.counts[0]; ++i)
        for (std::size_t j = 0; j < grid.counts[1]; ++j)
            for (std::size_t k = 0; k < grid.counts[2]; ++k) {
                const Vec3 x = grid.node(i, j, k);
                samples[grid.index(i, j, k)] =
                    norm(x) < 1.8 ? std::exp(-norm2(x) / 0.5) : 0.0;
            }
    write_grid_field(dir / "chi.f64", grid, samples, "chi3");

    const std::string config =
        "[experiment]\ntype = forward\nh = 0.02\n"
        "output_dir = " + (dir / "out").string() + "\n"
        "[chi]\n"
        "grid = " + (dir / "chi.f64").string() + "\n"
        "support_radius = 2\ndomain_radius = 6\n";
    const auto cfg = ExperimentConfig::parse_string(config, "g.cfg");
    const SusceptibilityField chi = chi_from_config(cfg);
    CHECK(chi.is_gridded());
    CHECK(chi({0.1, 0, 0}) == doctest::Approx(std::exp(-0.01 / 0.5)).epsilon(0.02));
    CHECK(chi({4.0, 0, 0}) == 0.0);
}

TEST_CASE("runner guards") {
    const auto cfg = ExperimentConfig::parse_string("[experiment]\ntype = fdtd\n", "g.cfg");
    CHECK_THROWS_AS(run("stationary", cfg), ConfigError);
    CHECK_THROWS_AS(run("unknown", ExperimentConfig::parse_string("[experiment]\n x = 1\n", "u.cfg")),
                    ConfigError);
}

TEST_CASE("stationary runner emits fields and logs") {
    const fs::path dir = fresh_dir("kerr_run_stationary");
    const std::string config =
        "[experiment]\n"
        "type = stationary\n"
        "h_sweep = 0.02 0.01\n"
        "output_dir = " + dir.string() + "\n"
        "[chi]\n"
        "bumps = 1 0.2 -0.1 0.15 0.35\n"
        "support_radius = 1.2\ndomain_radius = 2\n"
        "[stationary]\n"
        "R0 = 2\nn = 20\n";
    const RunOutput out = run("stationary", ExperimentConfig::parse_string(config, "s.cfg"));
    CHECK(fs::exists(dir / "psi0.f64"));
    CHECK(fs::exists(dir / "psi1.f64"));
    CHECK(fs::exists(dir / "psi_h0.f64"));
    CHECK(fs::exists(dir / "psi_h1.f64"));
    CHECK(fs::exists(dir / "convergence_log.csv"));
    CHECK(fs::exists(dir / "expansion_check.csv"));
    CHECK(out.artifacts.size() >= 8);
}
