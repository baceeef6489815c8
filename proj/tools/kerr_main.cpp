// Command-line front end: one experiment per invocation, artifacts plus a
// manifest in the output directory.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>

#include "kerr/config.hpp"
#include "kerr/errors.hpp"
#include "kerr/runner.hpp"
#include "kerr/threading.hpp"

namespace {

int run_config_subcommand(const std::string& name, const std::string& config_path,
                          unsigned threads) {
    if (threads) kerr::set_max_threads(threads);
    const kerr::ExperimentConfig cfg = kerr::ExperimentConfig::parse_file(config_path);
    const kerr::RunOutput out = kerr::run(name, cfg);
    std::printf("%s: %zu artifact(s), manifest %s\n", name.c_str(), out.artifacts.size(),
                out.manifest.string().c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"DC Kerr effect simulator and chi(3) inversion toolkit"};
    app.require_subcommand(1);

    unsigned threads = 0;
    app.add_option("--threads", threads, "cap worker threads (0 = hardware)");

    std::string config_path;
    for (const char* name : {"stationary", "forward", "fdtd", "sinogram", "kerrcell",
                             "convergence"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "experiment config file")->required();
    }

    std::string trace_path, window_spec = "0:1";
    CLI::App* extract = app.add_subcommand("extract", "trace -> cos/sin tau");
    extract->add_option("--trace", trace_path, "trace CSV (sidecar JSON expected next to it)")
        ->required();
    extract->add_option("--window", window_spec, "time window lo:hi")->required();
    std::string extract_out = "out";
    extract->add_option("--out", extract_out, "output directory");

    std::string sino_path, recon_out = "reconstruction.f64";
    std::size_t n_pixels = 0;
    CLI::App* reconstruct = app.add_subcommand("reconstruct", "sinogram -> gridded chi(3)");
    reconstruct->add_option("--sinogram", sino_path, "sinogram .f64 (with sidecar)")->required();
    reconstruct->add_option("--out", recon_out, "output field path");
    reconstruct->add_option("--pixels", n_pixels, "pixels per slice axis (default: offsets)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (extract->parsed()) {
            const auto colon = window_spec.find(':');
            if (colon == std::string::npos)
                throw kerr::ConfigError("--window expects lo:hi");
            const double lo = std::stod(window_spec.substr(0, colon));
            const double hi = std::stod(window_spec.substr(colon + 1));
            if (threads) kerr::set_max_threads(threads);
            kerr::run_extract(trace_path, lo, hi, extract_out);
            return 0;
        }
        if (reconstruct->parsed()) {
            if (threads) kerr::set_max_threads(threads);
            kerr::run_reconstruct(sino_path, recon_out, n_pixels);
            return 0;
        }
        for (const char* name : {"stationary", "forward", "fdtd", "sinogram", "kerrcell",
                                 "convergence"})
            if (app.get_subcommand(name)->parsed())
                return run_config_subcommand(name, config_path, threads);
    } catch (const kerr::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
