#include "kerr/io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kerr/errors.hpp"

namespace kerr {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "binary formats are little-endian; big-endian hosts unsupported");
static_assert(sizeof(double) == 8);

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void write_doubles(const std::filesystem::path& path, const double* data, std::size_t n) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io: cannot open for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(data), std::streamsize(n * sizeof(double)));
    if (!out) throw Error("io: short write: " + path.string());
}

std::vector<double> read_doubles(const std::filesystem::path& path, std::size_t n) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io: cannot open: " + path.string());
    std::vector<double> data(n);
    in.read(reinterpret_cast<char*>(data.data()), std::streamsize(n * sizeof(double)));
    if (std::size_t(in.gcount()) != n * sizeof(double))
        throw Error("io: truncated payload: " + path.string());
    return data;
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("io: cannot open sidecar: " + path.string());
    json j;
    in >> j;
    return j;
}

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error("io: cannot open for writing: " + path.string());
    out << j.dump(2) << "\n";
}

std::filesystem::path sidecar_of(const std::filesystem::path& path) {
    return path.string() + ".json";
}

} // namespace

void write_grid_field(const std::filesystem::path& path, const Grid3D& grid,
                      const ScalarField& field, const std::string& field_name) {
    if (field.size() != grid.size()) throw std::invalid_argument("write_grid_field: size mismatch");
    write_doubles(path, field.data(), field.size());
    json meta;
    meta["shape"] = {grid.counts[0], grid.counts[1], grid.counts[2]};
    meta["origin"] = {grid.origin.x, grid.origin.y, grid.origin.z};
    meta["spacing"] = {grid.spacing.x, grid.spacing.y, grid.spacing.z};
    meta["field_name"] = field_name;
    write_json(sidecar_of(path), meta);
}

std::pair<Grid3D, ScalarField> read_grid_field(const std::filesystem::path& path) {
    const json meta = read_json(sidecar_of(path));
    const auto shape = meta.at("shape");
    const auto origin = meta.at("origin");
    const auto spacing = meta.at("spacing");
    Grid3D grid({origin[0].get<double>(), origin[1].get<double>(), origin[2].get<double>()},
                {spacing[0].get<double>(), spacing[1].get<double>(), spacing[2].get<double>()},
                {shape[0].get<std::size_t>(), shape[1].get<std::size_t>(),
                 shape[2].get<std::size_t>()});
    return {grid, read_doubles(path, grid.size())};
}

void write_sinogram(const std::filesystem::path& path, const Sinogram& sino) {
    write_doubles(path, sino.data.data(), sino.data.size());
    json meta;
    meta["n_slices"] = sino.n_slices;
    meta["n_angles"] = sino.n_angles;
    meta["n_offsets"] = sino.n_offsets;
    meta["offset_min"] = sino.offset_min;
    meta["offset_max"] = sino.offset_max;
    meta["z_min"] = sino.z_min;
    meta["z_max"] = sino.z_max;
    meta["e0"] = sino.e0;
    write_json(sidecar_of(path), meta);
}

Sinogram read_sinogram(const std::filesystem::path& path) {
    const json meta = read_json(sidecar_of(path));
    Sinogram sino(meta.at("n_slices").get<std::size_t>(), meta.at("n_angles").get<std::size_t>(),
                  meta.at("n_offsets").get<std::size_t>());
    sino.offset_min = meta.at("offset_min").get<double>();
    sino.offset_max = meta.at("offset_max").get<double>();
    sino.z_min = meta.at("z_min").get<double>();
    sino.z_max = meta.at("z_max").get<double>();
    sino.e0 = meta.at("e0").get<double>();
    sino.data = read_doubles(path, sino.data.size());
    return sino;
}

void write_trace(const std::filesystem::path& path, const DetectorTrace& trace) {
    std::ofstream out(path);
    if (!out) throw Error("io: cannot open for writing: " + path.string());
    out << "t,E2,E3\n";
    for (std::size_t i = 0; i < trace.e2.size(); ++i)
        out << format_g17(trace.sample_time(i)) << ',' << format_g17(trace.e2[i]) << ','
            << format_g17(trace.e3[i]) << '\n';

    json meta;
    meta["position"] = trace.position;
    meta["t0"] = trace.t0;
    meta["dt"] = trace.dt;
    meta["h"] = trace.h;
    meta["e0"] = trace.e0;
    meta["background"] = trace.background;
    meta["amp_scale"] = trace.amp_scale;
    meta["beam_a2"] = trace.beam_a2;
    meta["beam_a3"] = trace.beam_a3;
    meta["beam_launch"] = trace.beam_launch;
    meta["beam_window_inner"] = trace.beam_window_inner;
    meta["beam_window_outer"] = trace.beam_window_outer;
    meta["grid_dx"] = trace.grid_dx;
    meta["grid_length"] = trace.grid_length;
    meta["chi"] = trace.chi_description;
    write_json(sidecar_of(path), meta);
}

DetectorTrace read_trace(const std::filesystem::path& path) {
    const json meta = read_json(sidecar_of(path));
    DetectorTrace trace;
    trace.position = meta.at("position").get<double>();
    trace.t0 = meta.at("t0").get<double>();
    trace.dt = meta.at("dt").get<double>();
    trace.h = meta.at("h").get<double>();
    trace.e0 = meta.at("e0").get<double>();
    trace.background = meta.at("background").get<double>();
    trace.amp_scale = meta.at("amp_scale").get<double>();
    trace.beam_a2 = meta.at("beam_a2").get<double>();
    trace.beam_a3 = meta.at("beam_a3").get<double>();
    trace.beam_launch = meta.at("beam_launch").get<double>();
    trace.beam_window_inner = meta.at("beam_window_inner").get<double>();
    trace.beam_window_outer = meta.at("beam_window_outer").get<double>();
    trace.grid_dx = meta.at("grid_dx").get<double>();
    trace.grid_length = meta.at("grid_length").get<double>();
    trace.chi_description = meta.at("chi").get<std::string>();

    std::ifstream in(path);
    if (!in) throw Error("io: cannot open: " + path.string());
    std::string line;
    std::getline(in, line);   // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double t, e2, e3;
        if (!(ss >> t >> e2 >> e3)) throw Error("io: malformed trace row: " + path.string());
        trace.e2.push_back(e2);
        trace.e3.push_back(e3);
    }
    return trace;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw Error("io: cannot open for writing: " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? "," : "");
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << format_g17(row[i]) << (i + 1 < row.size() ? "," : "");
        out << '\n';
    }
}

std::string fnv1a64_hex(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < n; ++i) {
        hash ^= p[i];
        hash *= 0x100000001b3ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

std::string hash_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io: cannot hash missing file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string content = ss.str();
    return fnv1a64_hex(content.data(), content.size());
}

Manifest::Manifest(std::filesystem::path output_dir) : dir_(std::move(output_dir)) {
    std::filesystem::create_directories(dir_);
}

void Manifest::add(const std::filesystem::path& file) { files_.push_back(file); }

std::filesystem::path Manifest::write(
    const std::string& subcommand, const std::vector<std::pair<std::string, std::string>>& notes) {
    json j;
    j["subcommand"] = subcommand;
    j["files"] = json::array();
    for (const auto& f : files_) {
        json entry;
        entry["path"] = std::filesystem::relative(f, dir_).string();
        entry["bytes"] = std::filesystem::file_size(f);
        entry["hash"] = "fnv1a64:" + hash_file(f);
        j["files"].push_back(entry);
    }
    for (const auto& [k, v] : notes) j["notes"][k] = v;
    const std::filesystem::path path = dir_ / "manifest.json";
    write_json(path, j);
    return path;
}

} // namespace kerr
