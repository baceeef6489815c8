#ifndef KERR_IO_HPP
#define KERR_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "kerr/direct1d.hpp"
#include "kerr/geometry.hpp"
#include "kerr/inversion.hpp"

namespace kerr {

// All binary payloads are little-endian IEEE float64 with a JSON sidecar
// ("<file>.json") describing shape and metadata. CSV floats use 17
// significant digits so round-trips are exact.

std::string format_g17(double v);

/** Gridded scalar field: raw doubles in Grid3D linear order (z fastest),
 *  sidecar {shape, origin, spacing, field_name}. */
void write_grid_field(const std::filesystem::path& path, const Grid3D& grid,
                      const ScalarField& field, const std::string& field_name);
std::pair<Grid3D, ScalarField> read_grid_field(const std::filesystem::path& path);

/** Sinogram: raw doubles [slice][angle][offset], sidecar carries the
 *  geometry and e0. */
void write_sinogram(const std::filesystem::path& path, const Sinogram& sino);
Sinogram read_sinogram(const std::filesystem::path& path);

/** Detector trace: CSV (t, E2, E3) plus sidecar with h, e0 and the chi
 *  description. */
void write_trace(const std::filesystem::path& path, const DetectorTrace& trace);
DetectorTrace read_trace(const std::filesystem::path& path);

/** CSV table with a header row; every cell formatted with 17 digits. */
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

std::string fnv1a64_hex(const void* data, std::size_t n);
std::string hash_file(const std::filesystem::path& path);

/** Manifest of every artifact a run produced: path, size, content hash.
 *  Written as manifest.json in the output directory. */
class Manifest {
  public:
    explicit Manifest(std::filesystem::path output_dir);
    void add(const std::filesystem::path& file);
    /** Writes manifest.json and returns its path. */
    std::filesystem::path write(const std::string& subcommand,
                                const std::vector<std::pair<std::string, std::string>>& notes = {});
    const std::vector<std::filesystem::path>& files() const { return files_; }

  private:
    std::filesystem::path dir_;
    std::vector<std::filesystem::path> files_;
};

} // namespace kerr

#endif
