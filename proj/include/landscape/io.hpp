#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "landscape/sampler.hpp"
#include "landscape/spectral.hpp"

namespace landscape {

// LLG binary layout:
//   "LLG1" | u32 LE header length | UTF-8 JSON header | N x float64 LE values
// Header: {version: 1, shape: [...], axes: [{range, steps, eigenvalue?}], meta: {...}}.
// The JSON variant is the same header object with an inline "values" array.
inline constexpr std::string_view kLlgMagic = "LLG1";
inline constexpr int kLlgVersion = 1;

enum class GridFormat { kLlg, kJson, kCsv };

std::string encode_llg(const LandscapeGrid& grid);
LandscapeGrid decode_llg(std::string_view bytes);

std::string encode_llg_json(const LandscapeGrid& grid);
LandscapeGrid decode_llg_json(std::string_view text);

// Plain numeric table, one grid row per line: rows run along axis 1 and
// columns along axis 2. Axes get the given half-width.
LandscapeGrid decode_csv(std::string_view text, double range = 1.0);

// Detects the format from content: LLG magic, a leading '{', otherwise CSV.
LandscapeGrid read_grid(const std::filesystem::path& path);
void write_grid(const LandscapeGrid& grid, const std::filesystem::path& path, GridFormat format = GridFormat::kLlg);

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it into place, so a failed
// run never leaves a partial output behind.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

// Flat little-endian float64 arrays with a JSON sidecar at `path + ".json"`.
std::string encode_f64(const std::vector<double>& values);
std::vector<double> decode_f64(std::string_view bytes);

struct Checkpoint {
  std::vector<double> params;
  nlohmann::json sidecar;  // {dim, spec, ...}
};

void write_checkpoint(const std::filesystem::path& path, const std::vector<double>& params, const nlohmann::json& spec,
                      const nlohmann::json& extra = nlohmann::json::object());
Checkpoint read_checkpoint(const std::filesystem::path& path);

// Eigenvectors as a k x d row-major float64 file plus {dim, count, eigenvalues} sidecar.
void write_eigenvectors(const std::filesystem::path& path, const SpectralResult& spectral);

}  // namespace landscape
