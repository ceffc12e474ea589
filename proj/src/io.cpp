#include "landscape/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "landscape/error.hpp"

namespace landscape {

namespace {

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    std::uint64_t out = 0;
    for (int i = 0; i < 8; ++i) out |= ((v >> (8 * i)) & 0xFFu) << (8 * (7 - i));
    return out;
  }
}

void append_f64(std::string& out, double x) {
  const std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(x));
  char buf[8];
  std::memcpy(buf, &bits, 8);
  out.append(buf, 8);
}

double read_f64(const char* p) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, p, 8);
  return std::bit_cast<double>(to_little(bits));
}

nlohmann::json header_of(const LandscapeGrid& grid) {
  nlohmann::json axes = nlohmann::json::array();
  for (const auto& a : grid.axes()) {
    nlohmann::json axis = {{"range", a.range}, {"steps", a.steps}};
    if (a.eigenvalue) axis["eigenvalue"] = *a.eigenvalue;
    axes.push_back(std::move(axis));
  }
  return nlohmann::json{{"version", kLlgVersion}, {"shape", grid.shape()}, {"axes", std::move(axes)}, {"meta", grid.meta()}};
}

struct ParsedHeader {
  std::vector<AxisSpec> axes;
  nlohmann::json meta;
  std::size_t count = 1;
};

ParsedHeader parse_header(const nlohmann::json& h) {
  ParsedHeader out;
  try {
    if (!h.is_object()) throw FormatError("LLG header is not a JSON object");
    const int version = h.at("version").get<int>();
    if (version != kLlgVersion) throw FormatError("unsupported LLG version " + std::to_string(version));
    const auto shape = h.at("shape").get<std::vector<std::size_t>>();
    if (shape.empty()) throw FormatError("LLG shape is empty");
    const auto& axes = h.at("axes");
    if (!axes.is_array() || axes.size() != shape.size()) {
      throw FormatError("LLG header lists " + std::to_string(axes.size()) + " axes for a " +
                        std::to_string(shape.size()) + "-dimensional shape");
    }
    for (std::size_t i = 0; i < shape.size(); ++i) {
      AxisSpec a;
      a.range = axes[i].at("range").get<double>();
      a.steps = axes[i].at("steps").get<std::size_t>();
      if (a.steps != shape[i]) throw FormatError("LLG axis " + std::to_string(i) + " steps disagree with shape");
      if (axes[i].contains("eigenvalue") && !axes[i]["eigenvalue"].is_null()) {
        a.eigenvalue = axes[i]["eigenvalue"].get<double>();
      }
      out.axes.push_back(a);
      out.count *= shape[i];
    }
    out.meta = h.contains("meta") ? h.at("meta") : nlohmann::json::object();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed LLG header: ") + e.what());
  }
  return out;
}

}  // namespace

std::string encode_llg(const LandscapeGrid& grid) {
  const std::string header = header_of(grid).dump();
  std::string out;
  out.reserve(8 + header.size() + 8 * grid.size());
  out.append(kLlgMagic);
  const auto len = static_cast<std::uint32_t>(header.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((len >> (8 * i)) & 0xFFu));
  out.append(header);
  for (double v : grid.values()) append_f64(out, v);
  return out;
}

LandscapeGrid decode_llg(std::string_view bytes) {
  if (bytes.size() < 4 || bytes.substr(0, 4) != kLlgMagic) throw FormatError("not an LLG file (bad magic bytes)");
  if (bytes.size() < 8) throw FormatError("LLG file truncated inside the header length");
  std::uint32_t len = 0;
  for (int i = 0; i < 4; ++i) len |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[4 + i])) << (8 * i);
  if (bytes.size() < 8 + static_cast<std::size_t>(len)) throw FormatError("LLG file truncated inside the JSON header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(8, len));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("LLG header is not valid JSON: ") + e.what());
  }
  ParsedHeader parsed = parse_header(header);

  const std::string_view body = bytes.substr(8 + len);
  if (body.size() != parsed.count * 8) {
    throw FormatError("LLG value section holds " + std::to_string(body.size()) + " bytes (" +
                      std::to_string(body.size() / 8) + " values) but the shape requires N = " +
                      std::to_string(parsed.count) + " values");
  }
  std::vector<double> values(parsed.count);
  for (std::size_t i = 0; i < parsed.count; ++i) values[i] = read_f64(body.data() + 8 * i);
  return LandscapeGrid(std::move(parsed.axes), std::move(values), std::move(parsed.meta));
}

std::string encode_llg_json(const LandscapeGrid& grid) {
  nlohmann::json doc = header_of(grid);
  doc["values"] = grid.values();
  return doc.dump() + "\n";
}

LandscapeGrid decode_llg_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("not a valid LLG JSON document: ") + e.what());
  }
  ParsedHeader parsed = parse_header(doc);
  if (!doc.contains("values") || !doc["values"].is_array()) throw FormatError("LLG JSON document has no values array");
  const auto& arr = doc["values"];
  if (arr.size() != parsed.count) {
    throw FormatError("LLG JSON holds " + std::to_string(arr.size()) + " values but the shape requires N = " +
                      std::to_string(parsed.count));
  }
  std::vector<double> values;
  values.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_number()) throw NumericError("LLG JSON value is not a finite number");
    values.push_back(v.get<double>());
  }
  return LandscapeGrid(std::move(parsed.axes), std::move(values), std::move(parsed.meta));
}

LandscapeGrid decode_csv(std::string_view text, double range) {
  std::vector<double> values;
  std::size_t rows = 0, cols = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t count = 0;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t comma = line.find(',', pos);
      const std::string cell = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || std::string_view(end).find_first_not_of(" \t") != std::string_view::npos) {
        throw FormatError("CSV row " + std::to_string(rows + 1) + " has a non-numeric cell '" + cell + "'");
      }
      values.push_back(v);
      ++count;
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (rows == 0) cols = count;
    else if (count != cols) {
      throw FormatError("CSV row " + std::to_string(rows + 1) + " has " + std::to_string(count) + " cells, expected " +
                        std::to_string(cols));
    }
    ++rows;
  }
  if (rows == 0) throw FormatError("CSV grid is empty");
  std::vector<AxisSpec> axes{AxisSpec{range, rows, std::nullopt}, AxisSpec{range, cols, std::nullopt}};
  return LandscapeGrid(std::move(axes), std::move(values), nlohmann::json{{"source", "csv"}});
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

LandscapeGrid read_grid(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() >= 4 && std::string_view(bytes).substr(0, 4) == kLlgMagic) return decode_llg(bytes);
  const auto first = bytes.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && bytes[first] == '{') return decode_llg_json(bytes);
  if (path.extension() == ".csv") return decode_csv(bytes);
  throw FormatError("'" + path.string() + "' is not an LLG file (bad magic bytes)");
}

void write_grid(const LandscapeGrid& grid, const std::filesystem::path& path, GridFormat format) {
  switch (format) {
    case GridFormat::kLlg:
      write_file_atomic(path, encode_llg(grid));
      return;
    case GridFormat::kJson:
      write_file_atomic(path, encode_llg_json(grid));
      return;
    case GridFormat::kCsv: {
      if (grid.ndim() != 2) throw UsageError("CSV output needs a 2D grid");
      const std::size_t cols = grid.axes()[1].steps;
      std::string out;
      char buf[32];
      for (std::size_t i = 0; i < grid.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", grid.value(i));
        out += buf;
        out += ((i + 1) % cols == 0) ? "\n" : ",";
      }
      write_file_atomic(path, out);
      return;
    }
  }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kInternal, "cannot open '" + tmp.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error(ErrorCode::kInternal, "failed writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::kInternal, "cannot move output into place at '" + path.string() + "'");
  }
}

std::string encode_f64(const std::vector<double>& values) {
  std::string out;
  out.reserve(values.size() * 8);
  for (double v : values) append_f64(out, v);
  return out;
}

std::vector<double> decode_f64(std::string_view bytes) {
  if (bytes.size() % 8 != 0) throw FormatError("float64 file size is not a multiple of 8 bytes");
  std::vector<double> out(bytes.size() / 8);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = read_f64(bytes.data() + 8 * i);
  return out;
}

void write_checkpoint(const std::filesystem::path& path, const std::vector<double>& params, const nlohmann::json& spec,
                      const nlohmann::json& extra) {
  nlohmann::json sidecar = extra.is_object() ? extra : nlohmann::json::object();
  sidecar["dim"] = params.size();
  sidecar["spec"] = spec;
  write_file_atomic(path, encode_f64(params));
  std::filesystem::path side = path;
  side += ".json";
  write_file_atomic(side, sidecar.dump(2) + "\n");
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  Checkpoint cp;
  std::filesystem::path side = path;
  side += ".json";
  try {
    cp.sidecar = nlohmann::json::parse(read_file(side));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("checkpoint sidecar '" + side.string() + "' is not valid JSON: " + e.what());
  }
  cp.params = decode_f64(read_file(path));
  const std::size_t dim = cp.sidecar.value("dim", std::size_t{0});
  if (dim != cp.params.size()) {
    throw FormatError("checkpoint holds " + std::to_string(cp.params.size()) + " values but its sidecar declares dim " +
                      std::to_string(dim));
  }
  for (double v : cp.params) {
    if (!std::isfinite(v)) throw NumericError("checkpoint contains non-finite parameters");
  }
  return cp;
}

void write_eigenvectors(const std::filesystem::path& path, const SpectralResult& spectral) {
  std::vector<double> flat;
  for (const auto& v : spectral.eigenvectors) flat.insert(flat.end(), v.begin(), v.end());
  write_file_atomic(path, encode_f64(flat));
  nlohmann::json sidecar = {{"dim", spectral.dim},
                            {"count", spectral.eigenvectors.size()},
                            {"layout", "row-major, one eigenvector per row"},
                            {"eigenvalues", spectral.eigenvalues}};
  std::filesystem::path side = path;
  side += ".json";
  write_file_atomic(side, sidecar.dump(2) + "\n");
}

}  // namespace landscape
