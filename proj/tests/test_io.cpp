#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "landscape/builtins.hpp"
#include "landscape/error.hpp"
#include "landscape/io.hpp"
#include "support/grids.hpp"

using namespace landscape;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("landscape-io-" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  fs::path operator/(const std::string& name) const { return path / name; }
};

void spit(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out << bytes;
}

LandscapeGrid sampled() {
  const auto f = make_builtin("double-well");
  return sample_grid(*f, build_subspace(f->default_origin(), {{1.0}}, 1.6, 33), 1);
}

std::string message(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("LLG layout") {
  const auto grid = fixture::line({1.0, -2.5, 3.0});
  const auto bytes = encode_llg(grid);
  CHECK(bytes.substr(0, 4) == "LLG1");
  std::uint32_t len = 0;
  for (int i = 0; i < 4; ++i) len |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[4 + i])) << (8 * i);
  REQUIRE(bytes.size() == 8 + len + 3 * 8);
  const auto header = nlohmann::json::parse(bytes.substr(8, len));
  CHECK(header.at("version") == 1);
  CHECK(header.at("shape") == nlohmann::json::array({3}));
  CHECK(header.at("axes").size() == 1);
  // Values are little-endian float64 in order.
  double second = 0.0;
  const unsigned char* p = reinterpret_cast<const unsigned char*>(bytes.data()) + 8 + len + 8;
  std::uint64_t raw = 0;
  for (int i = 0; i < 8; ++i) raw |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  std::memcpy(&second, &raw, 8);
  CHECK(second == -2.5);
}

TEST_CASE("LLG round trip is exact and keeps unknown metadata") {
  auto grid = sampled();
  grid.meta()["experiment"] = {{"note", "external"}, {"seed", 17}};
  const auto bytes = encode_llg(grid);
  const auto back = decode_llg(bytes);
  CHECK(back.values() == grid.values());
  CHECK(back.shape() == grid.shape());
  CHECK(back.meta() == grid.meta());
  CHECK(back.axes()[0].range == grid.axes()[0].range);
  CHECK(encode_llg(back) == bytes);

  TempDir dir;
  write_grid(grid, dir / "g.llg");
  CHECK(read_file(dir / "g.llg") == bytes);
  CHECK(encode_llg(read_grid(dir / "g.llg")) == bytes);

  // Eigenvalues on axes survive.
  const auto f = make_builtin("quadratic");
  SpectralConfig cfg;
  cfg.k = 2;
  const auto spec = build_subspace(top_eigenpairs(*f, f->default_origin(), cfg), f->default_origin(), 2, 0.5, 5,
                                   AxisScaling::kInverseEigenvalue);
  const auto q = sample_grid(*f, spec, 1);
  const auto qb = decode_llg(encode_llg(q));
  CHECK(qb.axes()[0].eigenvalue == q.axes()[0].eigenvalue);
  CHECK(qb.axes()[1].range == q.axes()[1].range);
}

TEST_CASE("LLG errors") {
  const auto bytes = encode_llg(fixture::make_grid({11}, std::vector<double>(11, 0.5)));
  const auto truncated = message([&] { decode_llg(std::string_view(bytes).substr(0, bytes.size() - 8)); });
  CHECK(truncated.find("N = 11") != std::string::npos);
  CHECK(truncated.find("10 values") != std::string::npos);
  CHECK_THROWS_AS(decode_llg(std::string_view(bytes).substr(0, bytes.size() - 3)), FormatError);
  CHECK_THROWS_AS(decode_llg(std::string_view(bytes).substr(0, 10)), FormatError);
  CHECK_THROWS_AS(decode_llg(std::string_view(bytes).substr(0, 6)), FormatError);

  std::string bad = bytes;
  bad[0] = 'X';
  CHECK(message([&] { decode_llg(bad); }).find("not an LLG file") != std::string::npos);

  std::string nan = bytes;
  const double q = std::nan("");
  std::memcpy(nan.data() + nan.size() - 8, &q, 8);
  CHECK_THROWS_AS(decode_llg(nan), NumericError);

  const auto header_bad = [&](const nlohmann::json& h) {
    const std::string text = h.dump();
    std::string out = "LLG1";
    const auto len = static_cast<std::uint32_t>(text.size());
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((len >> (8 * i)) & 0xff));
    return decode_llg(out + text);
  };
  CHECK_THROWS_AS(header_bad({{"version", 2}, {"shape", {1}}, {"axes", {{{"range", 1}, {"steps", 1}}}}}), FormatError);
  CHECK_THROWS_AS(header_bad({{"version", 1}, {"shape", {2}}, {"axes", nlohmann::json::array()}}), FormatError);
  CHECK_THROWS_AS(header_bad({{"version", 1}, {"shape", {2}}, {"axes", {{{"range", 1}, {"steps", 3}}}}}), FormatError);
  CHECK_THROWS_AS(header_bad(nlohmann::json::array()), FormatError);
}

TEST_CASE("JSON variant") {
  auto grid = sampled();
  grid.meta()["tag"] = "x";
  const auto text = encode_llg_json(grid);
  const auto doc = nlohmann::json::parse(text);
  CHECK(doc.at("values").size() == grid.size());
  CHECK(doc.at("version") == 1);
  const auto back = decode_llg_json(text);
  CHECK(back.values() == grid.values());
  CHECK(back.meta() == grid.meta());
  CHECK(encode_llg(back) == encode_llg(grid));

  CHECK_THROWS_AS(decode_llg_json("{\"version\":1,\"shape\":[2],\"axes\":[{\"range\":1,\"steps\":2}]}"), FormatError);
  CHECK(message([] { decode_llg_json(R"({"version":1,"shape":[3],"axes":[{"range":1,"steps":3}],"values":[1,2]})"); })
            .find("N = 3") != std::string::npos);
  CHECK_THROWS_AS(decode_llg_json(R"({"version":1,"shape":[2],"axes":[{"range":1,"steps":2}],"values":[1,null]})"),
                  NumericError);
  CHECK_THROWS_AS(decode_llg_json("{not json"), FormatError);
}

TEST_CASE("CSV ingestion matches the equivalent LLG") {
  const auto f = make_builtin("gaussian-mixture", {{"dim", 2}, {"basins", 6}, {"seed", 2}});
  const auto grid = sample_grid(*f, build_subspace(f->default_origin(), {{1.0, 0.0}, {0.0, 1.0}}, 1.5, 11), 1);
  TempDir dir;
  write_grid(grid, dir / "g.csv", GridFormat::kCsv);
  const auto csv = read_grid(dir / "g.csv");
  CHECK(csv.shape() == std::vector<std::size_t>{11, 11});
  CHECK(csv.values() == grid.values());

  const auto a = fixture::analyze(grid);
  const auto b = fixture::analyze(csv);
  CHECK(a.smad.smad == b.smad.smad);
  CHECK(a.built.barcode.pairs.size() == b.built.barcode.pairs.size());
  for (std::size_t i = 0; i < a.built.barcode.pairs.size(); ++i) {
    CHECK(a.built.barcode.pairs[i].minimum == b.built.barcode.pairs[i].minimum);
    CHECK(a.built.barcode.pairs[i].persistence == b.built.barcode.pairs[i].persistence);
  }
  CHECK(a.manifolds.assignment == b.manifolds.assignment);
}

TEST_CASE("CSV rows run along the first axis") {
  const auto g = decode_csv("1,2,3\n4,5,6\n");
  CHECK(g.shape() == std::vector<std::size_t>{2, 3});
  CHECK(g.value(g.ravel(std::vector<std::size_t>{1, 0})) == 4.0);
  CHECK(decode_csv("1, 2\r\n\n3 ,4\n").values() == std::vector<double>{1, 2, 3, 4});
  CHECK_THROWS_AS(decode_csv("1,2\n3\n"), FormatError);
  CHECK_THROWS_AS(decode_csv("1,abc\n"), FormatError);
  CHECK_THROWS_AS(decode_csv(""), FormatError);
  CHECK_THROWS_AS(decode_csv("1,nan\n"), NumericError);
  CHECK_THROWS_AS(write_grid(fixture::worked_example(), "unused.csv", GridFormat::kCsv), UsageError);
}

TEST_CASE("read_grid detects formats and rejects others") {
  TempDir dir;
  const auto grid = fixture::worked_example();
  write_grid(grid, dir / "a.bin", GridFormat::kLlg);
  write_grid(grid, dir / "a.txt", GridFormat::kJson);
  CHECK(read_grid(dir / "a.bin").values() == grid.values());
  CHECK(read_grid(dir / "a.txt").values() == grid.values());
  spit(dir / "junk.dat", "hello");
  CHECK(message([&] { read_grid(dir / "junk.dat"); }).find("not an LLG file") != std::string::npos);
  CHECK_THROWS_AS(read_grid(dir / "missing.llg"), FormatError);
}

TEST_CASE("atomic writes leave no partial files") {
  TempDir dir;
  write_file_atomic(dir / "out.txt", "abc");
  CHECK(read_file(dir / "out.txt") == "abc");
  write_file_atomic(dir / "out.txt", "defg");
  CHECK(read_file(dir / "out.txt") == "defg");
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir.path)) {
    (void)e;
    ++files;
  }
  CHECK(files == 1);

  // Destination is a directory: rename fails and the temporary is removed.
  fs::create_directories(dir / "taken");
  fs::path inner = dir / "taken";
  spit(inner / "keep", "x");
  CHECK_THROWS_AS(write_file_atomic(inner, "zzz"), Error);
  for (const auto& e : fs::directory_iterator(dir.path)) CHECK(e.path().filename().string().find(".tmp.") == std::string::npos);
  CHECK_THROWS_AS(write_file_atomic(dir / "no" / "such" / "dir.txt", "x"), Error);
}

TEST_CASE("float64 arrays, checkpoints and eigenvector sidecars") {
  const std::vector<double> v{1.5, -0.0, 1e-300, 3.141592653589793};
  const auto enc = encode_f64(v);
  CHECK(enc.size() == 32);
  CHECK(decode_f64(enc) == v);
  CHECK_THROWS_AS(decode_f64(enc.substr(0, 31)), FormatError);

  TempDir dir;
  write_checkpoint(dir / "m.f64", v, {{"layer_widths", {2, 2}}}, {{"note", "n"}});
  const auto cp = read_checkpoint(dir / "m.f64");
  CHECK(cp.params == v);
  CHECK(cp.sidecar.at("dim") == 4);
  CHECK(cp.sidecar.at("note") == "n");
  spit(dir / "m.f64.json", R"({"dim": 3, "spec": {}})");
  CHECK_THROWS_AS(read_checkpoint(dir / "m.f64"), FormatError);
  spit(dir / "m.f64.json", "{oops");
  CHECK_THROWS_AS(read_checkpoint(dir / "m.f64"), FormatError);
  write_checkpoint(dir / "n.f64", {1.0, std::nan("")}, nlohmann::json::object());
  CHECK_THROWS_AS(read_checkpoint(dir / "n.f64"), NumericError);

  const auto f = make_builtin("quadratic");
  SpectralConfig cfg;
  cfg.k = 2;
  const auto spectral = top_eigenpairs(*f, f->default_origin(), cfg);
  write_eigenvectors(dir / "e.f64", spectral);
  const auto flat = decode_f64(read_file(dir / "e.f64"));
  REQUIRE(flat.size() == 6);
  CHECK(std::vector<double>(flat.begin(), flat.begin() + 3) == spectral.eigenvectors[0]);
  const auto side = nlohmann::json::parse(read_file(dir / "e.f64.json"));
  CHECK(side.at("dim") == 3);
  CHECK(side.at("count") == 2);
  CHECK(side.at("eigenvalues").size() == 2);
}

}  // TEST_SUITE
