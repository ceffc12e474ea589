#include <doctest.h>

#include "landscape/builtins.hpp"
#include "landscape/error.hpp"
#include "landscape/metrics.hpp"
#include "landscape/spectral.hpp"
#include "oracles/descent.hpp"
#include "oracles/persistence_bfs.hpp"
#include "support/grids.hpp"

using namespace landscape;

namespace {

std::vector<LandscapeGrid> suite() {
  std::vector<LandscapeGrid> grids{fixture::worked_example(), fixture::bowl(11), fixture::bowl(9, 2.0),
                                   fixture::line({1, 1, 1}), fixture::line({3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5})};
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto g = fixture::random_grid(seed);
    grids.push_back(fixture::make_grid(g.shape, g.values));
  }
  return grids;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("worked example: SMAD is one quarter") {
  const auto grid = fixture::worked_example();
  // Oracle route: brute-force pairs plus exhaustive descent.
  const auto pairs = oracle::brute_force_pairs({5}, grid.values(), false);
  const auto basins = oracle::descend_all({5}, grid.values(), false);
  CHECK(oracle::smad(pairs, basins, grid.values()) == 0.25);

  const auto a = fixture::analyze(grid);
  CHECK(a.smad.smad == 0.25);
  CHECK(a.smad.pair_count == 2);
  CHECK(a.smad.range == 2.0);
  CHECK(a.smad.points == 5);
  REQUIRE(a.smad.contributions.size() == 2);
  double sum = 0.0;
  for (const auto& t : a.smad.contributions) {
    CHECK(t.term == doctest::Approx(t.persistence / 2.0 * static_cast<double>(t.weight) / 5.0));
    sum += t.term;
  }
  CHECK(sum / 2.0 == 0.25);
}

TEST_CASE("unimodal and constant landscapes score zero") {
  CHECK(fixture::analyze(fixture::bowl(11)).smad.smad == 0.0);
  CHECK(fixture::analyze(fixture::bowl(11)).smad.pair_count == 0);
  const auto flat = fixture::analyze(fixture::line({2, 2, 2, 2}));
  CHECK(flat.smad.smad == 0.0);
  CHECK(flat.smad.range == 0.0);
}

TEST_CASE("SMAD is invariant under positive affine maps") {
  for (const auto& grid : suite()) {
    const double base = fixture::analyze(grid).smad.smad;
    for (double a : {0.5, 3.0})
      for (double b : {-7.0, 10.0}) CHECK(fixture::analyze(grid.affine(a, b)).smad.smad == doctest::Approx(base).epsilon(1e-12));
  }
  const auto grid = fixture::worked_example();
  CHECK(fixture::analyze(grid.affine(3.0, 10.0)).smad.smad == 0.25);
}

TEST_CASE("SMAD stays in the unit interval and matches the oracle") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto g = fixture::random_grid(seed);
    const auto grid = fixture::make_grid(g.shape, g.values);
    const bool full = g.adjacency == Adjacency::kFull;
    const auto a = fixture::analyze(grid, g.adjacency);
    CHECK(a.smad.smad >= 0.0);
    CHECK(a.smad.smad <= 1.0);
    const double expect = oracle::smad(oracle::brute_force_pairs(g.shape, g.values, full),
                                       oracle::descend_all(g.shape, g.values, full), g.values);
    CHECK(a.smad.smad == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("persistence range") {
  // No finite pair, one finite pair, persistences {1, 2}.
  CHECK(persistence_range(fixture::analyze(fixture::bowl(5)).built.barcode) == 0.0);
  CHECK(persistence_range(fixture::analyze(fixture::line({0, 2, 1})).built.barcode) == 0.0);
  CHECK(persistence_range(fixture::analyze(fixture::worked_example()).built.barcode) == 1.0);

  // Seeded gaussian-mixture grid against the brute-force pair list.
  const auto f = make_builtin("gaussian-mixture", {{"dim", 2}, {"basins", 8}, {"seed", 3}});
  const auto spec = build_subspace(f->default_origin(), {{1.0, 0.0}, {0.0, 1.0}}, 1.2, 41);
  const auto grid = sample_grid(*f, spec, 1);
  const auto pairs = oracle::brute_force_pairs(grid.shape(), grid.values(), false);
  double lo = 1e300, hi = -1e300;
  for (const auto& p : pairs) {
    if (p.essential) continue;
    lo = std::min(lo, p.death - p.birth);
    hi = std::max(hi, p.death - p.birth);
  }
  REQUIRE(pairs.size() > 2);
  CHECK(persistence_range(fixture::analyze(grid).built.barcode) == hi - lo);
}

TEST_CASE("simplification drops short pairs and reweights the rest") {
  const auto grid = fixture::worked_example();
  const auto a = fixture::analyze(grid);
  const auto s = simplify(a.built.tree, a.built.barcode, a.manifolds, 1.5);
  const auto r = smad(s.barcode, s.manifolds, grid);
  CHECK(r.pair_count == 1);
  // (1/1) * (2/2) * (2/5)
  CHECK(r.smad == doctest::Approx(0.4));
}

TEST_CASE("provenance mismatch is a usage error") {
  const auto a = fixture::analyze(fixture::worked_example());
  CHECK_THROWS_AS(smad(a.built.barcode, a.manifolds, fixture::line({0, 2, 1, 2, 1})), UsageError);
  CHECK_THROWS_AS(assemble_report(fixture::line({0, 1, 2}), a.built.barcode, a.manifolds), UsageError);
}

TEST_CASE("report for a unimodal quadratic pipeline") {
  const auto f = make_builtin("quadratic");
  SpectralConfig cfg;
  cfg.k = 2;
  const auto spectral = top_eigenpairs(*f, f->default_origin(), cfg);
  const auto grid = sample_grid(*f, build_subspace(spectral, f->default_origin(), 2, 1.0, 11), 1);
  const auto a = fixture::analyze(grid);
  const auto trace = hutchinson_trace(*f, f->default_origin(), 50, 1);
  const auto report = assemble_report(grid, a.built.barcode, a.manifolds, &spectral, &trace);
  CHECK(report.smad.smad == 0.0);
  CHECK(report.bar_count == 1);
  REQUIRE(report.eigenvalues.size() == 2);
  CHECK(report.eigenvalues[0] == doctest::Approx(5.0));
  REQUIRE(report.lambda_max.has_value());
  CHECK(*report.lambda_max == doctest::Approx(5.0));
  REQUIRE(report.trace.has_value());
  CHECK(report.trace->estimate == 8.0);
  CHECK(report.grid_digest == grid.digest());
}

TEST_CASE("report for the three-minimum line and its JSON round trip") {
  const auto grid = fixture::worked_example();
  const auto a = fixture::analyze(grid);
  const auto report = assemble_report(grid, a.built.barcode, a.manifolds);
  CHECK(report.smad.smad == 0.25);
  CHECK(report.bar_count == 3);
  CHECK(report.persistence_range == 1.0);
  CHECK(report.mean_persistence == 1.5);
  CHECK(report.max_persistence == 2.0);
  CHECK(report.warnings.empty());

  const auto j = report_to_json(report);
  CHECK(j.at("schema_version") == kReportSchemaVersion);
  CHECK(j.at("smad") == 0.25);
  CHECK(j.at("pairs").size() == 2);
  CHECK(j.contains("spectral"));
  const auto back = report_from_json(nlohmann::json::parse(j.dump()));
  CHECK(report_to_json(back).dump() == j.dump());
}

TEST_CASE("constant landscape warns about the degenerate range") {
  const auto grid = fixture::line({4, 4, 4});
  const auto a = fixture::analyze(grid);
  const auto report = assemble_report(grid, a.built.barcode, a.manifolds);
  CHECK(report.smad.smad == 0.0);
  REQUIRE(report.warnings.size() == 1);
  CHECK(report.warnings[0] == "degenerate range R=0");
}

TEST_CASE("report rejects an unknown schema version") {
  const auto grid = fixture::worked_example();
  const auto a = fixture::analyze(grid);
  auto j = report_to_json(assemble_report(grid, a.built.barcode, a.manifolds));
  j["schema_version"] = 99;
  CHECK_THROWS_AS(report_from_json(j), FormatError);
}

}  // TEST_SUITE
