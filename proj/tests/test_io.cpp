#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "htlab/errors.hpp"
#include "htlab/io.hpp"
#include "htlab/scan_report.hpp"

using namespace htlab;

namespace {

GridFunction random_function(const Grid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  GridFunction f(g);
  for (cplx& v : f.v) v = {N(rng), N(rng)};
  return f;
}

std::string temp_dir() {
  const auto p = std::filesystem::temp_directory_path() / "htlab_test_io";
  std::filesystem::create_directories(p);
  return p.string();
}

}  // namespace

TEST_CASE("grid container round trip") {
  const Grid g({Axis{-2, 2, 9, false}, Axis{-1, 3, 5, false}, Axis{-4, 4, 8, true}}, 2);
  GridFunction f = random_function(g, 1);
  f.flags = kFlagCoarseGrid;
  const GridFunction back = decode_grid_function(encode_grid_function(f));
  CHECK(back.grid == g);
  CHECK(back.flags == f.flags);
  CHECK(back.v == f.v);

  const std::string b64 = encode_grid_function(f, Precision::Complex64);
  CHECK(b64.size() == 24 + 3 * 32 + g.size() * 8);
  const GridFunction low = decode_grid_function(b64);
  CHECK(distance(low, f) / norm(f) < 1e-7);
  CHECK(encode_grid_function(f).size() == 24 + 3 * 32 + g.size() * 16);
}

TEST_CASE("grid container header layout") {
  const Grid g({Axis{-1, 1, 3, false}}, 1);
  GridFunction f(g);
  f.v = {cplx(1, 0), cplx(0, 2), cplx(-1, 0)};
  const std::string b = encode_grid_function(f);
  CHECK(b.substr(0, 4) == "HTGF");
  CHECK(static_cast<unsigned char>(b[4]) == 1);  // version, little-endian
  CHECK(static_cast<unsigned char>(b[8]) == 1);  // ndim
  // first payload value: 1.0 as little-endian IEEE double
  double x;
  std::memcpy(&x, b.data() + 24 + 32, 8);
  CHECK(x == 1.0);
}

TEST_CASE("malformed containers are rejected") {
  const Grid g({Axis{-1, 1, 5, false}, Axis{-1, 1, 5, false}}, 2);
  const std::string good = encode_grid_function(random_function(g, 2));
  CHECK_THROWS_AS(decode_grid_function("HTG"), FormatError);
  CHECK_THROWS_AS(decode_grid_function("XXXX" + good.substr(4)), FormatError);
  CHECK_THROWS_AS(decode_grid_function(good.substr(0, good.size() - 1)), FormatError);
  CHECK_THROWS_AS(decode_grid_function(good + "x"), FormatError);
  std::string bad_version = good;
  bad_version[4] = 7;
  CHECK_THROWS_AS(decode_grid_function(bad_version), FormatError);
  std::string bad_prec = good;
  bad_prec[16] = 5;
  CHECK_THROWS_AS(decode_grid_function(bad_prec), FormatError);
  CHECK_THROWS_AS(read_grid_function("/nonexistent/htlab.htgf"), FormatError);
}

TEST_CASE("files, sidecars and kernel records") {
  const std::string dir = temp_dir();
  const Grid g({Axis{-2, 2, 7, false}, Axis{-2, 2, 7, false}, Axis{-3, 3, 6, true}}, 2);
  const GridFunction f = random_function(g, 3);
  write_grid_function(dir + "/f.htgf", f);
  CHECK(read_grid_function(dir + "/f.htgf").v == f.v);
  const auto side = grid_sidecar(f, Precision::Complex128, {{"seed", 3}});
  CHECK(side["format"] == "HTGF");
  CHECK(side["axes"].size() == 3);
  CHECK(side["provenance"]["seed"] == 3);

  const auto G = HTypeGroup::heisenberg(1);
  const JointMultiplier M = JointMultiplier::truncated(MultiplierSpec::bump(1.0, 0.5), 1);
  const KernelTable K = synthesize_kernel(M, G, &g);
  const auto paths = export_kernel(dir + "/k", K, {{"ell", 1}});
  CHECK(paths.size() == 3);
  const KernelTable back = kernel_record_from_json(read_json_file(dir + "/k.spectral.json"));
  CHECK(back.record.size() == K.record.size());
  CHECK(back.spectral_norm_sq() == K.spectral_norm_sq());
  const double x[2] = {0.3, -0.7}, u[1] = {1.1};
  CHECK(back.evaluate(x, u) == K.evaluate(x, u));
  CHECK(read_grid_function(dir + "/k.htgf").v == K.samples);
  CHECK(read_json_file(dir + "/k.htgf.json")["provenance"]["ell"] == 1);
  CHECK_THROWS_AS(kernel_record_from_json({{"n", 1}}), FormatError);
  write_text_file(dir + "/bad.json", "{not json");
  CHECK_THROWS_AS(read_json_file(dir + "/bad.json"), FormatError);
}

TEST_CASE("scan reports serialize deterministically and round-trip") {
  ScanReport r;
  r.variable = "ell";
  r.quantity = "norm";
  for (int l = 2; l <= 7; ++l) r.add(l, std::pow(2.0, -0.5 * l) * (1 + 1e-3 * l) / 3.0);
  r.fit();
  r.metadata = {{"group", "heisenberg-1"}};
  const std::string a = dump_json(r.to_json()), b = dump_json(r.to_json());
  CHECK(a == b);
  const ScanReport back = ScanReport::from_json(nlohmann::json::parse(a));
  CHECK(back.values == r.values);
  CHECK(back.slope == r.slope);
  CHECK(back.x == r.x);
  const std::string csv = r.to_csv();
  CHECK(csv.rfind("ell,value,log2value\r\n", 0) == 0);
  CHECK(csv.find(format_double(r.values[0])) != std::string::npos);
  CHECK(std::stod(format_double(r.values[3])) == r.values[3]);
  CHECK(r.to_gnuplot().find('\r') == std::string::npos);
}
