#include "htlab/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "htlab/errors.hpp"

namespace htlab {

namespace {

constexpr char kMagic[4] = {'H', 'T', 'G', 'F'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 24, kAxisBytes = 32;

template <class U>
void put_le(std::string& out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

template <class U>
U get_le(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(U) > in.size()) throw FormatError("grid container truncated");
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  pos += sizeof(U);
  return v;
}

void put_f64(std::string& out, double x) { put_le(out, std::bit_cast<std::uint64_t>(x)); }
void put_f32(std::string& out, float x) { put_le(out, std::bit_cast<std::uint32_t>(x)); }
double get_f64(const std::string& in, std::size_t& pos) { return std::bit_cast<double>(get_le<std::uint64_t>(in, pos)); }
float get_f32(const std::string& in, std::size_t& pos) { return std::bit_cast<float>(get_le<std::uint32_t>(in, pos)); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json axes_json(const Grid& g) {
  nlohmann::json a = nlohmann::json::array();
  for (const Axis& x : g.axes()) a.push_back({{"lo", x.lo}, {"hi", x.hi}, {"count", x.count}, {"periodic", x.periodic}});
  return a;
}

}  // namespace

std::string encode_grid_function(const GridFunction& f, Precision p) {
  const Grid& g = f.grid;
  if (f.v.size() != g.size()) throw GridMismatch("encode_grid_function: sample count differs from the grid");
  std::string out(kMagic, 4);
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.dims()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.split()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(p));
  put_le<std::uint32_t>(out, f.flags);
  for (const Axis& a : g.axes()) {
    put_f64(out, a.lo);
    put_f64(out, a.hi);
    put_le<std::uint64_t>(out, a.count);
    put_le<std::uint32_t>(out, a.periodic ? 1u : 0u);
    put_le<std::uint32_t>(out, 0u);
  }
  out.reserve(out.size() + g.size() * (p == Precision::Complex64 ? 8 : 16));
  for (const cplx& v : f.v) {
    if (p == Precision::Complex64) {
      put_f32(out, static_cast<float>(v.real()));
      put_f32(out, static_cast<float>(v.imag()));
    } else {
      put_f64(out, v.real());
      put_f64(out, v.imag());
    }
  }
  return out;
}

GridFunction decode_grid_function(const std::string& bytes) {
  if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw FormatError("not a grid container (bad magic)");
  std::size_t pos = 4;
  const auto version = get_le<std::uint32_t>(bytes, pos);
  if (version != kVersion) throw FormatError("unsupported grid container version " + std::to_string(version));
  const auto ndim = get_le<std::uint32_t>(bytes, pos);
  const auto split = get_le<std::uint32_t>(bytes, pos);
  const auto prec = get_le<std::uint32_t>(bytes, pos);
  const auto flags = get_le<std::uint32_t>(bytes, pos);
  if (ndim == 0 || ndim > 16 || split > ndim) throw FormatError("grid container header out of range");
  if (prec > 1) throw FormatError("unknown payload precision");
  if (bytes.size() < kHeaderBytes + ndim * kAxisBytes) throw FormatError("grid container truncated");
  std::vector<Axis> axes(ndim);
  for (Axis& a : axes) {
    a.lo = get_f64(bytes, pos);
    a.hi = get_f64(bytes, pos);
    a.count = get_le<std::uint64_t>(bytes, pos);
    a.periodic = get_le<std::uint32_t>(bytes, pos) != 0;
    get_le<std::uint32_t>(bytes, pos);
  }
  Grid g;
  try {
    g = Grid(axes, static_cast<int>(split));
  } catch (const Error& e) {
    throw FormatError(std::string("grid container axes invalid: ") + e.what());
  }
  const std::size_t item = prec == 1 ? 8 : 16;
  if (bytes.size() - pos != g.size() * item) throw FormatError("grid container payload size mismatch");
  GridFunction f(g);
  f.flags = flags;
  for (cplx& v : f.v) {
    if (prec == 1) {
      const float re = get_f32(bytes, pos), im = get_f32(bytes, pos);
      v = {re, im};
    } else {
      const double re = get_f64(bytes, pos), im = get_f64(bytes, pos);
      v = {re, im};
    }
  }
  return f;
}

void write_grid_function(const std::string& path, const GridFunction& f, Precision p) {
  write_text_file(path, encode_grid_function(f, p));
}

GridFunction read_grid_function(const std::string& path) { return decode_grid_function(read_file(path)); }

nlohmann::json grid_sidecar(const GridFunction& f, Precision p, const nlohmann::json& provenance) {
  return {{"format", "HTGF"},
          {"version", kVersion},
          {"precision", p == Precision::Complex64 ? "complex64" : "complex128"},
          {"split", f.grid.split()},
          {"axes", axes_json(f.grid)},
          {"flags", f.flags},
          {"coarse_grid", (f.flags & kFlagCoarseGrid) != 0},
          {"provenance", provenance}};
}

nlohmann::json kernel_record_to_json(const KernelTable& K) {
  nlohmann::json terms = nlohmann::json::array();
  for (const SpectralTerm& t : K.record) {
    std::vector<double> re(t.coef.size()), im(t.coef.size());
    for (std::size_t q = 0; q < t.coef.size(); ++q) {
      re[q] = t.coef[q].real();
      im[q] = t.coef[q].imag();
    }
    terms.push_back({{"k", t.k}, {"rho", t.rho}, {"w", t.w}, {"coef_re", re}, {"coef_im", im}});
  }
  return {{"n", K.n},
          {"d2", K.d2},
          {"prefactor", K.prefactor},
          {"mu_min", K.mu_min},
          {"excluded_norm_sq", K.excluded_norm_sq},
          {"spectral_norm_sq", K.spectral_norm_sq()},
          {"terms", terms}};
}

KernelTable kernel_record_from_json(const nlohmann::json& j) {
  try {
    KernelTable K;
    K.n = j.at("n").get<int>();
    K.d2 = j.at("d2").get<int>();
    K.prefactor = j.at("prefactor").get<double>();
    K.mu_min = j.at("mu_min").get<double>();
    K.excluded_norm_sq = j.at("excluded_norm_sq").get<double>();
    for (const auto& t : j.at("terms")) {
      SpectralTerm s;
      s.k = t.at("k").get<int>();
      s.rho = t.at("rho").get<std::vector<double>>();
      s.w = t.at("w").get<std::vector<double>>();
      const auto re = t.at("coef_re").get<std::vector<double>>();
      const auto im = t.at("coef_im").get<std::vector<double>>();
      if (s.w.size() != s.rho.size() || re.size() != s.rho.size() || im.size() != s.rho.size())
        throw FormatError("spectral term arrays differ in length");
      for (std::size_t q = 0; q < re.size(); ++q) s.coef.emplace_back(re[q], im[q]);
      K.record.push_back(std::move(s));
    }
    return K;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("kernel record: ") + e.what());
  }
}

std::vector<std::string> export_kernel(const std::string& base, const KernelTable& K, const nlohmann::json& provenance) {
  std::vector<std::string> paths;
  nlohmann::json rec = kernel_record_to_json(K);
  rec["provenance"] = provenance;
  write_text_file(base + ".spectral.json", dump_json(rec));
  paths.push_back(base + ".spectral.json");
  if (K.has_samples()) {
    GridFunction f(K.grid);
    f.v = K.samples;
    write_grid_function(base + ".htgf", f);
    write_text_file(base + ".htgf.json", dump_json(grid_sidecar(f, Precision::Complex128, provenance)));
    paths.push_back(base + ".htgf");
    paths.push_back(base + ".htgf.json");
  }
  return paths;
}

nlohmann::json read_json_file(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("'" + path + "': " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw FormatError("write failed for '" + path + "'");
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace htlab
