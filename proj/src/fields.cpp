#include "mg/fields.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include <json.hpp>

#include "layout.hpp"
#include "mg/error.hpp"
#include "mg/fft.hpp"

namespace mg {

namespace {

// Uniform in [0, 1) from the top 53 bits; independent of the standard
// library's distribution implementation.
double unit_uniform(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

Complex random_phase(std::mt19937_64& gen) {
  const double angle = 2.0 * std::numbers::pi * unit_uniform(gen);
  return {std::cos(angle), std::sin(angle)};
}

bool positive_half(const FrequencyVector& k) {
  if (k.k1 != 0) return k.k1 > 0;
  if (k.k2 != 0) return k.k2 > 0;
  return k.k3 > 0;
}

void put_u16(std::ostream& os, std::uint16_t v) {
  const unsigned char b[2] = {static_cast<unsigned char>(v & 0xff), static_cast<unsigned char>(v >> 8)};
  os.write(reinterpret_cast<const char*>(b), 2);
}

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& os, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 8);
}

template <typename T>
T get_le(std::istream& is) {
  unsigned char b[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(b), sizeof(T))) throw Error(ErrorKind::Io, "truncated snapshot");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return static_cast<T>(v);
}

}  // namespace

// --- GridSpec ----------------------------------------------------------------

GridSpec::GridSpec(int radius, double oversampling) : N(radius), pad(oversampling) {
  if (N < 2) throw Error(ErrorKind::InvalidArgument, "grid truncation N must be >= 2");
  if (!(pad >= 1.0)) throw Error(ErrorKind::InvalidArgument, "grid oversampling must be >= 1");
}

int next_fast_size(int n) {
  for (int m = std::max(n, 1);; ++m) {
    int r = m;
    for (int f : {2, 3, 5}) {
      while (r % f == 0) r /= f;
    }
    if (r == 1) return m;
  }
}

int GridSpec::transform_size() const {
  const int minimum = static_cast<int>(std::ceil(pad * extent() - 1e-12));
  return next_fast_size(std::max(minimum, extent()));
}

// --- SpectralField ------------------------------------------------------------

SpectralField::SpectralField(const GridSpec& grid) : grid_(grid), coeffs_(grid.size()) {}

void SpectralField::set_pair(const FrequencyVector& k, Complex value) {
  if (!grid_.contains(k)) throw Error(ErrorKind::TruncationOverflow, to_string(k) + " is outside the grid");
  if (k.is_zero()) {
    coeffs_[grid_.index(k)] = Complex(value.real(), 0.0);
    return;
  }
  coeffs_[grid_.index(k)] = value;
  coeffs_[grid_.index(-k)] = std::conj(value);
}

double SpectralField::hermitian_defect() const {
  double worst = 0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    // index(-k) = size - 1 - index(k) for the centred cube.
    const std::size_t mirror = coeffs_.size() - 1 - i;
    worst = std::max(worst, std::abs(coeffs_[mirror] - std::conj(coeffs_[i])));
  }
  return worst;
}

double SpectralField::vertical_mean_defect() const {
  double worst = 0;
  const auto e = static_cast<std::size_t>(grid_.extent());
  for (std::size_t i = static_cast<std::size_t>(grid_.N); i < coeffs_.size(); i += e) {
    worst = std::max(worst, std::abs(coeffs_[i]));
  }
  return worst;
}

double SpectralField::project() {
  double removed = 0;
  const auto e = static_cast<std::size_t>(grid_.extent());
  for (std::size_t i = static_cast<std::size_t>(grid_.N); i < coeffs_.size(); i += e) {
    removed += std::norm(coeffs_[i]);
    coeffs_[i] = 0;
  }
  const std::size_t n = coeffs_.size();
  for (std::size_t i = 0; i < n / 2; ++i) {
    const Complex avg = 0.5 * (coeffs_[i] + std::conj(coeffs_[n - 1 - i]));
    coeffs_[i] = avg;
    coeffs_[n - 1 - i] = std::conj(avg);
  }
  return std::sqrt(removed);
}

std::size_t SpectralField::support_size(double threshold) const {
  return static_cast<std::size_t>(
      std::count_if(coeffs_.begin(), coeffs_.end(), [&](const Complex& c) { return std::abs(c) > threshold; }));
}

bool SpectralField::is_finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [](const Complex& c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
}

// --- LineField ----------------------------------------------------------------

LineField::LineField(const LineSpec& line, int line_radius)
    : line_(line), radius_(line_radius), coeffs_(static_cast<std::size_t>(2 * std::max(line_radius, 0) + 1)) {
  require_admissible(line_);
  if (line_radius < 0) throw Error(ErrorKind::InvalidArgument, "line truncation must be >= 0");
}

void LineField::set_pair(std::int64_t n, Complex value) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "c_0 is fixed to zero on a line");
  if (n < -radius_ || n > radius_) throw Error(ErrorKind::TruncationOverflow, "line mode outside truncation");
  at(n) = value;
  at(-n) = std::conj(value);
}

double LineField::hermitian_defect() const {
  double worst = std::abs(at(0));
  for (std::int64_t n = 1; n <= radius_; ++n) worst = std::max(worst, std::abs(at(-n) - std::conj(at(n))));
  return worst;
}

bool LineField::is_finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [](const Complex& c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
}

// --- norms ----------------------------------------------------------------------

double sobolev_weight(double norm2, double s, SobolevKind kind) {
  if (s == 0.0) return kind == SobolevKind::Homogeneous && norm2 == 0.0 ? 0.0 : 1.0;
  return kind == SobolevKind::Inhomogeneous ? std::pow(1.0 + norm2, s) : std::pow(norm2, s);
}

double sobolev_norm(const SpectralField& f, double s, SobolevKind kind) {
  if (s < 0) throw Error(ErrorKind::InvalidArgument, "Sobolev order must be >= 0");
  const GridSpec& g = f.grid();
  double sum = 0;
  for (std::size_t i = 0; i < f.coeffs().size(); ++i) {
    const double a = std::norm(f.coeffs()[i]);
    if (a == 0.0) continue;
    sum += sobolev_weight(static_cast<double>(g.wavevector(i).norm2()), s, kind) * a;
  }
  return std::sqrt(sum);
}

double sobolev_norm(const LineField& f, double s, SobolevKind kind) {
  if (s < 0) throw Error(ErrorKind::InvalidArgument, "Sobolev order must be >= 0");
  const double p2 = static_cast<double>(f.line().p.norm2());
  double sum = 0;
  for (std::int64_t n = -f.radius(); n <= f.radius(); ++n) {
    const double a = std::norm(f.at(n));
    if (a == 0.0) continue;
    sum += sobolev_weight(static_cast<double>(n * n) * p2, s, kind) * a;
  }
  return std::sqrt(sum);
}

// --- line embedding --------------------------------------------------------------

SpectralField embed_line(const LineField& f, const GridSpec& grid) {
  SpectralField out(grid);
  for (std::int64_t n = -f.radius(); n <= f.radius(); ++n) {
    if (n == 0 || f.at(n) == Complex{}) continue;
    const FrequencyVector k = f.line().mode(n);
    if (!grid.contains(k)) {
      throw Error(ErrorKind::TruncationOverflow,
                  "line mode " + to_string(k) + " exceeds grid truncation N=" + std::to_string(grid.N));
    }
    out.at(k) = f.at(n);
  }
  return out;
}

LineRestriction restrict_line(const SpectralField& f, const LineSpec& line) {
  const GridSpec& g = f.grid();
  const auto radius = static_cast<int>(line_extent(line, g.N));
  LineField on_line(line, radius);
  double on = 0;
  double total = 0;
  for (std::size_t i = 0; i < f.coeffs().size(); ++i) total += std::norm(f.coeffs()[i]);
  for (int n = -radius; n <= radius; ++n) {
    const Complex c = f.at(line.mode(n));
    on_line.at(n) = c;
    on += std::norm(c);
  }
  const double off = std::max(total - on, 0.0);
  return {std::move(on_line), total > 0 ? std::sqrt(off / total) : 0.0};
}

// --- random data --------------------------------------------------------------------

LineField random_line_data(const LineSpec& line, int line_radius, double beta, std::uint64_t seed) {
  LineField out(line, std::max(line_radius, 0));
  std::mt19937_64 gen(seed);
  for (int n = 1; n <= line_radius; ++n) {
    out.set_pair(n, std::pow(static_cast<double>(n), -beta) * random_phase(gen));
  }
  return out;
}

SpectralField random_field(const GridSpec& grid, int k_max, double beta, std::uint64_t seed) {
  SpectralField out(grid);
  std::mt19937_64 gen(seed);
  const int kk = std::min(k_max, grid.N);
  for (int k1 = -kk; k1 <= kk; ++k1) {
    for (int k2 = -kk; k2 <= kk; ++k2) {
      for (int k3 = -kk; k3 <= kk; ++k3) {
        const FrequencyVector k{k1, k2, k3};
        if (k3 == 0 || !positive_half(k)) continue;
        const double amp = std::pow(std::sqrt(static_cast<double>(k.norm2())), -beta);
        out.set_pair(k, amp * random_phase(gen));
      }
    }
  }
  return out;
}

// --- transforms ------------------------------------------------------------------------

PhysicalField to_physical(const SpectralField& f) {
  const GridSpec& g = f.grid();
  const int m = g.transform_size();
  fft::RealTransform3D tr(m);
  detail::pack_half(g, m, tr.spectral(), [&](std::size_t i) { return f.coeffs()[i]; });
  tr.backward();
  PhysicalField out;
  out.M = m;
  out.values.assign(tr.real().begin(), tr.real().end());
  return out;
}

SpectralField from_physical(const PhysicalField& p, const GridSpec& grid) {
  if (p.M < grid.extent()) throw Error(ErrorKind::InvalidArgument, "physical grid too coarse for truncation");
  fft::RealTransform3D tr(p.M);
  std::copy(p.values.begin(), p.values.end(), tr.real().begin());
  tr.forward();
  SpectralField out(grid);
  const double scale = 1.0 / (static_cast<double>(p.M) * p.M * p.M);
  detail::unpack_half(grid, p.M, tr.spectral(), scale, [&](std::size_t i, Complex c) { out.coeffs()[i] = c; });
  return out;
}

// --- snapshots -------------------------------------------------------------------------

void write_snapshot(const std::filesystem::path& path, const SpectralField& f, const SnapshotMeta& meta) {
  {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorKind::Io, "cannot open " + path.string());
    os.write("MGSF", 4);
    put_u16(os, kSnapshotVersion);
    put_u32(os, static_cast<std::uint32_t>(f.grid().N));
    for (const Complex& c : f.coeffs()) {
      put_f64(os, c.real());
      put_f64(os, c.imag());
    }
    if (!os) throw Error(ErrorKind::Io, "write failed for " + path.string());
  }
  nlohmann::ordered_json j;
  j["format"] = "MGSF";
  j["version"] = kSnapshotVersion;
  j["grid"] = {{"N", f.grid().N}, {"pad", f.grid().pad}, {"order", "k1,k2,k3 lexicographic, each -N..N"}};
  if (meta.line) {
    j["line"] = {meta.line->p.k1, meta.line->p.k2, meta.line->p.k3};
  } else {
    j["line"] = nullptr;
  }
  j["time"] = meta.time;
  j["model"] = {{"eps_hyper", meta.eps_hyper},
                {"eps_kappa", meta.eps_kappa},
                {"gamma", meta.gamma},
                {"omega_prime", meta.omega_prime}};
  std::ofstream js(path.string() + ".json");
  js << j.dump(2) << '\n';
}

SpectralField read_snapshot(const std::filesystem::path& path, double pad) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::Io, "cannot open " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || std::string(magic, 4) != "MGSF") throw Error(ErrorKind::Io, "bad snapshot magic");
  const auto version = get_le<std::uint16_t>(is);
  if (version != kSnapshotVersion) throw Error(ErrorKind::Io, "unsupported snapshot version");
  const auto n = get_le<std::uint32_t>(is);
  SpectralField out(GridSpec(static_cast<int>(n), pad));
  for (Complex& c : out.coeffs()) {
    const double re = std::bit_cast<double>(get_le<std::uint64_t>(is));
    const double im = std::bit_cast<double>(get_le<std::uint64_t>(is));
    c = {re, im};
  }
  return out;
}

}  // namespace mg
