#include "mg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "mg/error.hpp"
#include "mg/symbols.hpp"

namespace mg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

template <typename Weights>
double weighted_sum(std::span<const Complex> c, const Weights& w) {
  double sum = 0;
  for (std::size_t i = 0; i < c.size(); ++i) sum += w[i] * std::norm(c[i]);
  return sum;
}

double energy(std::span<const Complex> c) {
  double sum = 0;
  for (const Complex& v : c) sum += std::norm(v);
  return sum;
}

double line_max_divergence(const LineField& f) {
  const auto m = line_constants(f.line()).components;
  const FrequencyVector& p = f.line().p;
  double div = 0;
  double peak = 0;
  for (std::int64_t n = -f.radius(); n <= f.radius(); ++n) {
    const Complex c = f.at(n);
    const Complex u[3] = {m[0] * c, m[1] * c, m[2] * c};
    const Complex d = static_cast<double>(n * p.k1) * u[0] + static_cast<double>(n * p.k2) * u[1] +
                      static_cast<double>(n * p.k3) * u[2];
    div = std::max(div, std::abs(d));
    for (const Complex& v : u) peak = std::max(peak, std::abs(v));
  }
  return peak > 0 ? div / peak : 0.0;
}

}  // namespace

double DiagnosticsRecord::hs_at(double s) const {
  for (const auto& [order, value] : hs) {
    if (std::abs(order - s) <= 1e-12) return value;
  }
  throw Error(ErrorKind::MissingOrders, fmt::format("Sobolev order {} was not recorded", s));
}

double sqrtM3_energy(const SpectralField& f) {
  return weighted_sum(f.coeffs(), SymbolTable::shared(f.grid())->M3());
}

double sqrtM3_energy(const LineField& f) {
  return line_constants(f.line()).m_lower * energy(f.coeffs());
}

double dissipation_rate(const SpectralField& f, const ModelParams& params) {
  const auto table = SymbolTable::shared(f.grid());
  double sum = 0;
  for (std::size_t i = 0; i < f.coeffs().size(); ++i) {
    const double a = std::norm(f.coeffs()[i]);
    if (a != 0) sum += linear_symbol(table->M3()[i], table->norm2()[i], params) * a;
  }
  return sum;
}

double dissipation_rate(const LineField& f, const ModelParams& params) {
  const double m3 = line_constants(f.line()).m_lower;
  const double p2 = static_cast<double>(f.line().p.norm2());
  double sum = 0;
  for (std::int64_t n = -f.radius(); n <= f.radius(); ++n) {
    if (n == 0) continue;
    sum += linear_symbol(m3, static_cast<double>(n * n) * p2, params) * std::norm(f.at(n));
  }
  return sum;
}

// --- RecordBuilder -----------------------------------------------------------------

RecordBuilder::RecordBuilder(const GridSpec& grid, const ModelParams& params, std::vector<double> orders,
                             std::optional<LineSpec> designated_line)
    : params_(params), orders_(std::move(orders)), line_(std::move(designated_line)) {
  const auto table = SymbolTable::shared(grid);
  const auto n2 = table->norm2();
  m3_.assign(table->M3().begin(), table->M3().end());
  sigma_.resize(n2.size());
  for (std::size_t i = 0; i < n2.size(); ++i) sigma_[i] = linear_symbol(m3_[i], n2[i], params_);
  for (const double s : orders_) {
    auto& w = weights_.emplace_back(n2.size());
    for (std::size_t i = 0; i < n2.size(); ++i) w[i] = sobolev_weight(n2[i], s, SobolevKind::Inhomogeneous);
  }
}

RecordBuilder::RecordBuilder(const LineSpec& line, int line_radius, const ModelParams& params,
                             std::vector<double> orders)
    : params_(params), orders_(std::move(orders)), line_(line) {
  const double m3 = line_constants(line).m_lower;
  const double p2 = static_cast<double>(line.p.norm2());
  const auto size = static_cast<std::size_t>(2 * line_radius + 1);
  m3_.resize(size);
  sigma_.resize(size);
  std::vector<double> n2(size);
  for (int n = -line_radius; n <= line_radius; ++n) {
    const auto i = static_cast<std::size_t>(n + line_radius);
    n2[i] = static_cast<double>(n) * n * p2;
    m3_[i] = n == 0 ? 0.0 : m3;
    sigma_[i] = n == 0 ? 0.0 : linear_symbol(m3, n2[i], params_);
  }
  for (const double s : orders_) {
    auto& w = weights_.emplace_back(size);
    for (std::size_t i = 0; i < size; ++i) w[i] = sobolev_weight(n2[i], s, SobolevKind::Inhomogeneous);
  }
}

double RecordBuilder::dissipation(const SpectralField& f) const { return weighted_sum(f.coeffs(), sigma_); }
double RecordBuilder::dissipation(const LineField& f) const { return weighted_sum(f.coeffs(), sigma_); }

namespace {

DissipationSample sample(std::span<const Complex> f, std::span<const Complex> rate, std::span<const double> sigma) {
  DissipationSample out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double a = std::norm(f[i]);
    out.value += sigma[i] * a;
    out.slope += 2.0 * sigma[i] * (std::real(std::conj(f[i]) * rate[i]) - sigma[i] * a);
  }
  return out;
}

}  // namespace

DissipationSample RecordBuilder::dissipation_sample(const SpectralField& f, const SpectralField& rate) const {
  return sample(f.coeffs(), rate.coeffs(), sigma_);
}
DissipationSample RecordBuilder::dissipation_sample(const LineField& f, const LineField& rate) const {
  return sample(f.coeffs(), rate.coeffs(), sigma_);
}

DiagnosticsRecord RecordBuilder::make(double t, const SpectralField& f, const NonlinearInfo& info,
                                      double residual) const {
  DiagnosticsRecord r;
  r.t = t;
  r.l2 = std::sqrt(energy(f.coeffs()));
  for (std::size_t o = 0; o < orders_.size(); ++o) {
    r.hs.emplace_back(orders_[o], std::sqrt(weighted_sum(f.coeffs(), weights_[o])));
  }
  r.sqrtM3_energy = weighted_sum(f.coeffs(), m3_);
  r.dissipation = weighted_sum(f.coeffs(), sigma_);
  r.energy_residual = residual;
  r.leakage = line_ ? restrict_line(f, *line_).leakage : kNaN;
  r.max_divergence = max_divergence(velocity(f));
  r.projected_mass = info.relative_projection();
  return r;
}

DiagnosticsRecord RecordBuilder::make(double t, const LineField& f, const NonlinearInfo& info,
                                      double residual) const {
  DiagnosticsRecord r;
  r.t = t;
  r.l2 = std::sqrt(energy(f.coeffs()));
  for (std::size_t o = 0; o < orders_.size(); ++o) {
    r.hs.emplace_back(orders_[o], std::sqrt(weighted_sum(f.coeffs(), weights_[o])));
  }
  r.sqrtM3_energy = weighted_sum(f.coeffs(), m3_);
  r.dissipation = weighted_sum(f.coeffs(), sigma_);
  r.energy_residual = residual;
  // Line-reduced storage cannot represent off-line modes.
  r.leakage = 0.0;
  r.max_divergence = line_max_divergence(f);
  r.projected_mass = info.relative_projection();
  return r;
}

// --- post-processing -----------------------------------------------------------------

double energy_law_residual(std::span<const DiagnosticsRecord> window) {
  if (window.size() < 2) throw Error(ErrorKind::InsufficientData, "energy balance needs at least 2 records");
  const double e0 = window.front().l2 * window.front().l2;
  if (e0 == 0) return 0.0;
  double integral = 0;
  for (std::size_t i = 1; i < window.size(); ++i) {
    integral += 0.5 * (window[i].t - window[i - 1].t) * (window[i].dissipation + window[i - 1].dissipation);
  }
  const double e1 = window.back().l2 * window.back().l2;
  return std::abs(e1 - e0 + 2.0 * integral) / e0;
}

DecayFit decay_fit(std::span<const DiagnosticsRecord> records, double s, double reference_rate) {
  if (records.size() < 6) {
    throw Error(ErrorKind::InsufficientData, fmt::format("decay fit needs 6 records, got {}", records.size()));
  }
  const auto skip = static_cast<std::size_t>(std::floor(kFitWarmupFraction * static_cast<double>(records.size())));
  const auto window = records.subspan(skip);
  std::vector<double> x, y;
  for (const auto& r : window) {
    const double v = r.hs_at(s);
    if (!(v > 0)) throw Error(ErrorKind::DegenerateNorms, fmt::format("H^{} norm vanishes at t={}", s, r.t));
    x.push_back(r.t);
    y.push_back(std::log(v));
  }
  const auto n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) throw Error(ErrorKind::InsufficientData, "decay fit needs distinct record times");
  DecayFit fit;
  fit.s = s;
  fit.rate = sxy / sxx;
  fit.reference_rate = reference_rate;
  fit.prefactor = std::exp(my - fit.rate * mx);
  double ss_res = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (my + fit.rate * (x[i] - mx));
    ss_res += e * e;
  }
  fit.r_squared = syy > 0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

BootstrapReport bootstrap_check(std::span<const DiagnosticsRecord> records, double epsilon, double alpha,
                                double delta, double m_lower) {
  if (!(alpha > 0 && alpha < 1)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, 1)");
  BootstrapReport report;
  report.epsilon = epsilon;
  report.low_order = 2.5 + delta;
  report.kappa = 1.0 / alpha + 2.5 + delta;
  report.low_order_margin = kInf;
  report.kappa_margin = kInf;
  for (const auto& r : records) {
    const double low = r.hs_at(report.low_order);
    const double high = r.hs_at(report.kappa);
    const double low_bound = 2.0 * epsilon * std::exp(-m_lower * r.t);
    const double high_bound = 2.0 * epsilon;
    const bool low_ok = low <= low_bound;
    const bool high_ok = high <= high_bound;
    if (low > 0) report.low_order_margin = std::min(report.low_order_margin, low_bound / low);
    if (high > 0) report.kappa_margin = std::min(report.kappa_margin, high_bound / high);
    report.low_order_ok = report.low_order_ok && low_ok;
    report.kappa_ok = report.kappa_ok && high_ok;
    if ((!low_ok || !high_ok) && !report.first_violation_time) report.first_violation_time = r.t;
  }
  return report;
}

EmpiricalConstant empirical_Cs(std::span<const DiagnosticsRecord> records, double s, double delta, double m_lower,
                               double m_upper) {
  if (records.size() < 3) throw Error(ErrorKind::InsufficientData, "centred differences need 3 records");
  EmpiricalConstant out;
  for (std::size_t i = 1; i + 1 < records.size(); ++i) {
    const double e_prev = std::pow(records[i - 1].hs_at(s), 2);
    const double e_next = std::pow(records[i + 1].hs_at(s), 2);
    const double e = std::pow(records[i].hs_at(s), 2);
    const double h = records[i].hs_at(2.5 + delta);
    const double dt = records[i + 1].t - records[i - 1].t;
    if (e == 0 || h == 0 || dt <= 0) continue;
    const double derivative = (e_next - e_prev) / dt;
    const double c = (derivative + 2.0 * m_lower * e) / (2.0 * m_upper * h * e);
    if (c > out.value) {
      out.value = c;
      out.binding_time = records[i].t;
    }
  }
  return out;
}

void write_diagnostics_csv(std::ostream& os, std::span<const double> orders,
                           std::span<const DiagnosticsRecord> records) {
  os << "t,l2";
  for (const double s : orders) os << fmt::format(",hs_{}", s);
  os << ",sqrtM3_energy,energy_residual,leakage,max_div,projected_mass\n";
  for (const auto& r : records) {
    std::string line = fmt::format("{:.17g},{:.17g}", r.t, r.l2);
    for (const double s : orders) line += fmt::format(",{:.17g}", r.hs_at(s));
    line += fmt::format(",{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.sqrtM3_energy, r.energy_residual, r.leakage,
                        r.max_divergence, r.projected_mass);
    os << line;
  }
}

}  // namespace mg
