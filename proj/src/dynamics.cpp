#include "mg/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "layout.hpp"
#include "mg/error.hpp"

namespace mg {

namespace {

int padded_line_size(int radius) {
  const int extent = 2 * radius + 1;
  return next_fast_size(static_cast<int>(std::ceil(1.5 * extent)));
}

double pairing(std::span<const Complex> a, std::span<const Complex> b) {
  double sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (std::conj(a[i]) * b[i]).real();
  return sum;
}

double l2(std::span<const Complex> a) {
  double sum = 0;
  for (const Complex& c : a) sum += std::norm(c);
  return std::sqrt(sum);
}

}  // namespace

void ModelParams::validate() const {
  if (!(eps_hyper >= 0) || !(eps_kappa >= 0) || !(omega_prime >= 0)) {
    throw Error(ErrorKind::InvalidArgument, "model coefficients must be nonnegative");
  }
  if (!(gamma > 0 && gamma <= 1)) throw Error(ErrorKind::InvalidArgument, "gamma must lie in (0, 1]");
}

double linear_symbol(double m3, double norm2, const ModelParams& params) {
  double sigma = params.omega_prime * m3;
  if (params.eps_hyper != 0) sigma += params.eps_hyper * norm2;
  if (params.eps_kappa != 0 && norm2 > 0) sigma += params.eps_kappa * std::pow(norm2, params.gamma);
  return sigma;
}

double linear_symbol(const FrequencyVector& k, const ModelParams& params) {
  return linear_symbol(eval_M(k)[2], static_cast<double>(k.norm2()), params);
}

VectorField velocity(const SpectralField& theta) {
  const auto table = SymbolTable::shared(theta.grid());
  VectorField u{SpectralField(theta.grid()), SpectralField(theta.grid()), SpectralField(theta.grid())};
  const std::array<std::span<const double>, 3> m{table->M1(), table->M2(), table->M3()};
  const auto in = theta.coeffs();
  for (int j = 0; j < 3; ++j) {
    auto out = u[j].coeffs();
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = m[j][i] * in[i];
  }
  return u;
}

std::array<LineField, 3> velocity(const LineField& theta) {
  const auto c = line_constants(theta.line()).components;
  std::array<LineField, 3> u{theta, theta, theta};
  for (int j = 0; j < 3; ++j) {
    for (Complex& v : u[j].coeffs()) v *= c[j];
  }
  return u;
}

VectorField magnetic(const SpectralField& theta) {
  const GridSpec& g = theta.grid();
  const auto table = SymbolTable::shared(g);
  VectorField b{SpectralField(g), SpectralField(g), SpectralField(g)};
  const std::array<std::span<const double>, 3> m{table->M1(), table->M2(), table->M3()};
  const auto in = theta.coeffs();
  const auto n2 = table->norm2();
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (n2[i] == 0) continue;
    const double k2 = static_cast<double>(g.wavevector(i).k2);
    const Complex factor(0.0, k2 / n2[i]);
    for (int j = 0; j < 3; ++j) b[j].coeffs()[i] = factor * m[j][i] * in[i];
  }
  return b;
}

double max_divergence(const VectorField& v) {
  const GridSpec& g = v[0].grid();
  double div = 0;
  double peak = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const FrequencyVector k = g.wavevector(i);
    const Complex d = static_cast<double>(k.k1) * v[0].coeffs()[i] + static_cast<double>(k.k2) * v[1].coeffs()[i] +
                      static_cast<double>(k.k3) * v[2].coeffs()[i];
    div = std::max(div, std::abs(d));
    for (int j = 0; j < 3; ++j) peak = std::max(peak, std::abs(v[j].coeffs()[i]));
  }
  return peak > 0 ? div / peak : 0.0;
}

// --- 3-D advection --------------------------------------------------------------

namespace {

GridSpec checked_grid(const GridSpec& grid) {
  if (grid.pad < 1.5 || !grid.dealiased()) {
    throw Error(ErrorKind::PadTooSmall, "advection needs pad >= 3/2, got " + std::to_string(grid.pad));
  }
  return grid;
}

}  // namespace

AdvectionOperator::AdvectionOperator(const GridSpec& grid)
    : grid_(checked_grid(grid)), symbols_(SymbolTable::shared(grid)), fft_(grid.transform_size()) {
  drift_.resize(fft_.real_size());
  product_.resize(fft_.real_size());
}

SpectralField AdvectionOperator::apply(const SpectralField& theta, NonlinearInfo* info) {
  return apply(velocity(theta), theta, info);
}

SpectralField AdvectionOperator::apply(const VectorField& drift, const SpectralField& theta, NonlinearInfo* info) {
  if (!(theta.grid() == grid_) || !(drift[0].grid() == grid_)) {
    throw Error(ErrorKind::InvalidArgument, "advection operands live on a different grid");
  }
  const int m = fft_.size();
  const auto in = theta.coeffs();
  const auto real = fft_.real();
  std::fill(product_.begin(), product_.end(), 0.0);
  double scale = 0;
  for (int j = 0; j < 3; ++j) {
    const auto dj = drift[j].coeffs();
    detail::pack_half(grid_, m, fft_.spectral(), [&](std::size_t i) { return dj[i]; });
    fft_.backward();
    std::copy(real.begin(), real.end(), drift_.begin());

    detail::pack_half(grid_, m, fft_.spectral(), [&](std::size_t i) {
      const FrequencyVector k = grid_.wavevector(i);
      const std::int64_t kj = j == 0 ? k.k1 : (j == 1 ? k.k2 : k.k3);
      return Complex(0.0, static_cast<double>(kj)) * in[i];
    });
    fft_.backward();
    double sq = 0;
    for (std::size_t r = 0; r < real.size(); ++r) {
      const double p = drift_[r] * real[r];
      product_[r] += p;
      sq += p * p;
    }
    scale += std::sqrt(sq / static_cast<double>(real.size()));
  }

  std::copy(product_.begin(), product_.end(), real.begin());
  fft_.forward();
  SpectralField out(grid_);
  const double norm = -1.0 / static_cast<double>(real.size());
  detail::unpack_half(grid_, m, fft_.spectral(), norm, [&](std::size_t i, Complex c) { out.coeffs()[i] = c; });
  const double removed = out.project();
  if (info != nullptr) {
    info->product_scale = scale;
    info->removed_norm = removed;
    info->energy_pairing = pairing(in, out.coeffs());
    info->output_norm = l2(out.coeffs());
  }
  return out;
}

// --- line advection ----------------------------------------------------------------

LineAdvectionOperator::LineAdvectionOperator(const LineSpec& line, int line_radius)
    : line_(line),
      radius_(line_radius),
      m_(line_constants(line).components),
      fft_(padded_line_size(line_radius)) {
  theta_.resize(static_cast<std::size_t>(fft_.size()));
  product_.resize(static_cast<std::size_t>(fft_.size()));
}

LineField LineAdvectionOperator::apply(const LineField& theta, NonlinearInfo* info) {
  if (!(theta.line() == line_) || theta.radius() != radius_) {
    throw Error(ErrorKind::InvalidArgument, "line operand does not match the operator");
  }
  const auto spec = fft_.spectral();
  const auto real = fft_.real();
  const auto load = [&](auto&& coeff) {
    std::fill(spec.begin(), spec.end(), Complex{});
    for (int n = 0; n <= radius_; ++n) spec[static_cast<std::size_t>(n)] = coeff(n);
    fft_.backward();
  };

  load([&](int n) { return theta.at(n); });
  std::copy(real.begin(), real.end(), theta_.begin());
  load([&](int n) { return Complex(0.0, n) * theta.at(n); });

  const std::array<double, 3> p{static_cast<double>(line_.p.k1), static_cast<double>(line_.p.k2),
                                static_cast<double>(line_.p.k3)};
  std::fill(product_.begin(), product_.end(), 0.0);
  double scale = 0;
  for (int j = 0; j < 3; ++j) {
    double sq = 0;
    for (std::size_t r = 0; r < real.size(); ++r) {
      const double v = (m_[j] * theta_[r]) * (p[j] * real[r]);
      product_[r] += v;
      sq += v * v;
    }
    scale += std::sqrt(sq / static_cast<double>(real.size()));
  }

  std::copy(product_.begin(), product_.end(), real.begin());
  fft_.forward();
  LineField out(line_, radius_);
  const double norm = -1.0 / static_cast<double>(real.size());
  for (int n = 1; n <= radius_; ++n) out.set_pair(n, norm * spec[static_cast<std::size_t>(n)]);
  if (info != nullptr) {
    info->product_scale = scale;
    info->removed_norm = std::abs(norm * spec[0]);
    info->energy_pairing = pairing(theta.coeffs(), out.coeffs());
    info->output_norm = l2(out.coeffs());
  }
  return out;
}

SpectralField nonlinear_term(const SpectralField& theta, NonlinearInfo* info) {
  AdvectionOperator op(theta.grid());
  return op.apply(theta, info);
}

LineField nonlinear_term(const LineField& theta, NonlinearInfo* info) {
  LineAdvectionOperator op(theta.line(), theta.radius());
  return op.apply(theta, info);
}

}  // namespace mg
