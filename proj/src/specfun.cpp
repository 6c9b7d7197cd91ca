// Copyright 2026 The condscat Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "condscat/specfun.hpp"

#include "condscat/quadrature.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace condscat::specfun {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
constexpr double kSeriesRadius = 4.0;

void check_order(int n) {
  if (n < 0) throw DomainError("Bessel order must be non-negative");
}

// J_n(z) = (z/2)^n sum_k (-z^2/4)^k / (k! (n+k)!)
std::vector<cplx> j_series(int nmax, cplx z) {
  std::vector<cplx> out(nmax + 1);
  const cplx w = -0.25 * z * z;
  cplx lead = 1.0;  // (z/2)^n / n!
  for (int n = 0; n <= nmax; ++n) {
    if (n > 0) lead *= 0.5 * z / static_cast<double>(n);
    cplx term = lead, sum = lead;
    for (int k = 1; k < 200; ++k) {
      term *= w / (static_cast<double>(k) * static_cast<double>(n + k));
      sum += term;
      if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
    }
    out[n] = sum;
  }
  return out;
}

std::vector<cplx> j_miller(int nmax, cplx z) {
  const double az = std::abs(z);
  const int m0 = std::max(nmax, static_cast<int>(std::ceil(az)));
  int start = m0 + 20 + static_cast<int>(std::ceil(std::sqrt(160.0 * m0)));
  start += start % 2;
  std::vector<cplx> f(start + 2, cplx{});
  f[start] = 1e-30;
  for (int n = start; n >= 1; --n) {
    f[n - 1] = (2.0 * n / z) * f[n] - f[n + 1];
    if (std::abs(f[n - 1]) > 1e250) {
      for (int m = n - 1; m <= start; ++m) f[m] *= 1e-250;
    }
  }
  // e^{-iz} = J_0 + 2 sum (-i)^n J_n, e^{iz} = J_0 + 2 sum i^n J_n.
  const bool upper = z.imag() >= 0.0;
  const cplx eps = upper ? cplx{0.0, -1.0} : cplx{0.0, 1.0};
  cplx sum = f[0], ph = 1.0;
  for (int n = 1; n <= start; ++n) {
    ph *= eps;
    sum += 2.0 * ph * f[n];
  }
  const cplx target = upper ? std::exp(cplx{0.0, -1.0} * z) : std::exp(cplx{0.0, 1.0} * z);
  const cplx scale = target / sum;
  std::vector<cplx> out(nmax + 1);
  for (int n = 0; n <= nmax; ++n) out[n] = f[n] * scale;
  return out;
}

// H^(1)_nu(z) = 2 e^{-i nu pi/2} / (i pi) int_0^inf e^{iz cosh t} cosh(nu t) dt, Im z > 0.
cplx hankel1_integral(int nu, cplx z) {
  const double T = std::acosh(1.0 + 45.0 / z.imag());
  const auto f = [&](double t) { return std::exp(kI * z * std::cosh(t)) * std::cosh(nu * t); };
  const cplx integral = quad::integrate_adaptive(f, 0.0, T, 1e-15).value;
  return 2.0 * std::exp(cplx{0.0, -0.5 * nu * kPi}) / (kI * kPi) * integral;
}

}  // namespace

std::vector<cplx> bessel_j_seq(int nmax, cplx z) {
  check_order(nmax);
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError("Bessel argument must be finite");
  if (z == cplx{}) {
    std::vector<cplx> out(nmax + 1, cplx{});
    out[0] = 1.0;
    return out;
  }
  if (std::abs(z) <= kSeriesRadius) return j_series(nmax, z);
  return j_miller(nmax, z);
}

CylinderSeq bessel_jy_seq(int nmax, cplx z) {
  check_order(nmax);
  if (z == cplx{}) throw DomainError("Y_n and H_n are singular at z = 0");
  const double az = std::abs(z);
  const int len = std::max(nmax + 1, static_cast<int>(std::ceil(1.2 * az)) + 50);
  const auto J = bessel_j_seq(len, z);

  CylinderSeq out;
  out.J.assign(J.begin(), J.begin() + nmax + 1);
  out.Y.resize(nmax + 1);
  auto check = [&](int n, cplx v) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw OverflowError("Y_" + std::to_string(n) + " overflows at |z| = " + std::to_string(az));
  };

  if (std::abs(z.imag()) > 1.0) {
    // Off the real axis Y is nearly a multiple of J; recur on the dominant Hankel
    // function instead, seeded from its integral representation.
    const bool upper = z.imag() > 0.0;
    const cplx w = upper ? z : std::conj(z);
    cplx h0 = hankel1_integral(0, w), h1 = hankel1_integral(1, w);
    if (!upper) {
      h0 = std::conj(h0);  // H^(2)_n(z) = conj(H^(1)_n(conj z))
      h1 = std::conj(h1);
    }
    const cplx sgn = upper ? -kI : kI;  // Y = -i (H1 - J) = i (H2 - J)
    std::vector<cplx> h(nmax + 2);
    h[0] = h0;
    h[1] = h1;
    for (int n = 1; n <= nmax; ++n) h[n + 1] = (2.0 * n / z) * h[n] - h[n - 1];
    out.H.resize(nmax + 1);
    for (int n = 0; n <= nmax; ++n) {
      out.Y[n] = sgn * (h[n] - J[n]);
      check(n, out.Y[n]);
      out.H[n] = upper ? h[n] : 2.0 * J[n] - h[n];
    }
    return out;
  }

  // Neumann series for Y_0 and Y_1, then forward recurrence.
  const cplx L = std::log(0.5 * z) + kEulerGamma;
  cplx s0{}, s1{};
  for (int k = 1; 2 * k + 1 <= len; ++k) {
    const double sg = (k % 2) ? -1.0 : 1.0;
    s0 += sg * J[2 * k] / static_cast<double>(k);
    s1 += sg * (J[2 * k - 1] - J[2 * k + 1]) / static_cast<double>(k);
  }
  out.Y[0] = (2.0 / kPi) * (L * J[0]) - (4.0 / kPi) * s0;
  if (nmax >= 1) out.Y[1] = (2.0 / kPi) * (L * J[1] - J[0] / z) + (2.0 / kPi) * s1;
  for (int n = 1; n < nmax; ++n) {
    out.Y[n + 1] = (2.0 * n / z) * out.Y[n] - out.Y[n - 1];
    check(n + 1, out.Y[n + 1]);
  }
  out.H.resize(nmax + 1);
  for (int n = 0; n <= nmax; ++n) out.H[n] = out.J[n] + kI * out.Y[n];
  return out;
}

std::vector<cplx> hankel1_seq(int nmax, cplx z) {
  return bessel_jy_seq(nmax, z).H;
}

std::vector<cplx> cyl_derivatives(const std::vector<cplx>& f, cplx z) {
  if (f.size() < 2) throw DomainError("need at least two orders for derivatives");
  std::vector<cplx> d(f.size() - 1);
  d[0] = -f[1];
  for (std::size_t n = 1; n < d.size(); ++n) d[n] = f[n - 1] - (static_cast<double>(n) / z) * f[n];
  return d;
}

cplx cyl_bessel(BesselKind kind, int n, cplx z) {
  check_order(n);
  switch (kind) {
    case BesselKind::J:
      return bessel_j_seq(n, z)[n];
    case BesselKind::Y:
      return bessel_jy_seq(n, z).Y[n];
    case BesselKind::H1:
      return hankel1_seq(n, z)[n];
  }
  return {};
}

namespace {

bool use_series(double s, cplx z) { return std::abs(z) <= 1.5 + 0.5 * s || z.real() < 0.0; }

cplx gamma_series(double s, cplx z) {
  // gamma(s, z) = z^s e^{-z} sum_k z^k / (s (s+1) ... (s+k))
  cplx term = 1.0 / s, sum = term;
  for (int k = 1; k < 100000; ++k) {
    term *= z / (s + k);
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return std::exp(s * std::log(z) - z) * sum;
}

cplx gamma_cf(double s, cplx z) {
  // Modified Lentz evaluation of Gamma(s, z) = e^{-z} z^s / (z + 1 - s - 1(1-s)/(z + 3 - s - ...)).
  constexpr double tiny = 1e-300;
  cplx b = z + 1.0 - s;
  cplx c = 1.0 / tiny;
  cplx d = 1.0 / b;
  cplx h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const cplx del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return std::exp(s * std::log(z) - z) * h;
}

void check_gamma_args(double s, cplx z) {
  if (!(s > 0.0)) throw DomainError("incomplete gamma requires s > 0");
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError("incomplete gamma argument must be finite");
}

}  // namespace

cplx lower_incomplete_gamma(double s, cplx z) {
  check_gamma_args(s, z);
  if (z == cplx{}) return 0.0;
  if (use_series(s, z)) return gamma_series(s, z);
  return std::tgamma(s) - gamma_cf(s, z);
}

cplx upper_incomplete_gamma(double s, cplx z) {
  check_gamma_args(s, z);
  if (z == cplx{}) return std::tgamma(s);
  if (use_series(s, z)) return std::tgamma(s) - gamma_series(s, z);
  return gamma_cf(s, z);
}

FourierBesselField FourierBesselField::plane_wave(double kappa, double theta_d, int n_trunc) {
  FourierBesselField f;
  f.kappa = kappa;
  f.coeffs.resize(n_trunc + 1);
  cplx in = 1.0;
  for (int n = 0; n <= n_trunc; ++n) {
    const cplx a = in * std::exp(cplx{0.0, -n * theta_d});
    const cplx b = n == 0 ? cplx{} : in * std::exp(cplx{0.0, n * theta_d});
    f.coeffs[n] = {a, b};
    in *= kI;
  }
  return f;
}

FbValue fb_eval(const FourierBesselField& field, double r, double theta) {
  if (!(r >= 0.0)) throw DomainError("radius must be non-negative");
  const int N = field.order();
  FbValue out{};
  if (N < 0) return out;
  const double x = field.kappa * r;
  const auto J = bessel_j_seq(N, x);
  double cmax = 0.0;
  for (int n = 0; n <= N; ++n) {
    const auto& [a, b] = field.coeffs[n];
    out.value += (a * std::exp(cplx{0.0, n * theta}) + b * std::exp(cplx{0.0, -n * theta})) * J[n];
    cmax = std::max(cmax, std::abs(a) + std::abs(b));
  }
  // |J_n(x)| <= (x/2)^n / n! for real x >= 0.
  double t = 1.0;
  for (int n = 1; n <= N + 1; ++n) t *= 0.5 * x / n;
  double tail = 0.0;
  for (int n = N + 1; n < N + 400 && t > 0.0; ++n) {
    tail += t;
    if (n > x && t < 1e-20 * tail) break;
    t *= 0.5 * x / (n + 1);
  }
  out.tail_bound = cmax * tail;
  return out;
}

int fb_default_order(double kappa, double r_c) {
  const double x = kappa * r_c;
  int N = static_cast<int>(std::ceil(x)) + 15;
  const auto J = bessel_j_seq(N, x);
  while (N > 0 && std::abs(J[N]) < 1e-8 && N > x) --N;
  return N;
}

FourierBesselField fb_fit(const std::vector<cplx>& samples, double r_c, double kappa,
                          int n_trunc) {
  if (!(kappa > 0.0) || !(r_c > 0.0)) throw DomainError("fb_fit needs kappa > 0 and r_c > 0");
  const int N = n_trunc < 0 ? fb_default_order(kappa, r_c) : n_trunc;
  const std::size_t M = samples.size();
  if (M < static_cast<std::size_t>(std::max(4 * N, 1)))
    throw DomainError("fb_fit needs at least 4 N samples");
  const auto J = bessel_j_seq(N, kappa * r_c);
  FourierBesselField f;
  f.kappa = kappa;
  f.coeffs.resize(N + 1);
  for (int n = 0; n <= N; ++n) {
    if (std::abs(J[n]) < 1e-8)
      throw SolverError("ill-conditioned fit: |J_" + std::to_string(n) +
                        "(kappa r_c)| < 1e-8");
    cplx cp{}, cm{};
    for (std::size_t j = 0; j < M; ++j) {
      const double t = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(M);
      const cplx e = std::exp(cplx{0.0, -n * t});
      cp += samples[j] * e;
      cm += samples[j] * std::conj(e);
    }
    cp /= static_cast<double>(M);
    cm /= static_cast<double>(M);
    f.coeffs[n] = {cp / J[n], n == 0 ? cplx{} : cm / J[n]};
  }
  return f;
}

}  // namespace condscat::specfun
