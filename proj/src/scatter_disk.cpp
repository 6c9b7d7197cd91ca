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

#include "condscat/scatter_disk.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "condscat/csv.hpp"
#include "condscat/parallel.hpp"
#include "condscat/specfun.hpp"

namespace condscat::disk {

namespace {

// Values and z-derivatives of one cylinder family at orders 0..nmax.
struct Radial {
  std::vector<cplx> f, df;
};

Radial radial_from(std::vector<cplx> f, int nmax) {
  Radial r;
  r.df.resize(nmax + 1);
  r.df[0] = -f[1];
  for (int m = 1; m <= nmax; ++m) r.df[m] = 0.5 * (f[m - 1] - f[m + 1]);
  f.resize(nmax + 1);
  r.f = std::move(f);
  return r;
}

struct LayerFuncs {
  Radial J, Y;  // Y empty for the innermost disk and for the exterior
};

LayerFuncs bessel_at(cplx z, int nmax, bool need_y) {
  LayerFuncs out;
  if (need_y) {
    const auto s = specfun::bessel_jy_seq(nmax + 1, z);
    out.J = radial_from(s.J, nmax);
    out.Y = radial_from(s.Y, nmax);
  } else {
    out.J = radial_from(specfun::bessel_j_seq(nmax + 1, z), nmax);
  }
  return out;
}

Radial hankel_at(cplx z, int nmax) { return radial_from(specfun::hankel1_seq(nmax + 1, z), nmax); }

cplx layer_k(const ModalSolution& s, int layer) {
  return layer < 0 ? cplx{s.k} : s.k * std::sqrt(s.scatterer.q_values[layer]);
}

cplx signed_factor(int n) { return n < 0 && (-n) % 2 ? -1.0 : 1.0; }

// Value, d/dr and d/dtheta of the modal series of one layer (scattered part outside).
struct SeriesValue {
  cplx u, ur, ut;
};

SeriesValue layer_series(const ModalSolution& s, int layer, double r, double theta) {
  const int N = s.N;
  const std::size_t L = s.scatterer.layers();
  SeriesValue v{};
  const cplx kl = layer_k(s, layer);
  const cplx z = kl * r;
  if (layer < 0) {
    const Radial H = hankel_at(z, N);
    for (int n = -N; n <= N; ++n) {
      const int m = std::abs(n);
      const cplx e = std::exp(kI * (n * theta)) * signed_factor(n) * s.b[n + N];
      v.u += H.f[m] * e;
      v.ur += kl * H.df[m] * e;
      v.ut += kI * static_cast<double>(n) * H.f[m] * e;
    }
    return v;
  }
  const bool inner = static_cast<std::size_t>(layer) + 1 == L;
  const LayerFuncs F = bessel_at(z, N, !inner);
  for (int n = -N; n <= N; ++n) {
    const int m = std::abs(n);
    const auto& [alpha, beta] = s.interior[n + N][layer];
    const cplx e = std::exp(kI * (n * theta)) * signed_factor(n);
    cplx f = alpha * F.J.f[m], df = alpha * F.J.df[m];
    if (!inner) {
      f += beta * F.Y.f[m];
      df += beta * F.Y.df[m];
    }
    v.u += f * e;
    v.ur += kl * df * e;
    v.ut += kI * static_cast<double>(n) * f * e;
  }
  return v;
}

int layer_for_side(const DiskScatterer& s, double r, int side) {
  if (side > 0) return s.layer_of(r);
  for (std::size_t j = 0; j < s.layers(); ++j) {
    const double inner = j + 1 < s.layers() ? s.radii[j + 1] : 0.0;
    if (r > inner && r <= s.radii[j]) return static_cast<int>(j);
  }
  return -1;
}

}  // namespace

void DiskScatterer::validate() const {
  if (radii.empty()) throw DomainError("disk scatterer needs at least one layer");
  if (q_values.size() != radii.size() || etas.size() != radii.size())
    throw DomainError("disk scatterer needs one q and one eta per layer");
  for (std::size_t j = 0; j < radii.size(); ++j) {
    if (!(radii[j] > 0.0) || !std::isfinite(radii[j])) throw DomainError("radii must be positive");
    if (j > 0 && !(radii[j] < radii[j - 1])) throw DomainError("radii must be strictly decreasing");
    if (q_values[j] == cplx{}) throw DomainError("q must be nonzero in every layer");
  }
}

int DiskScatterer::layer_of(double r) const {
  if (r >= radii[0]) return -1;
  for (std::size_t j = 1; j < radii.size(); ++j)
    if (r >= radii[j]) return static_cast<int>(j - 1);
  return static_cast<int>(radii.size()) - 1;
}

int default_truncation(const DiskScatterer& s, double k) {
  return static_cast<int>(std::ceil(k * s.radii.at(0))) + 15;
}

ModalSolution mie_solve(const DiskScatterer& s, double k, const Incident& incident, int N) {
  s.validate();
  incident.validate();
  if (std::abs(incident.k - k) > 1e-14 * k) throw DomainError("incident wavenumber differs from k");
  if (incident.kind == Incident::Kind::PointSource && !(norm(incident.z0) > s.radii[0]))
    throw DomainError("point source lies inside the scatterer's circumdisk");

  ModalSolution sol;
  sol.scatterer = s;
  sol.incident = incident;
  sol.k = k;
  sol.N = N < 0 ? default_truncation(s, k) : N;
  const int M = sol.N;
  const int L = static_cast<int>(s.layers());
  sol.c = incident.modal(M);

  // Bessel values at every interface, for the layer outside and the layer inside.
  struct Interface {
    LayerFuncs out, in;
    Radial H;
  };
  std::vector<Interface> itf(L);
  for (int i = 0; i < L; ++i) {
    const double R = s.radii[i];
    if (i == 0) {
      itf[i].out = bessel_at(k * R, M, false);
      itf[i].H = hankel_at(k * R, M);
    } else {
      itf[i].out = bessel_at(layer_k(sol, i - 1) * R, M, true);
    }
    itf[i].in = bessel_at(layer_k(sol, i) * R, M, i + 1 < L);
  }

  const int dim = 2 * L;
  const auto alpha_idx = [&](int j) { return 1 + 2 * j; };
  const auto beta_idx = [&](int j) { return j + 1 < L ? 2 + 2 * j : -1; };

  // Transfer solution for unit incident coefficient, per order m = |n|.
  struct Transfer {
    Eigen::VectorXcd x;
  };
  const auto transfer = parallel_map<Transfer>(M + 1, [&](std::size_t mm) {
    const int m = static_cast<int>(mm);
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(dim, dim);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(dim);
    for (int i = 0; i < L; ++i) {
      const cplx eta = s.etas[i];
      const int rc = 2 * i, rj = 2 * i + 1;
      const cplx kin = layer_k(sol, i), kout = layer_k(sol, i - 1);
      // Inner side.
      A(rc, alpha_idx(i)) -= itf[i].in.J.f[m];
      A(rj, alpha_idx(i)) += kin * itf[i].in.J.df[m];
      if (beta_idx(i) >= 0) {
        A(rc, beta_idx(i)) -= itf[i].in.Y.f[m];
        A(rj, beta_idx(i)) += kin * itf[i].in.Y.df[m];
      }
      // Outer side.
      if (i == 0) {
        A(rc, 0) += itf[0].H.f[m];
        A(rj, 0) -= kout * itf[0].H.df[m] + eta * itf[0].H.f[m];
        rhs(rc) = -itf[0].out.J.f[m];
        rhs(rj) = kout * itf[0].out.J.df[m] + eta * itf[0].out.J.f[m];
      } else {
        const int ao = alpha_idx(i - 1), bo = beta_idx(i - 1);
        A(rc, ao) += itf[i].out.J.f[m];
        A(rj, ao) -= kout * itf[i].out.J.df[m] + eta * itf[i].out.J.f[m];
        A(rc, bo) += itf[i].out.Y.f[m];
        A(rj, bo) -= kout * itf[i].out.Y.df[m] + eta * itf[i].out.Y.f[m];
      }
    }
    Eigen::VectorXd scale(dim);
    for (int c = 0; c < dim; ++c) {
      const double mx = A.col(c).cwiseAbs().maxCoeff();
      scale(c) = mx > 0 ? 1.0 / mx : 1.0;
    }
    const Eigen::MatrixXcd As = A * scale.asDiagonal();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(As);
    const auto sv = svd.singularValues();
    if (!(sv(dim - 1) > 1e-14 * sv(0)))
      throw SolverError("resonance: mode n = " + std::to_string(m) + " matching matrix is singular at k = " +
                        format_double(k));
    Eigen::VectorXcd y = As.fullPivLu().solve(rhs);
    return Transfer{scale.asDiagonal() * y};
  });

  sol.b.resize(2 * M + 1);
  sol.interior.assign(2 * M + 1, std::vector<std::pair<cplx, cplx>>(L));
  for (int n = -M; n <= M; ++n) {
    const auto& x = transfer[std::abs(n)].x;
    const cplx c = sol.c[n + M];
    sol.b[n + M] = c * x(0);
    for (int j = 0; j < L; ++j)
      sol.interior[n + M][j] = {c * x(alpha_idx(j)), beta_idx(j) >= 0 ? c * x(beta_idx(j)) : cplx{}};
  }

  // Residuals of the unit-coefficient problems.
  for (int m = 0; m <= M; ++m) {
    ModalSolution unit;
    unit.scatterer = s;
    unit.k = k;
    unit.N = M;
    unit.c.assign(2 * M + 1, cplx{});
    unit.c[m + M] = 1.0;
    unit.b.assign(2 * M + 1, cplx{});
    unit.interior.assign(2 * M + 1, std::vector<std::pair<cplx, cplx>>(L));
    unit.b[m + M] = transfer[m].x(0);
    for (int j = 0; j < L; ++j)
      unit.interior[m + M][j] = {transfer[m].x(alpha_idx(j)),
                                 beta_idx(j) >= 0 ? transfer[m].x(beta_idx(j)) : cplx{}};
    for (const auto& r : transmission_residuals(unit, m))
      sol.max_residual = std::max({sol.max_residual, r[0], r[1]});
  }
  return sol;
}

std::vector<std::array<double, 2>> transmission_residuals(const ModalSolution& sol, int n) {
  const int N = sol.N;
  if (std::abs(n) > N) throw DomainError("mode outside the truncation");
  const int m = std::abs(n);
  const auto& s = sol.scatterer;
  const int L = static_cast<int>(s.layers());
  std::vector<std::array<double, 2>> out;
  for (int i = 0; i < L; ++i) {
    const double R = s.radii[i];
    // Outer side terms.
    std::vector<cplx> uo, duo, ui, dui;
    if (i == 0) {
      const auto J = bessel_at(sol.k * R, N, false).J;
      const auto H = hankel_at(sol.k * R, N);
      uo = {sol.c[n + N] * J.f[m], sol.b[n + N] * H.f[m]};
      duo = {sol.k * sol.c[n + N] * J.df[m], sol.k * sol.b[n + N] * H.df[m]};
    } else {
      const cplx kk = layer_k(sol, i - 1);
      const auto F = bessel_at(kk * R, N, true);
      const auto& [a, b] = sol.interior[n + N][i - 1];
      uo = {a * F.J.f[m], b * F.Y.f[m]};
      duo = {kk * a * F.J.df[m], kk * b * F.Y.df[m]};
    }
    {
      const cplx kk = layer_k(sol, i);
      const bool inner = i + 1 == L;
      const auto F = bessel_at(kk * R, N, !inner);
      const auto& [a, b] = sol.interior[n + N][i];
      ui = {a * F.J.f[m]};
      dui = {kk * a * F.J.df[m]};
      if (!inner) {
        ui.push_back(b * F.Y.f[m]);
        dui.push_back(kk * b * F.Y.df[m]);
      }
    }
    cplx so{}, si{}, dso{}, dsi{};
    double mag_c = 0, mag_j = 0;
    for (cplx v : uo) so += v, mag_c = std::max(mag_c, std::abs(v));
    for (cplx v : ui) si += v, mag_c = std::max(mag_c, std::abs(v));
    for (cplx v : duo) dso += v, mag_j = std::max(mag_j, std::abs(v));
    for (cplx v : dui) dsi += v, mag_j = std::max(mag_j, std::abs(v));
    mag_j = std::max(mag_j, std::abs(s.etas[i]) * mag_c);
    const double cont = mag_c > 0 ? std::abs(so - si) / mag_c : 0.0;
    const double jump = mag_j > 0 ? std::abs(dsi - dso - s.etas[i] * so) / mag_j : 0.0;
    out.push_back({cont, jump});
  }
  return out;
}

FarFieldPattern far_field(const ModalSolution& sol, const std::vector<double>& directions) {
  FarFieldPattern ff;
  ff.theta = directions;
  ff.values.resize(directions.size());
  const cplx pre = std::sqrt(2.0 / (kPi * sol.k)) * std::exp(-kI * (kPi / 4));
  static const cplx mi[4] = {1.0, -kI, -1.0, kI};
  for (std::size_t t = 0; t < directions.size(); ++t) {
    cplx s{};
    for (int n = -sol.N; n <= sol.N; ++n)
      s += sol.b[n + sol.N] * mi[((n % 4) + 4) % 4] * std::exp(kI * (n * directions[t]));
    ff.values[t] = pre * s;
  }
  return ff;
}

FieldSample field_sample(const ModalSolution& sol, const Vec2& x) {
  const double r = norm(x);
  const double th = std::atan2(x.y, x.x);
  const int layer = sol.scatterer.layer_of(r);
  FieldSample out{};
  if (r == 0.0) {
    const int N = sol.N;
    const cplx kl = layer_k(sol, layer);
    out.value = sol.interior[N][layer].first;
    if (N >= 1) {
      const cplx ap = sol.interior[N + 1][layer].first, am = sol.interior[N - 1][layer].first;
      out.gradient = {0.5 * kl * (ap - am), 0.5 * kl * kI * (ap + am)};
    }
    return out;
  }
  const SeriesValue v = layer_series(sol, layer, r, th);
  const double c = std::cos(th), s = std::sin(th);
  out.value = v.u;
  out.gradient = {c * v.ur - s * v.ut / r, s * v.ur + c * v.ut / r};
  if (layer < 0) {
    out.value += sol.incident.value(x);
    const auto g = sol.incident.gradient(x);
    out.gradient[0] += g[0];
    out.gradient[1] += g[1];
  }
  return out;
}

std::vector<cplx> field_eval(const ModalSolution& sol, const std::vector<Vec2>& points) {
  return parallel_map<cplx>(points.size(), [&](std::size_t i) { return field_sample(sol, points[i]).value; });
}

cplx scattered_field(const ModalSolution& sol, const Vec2& x) {
  const double r = norm(x);
  if (sol.scatterer.layer_of(r) >= 0) throw DomainError("scattered field is defined outside the scatterer");
  return layer_series(sol, -1, r, std::atan2(x.y, x.x)).u;
}

std::pair<cplx, cplx> radial_trace(const ModalSolution& sol, double r, double theta, int side) {
  const int layer = layer_for_side(sol.scatterer, r, side);
  const SeriesValue v = layer_series(sol, layer, r, theta);
  cplx u = v.u, ur = v.ur;
  if (layer < 0) {
    const Vec2 x{r * std::cos(theta), r * std::sin(theta)};
    u += sol.incident.value(x);
    const auto g = sol.incident.gradient(x);
    ur += g[0] * std::cos(theta) + g[1] * std::sin(theta);
  }
  return {u, ur};
}

}  // namespace condscat::disk
