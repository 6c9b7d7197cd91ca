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

#include "condscat/scatter_fem.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <map>

#include "condscat/parallel.hpp"
#include "condscat/quadrature.hpp"
#include "condscat/specfun.hpp"

namespace condscat::fem {

namespace {

using Triplet = Eigen::Triplet<cplx>;
using SpMat = Eigen::SparseMatrix<cplx>;

struct Contribution {
  std::vector<Triplet> a;
  std::vector<std::pair<int, cplx>> b;
};

double angle_of(const Vec2& p) {
  const double a = std::atan2(p.y, p.x);
  return a < 0 ? a + 2 * kPi : a;
}

// Integrals of the periodic hat functions at sorted angles against e^{-i n theta}.
cplx hat_moment(const std::vector<double>& th, std::size_t i, int n) {
  const std::size_t M = th.size();
  const double prev = i == 0 ? th[M - 1] - 2 * kPi : th[i - 1];
  const double next = i + 1 == M ? th[0] + 2 * kPi : th[i + 1];
  const double dm = th[i] - prev, dp = next - th[i];
  if (n == 0) return 0.5 * (dm + dp);
  const double nn = static_cast<double>(n) * n;
  const auto e = [n](double t) { return std::exp(cplx{0.0, -n * t}); };
  return (e(th[i]) - e(prev)) / (nn * dm) + (e(th[i]) - e(next)) / (nn * dp);
}

// k H_n'(k r) / H_n(k r) for n = 0..N.
std::vector<cplx> dtn_ratios(double k, double r, int N) {
  const auto H = specfun::hankel1_seq(N + 1, k * r);
  std::vector<cplx> out(N + 1);
  out[0] = -k * H[1] / H[0];
  for (int n = 1; n <= N; ++n) out[n] = k * (0.5 * (H[n - 1] - H[n + 1])) / H[n];
  return out;
}

std::array<Vec2, 3> bary_gradients(const Vec2& a, const Vec2& b, const Vec2& c, double area2) {
  return {Vec2{b.y - c.y, c.x - b.x} * (1.0 / area2), Vec2{c.y - a.y, a.x - c.x} * (1.0 / area2),
          Vec2{a.y - b.y, b.x - a.x} * (1.0 / area2)};
}

}  // namespace

FemSolution solve(std::shared_ptr<const Mesh> mesh, const Scatterer& s, double k, const Incident& incident,
                  const FemOptions& options) {
  if (!mesh) throw DomainError("no mesh");
  incident.validate();
  if (std::abs(incident.k - k) > 1e-14 * k) throw DomainError("incident wavenumber differs from k");
  if (mesh->h > 2 * kPi / k / 10.0) throw DomainError("mesh is coarser than a tenth of the wavelength");
  FemSolution sol;
  sol.mesh = mesh;
  sol.scatterer = s;
  sol.layout = make_layout(s, mesh->h);
  sol.k = k;
  sol.incident = incident;
  if (incident.kind == Incident::Kind::PointSource && !(norm(incident.z0) > sol.layout.radius))
    throw DomainError("point source lies inside the scatterer's circumdisk");

  const Mesh& m = *mesh;
  const int nn = static_cast<int>(m.nodes.size());
  const double k2 = k * k;
  const auto& rule = quad::triangle_rule7();

  // Volume terms, in fixed chunks merged in order.
  const std::size_t nt = m.triangles.size();
  const std::size_t chunk = 2048;
  const std::size_t nchunks = (nt + chunk - 1) / chunk;
  auto parts = parallel_map<Contribution>(nchunks, [&](std::size_t c) {
    Contribution out;
    for (std::size_t t = c * chunk; t < std::min(nt, (c + 1) * chunk); ++t) {
      const auto& v = m.triangles[t];
      const Vec2 p[3] = {m.nodes[v[0]], m.nodes[v[1]], m.nodes[v[2]]};
      const double area2 = cross(p[1] - p[0], p[2] - p[0]);
      const double area = 0.5 * area2;
      const auto g = bary_gradients(p[0], p[1], p[2], area2);
      const int reg = m.region[t];
      cplx mass[3][3] = {};
      cplx load[3] = {};
      for (std::size_t qp = 0; qp < rule.weights.size(); ++qp) {
        const auto& l = rule.bary[qp];
        const Vec2 x = p[0] * l[0] + p[1] * l[1] + p[2] * l[2];
        const cplx q = reg < 0 ? cplx{1.0} : sol.layout.region_index[reg](x);
        const double w = rule.weights[qp] * area;
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) mass[i][j] += w * q * l[i] * l[j];
        if (reg >= 0 && q != cplx{1.0}) {
          const cplx src = k2 * (q - 1.0) * incident.value(x) * w;
          for (int i = 0; i < 3; ++i) load[i] += src * l[i];
        }
      }
      const double blend = options.mass_blend;
      for (int i = 0; i < 3; ++i) {
        const cplx qi = reg < 0 ? cplx{1.0} : sol.layout.region_index[reg](p[i]);
        for (int j = 0; j < 3; ++j) {
          const cplx mij = (1 - blend) * mass[i][j] + (i == j ? blend * area / 3.0 * qi : cplx{});
          out.a.emplace_back(v[i], v[j], area * dot(g[i], g[j]) - k2 * mij);
        }
        if (load[i] != cplx{}) out.b.push_back({v[i], load[i]});
      }
    }
    return out;
  });

  // Conductive interface terms.
  Contribution itf;
  {
    const double gx[3] = {0.5 - std::sqrt(0.15), 0.5, 0.5 + std::sqrt(0.15)};
    const double gw[3] = {5.0 / 18, 8.0 / 18, 5.0 / 18};
    for (const auto& e : m.edges) {
      if (e.tag == kTruncationTag) continue;
      const cplx eta = sol.layout.tag_eta.at(e.tag);
      if (eta == cplx{}) continue;
      const Vec2 a = m.nodes[e.a], b = m.nodes[e.b];
      const double L = dist(a, b);
      const int id[2] = {e.a, e.b};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) itf.a.emplace_back(id[i], id[j], -eta * L * (i == j ? 2.0 : 1.0) / 6.0);
      cplx fa{}, fb{};
      for (int qp = 0; qp < 3; ++qp) {
        const cplx ui = incident.value(a * (1 - gx[qp]) + b * gx[qp]) * gw[qp] * L * eta;
        fa += ui * (1 - gx[qp]);
        fb += ui * gx[qp];
      }
      itf.b.push_back({e.a, fa});
      itf.b.push_back({e.b, fb});
    }
  }

  // Dirichlet-to-Neumann block on the truncation nodes.
  // First dropped mode, decayed from the scatterer radius out to the truncation circle.
  const int n_cap = 4 * static_cast<int>(std::ceil(k * m.Rt)) + 200;
  const double rs = std::max(sol.layout.radius, 1e-3);
  const auto tail = [&](int n) {
    try {
      const cplx hs = specfun::hankel1_seq(n + 1, k * rs)[n + 1];
      return std::abs(specfun::hankel1_seq(n + 1, k * m.Rt)[n + 1] / hs);
    } catch (const OverflowError&) {
      return 0.0;  // H_{n+1}(k rs) is astronomically large
    }
  };
  int N = options.n_dtn;
  if (N < 0) {
    N = static_cast<int>(std::ceil(k * m.Rt)) + 20;
    while (N < n_cap && tail(N) > 1e-10) N += 2;
  }
  sol.n_dtn = N;
  sol.dtn_tail = tail(N);
  sol.dtn_warning = sol.dtn_tail > 1e-8;
  const auto kappa = dtn_ratios(k, m.Rt, N);
  const std::size_t nb = m.boundary.size();
  std::vector<double> th(nb);
  for (std::size_t i = 0; i < nb; ++i) th[i] = angle_of(m.nodes[m.boundary[i]]);
  Eigen::MatrixXcd C(nb, 2 * N + 1);  // C(i, n + N) = int hat_i e^{-i n theta}
  for (std::size_t i = 0; i < nb; ++i)
    for (int n = -N; n <= N; ++n) C(i, n + N) = hat_moment(th, i, n);
  Contribution dtn;
  for (std::size_t i = 0; i < nb; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      cplx s{};
      for (int n = -N; n <= N; ++n) s += kappa[std::abs(n)] * C(j, n + N) * C(i, -n + N);
      dtn.a.emplace_back(m.boundary[i], m.boundary[j], -m.Rt / (2 * kPi) * s);
    }
  }

  std::vector<Triplet> trip;
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(nn);
  parts.push_back(std::move(itf));
  parts.push_back(std::move(dtn));
  std::size_t total = 0;
  for (const auto& p : parts) total += p.a.size();
  trip.reserve(total);
  for (const auto& p : parts) {
    trip.insert(trip.end(), p.a.begin(), p.a.end());
    for (const auto& [i, v] : p.b) rhs(i) += v;
  }
  SpMat A(nn, nn);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();

  if (rhs.norm() == 0.0) {
    sol.us = Eigen::VectorXcd::Zero(nn);
  } else {
    Eigen::SparseLU<SpMat> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success) throw SolverError("FEM factorization failed at k = " + std::to_string(k));
    sol.us = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !sol.us.allFinite())
      throw SolverError("FEM solve failed at k = " + std::to_string(k));
    sol.residual = (A * sol.us - rhs).norm() / rhs.norm();
  }

  sol.locator = std::make_shared<MeshLocator>(m);
  return sol;
}

cplx FemSolution::scattered(const Vec2& x) const {
  const auto loc = locator->locate(x);
  if (!loc) throw DomainError("point outside the FEM mesh");
  const auto& v = mesh->triangles[loc->first];
  const auto& l = loc->second;
  return l[0] * us(v[0]) + l[1] * us(v[1]) + l[2] * us(v[2]);
}

cplx FemSolution::total(const Vec2& x) const { return scattered(x) + incident.value(x); }

std::array<cplx, 2> FemSolution::total_gradient(const Vec2& x) const {
  const auto loc = locator->locate(x);
  if (!loc) throw DomainError("point outside the FEM mesh");
  const auto& v = mesh->triangles[loc->first];
  const Vec2 p[3] = {mesh->nodes[v[0]], mesh->nodes[v[1]], mesh->nodes[v[2]]};
  const auto g = bary_gradients(p[0], p[1], p[2], cross(p[1] - p[0], p[2] - p[0]));
  auto gi = incident.gradient(x);
  for (int i = 0; i < 3; ++i) {
    gi[0] += g[i].x * us(v[i]);
    gi[1] += g[i].y * us(v[i]);
  }
  return gi;
}

double FemSolution::scattered_l2() const {
  double s = 0.0;
  for (std::size_t t = 0; t < mesh->triangles.size(); ++t) {
    const auto& v = mesh->triangles[t];
    const cplx a = us(v[0]), b = us(v[1]), c = us(v[2]);
    // Exact integral of |P1 interpolant|^2.
    const double q = std::norm(a) + std::norm(b) + std::norm(c) + (a * std::conj(b)).real() +
                     (b * std::conj(c)).real() + (c * std::conj(a)).real();
    s += mesh->triangle_area(t) * q / 6.0;
  }
  return std::sqrt(s);
}

FarFieldPattern near_to_far(const FemSolution& sol, double radius, const std::vector<double>& directions) {
  const Mesh& m = *sol.mesh;
  const double k = sol.k;
  if (!(radius > sol.layout.radius)) throw DomainError("extraction circle intersects the scatterer");
  const std::size_t Mt = m.boundary.size();
  const double inner = m.Rt * std::cos(kPi / std::max<std::size_t>(Mt, 3) * 2.0);
  if (!(radius < inner)) throw DomainError("extraction circle reaches the truncation boundary");

  const int Nf = static_cast<int>(std::ceil(k * radius)) + 20;
  const int M = std::max(256, 4 * (2 * Nf + 1));
  std::vector<cplx> u(M);
  for (int j = 0; j < M; ++j) {
    const double t = 2 * kPi * j / M;
    u[j] = sol.scattered({radius * std::cos(t), radius * std::sin(t)});
  }
  const auto kappa = dtn_ratios(k, radius, Nf);
  std::vector<cplx> ur(M, cplx{});
  for (int n = -Nf; n <= Nf; ++n) {
    cplx c{};
    for (int j = 0; j < M; ++j) c += u[j] * std::exp(cplx{0.0, -2 * kPi * n * j / M});
    c *= kappa[std::abs(n)] / static_cast<double>(M);
    for (int j = 0; j < M; ++j) ur[j] += c * std::exp(cplx{0.0, 2 * kPi * n * j / M});
  }
  FarFieldPattern ff;
  ff.theta = directions;
  ff.values.resize(directions.size());
  const cplx pre = std::exp(cplx{0.0, kPi / 4}) / std::sqrt(8 * kPi * k);
  for (std::size_t d = 0; d < directions.size(); ++d) {
    const Vec2 xh{std::cos(directions[d]), std::sin(directions[d])};
    cplx s{};
    for (int j = 0; j < M; ++j) {
      const double t = 2 * kPi * j / M;
      const Vec2 nu{std::cos(t), std::sin(t)};
      const cplx e = std::exp(cplx{0.0, -k * radius * dot(xh, nu)});
      s += (-kI * k * dot(xh, nu) * u[j] - ur[j]) * e;
    }
    ff.values[d] = pre * s * (2 * kPi * radius / M);
  }
  return ff;
}

FluxJump flux_jump(const FemSolution& sol, int tag) {
  const Mesh& m = *sol.mesh;
  if (tag < 0 || tag >= static_cast<int>(sol.layout.tag_eta.size())) throw DomainError("unknown interface tag");
  const cplx eta = sol.layout.tag_eta[tag];
  // Triangles on both sides of every interface piece.
  std::map<std::pair<int, int>, std::vector<int>> sides;
  for (const auto& e : m.edges)
    if (e.tag == tag) sides[{std::min(e.a, e.b), std::max(e.a, e.b)}];
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto& v = m.triangles[t];
    for (int i = 0; i < 3; ++i) {
      const auto key = std::make_pair(std::min(v[i], v[(i + 1) % 3]), std::max(v[i], v[(i + 1) % 3]));
      const auto it = sides.find(key);
      if (it != sides.end()) it->second.push_back(static_cast<int>(t));
    }
  }
  const auto grad = [&](int t, const Vec2& x) {
    const auto& v = m.triangles[t];
    const Vec2 p[3] = {m.nodes[v[0]], m.nodes[v[1]], m.nodes[v[2]]};
    const auto g = bary_gradients(p[0], p[1], p[2], cross(p[1] - p[0], p[2] - p[0]));
    auto gi = sol.incident.gradient(x);
    for (int i = 0; i < 3; ++i) {
      gi[0] += g[i].x * sol.us(v[i]);
      gi[1] += g[i].y * sol.us(v[i]);
    }
    return gi;
  };
  FluxJump out;
  double e2 = 0, r2 = 0;
  for (const auto& [key, tris] : sides) {
    if (tris.size() != 2) continue;
    const Vec2 a = m.nodes[key.first], b = m.nodes[key.second];
    const Vec2 mid = (a + b) * 0.5;
    const double L = dist(a, b);
    Vec2 nu{b.y - a.y, a.x - b.x};
    nu = nu * (1.0 / L);
    const auto& vB = m.triangles[tris[1]];
    const Vec2 cB = (m.nodes[vB[0]] + m.nodes[vB[1]] + m.nodes[vB[2]]) * (1.0 / 3.0);
    if (dot(cB - mid, nu) < 0) nu = -nu;  // from triangle A towards triangle B
    const auto gA = grad(tris[0], mid), gB = grad(tris[1], mid);
    const cplx jump = (gA[0] - gB[0]) * nu.x + (gA[1] - gB[1]) * nu.y;
    const cplx u = 0.5 * (sol.us(key.first) + sol.us(key.second)) + sol.incident.value(mid);
    e2 += L * std::norm(jump - eta * u);
    r2 += L * std::norm(eta * u);
  }
  out.error = std::sqrt(e2);
  out.reference = std::sqrt(r2);
  return out;
}

}  // namespace condscat::fem
