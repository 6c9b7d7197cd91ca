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

#include "condscat/ucp.hpp"

#include <cmath>
#include <algorithm>
#include <limits>
#include <numeric>

#include "condscat/parallel.hpp"

namespace condscat::ucp {

namespace {

cplx expi(double t) { return {std::cos(t), std::sin(t)}; }

/// tau^{ell+2} * int_0^{r0} r^s e^{-mu r} dr with mu = tau * mu_hat, kept finite for large s.
cplx scaled_moment(int s, cplx mu_hat, double tau, double r0, int ell) {
  const cplx g = specfun::lower_incomplete_gamma(s + 1.0, tau * mu_hat * r0);
  return std::pow(tau, ell + 1 - s) * g / std::pow(mu_hat, s + 1);
}

nlohmann::json cjson(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }
nlohmann::json vjson(const Eigen::Vector2cd& v) { return nlohmann::json::array({cjson(v(0)), cjson(v(1))}); }

template <class T>
nlohmann::json opt_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

double det_step(double beta, int ell) {
  if (ell < 0) throw DomainError("step index must be non-negative");
  return 2.0 * (std::cos(beta) - std::cos((2.0 * ell + 3.0) * beta));
}

Eigen::Matrix2cd step_matrix(double theta_m, double theta_M, int ell) {
  const double K = 2.0 * ell + 3.0;
  Eigen::Matrix2cd B;
  B << expi(-theta_m) + expi(-theta_M), expi(-K * theta_m) + expi(-K * theta_M),
      expi(K * theta_m) + expi(K * theta_M), expi(theta_m) + expi(theta_M);
  return B;
}

std::vector<double> step_zero_set(int ell) {
  if (ell < 0) throw DomainError("step index must be non-negative");
  std::vector<double> z;
  for (int a = 1; a <= ell; ++a) z.push_back(a * kPi / (ell + 1));
  for (int s = 1; s <= ell + 1; ++s) z.push_back(s * kPi / (ell + 2));
  std::sort(z.begin(), z.end());
  return z;
}

std::string Witness::describe() const {
  const int g = std::gcd(numerator, denominator);
  return std::to_string(numerator / g) + "*pi/" + std::to_string(denominator / g) + " (" +
         std::to_string(numerator) + "/" + std::to_string(denominator) + ")";
}

std::optional<Witness> rational_witness(double beta, int ell, double tol) {
  for (int den : {ell + 1, ell + 2}) {
    const int num = static_cast<int>(std::lround(beta * den / kPi));
    if (num >= 1 && num < den && std::abs(beta - num * kPi / den) < tol) return Witness{num, den};
  }
  return std::nullopt;
}

Eigen::Matrix2d gradient_matrix_m1(double tm, double tM) {
  const double cm = std::cos(tm), sm = std::sin(tm), cM = std::cos(tM), sM = std::sin(tM);
  const double c2m = std::cos(2 * tm), s2m = std::sin(2 * tm);
  const double c2M = std::cos(2 * tM), s2M = std::sin(2 * tM);
  Eigen::Matrix2d m;
  m << cM * c2m + cm * c2M, sM * c2m + sm * c2M, cM * s2m + cm * s2M, sM * s2m + sm * s2M;
  return m;
}

Eigen::Matrix2d gradient_matrix_m2(double tm, double tM) {
  Eigen::Matrix2d m = gradient_matrix_m1(tm, tM);
  m.row(0).swap(m.row(1));
  return m;
}

GradientDet det_gradient(double beta) {
  const double s = std::sin(beta);
  const double d = -2.0 * s * s * std::cos(beta);
  return {d, -d};
}

Eigen::Matrix2cd param_recovery_matrix(double tm, double tM) {
  const auto plus_a = [](double t) { return cplx{-std::sin(t), 3 * std::cos(t)} * expi(-3 * t); };
  const auto plus_b = [](double t) { return cplx{std::cos(t), 3 * std::sin(t)} * expi(-3 * t); };
  const auto minus_a = [](double t) { return -cplx{std::sin(t), 3 * std::cos(t)} * expi(3 * t); };
  const auto minus_b = [](double t) { return cplx{std::cos(t), -3 * std::sin(t)} * expi(3 * t); };
  Eigen::Matrix2cd B;
  B << plus_a(tM) - plus_a(tm), plus_b(tM) - plus_b(tm), minus_a(tM) - minus_a(tm),
      minus_b(tM) - minus_b(tm);
  return B;
}

cplx det_param_recovery(double beta) {
  const double c = std::cos(2 * beta) - 1.0;
  return {0.0, 8.0 * c * c};
}

double param_recovery_identity(double beta) {
  return 20 * std::sin(3 * beta) * std::sin(beta) + 12 * std::cos(3 * beta) * std::cos(beta) - 12;
}

StepSystem assemble_step_system(const geometry::Sector& sector, cplx eta, int ell, double tau,
                                double gamma1, const specfun::FourierBesselField* trial,
                                std::optional<double> phi) {
  sector.validate();
  if (ell < 0) throw DomainError("step index must be non-negative");
  if (eta == cplx{}) throw DomainError("eta vanishes on the corner; the step system is void");
  if (!(tau > 0.0)) throw DomainError("tau must be positive");
  if (!(gamma1 > 0.0)) throw DomainError("gamma1 must be positive");

  StepSystem S;
  S.ell = ell;
  S.beta = sector.opening();
  S.phi = phi ? *phi : cgo::pick_direction(sector).params.phi;
  S.matrix = step_matrix(sector.theta_m, sector.theta_M, ell);
  S.rhs.setZero();
  S.lhs.setZero();

  const double sg = std::sqrt(gamma1);
  const double gamma_l2 = std::tgamma(ell + 2.0);
  const double thetas[2] = {sector.theta_m, sector.theta_M};
  // c_{n,p} = (-1)^p sqrt(gamma1)^{n+2p} / (2^{n+2p} p! (n+p)!), in logs to avoid overflow.
  const auto coef = [&](int n, int p) {
    const double lg = (n + 2 * p) * std::log(sg / 2) - std::lgamma(p + 1.0) - std::lgamma(n + p + 1.0);
    return (p % 2 ? -1.0 : 1.0) * std::exp(lg);
  };
  const double c_ell = coef(ell + 1, 0);

  for (int row = 0; row < 2; ++row) {
    cgo::CGOParams P{S.phi, row == 0 ? cgo::Perp::Plus : cgo::Perp::Minus, tau};
    const double sgn = row == 0 ? 1.0 : -1.0;
    S.row_scale(row) = gamma_l2 * expi(sgn * (ell + 2) * S.phi);
    for (int col = 0; col < 2; ++col) {
      cplx v{};
      for (double t : thetas) {
        const cplx mu_hat = P.mu(t) / tau;
        if (!(mu_hat.real() > 0.0)) throw DomainError("CGO phase does not decay on the corner");
        const double n_sign = col == 0 ? 1.0 : -1.0;
        v += expi(n_sign * (ell + 1) * t) * gamma_l2 / std::pow(mu_hat, ell + 2);
      }
      S.raw(row, col) = v;
    }
    if (!trial) continue;

    const int N = trial->order();
    const auto angular = [&](int n, double t) {
      const auto& [an, bn] = trial->coeffs[n];
      return an * expi(n * t) + bn * expi(-n * t);
    };
    cplx lhs{}, rhs{};
    for (double t : thetas) {
      const cplx mu_hat = P.mu(t) / tau;
      if (ell + 1 <= N) lhs += angular(ell + 1, t) * scaled_moment(ell + 1, mu_hat, tau, sector.r0, ell);
      for (int n = ell + 1; n <= N; ++n) {
        const cplx A = angular(n, t);
        if (A == cplx{}) continue;
        for (int p = (n == ell + 1 ? 1 : 0); p < 200; ++p) {
          const cplx term = coef(n, p) / c_ell * A * scaled_moment(n + 2 * p, mu_hat, tau, sector.r0, ell);
          rhs -= term;
          if (p > 0 && std::abs(term) < 1e-18 * (std::abs(rhs) + 1e-300)) break;
        }
      }
    }
    S.lhs(row) = lhs / S.row_scale(row);
    S.rhs(row) = rhs / S.row_scale(row);
  }
  return S;
}

cplx richardson_limit(const std::vector<double>& tau, const std::vector<cplx>& values, int levels) {
  if (tau.size() != values.size() || tau.empty()) throw DomainError("richardson: size mismatch");
  const std::size_t k = std::min<std::size_t>(levels + 1, tau.size());
  std::vector<cplx> T(values.end() - k, values.end());
  std::vector<double> h;
  for (auto it = tau.end() - k; it != tau.end(); ++it) h.push_back(1.0 / *it);
  // Neville's scheme for the interpolating polynomial in h = 1/tau, evaluated at h = 0.
  for (std::size_t j = 1; j < k; ++j)
    for (std::size_t i = 0; i + j < k; ++i) T[i] = (h[i] * T[i + 1] - h[i + j] * T[i]) / (h[i] - h[i + j]);
  return T[0];
}

UcpReport ucp_verify(const geometry::Sector& sector, cplx eta, double gamma1,
                     const specfun::FourierBesselField& coeffs,
                     const std::vector<double>& tau_grid, const UcpOptions& options) {
  sector.validate();
  if (tau_grid.size() < 2) throw DomainError("ucp_verify needs at least two tau values");
  for (std::size_t i = 1; i < tau_grid.size(); ++i)
    if (!(tau_grid[i] > tau_grid[i - 1])) throw DomainError("tau grid must be increasing");

  UcpReport R;
  R.beta = sector.opening();
  R.angle = geometry::classify_angle(R.beta, options.angle_bound);
  R.tau_grid = tau_grid;

  double cscale = 0.0;
  for (const auto& [a, b] : coeffs.coeffs) cscale = std::max({cscale, std::abs(a), std::abs(b)});
  const double hyp_tol = 1e-14 * std::max(cscale, 1.0);

  for (int ell = 0; ell <= options.max_step; ++ell) {
    StepReport s;
    s.ell = ell;
    const Eigen::Matrix2cd B = step_matrix(sector.theta_m, sector.theta_M, ell);
    s.det_numeric = std::abs(B.determinant());
    s.det_closed = det_step(R.beta, ell);
    Eigen::JacobiSVD<Eigen::Matrix2cd> svd(B);
    const auto sv = svd.singularValues();
    s.condition = sv(1) > 0 ? sv(0) / sv(1) : std::numeric_limits<double>::infinity();
    s.singular = s.det_numeric < options.singular_tol;
    s.witness = rational_witness(R.beta, ell);
    if (!coeffs.coeffs.empty() && std::abs(coeffs.coeffs[0].first + coeffs.coeffs[0].second) > hyp_tol)
      s.hypothesis_holds = false;
    for (int j = 1; j <= std::min(ell, coeffs.order()); ++j)
      if (std::abs(coeffs.coeffs[j].first) > hyp_tol || std::abs(coeffs.coeffs[j].second) > hyp_tol)
        s.hypothesis_holds = false;

    if (s.singular) {
      if (R.first_singular < 0) R.first_singular = ell;
      R.steps.push_back(s);
      continue;
    }

    const auto systems = parallel_map<StepSystem>(tau_grid.size(), [&](std::size_t i) {
      return assemble_step_system(sector, eta, ell, tau_grid[i], gamma1, &coeffs);
    });
    std::vector<cplx> lhs0, lhs1, rhs0, rhs1, lhs_raw, rhs_raw, mis_raw;
    for (std::size_t i = 0; i < systems.size(); ++i) {
      const auto& S = systems[i];
      const double damp = std::pow(tau_grid[i], -(ell + 2.0));
      lhs0.push_back(S.lhs(0));
      lhs1.push_back(S.lhs(1));
      rhs0.push_back(S.rhs(0));
      rhs1.push_back(S.rhs(1));
      lhs_raw.push_back(S.lhs.norm() * damp);
      rhs_raw.push_back(S.rhs.norm() * damp);
      mis_raw.push_back((S.lhs - S.rhs).norm() * damp);
    }
    s.rhs_limit << richardson_limit(tau_grid, rhs0), richardson_limit(tau_grid, rhs1);
    s.lhs_limit << richardson_limit(tau_grid, lhs0), richardson_limit(tau_grid, lhs1);
    const auto lu = B.fullPivLu();
    s.forced = lu.solve(s.rhs_limit);
    s.recovered = lu.solve(s.lhs_limit);
    s.residual = s.forced.norm();
    s.tolerance = 1e-8 * s.condition;
    s.forced_zero = s.residual < s.tolerance;

    const auto slope = [&](const std::vector<cplx>& v) -> std::optional<double> {
      try {
        return cgo::fit_decay(tau_grid, v).slope;
      } catch (const std::exception&) {
        return std::nullopt;
      }
    };
    s.lhs_slope = slope(lhs_raw);
    s.rhs_slope = slope(rhs_raw);
    s.mismatch_slope = slope(mis_raw);
    R.steps.push_back(s);
  }
  return R;
}

nlohmann::json UcpReport::to_json() const {
  nlohmann::json j;
  j["beta"] = beta;
  j["angle"] = {{"rational", angle.rational()},
                {"description", angle.describe()},
                {"bound", angle.bound},
                {"error", angle.error}};
  if (angle.rational()) {
    j["angle"]["p"] = angle.p;
    j["angle"]["q"] = angle.q;
  }
  j["tau_grid"] = tau_grid;
  j["first_singular"] = first_singular < 0 ? nlohmann::json(nullptr) : nlohmann::json(first_singular);
  j["all_nonsingular"] = all_nonsingular();
  auto& arr = j["steps"] = nlohmann::json::array();
  for (const auto& s : steps) {
    nlohmann::json e{{"ell", s.ell},
                     {"det", s.det_numeric},
                     {"det_closed_form", s.det_closed},
                     {"condition", s.condition},
                     {"singular", s.singular},
                     {"hypothesis_holds", s.hypothesis_holds}};
    e["witness"] = s.witness ? nlohmann::json(s.witness->describe()) : nlohmann::json(nullptr);
    if (!s.singular) {
      e["rhs_limit"] = vjson(s.rhs_limit);
      e["forced_solution"] = vjson(s.forced);
      e["residual"] = s.residual;
      e["tolerance"] = s.tolerance;
      e["forced_zero"] = s.forced_zero;
      e["lhs_limit"] = vjson(s.lhs_limit);
      e["recovered"] = vjson(s.recovered);
      e["lhs_slope"] = opt_json(s.lhs_slope);
      e["rhs_slope"] = opt_json(s.rhs_slope);
      e["mismatch_slope"] = opt_json(s.mismatch_slope);
    }
    arr.push_back(std::move(e));
  }
  return j;
}

}  // namespace condscat::ucp
