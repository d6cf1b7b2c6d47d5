// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <string>

#include "parallel.hpp"
#include "raisr/error.hpp"
#include "raisr/learner.hpp"

namespace raisr {
namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void matvec(std::span<const double> q, const std::vector<double>& x, std::vector<double>& out) {
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = q.data() + i * n;
    double s = 0;
    for (std::size_t j = 0; j < n; ++j) s += row[j] * x[j];
    out[i] = s;
  }
}

double true_residual(std::span<const double> q, std::span<const double> v, const std::vector<double>& x,
                     double v_norm) {
  std::vector<double> ax(x.size());
  matvec(q, x, ax);
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (v[i] - ax[i]) * (v[i] - ax[i]);
  return std::sqrt(s) / v_norm;
}

}  // namespace

CgResult cg_solve(std::span<const double> q, std::span<const double> v, const CgOptions& options) {
  const std::size_t n = v.size();
  if (q.size() != n * n) fail_usage("cg_solve: matrix and vector sizes disagree");
  const int max_iter = options.max_iter > 0 ? options.max_iter : int(4 * n);

  CgResult result;
  result.x.assign(n, 0.0);
  std::vector<double> r(v.begin(), v.end());
  const double v_norm = std::sqrt(dot(r, r));
  if (!std::isfinite(v_norm)) fail_numeric("cg_solve: right-hand side is not finite");
  if (v_norm == 0.0) return result;

  // Plain CG, restarted from the true residual whenever the recursively
  // updated one claims convergence that the true one does not confirm.
  std::vector<double> x(n, 0.0), p(n), ap(n);
  double best = 1.0;
  int it = 0;
  while (it < max_iter) {
    p = r;
    double rr = dot(r, r);
    bool claimed = false;
    while (it < max_iter) {
      matvec(q, p, ap);
      const double pap = dot(p, ap);
      if (!std::isfinite(pap)) fail_numeric("cg_solve: non-finite curvature");
      if (pap <= 0.0) break;  // not positive definite along p
      const double alpha = rr / pap;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * ap[i];
      }
      ++it;
      const double rr_new = dot(r, r);
      if (!std::isfinite(rr_new)) fail_numeric("cg_solve: residual became non-finite");
      if (std::sqrt(rr_new) / v_norm <= options.tol) {
        claimed = true;
        break;
      }
      const double beta = rr_new / rr;
      for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
      rr = rr_new;
    }
    const double rel = true_residual(q, v, x, v_norm);
    if (rel < best) {
      best = rel;
      result.x = x;
    }
    if (!claimed || rel <= options.tol) break;
    matvec(q, x, ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = v[i] - ap[i];
  }
  result.iterations = it;
  result.relative_residual = best;
  result.converged = best <= options.tol;
  return result;
}

SolveResult solve_filters(const AccumulatorBank& bank, const SolveOptions& options) {
  if (!(options.ridge >= 0) || !(options.thin_ridge >= 0)) fail_usage("ridge must be non-negative");
  const BankConfig& cfg = bank.config();
  const int n = cfg.taps();
  FilterBank out = FilterBank::delta(cfg);
  std::vector<BucketReport> reports(cfg.buckets());

  detail::parallel_for(cfg.buckets(), options.threads, [&](int b) {
    BucketReport& rep = reports[b];
    rep.count = bank.count(b);
    if (rep.count == 0) {
      rep.passthrough = true;
      return;
    }
    std::vector<double> q = bank.dense_q(b);
    double tau = 0;
    for (int i = 0; i < n; ++i) tau = std::max(tau, q[std::size_t(i) * n + i]);
    if (!std::isfinite(tau)) fail_numeric("non-finite normal equations in bucket " + std::to_string(b));
    if (tau == 0.0) {
      rep.passthrough = true;  // every patch was zero; nothing to learn
      return;
    }
    rep.thin = rep.count < std::uint64_t(options.thin_factor) * std::uint64_t(n);
    rep.ridge = rep.thin ? std::max(options.ridge, options.thin_ridge) : options.ridge;
    for (int i = 0; i < n; ++i) q[std::size_t(i) * n + i] += rep.ridge * tau;
    const CgResult cg = cg_solve(q, bank.v(b), options.cg);
    rep.iterations = cg.iterations;
    rep.residual = cg.relative_residual;
    rep.converged = cg.converged;
    std::copy(cg.x.begin(), cg.x.end(), out.filter(b).begin());
  });
  return {std::move(out), std::move(reports)};
}

}  // namespace raisr
