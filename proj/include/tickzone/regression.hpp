#pragma once

#include <tickzone/errors.hpp>
#include <tickzone/estimators.hpp>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tickzone {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  [[nodiscard]] bool contains(double x) const noexcept { return lo <= x && x <= hi; }
};

// sigma = p1 * eta*alpha*sqrt(M) + p2 * S*sqrt(M) + p3
struct RegressionFit {
  std::string asset_id;
  double p1 = 0.0;
  double p2 = 0.0;
  double p3 = 0.0;
  Interval p1_ci, p2_ci, p3_ci;
  double r2 = 0.0;
  std::size_t n_days = 0;
};

// Design row of one record: (eta*alpha*sqrt(M), S*sqrt(M), 1).
[[nodiscard]] inline std::array<double, 3> regressors(const DailyRecord& r) noexcept {
  const double root_m = std::sqrt(static_cast<double>(r.m_trades));
  return {r.eta_hat * r.alpha * root_m, r.avg_spread * root_m, 1.0};
}

// Ordinary least squares by column-pivoted Householder QR, classical
// homoskedastic standard errors and Student-t(n-3) 95% intervals.
[[nodiscard]] inline RegressionFit fit_spread_vol(std::span<const DailyRecord> records) {
  const std::size_t n = records.size();
  if (n < 4) {
    throw InsufficientDataError("regression needs at least 4 daily records, got " + std::to_string(n));
  }
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), 3);
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = regressors(records[i]);
    const auto k = static_cast<Eigen::Index>(i);
    x(k, 0) = row[0];
    x(k, 1) = row[1];
    x(k, 2) = row[2];
    y(k) = records[i].sigma_hat;
  }

  // Equilibrate columns so the rank threshold is scale free.
  Eigen::Vector3d scale;
  for (Eigen::Index j = 0; j < 3; ++j) {
    const double norm = x.col(j).norm();
    if (norm == 0.0) throw CollinearityError("regressor column " + std::to_string(j + 1) + " is zero");
    scale(j) = norm;
  }
  const Eigen::MatrixXd xs = x * scale.cwiseInverse().asDiagonal();

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xs);
  qr.setThreshold(1e-10);
  if (qr.rank() < 3) throw CollinearityError("regressors are collinear");

  const Eigen::Vector3d beta_s = qr.solve(y);
  const Eigen::Vector3d beta = beta_s.cwiseQuotient(scale);

  const Eigen::VectorXd resid = y - x * beta;
  const double rss = resid.squaredNorm();
  const double tss = (y.array() - y.mean()).matrix().squaredNorm();

  // (Xs' Xs)^-1 = P R^-1 R^-T P'
  const Eigen::Matrix3d r = qr.matrixR().topLeftCorner(3, 3).triangularView<Eigen::Upper>();
  const Eigen::Matrix3d r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::Matrix3d::Identity());
  const Eigen::Matrix3d perm = qr.colsPermutation();
  const Eigen::Matrix3d cov_s = perm * (r_inv * r_inv.transpose()) * perm.transpose();

  const auto dof = static_cast<double>(n - 3);
  const double s2 = rss / dof;
  const boost::math::students_t dist(dof);
  const double tq = boost::math::quantile(dist, 0.975);

  RegressionFit fit;
  fit.asset_id = records.front().asset_id;
  fit.n_days = n;
  fit.p1 = beta(0);
  fit.p2 = beta(1);
  fit.p3 = beta(2);
  std::array<Interval*, 3> cis{&fit.p1_ci, &fit.p2_ci, &fit.p3_ci};
  for (Eigen::Index j = 0; j < 3; ++j) {
    const double se = std::sqrt(std::max(0.0, s2 * cov_s(j, j))) / scale(j);
    *cis[static_cast<std::size_t>(j)] = {beta(j) - tq * se, beta(j) + tq * se};
  }
  if (tss > 0.0) {
    fit.r2 = std::clamp(1.0 - rss / tss, 0.0, 1.0);
  } else {
    fit.r2 = 1.0;
  }
  return fit;
}

struct FitOptions {
  bool split_regimes = false;    // separate fits per (asset, tick value)
  bool include_flagged = false;  // keep days with eta_hat > 0.55
};

struct RecordGroup {
  std::string label;  // asset id, or "id@tick" when regimes are split
  std::vector<DailyRecord> records;
};

// Groups records by asset (or by asset and tick value), in key order.
[[nodiscard]] inline std::vector<RecordGroup> group_records(std::span<const DailyRecord> records,
                                                            const FitOptions& opts = {}) {
  std::map<std::pair<std::string, double>, std::vector<DailyRecord>> groups;
  for (const DailyRecord& r : records) {
    if (!opts.include_flagged && r.eta_flagged()) continue;
    groups[{r.asset_id, opts.split_regimes ? r.alpha : 0.0}].push_back(r);
  }
  std::vector<RecordGroup> out;
  for (auto& [key, rows] : groups) {
    std::string label = key.first;
    if (opts.split_regimes) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "@%.10g", key.second);
      label += buf;
    }
    out.push_back({std::move(label), std::move(rows)});
  }
  return out;
}

[[nodiscard]] inline RegressionFit fit_group(const RecordGroup& group) {
  try {
    RegressionFit f = fit_spread_vol(group.records);
    f.asset_id = group.label;
    return f;
  } catch (const InsufficientDataError& e) {
    throw InsufficientDataError("asset '" + group.label + "': " + e.what());
  } catch (const CollinearityError& e) {
    throw CollinearityError("asset '" + group.label + "': " + e.what());
  }
}

[[nodiscard]] inline std::vector<RegressionFit> fit_by_asset(std::span<const DailyRecord> records,
                                                             const FitOptions& opts = {}) {
  std::vector<RegressionFit> fits;
  for (const RecordGroup& g : group_records(records, opts)) fits.push_back(fit_group(g));
  return fits;
}

}  // namespace tickzone
