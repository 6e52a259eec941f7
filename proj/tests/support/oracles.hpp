#pragma once

// Independent reference computations: plain loops, long double, Gauss-Jordan
// on the normal equations. Nothing here touches the library's solvers.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace oracle {

using Row = std::vector<long double>;
using Mat = std::vector<Row>;

/// Inverse of a small symmetric positive-definite matrix by Gauss-Jordan
/// with partial pivoting.
inline Mat invert(Mat a) {
  const std::size_t n = a.size();
  Mat inv(n, Row(n, 0.0L));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0L;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::fabs(a[r][c]) > std::fabs(a[p][c])) p = r;
    }
    if (a[p][c] == 0.0L) throw std::runtime_error("oracle: singular");
    std::swap(a[p], a[c]);
    std::swap(inv[p], inv[c]);
    const long double d = a[c][c];
    for (std::size_t j = 0; j < n; ++j) {
      a[c][j] /= d;
      inv[c][j] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const long double f = a[r][c];
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[c][j];
        inv[r][j] -= f * inv[c][j];
      }
    }
  }
  return inv;
}

struct Ols {
  std::vector<long double> beta;
  std::vector<long double> se;
  std::vector<long double> resid;
  long double ssr = 0.0L;
};

/// X holds one row per observation; any constant column must be explicit.
inline Ols ols(const std::vector<long double>& y, const Mat& X) {
  const std::size_t n = y.size();
  const std::size_t k = X.front().size();
  Mat xtx(k, Row(k, 0.0L));
  Row xty(k, 0.0L);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < k; ++a) {
      xty[a] += X[i][a] * y[i];
      for (std::size_t b = 0; b < k; ++b) xtx[a][b] += X[i][a] * X[i][b];
    }
  }
  const Mat inv = invert(xtx);
  Ols out;
  out.beta.assign(k, 0.0L);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) out.beta[a] += inv[a][b] * xty[b];
  }
  out.resid.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    long double fit = 0.0L;
    for (std::size_t a = 0; a < k; ++a) fit += X[i][a] * out.beta[a];
    out.resid[i] = y[i] - fit;
    out.ssr += out.resid[i] * out.resid[i];
  }
  const long double s2 = out.ssr / static_cast<long double>(n - k);
  for (std::size_t a = 0; a < k; ++a) out.se.push_back(std::sqrt(s2 * inv[a][a]));
  return out;
}

/// t-ratio on y_{t-1} in  dy_t = rho y_{t-1} + sum_j g_j dy_{t-j} [+ c] [+ d t].
inline double adf_t(const std::vector<double>& y, int lag, bool constant, bool trend) {
  const std::size_t k = static_cast<std::size_t>(lag);
  std::vector<long double> dy;
  Mat X;
  for (std::size_t t = k + 1; t < y.size(); ++t) {
    dy.push_back(static_cast<long double>(y[t]) - y[t - 1]);
    Row row{static_cast<long double>(y[t - 1])};
    for (std::size_t j = 1; j <= k; ++j) row.push_back(static_cast<long double>(y[t - j]) - y[t - j - 1]);
    if (constant) row.push_back(1.0L);
    if (trend) row.push_back(static_cast<long double>(t));
    X.push_back(std::move(row));
  }
  const Ols r = ols(dy, X);
  return static_cast<double>(r.beta[0] / r.se[0]);
}

/// Bivariate Johansen eigenvalues as the roots of det(l S11 - S10 S00^-1 S01) = 0.
/// `constant`: unrestricted constant among the short-run regressors.
inline std::vector<double> johansen_eigenvalues(const std::vector<double>& a,
                                                const std::vector<double>& b, int lag,
                                                bool constant) {
  const std::size_t T = a.size();
  const std::size_t p = static_cast<std::size_t>(lag);
  std::vector<long double> z0a, z0b, z1a, z1b;
  Mat z2;
  for (std::size_t t = p; t < T; ++t) {
    z0a.push_back(static_cast<long double>(a[t]) - a[t - 1]);
    z0b.push_back(static_cast<long double>(b[t]) - b[t - 1]);
    z1a.push_back(a[t - 1]);
    z1b.push_back(b[t - 1]);
    Row row;
    for (std::size_t j = 1; j < p; ++j) {
      row.push_back(static_cast<long double>(a[t - j]) - a[t - j - 1]);
      row.push_back(static_cast<long double>(b[t - j]) - b[t - j - 1]);
    }
    if (constant) row.push_back(1.0L);
    z2.push_back(std::move(row));
  }
  auto resid = [&](const std::vector<long double>& v) {
    if (z2.front().empty()) return v;
    return ols(v, z2).resid;
  };
  const auto r0a = resid(z0a), r0b = resid(z0b), r1a = resid(z1a), r1b = resid(z1b);
  auto dot = [](const std::vector<long double>& u, const std::vector<long double>& v) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return s;
  };
  const std::vector<const std::vector<long double>*> r0{&r0a, &r0b}, r1{&r1a, &r1b};
  Mat s00(2, Row(2)), s11(2, Row(2)), s01(2, Row(2));
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      s00[i][j] = dot(*r0[i], *r0[j]);
      s11[i][j] = dot(*r1[i], *r1[j]);
      s01[i][j] = dot(*r0[i], *r1[j]);
    }
  }
  const Mat i00 = invert(s00);
  Mat m(2, Row(2, 0.0L));  // S10 S00^-1 S01
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) m[i][j] += s01[k][i] * i00[k][l] * s01[l][j];
  // det(l A - B) = l^2 |A| - l (a11 b22 + a22 b11 - a12 b21 - a21 b12) + |B|
  const Mat& A = s11;
  const long double qa = A[0][0] * A[1][1] - A[0][1] * A[1][0];
  const long double qb = -(A[0][0] * m[1][1] + A[1][1] * m[0][0] - A[0][1] * m[1][0] -
                           A[1][0] * m[0][1]);
  const long double qc = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  const long double disc = std::sqrt(std::max(0.0L, qb * qb - 4.0L * qa * qc));
  const long double l1 = (-qb + disc) / (2.0L * qa);
  const long double l2 = qc / (qa * l1);  // product of roots; avoids cancellation
  return {static_cast<double>(l1), static_cast<double>(l2)};
}

}  // namespace oracle
