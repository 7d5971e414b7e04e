#pragma once

// Euclidean distance matrices and the quadratic f(x) = 1/2 <Qx, x> they define.
//
// Everything here is a pure function over immutable dense Eigen types. The
// templates accept any floating scalar; the solver layers use double.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace emsp {

using Index = Eigen::Index;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// n locations in R^s, stored one point per row.
template <typename Scalar>
class PointSet {
 public:
  using Matrix = MatrixX<Scalar>;

  PointSet() = default;

  explicit PointSet(Matrix coords) : coords_(std::move(coords)) {
    if (coords_.rows() < 1) throw std::invalid_argument("point set must contain at least one point");
    if (coords_.cols() < 1) throw std::invalid_argument("points must have dimension >= 1");
    if (!coords_.allFinite()) throw std::invalid_argument("point coordinates must be finite");
  }

  static PointSet from_rows(const std::vector<std::vector<Scalar>>& rows) {
    if (rows.empty()) throw std::invalid_argument("point set must contain at least one point");
    const auto dim = rows.front().size();
    Matrix coords(static_cast<Index>(rows.size()), static_cast<Index>(dim));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != dim)
        throw std::invalid_argument("point " + std::to_string(i) + " has dimension " +
                                    std::to_string(rows[i].size()) + ", expected " +
                                    std::to_string(dim));
      for (std::size_t k = 0; k < dim; ++k)
        coords(static_cast<Index>(i), static_cast<Index>(k)) = rows[i][k];
    }
    return PointSet(std::move(coords));
  }

  Index size() const { return coords_.rows(); }
  Index dimension() const { return coords_.cols(); }
  const Matrix& coords() const { return coords_; }
  auto point(Index i) const { return coords_.row(i); }

  friend bool operator==(const PointSet& a, const PointSet& b) {
    return a.coords_.rows() == b.coords_.rows() && a.coords_.cols() == b.coords_.cols() &&
           a.coords_ == b.coords_;
  }

 private:
  Matrix coords_;
};

/// Square matrix of pairwise distances.
///
/// Construction does not enforce the EDM invariants so that externally read
/// data can be inspected; `invariant_violations` reports what is wrong.
template <typename Scalar>
class DistanceMatrix {
 public:
  using Matrix = MatrixX<Scalar>;

  DistanceMatrix() = default;
  explicit DistanceMatrix(Matrix entries) : q_(std::move(entries)) {
    if (q_.rows() != q_.cols()) throw std::invalid_argument("distance matrix must be square");
  }

  Index size() const { return q_.rows(); }
  const Matrix& matrix() const { return q_; }
  Scalar operator()(Index i, Index j) const { return q_(i, j); }

  /// Human-readable list of broken invariants (symmetry, hollowness, sign),
  /// 1-based indices. Empty when the matrix is a valid distance matrix.
  std::vector<std::string> invariant_violations(Scalar tol = Scalar(1e-9)) const {
    std::vector<std::string> out;
    for (Index i = 0; i < size(); ++i) {
      if (!std::isfinite(static_cast<double>(q_(i, i))) || std::abs(q_(i, i)) > tol)
        out.push_back("matrix not hollow at (" + std::to_string(i + 1) + "," +
                      std::to_string(i + 1) + ")");
      for (Index j = i + 1; j < size(); ++j) {
        const Scalar a = q_(i, j), b = q_(j, i);
        if (!std::isfinite(static_cast<double>(a)) || !std::isfinite(static_cast<double>(b)))
          out.push_back("matrix entry not finite at (" + std::to_string(i + 1) + "," +
                        std::to_string(j + 1) + ")");
        else if (std::abs(a - b) > tol * (1 + std::abs(a)))
          out.push_back("matrix not symmetric at (" + std::to_string(i + 1) + "," +
                        std::to_string(j + 1) + ")");
        else if (a < -tol)
          out.push_back("matrix entry negative at (" + std::to_string(i + 1) + "," +
                        std::to_string(j + 1) + ")");
      }
    }
    return out;
  }

  friend bool operator==(const DistanceMatrix& a, const DistanceMatrix& b) {
    return a.q_.rows() == b.q_.rows() && a.q_ == b.q_;
  }

 private:
  Matrix q_;
};

using PointSetd = PointSet<double>;
using DistanceMatrixd = DistanceMatrix<double>;

template <typename Scalar>
DistanceMatrix<Scalar> build_edm(const PointSet<Scalar>& ps) {
  const Index n = ps.size();
  MatrixX<Scalar> q = MatrixX<Scalar>::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const Scalar d = (ps.point(i) - ps.point(j)).norm();
      q(i, j) = d;
      q(j, i) = d;
    }
  return DistanceMatrix<Scalar>(std::move(q));
}

namespace detail {
inline void require_length(Index got, Index n, const char* what) {
  if (got != n)
    throw std::invalid_argument(std::string(what) + " has length " + std::to_string(got) +
                                ", expected " + std::to_string(n));
}
}  // namespace detail

/// f(x) = 1/2 <Qx, x>. On binary x this is the sum of distances between the
/// selected points.
template <typename Scalar, typename Derived>
Scalar objective(const DistanceMatrix<Scalar>& q, const Eigen::MatrixBase<Derived>& x) {
  detail::require_length(x.size(), q.size(), "x");
  return Scalar(0.5) * x.dot(q.matrix() * x);
}

/// h(x, y) = <Qy, x> - 1/2 <Qy, y>, the tangent of f at y evaluated at x.
template <typename Scalar, typename DerivedY, typename DerivedX>
Scalar tangent_value(const DistanceMatrix<Scalar>& q, const Eigen::MatrixBase<DerivedY>& y,
                     const Eigen::MatrixBase<DerivedX>& x) {
  detail::require_length(y.size(), q.size(), "y");
  detail::require_length(x.size(), q.size(), "x");
  const VectorX<Scalar> qy = q.matrix() * y;
  return qy.dot(x) - Scalar(0.5) * qy.dot(y);
}

template <typename Scalar>
struct TangentCoefficients {
  VectorX<Scalar> gradient;  // Qy
  Scalar offset;             // -1/2 <Qy, y>
};

/// Linear form of the tangent at y: h(x, y) = <gradient, x> + offset.
template <typename Scalar, typename Derived>
TangentCoefficients<Scalar> tangent_coefficients(const DistanceMatrix<Scalar>& q,
                                                 const Eigen::MatrixBase<Derived>& y) {
  detail::require_length(y.size(), q.size(), "y");
  VectorX<Scalar> g = q.matrix() * y;
  const Scalar offset = Scalar(-0.5) * g.dot(y);
  return {std::move(g), offset};
}

/// <Qu, u> <= tol. Spans a direction along which f is concave.
template <typename Scalar, typename Derived>
bool is_concave_direction(const DistanceMatrix<Scalar>& q, const Eigen::MatrixBase<Derived>& u,
                          Scalar tol) {
  detail::require_length(u.size(), q.size(), "u");
  if (u.isZero(0)) throw std::invalid_argument("direction must be nonzero");
  return u.dot(q.matrix() * u) <= tol;
}

namespace detail {
template <typename Derived>
void require_nonnegative(const Eigen::MatrixBase<Derived>& v, const char* what) {
  if ((v.array() < 0).any())
    throw std::invalid_argument(std::string(what) + " must be componentwise nonnegative");
}
}  // namespace detail

/// Cardinality rule: sum(x) <= sum(y). With f(x) >= f(y) the tangent at y
/// then overestimates f at x.
template <typename DerivedX, typename DerivedY>
bool valid_by_cardinality(const Eigen::MatrixBase<DerivedX>& x,
                          const Eigen::MatrixBase<DerivedY>& y) {
  detail::require_length(x.size(), y.size(), "x");
  detail::require_nonnegative(x, "x");
  detail::require_nonnegative(y, "y");
  return x.sum() <= y.sum() + 1e-9;
}

/// Witness rule: some nonzero w >= 0 with <Qw, x - y> <= 0. With f(x) >= f(y)
/// the tangent at y then overestimates f at x.
template <typename Scalar, typename DerivedW, typename DerivedX, typename DerivedY>
bool valid_by_witness(const DistanceMatrix<Scalar>& q, const Eigen::MatrixBase<DerivedW>& w,
                      const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y) {
  detail::require_length(w.size(), q.size(), "w");
  detail::require_length(x.size(), q.size(), "x");
  detail::require_length(y.size(), q.size(), "y");
  detail::require_nonnegative(w, "w");
  if (w.isZero(0)) throw std::invalid_argument("witness must be nonzero");
  detail::require_nonnegative(x, "x");
  detail::require_nonnegative(y, "y");
  return (q.matrix() * w).dot(x - y) <= 1e-9;
}

/// Orthogonal-direction conditions for h(x, y) >= f(x): z != 0, <Qz, z> >= 0 and
/// <Qz, x - y> = 0, each sign test within `tol`.
template <typename Scalar, typename DerivedX, typename DerivedY, typename DerivedZ>
bool orthogonal_direction_premises(const DistanceMatrix<Scalar>& q,
                                   const Eigen::MatrixBase<DerivedX>& x,
                                   const Eigen::MatrixBase<DerivedY>& y,
                                   const Eigen::MatrixBase<DerivedZ>& z, Scalar tol) {
  if (z.isZero(0)) return false;
  const VectorX<Scalar> qz = q.matrix() * z;
  return qz.dot(z) >= -tol && std::abs(qz.dot(x - y)) <= tol;
}

/// Signed-direction conditions for h(x, y) >= f(x): z != 0, <Qz, z> >= 0,
/// <Qz, x - y> <= 0 and either sum(x - y) / sum(z) >= 0 or
/// sum(x - y) = sum(z) = 0.
template <typename Scalar, typename DerivedX, typename DerivedY, typename DerivedZ>
bool signed_direction_premises(const DistanceMatrix<Scalar>& q,
                               const Eigen::MatrixBase<DerivedX>& x,
                               const Eigen::MatrixBase<DerivedY>& y,
                               const Eigen::MatrixBase<DerivedZ>& z, Scalar tol) {
  if (z.isZero(0)) return false;
  const VectorX<Scalar> qz = q.matrix() * z;
  if (qz.dot(z) < -tol || qz.dot(x - y) > tol) return false;
  const Scalar su = (x - y).sum();
  const Scalar sz = z.sum();
  const bool ratio_branch = std::abs(sz) > tol && su / sz >= 0;
  const bool zero_branch = std::abs(su) <= tol && std::abs(sz) <= tol;
  return ratio_branch || zero_branch;
}

/// Eigenvalue sign counts of a symmetric matrix.
struct SpectralSignature {
  Index n_positive = 0;
  Index n_zero = 0;
  Index n_negative = 0;
  double lambda_max = 0;
};

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, iterated
/// until the off-diagonal Frobenius norm drops below rel_tol * ||A||_F.
/// Returned in descending order.
template <typename Scalar>
VectorX<Scalar> jacobi_eigenvalues(MatrixX<Scalar> a, Scalar rel_tol, int max_sweeps = 100) {
  const Index n = a.rows();
  const Scalar target = rel_tol * a.norm();
  auto off_norm = [&] {
    Scalar s = 0;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };
  for (int sweep = 0; sweep < max_sweeps && off_norm() > target; ++sweep) {
    for (Index p = 0; p < n - 1; ++p)
      for (Index r = p + 1; r < n; ++r) {
        const Scalar apr = a(p, r);
        if (apr == Scalar(0)) continue;
        const Scalar theta = (a(r, r) - a(p, p)) / (Scalar(2) * apr);
        const Scalar t = (theta >= 0 ? Scalar(1) : Scalar(-1)) /
                         (std::abs(theta) + std::sqrt(theta * theta + Scalar(1)));
        const Scalar c = Scalar(1) / std::sqrt(t * t + Scalar(1));
        const Scalar s = t * c;
        // A <- J^T A J with J the (p, r) rotation.
        for (Index k = 0; k < n; ++k) {
          const Scalar akp = a(k, p), akr = a(k, r);
          a(k, p) = c * akp - s * akr;
          a(k, r) = s * akp + c * akr;
        }
        for (Index k = 0; k < n; ++k) {
          const Scalar apk = a(p, k), ark = a(r, k);
          a(p, k) = c * apk - s * ark;
          a(r, k) = s * apk + c * ark;
        }
        a(p, r) = 0;
        a(r, p) = 0;
      }
  }
  VectorX<Scalar> ev = a.diagonal();
  std::sort(ev.data(), ev.data() + ev.size(), [](Scalar l, Scalar r) { return l > r; });
  return ev;
}

/// Sign counts of the spectrum of Q, classifying |lambda| <= rel_tol * |lambda_max|
/// as zero.
template <typename Scalar>
SpectralSignature spectral_signature(const DistanceMatrix<Scalar>& q, Scalar rel_tol) {
  const VectorX<Scalar> ev =
      jacobi_eigenvalues<Scalar>(q.matrix(), Scalar(4) * std::numeric_limits<Scalar>::epsilon());
  SpectralSignature sig;
  sig.lambda_max = ev.size() > 0 ? static_cast<double>(ev(0)) : 0.0;
  const Scalar threshold = rel_tol * std::abs(Scalar(sig.lambda_max));
  for (Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > threshold)
      ++sig.n_positive;
    else if (ev(i) < -threshold)
      ++sig.n_negative;
    else
      ++sig.n_zero;
  }
  return sig;
}

}  // namespace emsp
