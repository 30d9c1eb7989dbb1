#include "cxorder/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "cxorder/error.hpp"
#include "cxorder/kernels.hpp"

namespace cxorder {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kSignThreshold = 1e-10;

void require_square(const Matrix& m, const char* what) {
  if (!m.is_square()) {
    throw Error(ErrorCode::dimension_mismatch,
                std::string(what) + ": matrix is not square");
  }
}

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::dimension_mismatch,
                std::string(what) + ": dimensions " + std::to_string(a) +
                    " and " + std::to_string(b));
  }
}

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) s += a(i, j) * a(i, j);
  return std::sqrt(2.0 * s);
}

// One Jacobi rotation annihilating a(p, q). Rows p and q go through the
// rotate kernel; by symmetry the updated columns are the updated rows.
void jacobi_rotate(Matrix& a, Matrix& vt, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  const double app = a(p, p);
  const double aqq = a(q, q);
  const double theta = (aqq - app) / (2.0 * apq);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 0.5 / theta;
  } else {
    t = (theta >= 0.0 ? 1.0 : -1.0) /
        (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  }
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  kernels::rotate(a.row(p), a.row(q), c, s);
  const std::size_t d = a.rows();
  for (std::size_t k = 0; k < d; ++k) {
    if (k == p || k == q) continue;
    a(k, p) = a(p, k);
    a(k, q) = a(q, k);
  }
  a(p, p) = app - t * apq;
  a(q, q) = aqq + t * apq;
  a(p, q) = 0.0;
  a(q, p) = 0.0;

  kernels::rotate(vt.row(p), vt.row(q), c, s);
}

Matrix reassemble(std::span<const double> values, const Matrix& basis) {
  const std::size_t d = basis.rows();
  Matrix scaled = basis;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < values.size(); ++k) scaled(i, k) *= values[k];
  return scaled * basis.transpose();
}

Matrix symmetrized(const Matrix& m) {
  Matrix s = m;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      s(i, j) = v;
      s(j, i) = v;
    }
  return s;
}

// Diagonal entries at or below this are treated as exact zeros.
double diagonal_floor(const SpdMatrix& s) { return 8.0 * s.rank_tol(); }

}  // namespace

const Tolerances& default_tolerances() {
  static const Tolerances t{};
  return t;
}

SymMatrix::SymMatrix(const Matrix& m, const Tolerances& tol) {
  require_square(m, "SymMatrix");
  for (double v : m.data()) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::non_finite, "matrix has a non-finite entry");
    }
  }
  double asym = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      const double diff = m(i, j) - m(j, i);
      asym += 2.0 * diff * diff;
    }
  asym = std::sqrt(asym);
  if (asym > tol.symmetry * (1.0 + m.frobenius_norm())) {
    throw Error(ErrorCode::not_symmetric, "|M - M^T|_F too large", asym);
  }
  m_ = symmetrized(m);
}

SymMatrix SymMatrix::zero(std::size_t d) { return SymMatrix(Matrix(d, d)); }

SymMatrix SymMatrix::identity(std::size_t d) {
  return SymMatrix(Matrix::identity(d));
}

SymMatrix SymMatrix::diagonal(std::span<const double> diag) {
  return SymMatrix(Matrix::diagonal(diag));
}

EigenDecomposition sym_eigen(const SymMatrix& m, const Tolerances& tol) {
  const std::size_t d = m.dim();
  Matrix a = m.mat();
  Matrix vt = Matrix::identity(d);
  const double fro = a.frobenius_norm();
  const double target = 1e-2 * kEps * fro;

  bool converged = d < 2 || fro == 0.0;
  for (int sweep = 0; sweep < tol.max_sweeps && !converged; ++sweep) {
    for (std::size_t p = 0; p + 1 < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Below this the rotation changes no eigenvalue by more than an ulp.
        if (std::abs(apq) <= kEps * std::sqrt(std::abs(a(p, p) * a(q, q)))) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        jacobi_rotate(a, vt, p, q);
      }
    }
    const double off = off_diagonal_norm(a);
    converged = off == 0.0 || off <= target;
  }

  EigenDecomposition out;
  out.values.resize(d);
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a(i, i) > a(j, j);
  });
  out.basis = Matrix(d, d);
  for (std::size_t k = 0; k < d; ++k) {
    const std::size_t src = order[k];
    out.values[k] = a(src, src);
    auto v = vt.row(src);
    double sign = 1.0;
    for (double x : v) {
      if (std::abs(x) > kSignThreshold) {
        sign = x > 0.0 ? 1.0 : -1.0;
        break;
      }
    }
    for (std::size_t i = 0; i < d; ++i) out.basis(i, k) = sign * v[i];
  }

  const double residual =
      frobenius_distance(reassemble(out.values, out.basis), m.mat());
  if (!converged || residual > tol.recon * (1.0 + fro)) {
    throw Error(ErrorCode::eigen_no_convergence,
                "Jacobi eigensolver did not converge", residual);
  }
  return out;
}

SpdMatrix::SpdMatrix(const SymMatrix& m, const Tolerances& tol)
    : SymMatrix(m) {
  EigenDecomposition e = sym_eigen(m, tol);
  values_ = std::move(e.values);
  basis_ = std::move(e.basis);
  finish(tol);
}

void SpdMatrix::finish(const Tolerances& tol) {
  double norm2 = 0.0;
  for (double v : values_) norm2 = std::max(norm2, std::abs(v));
  const double eig_tol = tol.eig * std::max(1.0, norm2);
  if (!values_.empty() && values_.back() < -eig_tol) {
    throw Error(ErrorCode::not_psd,
                "smallest eigenvalue " + std::to_string(values_.back()) +
                    " is negative",
                values_.back());
  }
  for (double& v : values_) v = std::max(v, 0.0);
  rank_tol_ = static_cast<double>(dim()) * norm2 * tol.rank_factor;
  rank_ = static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(),
                    [&](double v) { return v > rank_tol_; }));
}

SpdMatrix SpdMatrix::from_spectrum(std::span<const double> values,
                                   const Matrix& basis,
                                   const Tolerances& tol) {
  const std::size_t d = basis.rows();
  require_same_dim(values.size(), d, "from_spectrum");
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return values[i] > values[j];
  });
  Vector sorted(d);
  Matrix sorted_basis(d, d);
  for (std::size_t k = 0; k < d; ++k) {
    sorted[k] = std::max(values[order[k]], 0.0);
    for (std::size_t i = 0; i < d; ++i) sorted_basis(i, k) = basis(i, order[k]);
  }
  SpdMatrix out;
  static_cast<SymMatrix&>(out) =
      SymMatrix(symmetrized(reassemble(sorted, sorted_basis)), tol);
  out.values_ = std::move(sorted);
  out.basis_ = std::move(sorted_basis);
  out.finish(tol);
  return out;
}

OrthogonalMatrix::OrthogonalMatrix(Matrix m, const Tolerances& tol) {
  require_square(m, "OrthogonalMatrix");
  const double r = frobenius_distance(m.transpose() * m,
                                      Matrix::identity(m.rows()));
  if (!(r <= tol.ortho)) {
    throw Error(ErrorCode::not_orthogonal, "|O^T O - I|_F too large", r);
  }
  m_ = std::move(m);
}

OrthogonalMatrix OrthogonalMatrix::identity(std::size_t d) {
  return OrthogonalMatrix(Matrix::identity(d));
}

CorrelationMatrix::CorrelationMatrix(const SpdMatrix& c, const Tolerances& tol)
    : SpdMatrix(c) {
  for (std::size_t i = 0; i < dim(); ++i) {
    const double dev = std::abs(c(i, i) - 1.0);
    if (dev > tol.eig) {
      throw Error(ErrorCode::not_psd, "correlation diagonal differs from 1",
                  dev);
    }
  }
}

double spectral_norm(const SymMatrix& m, const Tolerances& tol) {
  if (m.dim() == 0) return 0.0;
  const EigenDecomposition e = sym_eigen(m, tol);
  return std::max(std::abs(e.values.front()), std::abs(e.values.back()));
}

double min_eigenvalue(const SymMatrix& m, const Tolerances& tol) {
  if (m.dim() == 0) return 0.0;
  return sym_eigen(m, tol).values.back();
}

SpdMatrix spd_sqrt(const SpdMatrix& m, const Tolerances& tol) {
  // Eigenvalues below rank_tol are round-off; their square roots would be
  // O(sqrt(eps)) noise.
  Vector v = m.eigenvalues();
  for (double& x : v) x = x > m.rank_tol() ? std::sqrt(x) : 0.0;
  return SpdMatrix::from_spectrum(v, m.eigenvectors(), tol);
}

SpdMatrix spd_inv_sqrt(const SpdMatrix& m, const Tolerances& tol) {
  Vector v = m.eigenvalues();
  for (double& x : v) x = x > m.rank_tol() ? 1.0 / std::sqrt(x) : 0.0;
  return SpdMatrix::from_spectrum(v, m.eigenvectors(), tol);
}

SpdMatrix positive_part(const SymMatrix& m, const Tolerances& tol) {
  EigenDecomposition e = sym_eigen(m, tol);
  for (double& x : e.values) x = std::max(x, 0.0);
  return SpdMatrix::from_spectrum(e.values, e.basis, tol);
}

bool loewner_leq(const SymMatrix& a, const SymMatrix& b, double tol,
                 const Tolerances& tols) {
  require_same_dim(a.dim(), b.dim(), "loewner_leq");
  return min_eigenvalue(SymMatrix(b.mat() - a.mat(), tols), tols) >= -tol;
}

SymMatrix dg(const SymMatrix& m) { return SymMatrix::diagonal(m.mat().diag()); }

SpdMatrix sandwich(const SpdMatrix& a_sqrt, const SpdMatrix& b,
                   const Tolerances& tol) {
  require_same_dim(a_sqrt.dim(), b.dim(), "sandwich");
  return positive_part(
      SymMatrix(symmetrized(a_sqrt.mat() * b.mat() * a_sqrt.mat()), tol), tol);
}

SharedCorrelation shared_correlation_transform(const SpdMatrix& s1,
                                               const SpdMatrix& s2,
                                               const Tolerances& tol) {
  const std::size_t d = s1.dim();
  require_same_dim(d, s2.dim(), "shared_correlation_transform");
  const std::size_t r = s1.rank();

  Matrix o;
  if (r == d) {
    // O diagonalizes M = s1^{-1/2} (s1^{1/2} s2 s1^{1/2})^{1/2} s1^{-1/2},
    // the map with M s1 M = s2.
    const SpdMatrix root = spd_sqrt(s1, tol);
    const SpdMatrix inv_root = spd_inv_sqrt(s1, tol);
    const SpdMatrix mid = spd_sqrt(sandwich(root, s2, tol), tol);
    const SymMatrix m(symmetrized(inv_root.mat() * mid.mat() * inv_root.mat()),
                      tol);
    o = sym_eigen(m, tol).basis;
  } else if (r == 0) {
    o = s2.eigenvectors();
  } else {
    const Matrix& o1 = s1.eigenvectors();
    const Matrix b1 = congruence_t(o1, s1.mat()).block(0, 0, r, r);
    const Matrix b2 = congruence_t(o1, s2.mat()).block(0, 0, r, r);
    const SharedCorrelation sub = shared_correlation_transform(
        SpdMatrix(symmetrized(b1), tol), SpdMatrix(symmetrized(b2), tol), tol);
    Matrix lift = Matrix::identity(d);
    lift.set_block(0, 0, sub.O.mat());
    o = o1 * lift;
  }

  Matrix a1 = symmetrized(congruence_t(o, s1.mat()));
  const Matrix a2 = symmetrized(congruence_t(o, s2.mat()));
  // Coordinates past the rank of s1 span its kernel.
  for (std::size_t i = r; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      a1(i, j) = 0.0;
      a1(j, i) = 0.0;
    }

  const double floor1 = diagonal_floor(s1);
  const double floor2 = diagonal_floor(s2);
  std::vector<char> pos1(d), pos2(d);
  for (std::size_t i = 0; i < d; ++i) {
    pos1[i] = a1(i, i) > floor1;
    pos2[i] = a2(i, i) > floor2;
  }

  Matrix c(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (i == j) {
        c(i, j) = 1.0;
      } else if (pos1[i] && pos1[j]) {
        c(i, j) = a1(i, j) / std::sqrt(a1(i, i) * a1(j, j));
      } else if (pos2[i] && pos2[j]) {
        c(i, j) = a2(i, j) / std::sqrt(a2(i, i) * a2(j, j));
      }
    }
  }

  auto residual = [&](const Matrix& a, const std::vector<char>& pos) {
    Vector root(d);
    for (std::size_t i = 0; i < d; ++i)
      root[i] = pos[i] ? std::sqrt(a(i, i)) : 0.0;
    Matrix rec(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) rec(i, j) = root[i] * c(i, j) * root[j];
    return frobenius_distance(rec, a);
  };
  const double r1 = residual(a1, pos1);
  const double r2 = residual(a2, pos2);
  if (r1 > tol.corr * (1.0 + s1.mat().frobenius_norm()) ||
      r2 > tol.corr * (1.0 + s2.mat().frobenius_norm())) {
    throw Error(ErrorCode::corr_residual_exceeded,
                "shared correlation reconstruction failed", std::max(r1, r2));
  }

  SharedCorrelation out;
  out.O = OrthogonalMatrix(std::move(o), tol);
  try {
    out.C = CorrelationMatrix(SpdMatrix(SymMatrix(c, tol), tol), tol);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::not_psd) throw;
    throw Error(ErrorCode::corr_residual_exceeded,
                "shared correlation matrix is not PSD", e.residual());
  }
  out.residual = std::max(r1, r2);
  return out;
}

}  // namespace cxorder
