#pragma once

// Symmetric linear algebra on small dense matrices: a deterministic Jacobi
// eigensolver, PSD square roots, positive parts, Loewner-order tests and
// the shared-correlation orthogonal transform.

#include <cstddef>
#include <optional>
#include <span>

#include "cxorder/matrix.hpp"

namespace cxorder {

struct Tolerances {
  // Eigenvalues in [-eig * max(1, |M|_2), 0] are treated as round-off.
  double eig = 1e-12;
  // rank_tol = d * |M|_2 * rank_factor.
  double rank_factor = 0x1p-50;
  // Eigen reconstruction, relative to 1 + |M|_F.
  double recon = 1e-10;
  double corr = 1e-10;
  double ortho = 1e-10;
  // Accepted asymmetry on construction, relative to 1 + |M|_F.
  double symmetry = 1e-9;
  int max_sweeps = 100;
};

const Tolerances& default_tolerances();

class SymMatrix {
 public:
  SymMatrix() = default;
  /// Symmetrizes m. Throws not_symmetric if |m - m^T|_F exceeds the
  /// symmetry tolerance, non_finite on NaN/inf entries.
  explicit SymMatrix(const Matrix& m,
                     const Tolerances& tol = default_tolerances());

  static SymMatrix zero(std::size_t d);
  static SymMatrix identity(std::size_t d);
  static SymMatrix diagonal(std::span<const double> diag);

  std::size_t dim() const noexcept { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const Matrix& mat() const noexcept { return m_; }
  operator const Matrix&() const noexcept { return m_; }

 private:
  Matrix m_;
};

struct EigenDecomposition {
  Vector values;  // descending
  Matrix basis;   // columns are eigenvectors
};

/// Cyclic Jacobi. Eigenvalues sorted descending (stable for ties), each
/// eigenvector's first entry above 1e-10 in magnitude made positive.
EigenDecomposition sym_eigen(const SymMatrix& m,
                             const Tolerances& tol = default_tolerances());

/// PSD matrix with its spectral decomposition computed at construction.
class SpdMatrix : public SymMatrix {
 public:
  SpdMatrix() = default;
  /// Throws not_psd if the smallest eigenvalue is below -eig_tol.
  explicit SpdMatrix(const SymMatrix& m,
                     const Tolerances& tol = default_tolerances());
  explicit SpdMatrix(const Matrix& m,
                     const Tolerances& tol = default_tolerances())
      : SpdMatrix(SymMatrix(m, tol), tol) {}

  /// U diag(values) U^T with the given decomposition reused as the cache.
  /// Negative values are clamped to 0.
  static SpdMatrix from_spectrum(std::span<const double> values,
                                 const Matrix& basis,
                                 const Tolerances& tol = default_tolerances());

  const Vector& eigenvalues() const noexcept { return values_; }
  const Matrix& eigenvectors() const noexcept { return basis_; }
  std::size_t rank() const noexcept { return rank_; }
  double rank_tol() const noexcept { return rank_tol_; }
  double max_eigenvalue() const { return values_.empty() ? 0.0 : values_.front(); }
  double min_eigenvalue() const { return values_.empty() ? 0.0 : values_.back(); }
  bool is_pd() const noexcept { return rank_ == dim(); }

 private:
  Vector values_;
  Matrix basis_;
  std::size_t rank_ = 0;
  double rank_tol_ = 0.0;

  void finish(const Tolerances& tol);
};

class OrthogonalMatrix {
 public:
  OrthogonalMatrix() = default;
  /// Throws not_orthogonal if |O^T O - I|_F > ortho_tol.
  explicit OrthogonalMatrix(Matrix m,
                            const Tolerances& tol = default_tolerances());
  static OrthogonalMatrix identity(std::size_t d);

  std::size_t dim() const noexcept { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const Matrix& mat() const noexcept { return m_; }
  operator const Matrix&() const noexcept { return m_; }

 private:
  Matrix m_;
};

class CorrelationMatrix : public SpdMatrix {
 public:
  CorrelationMatrix() = default;
  /// Throws not_psd when a diagonal entry is off 1 by more than eig_tol.
  explicit CorrelationMatrix(const SpdMatrix& c,
                             const Tolerances& tol = default_tolerances());
};

/// Largest eigenvalue magnitude.
double spectral_norm(const SymMatrix& m,
                     const Tolerances& tol = default_tolerances());
double min_eigenvalue(const SymMatrix& m,
                      const Tolerances& tol = default_tolerances());

SpdMatrix spd_sqrt(const SpdMatrix& m,
                   const Tolerances& tol = default_tolerances());
/// Moore-Penrose inverse square root: eigenvalues at or below rank_tol map
/// to 0.
SpdMatrix spd_inv_sqrt(const SpdMatrix& m,
                       const Tolerances& tol = default_tolerances());
SpdMatrix positive_part(const SymMatrix& m,
                        const Tolerances& tol = default_tolerances());
/// True iff lambda_min(b - a) >= -tol.
bool loewner_leq(const SymMatrix& a, const SymMatrix& b, double tol,
                 const Tolerances& tols = default_tolerances());
SymMatrix dg(const SymMatrix& m);

/// a^{1/2} b a^{1/2}, symmetrized.
SpdMatrix sandwich(const SpdMatrix& a_sqrt, const SpdMatrix& b,
                   const Tolerances& tol = default_tolerances());

struct SharedCorrelation {
  OrthogonalMatrix O;
  CorrelationMatrix C;
  // max of the two reconstruction residuals |O^T S O - dg^{1/2} C dg^{1/2}|_F
  double residual = 0.0;
};

/// O such that O^T s1 O and O^T s2 O share the correlation matrix C.
/// Throws corr_residual_exceeded when the reconstruction check fails.
SharedCorrelation shared_correlation_transform(
    const SpdMatrix& s1, const SpdMatrix& s2,
    const Tolerances& tol = default_tolerances());

}  // namespace cxorder
