#pragma once

#include <complex>
#include <span>
#include <vector>

namespace nlsmode {

using cplx = std::complex<double>;

/// Square banded matrix with equal lower/upper bandwidth, row-major bands.
/// band(i, k) is the entry A(i, i+k) for k in [-bw, bw].
template <class T>
struct Banded {
  int n = 0;
  int bw = 0;
  std::vector<T> data;  // (2*bw+1) per row

  Banded() = default;
  Banded(int n_, int bw_) : n(n_), bw(bw_), data(static_cast<size_t>(n_) * (2 * bw_ + 1), T(0)) {}

  T& at(int i, int j) { return data[static_cast<size_t>(i) * (2 * bw + 1) + (j - i + bw)]; }
  T get(int i, int j) const {
    if (j < i - bw || j > i + bw || j < 0 || j >= n) return T(0);
    return data[static_cast<size_t>(i) * (2 * bw + 1) + (j - i + bw)];
  }

  void apply(std::span<const T> x, std::span<T> y) const {
    for (int i = 0; i < n; ++i) {
      T s(0);
      const int j0 = std::max(0, i - bw), j1 = std::min(n - 1, i + bw);
      for (int j = j0; j <= j1; ++j) s += get(i, j) * x[j];
      y[i] = s;
    }
  }

  std::vector<T> apply(const std::vector<T>& x) const {
    std::vector<T> y(n, T(0));
    apply(std::span<const T>(x.data(), x.size()), std::span<T>(y.data(), y.size()));
    return y;
  }

  Banded<T>& add_diag(std::span<const T> dvals, T scale = T(1)) {
    for (int i = 0; i < n; ++i) at(i, i) += scale * dvals[i];
    return *this;
  }
  Banded<T>& axpy(const Banded<T>& other, T scale) {
    for (size_t i = 0; i < data.size(); ++i) data[i] += scale * other.data[i];
    return *this;
  }

  double max_abs() const;
};

Banded<cplx> to_complex(const Banded<double>& a);

/// y = A x for complex x with a real matrix.
std::vector<cplx> apply_real_to_complex(const Banded<double>& a, const std::vector<cplx>& x);

/// Solve A x = b, general banded (LAPACK *gbsv).  A is not preserved.
std::vector<double> band_solve(const Banded<double>& a, std::vector<double> rhs);
std::vector<cplx> band_solve(const Banded<cplx>& a, std::vector<cplx> rhs);

/// Reciprocal condition estimate (1-norm) of a banded matrix.
double band_rcond(const Banded<double>& a);

/// Dense symmetric eigensolve (ascending).  a is column-major n*n.
void sym_eig(std::vector<double>& a, int n, std::vector<double>& eigenvalues);

/// Dense generalized symmetric-definite eigensolve A v = lambda B v.
/// On return `a` holds the B-orthonormal eigenvectors column-wise.
void sym_gen_eig(std::vector<double>& a, std::vector<double>& b, int n,
                 std::vector<double>& eigenvalues);

/// Dense real nonsymmetric eigenvalues (no vectors).  a is destroyed.
std::vector<cplx> real_eigvals(std::vector<double>& a, int n);

/// Dense complex eigenvalues (no vectors).  a is destroyed (column-major).
std::vector<cplx> complex_eigvals(std::vector<cplx>& a, int n);

/// Largest singular value of a dense k x n matrix (row-major).
double spectral_norm(const std::vector<double>& a, int k, int n);

}  // namespace nlsmode
