#include "nlsmode/linalg.hpp"

#include <lapacke.h>

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace nlsmode {

template <class T>
double Banded<T>::max_abs() const {
  double m = 0.0;
  for (const auto& v : data) m = std::max(m, std::abs(v));
  return m;
}
template struct Banded<double>;
template struct Banded<cplx>;

Banded<cplx> to_complex(const Banded<double>& a) {
  Banded<cplx> out(a.n, a.bw);
  for (size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i];
  return out;
}

std::vector<cplx> apply_real_to_complex(const Banded<double>& a, const std::vector<cplx>& x) {
  std::vector<cplx> y(a.n, cplx(0));
  for (int i = 0; i < a.n; ++i) {
    cplx s(0);
    const int j0 = std::max(0, i - a.bw), j1 = std::min(a.n - 1, i + a.bw);
    for (int j = j0; j <= j1; ++j) s += a.get(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

namespace {

// Pack into LAPACK band storage with kl extra rows for the LU fill-in.
template <class T>
std::vector<T> pack_lapack_band(const Banded<T>& a) {
  const int n = a.n, kl = a.bw, ku = a.bw;
  const int ldab = 2 * kl + ku + 1;
  std::vector<T> ab(static_cast<size_t>(ldab) * n, T(0));
  for (int j = 0; j < n; ++j)
    for (int i = std::max(0, j - ku); i <= std::min(n - 1, j + kl); ++i)
      ab[static_cast<size_t>(j) * ldab + (kl + ku + i - j)] = a.get(i, j);
  return ab;
}

}  // namespace

std::vector<double> band_solve(const Banded<double>& a, std::vector<double> rhs) {
  const int n = a.n, kl = a.bw, ku = a.bw, ldab = 2 * kl + ku + 1;
  auto ab = pack_lapack_band(a);
  std::vector<lapack_int> ipiv(n);
  lapack_int info = LAPACKE_dgbsv(LAPACK_COL_MAJOR, n, kl, ku, 1, ab.data(), ldab, ipiv.data(),
                                  rhs.data(), n);
  if (info != 0) throw std::runtime_error("band_solve(d): dgbsv failed, info=" + std::to_string(info));
  return rhs;
}

std::vector<cplx> band_solve(const Banded<cplx>& a, std::vector<cplx> rhs) {
  const int n = a.n, kl = a.bw, ku = a.bw, ldab = 2 * kl + ku + 1;
  auto ab = pack_lapack_band(a);
  std::vector<lapack_int> ipiv(n);
  lapack_int info = LAPACKE_zgbsv(LAPACK_COL_MAJOR, n, kl, ku, 1,
                                  reinterpret_cast<lapack_complex_double*>(ab.data()), ldab,
                                  ipiv.data(), reinterpret_cast<lapack_complex_double*>(rhs.data()),
                                  n);
  if (info != 0) throw std::runtime_error("band_solve(z): zgbsv failed, info=" + std::to_string(info));
  return rhs;
}

double band_rcond(const Banded<double>& a) {
  const int n = a.n, kl = a.bw, ku = a.bw, ldab = 2 * kl + ku + 1;
  auto ab = pack_lapack_band(a);
  // 1-norm of A
  double anorm = 0.0;
  for (int j = 0; j < n; ++j) {
    double cs = 0.0;
    for (int i = std::max(0, j - ku); i <= std::min(n - 1, j + kl); ++i) cs += std::abs(a.get(i, j));
    anorm = std::max(anorm, cs);
  }
  std::vector<lapack_int> ipiv(n);
  lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n, n, kl, ku, ab.data(), ldab, ipiv.data());
  if (info != 0) return 0.0;
  double rcond = 0.0;
  info = LAPACKE_dgbcon(LAPACK_COL_MAJOR, '1', n, kl, ku, ab.data(), ldab, ipiv.data(), anorm,
                        &rcond);
  if (info != 0) return 0.0;
  return rcond;
}

void sym_eig(std::vector<double>& a, int n, std::vector<double>& eigenvalues) {
  eigenvalues.assign(n, 0.0);
  lapack_int info = LAPACKE_dsyev(LAPACK_COL_MAJOR, 'V', 'L', n, a.data(), n, eigenvalues.data());
  if (info != 0) throw std::runtime_error("sym_eig: dsyev failed, info=" + std::to_string(info));
}

void sym_gen_eig(std::vector<double>& a, std::vector<double>& b, int n,
                 std::vector<double>& eigenvalues) {
  eigenvalues.assign(n, 0.0);
  lapack_int info = LAPACKE_dsygvd(LAPACK_COL_MAJOR, 1, 'V', 'L', n, a.data(), n, b.data(), n,
                                   eigenvalues.data());
  if (info != 0)
    throw std::runtime_error("sym_gen_eig: dsygvd failed (B not PD?), info=" + std::to_string(info));
}

std::vector<cplx> real_eigvals(std::vector<double>& a, int n) {
  std::vector<double> wr(n), wi(n);
  lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n, wr.data(), wi.data(),
                                  nullptr, 1, nullptr, 1);
  if (info != 0) throw std::runtime_error("real_eigvals: dgeev failed, info=" + std::to_string(info));
  std::vector<cplx> w(n);
  for (int i = 0; i < n; ++i) w[i] = cplx(wr[i], wi[i]);
  return w;
}

std::vector<cplx> complex_eigvals(std::vector<cplx>& a, int n) {
  std::vector<cplx> w(n);
  lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n,
                                  reinterpret_cast<lapack_complex_double*>(a.data()), n,
                                  reinterpret_cast<lapack_complex_double*>(w.data()), nullptr, 1,
                                  nullptr, 1);
  if (info != 0) throw std::runtime_error("complex_eigvals: zgeev failed");
  return w;
}

double spectral_norm(const std::vector<double>& a, int k, int n) {
  if (k == 0 || n == 0) return 0.0;
  std::vector<double> acopy(a);
  std::vector<double> s(std::min(k, n));
  std::vector<double> superb(std::min(k, n));
  // row-major k x n
  lapack_int info = LAPACKE_dgesvd(LAPACK_ROW_MAJOR, 'N', 'N', k, n, acopy.data(), n, s.data(),
                                   nullptr, 1, nullptr, 1, superb.data());
  if (info != 0) throw std::runtime_error("spectral_norm: dgesvd failed");
  return s.empty() ? 0.0 : s[0];
}

}  // namespace nlsmode
