#ifndef SLOWLIGHT_FOCK_HPP
#define SLOWLIGHT_FOCK_HPP

// Brute-force two-mode Fock-space model of the cross-Kerr interaction
// U = exp(i Phi n1 n2). Used as an oracle for the closed-form coherent-state
// results and to check the cat-state output and its entanglement.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "slowlight/medium.hpp"

namespace slowlight {

using cplx = std::complex<double>;

/// Fock dimension that holds a coherent state |alpha> with wide margin:
/// ceil(|alpha|^2 + 7|alpha| + 10).
inline std::size_t fock_truncation(cplx alpha) {
  const double r = std::abs(alpha);
  return static_cast<std::size_t>(std::ceil(r * r + 7.0 * r + 10.0));
}

/// Poisson probability mass of |alpha> above the first `dim` Fock levels.
inline double coherent_tail_mass(cplx alpha, std::size_t dim) {
  const double mean = std::norm(alpha);
  if (mean == 0) {
    return 0.0;
  }
  // p_n = exp(-mean) mean^n / n!, summed from n = dim while terms matter.
  double log_p = -mean + static_cast<double>(dim) * std::log(mean) - std::lgamma(static_cast<double>(dim) + 1.0);
  double p = std::exp(log_p);
  double tail = 0;
  for (std::size_t n = dim; p > 0; ++n) {
    tail += p;
    p *= mean / static_cast<double>(n + 1);
    if (static_cast<double>(n) > mean && p < 1e-30 * tail) {
      break;
    }
  }
  return tail;
}

/// Coherent-state amplitudes <n|alpha> for n < dim.
inline Eigen::VectorXcd coherent_amplitudes(cplx alpha, std::size_t dim) {
  Eigen::VectorXcd c(static_cast<Eigen::Index>(dim));
  if (dim == 0) {
    return c;
  }
  c(0) = std::exp(-std::norm(alpha) / 2.0);
  for (std::size_t n = 1; n < dim; ++n) {
    c(static_cast<Eigen::Index>(n)) = c(static_cast<Eigen::Index>(n - 1)) * alpha / std::sqrt(static_cast<double>(n));
  }
  return c;
}

/// <alpha|beta> for untruncated coherent states.
inline cplx coherent_overlap(cplx alpha, cplx beta) {
  return std::exp(-std::norm(alpha) / 2.0 - std::norm(beta) / 2.0 + std::conj(alpha) * beta);
}

/// Amplitudes over |n1, m2>, n < dim1, m < dim2. `norm_deficit` is the
/// probability the construction left outside the truncated space.
struct TwoModeState {
  Eigen::MatrixXcd amplitudes;
  double norm_deficit = 0;

  std::size_t dim1() const { return static_cast<std::size_t>(amplitudes.rows()); }
  std::size_t dim2() const { return static_cast<std::size_t>(amplitudes.cols()); }
  double norm_sq() const { return amplitudes.squaredNorm(); }
};

/// |alpha1> (x) |alpha2>, each mode truncated at `dim` (0 selects
/// fock_truncation per mode).
inline TwoModeState coherent_product_state(cplx alpha1, cplx alpha2, std::size_t dim1 = 0, std::size_t dim2 = 0) {
  if (dim1 == 0) {
    dim1 = fock_truncation(alpha1);
  }
  if (dim2 == 0) {
    dim2 = fock_truncation(alpha2);
  }
  const Eigen::VectorXcd c1 = coherent_amplitudes(alpha1, dim1);
  const Eigen::VectorXcd c2 = coherent_amplitudes(alpha2, dim2);
  const double d1 = coherent_tail_mass(alpha1, dim1);
  const double d2 = coherent_tail_mass(alpha2, dim2);
  TwoModeState s;
  s.amplitudes = c1 * c2.transpose();
  s.norm_deficit = d1 + d2 - d1 * d2;
  return s;
}

/// amplitudes[n][m] *= exp(i Phi n m). Diagonal and unitary.
inline TwoModeState apply_cross_kerr(const TwoModeState& state, double phi) {
  TwoModeState out = state;
  for (Eigen::Index n = 0; n < out.amplitudes.rows(); ++n) {
    for (Eigen::Index m = 0; m < out.amplitudes.cols(); ++m) {
      out.amplitudes(n, m) *= std::polar(1.0, phi * static_cast<double>(n * m));
    }
  }
  return out;
}

/// Truncated annihilation operator: a(n, n+1) = sqrt(n+1).
inline Eigen::MatrixXcd annihilation_matrix(std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index n = 0; n + 1 < d; ++n) {
    a(n, n + 1) = std::sqrt(static_cast<double>(n + 1));
  }
  return a;
}

namespace detail {

inline void require_truncation(double deficit, double limit, const std::string& what) {
  if (!(deficit <= limit)) {
    throw std::invalid_argument(what + ": Fock truncation too small (norm deficit " + num(deficit) + " > " +
                                num(limit) + ")");
  }
}

} // namespace detail

/// <a1> after U = exp(i Phi n1 n2) acting on |alpha1, alpha2>, computed by
/// explicit matrix algebra in the truncated basis. trunc = 0 selects the
/// default truncation for the larger amplitude.
inline cplx kerr_oracle_mean(cplx alpha1, cplx alpha2, double phi, std::size_t trunc = 0) {
  if (trunc == 0) {
    trunc = std::max(fock_truncation(alpha1), fock_truncation(alpha2));
  }
  const TwoModeState in = coherent_product_state(alpha1, alpha2, trunc, trunc);
  detail::require_truncation(in.norm_deficit, 1e-10, "kerr_oracle_mean");
  const TwoModeState out = apply_cross_kerr(in, phi);
  const Eigen::MatrixXcd a1 = annihilation_matrix(trunc);
  const Eigen::MatrixXcd a_psi = a1 * out.amplitudes;
  return out.amplitudes.conjugate().cwiseProduct(a_psi).sum() / out.norm_sq();
}

/// (1/2)(|a1,a2> + |-a1,a2> + |a1,-a2> - |-a1,-a2>), truncated.
inline TwoModeState cat_state(cplx alpha1, cplx alpha2, std::size_t dim1, std::size_t dim2) {
  const Eigen::VectorXcd p1 = coherent_amplitudes(alpha1, dim1);
  const Eigen::VectorXcd m1 = coherent_amplitudes(-alpha1, dim1);
  const Eigen::VectorXcd p2 = coherent_amplitudes(alpha2, dim2);
  const Eigen::VectorXcd m2 = coherent_amplitudes(-alpha2, dim2);
  TwoModeState s;
  s.amplitudes = 0.5 * (p1 * p2.transpose() + m1 * p2.transpose() + p1 * m2.transpose() - m1 * m2.transpose());
  const double d1 = coherent_tail_mass(alpha1, dim1);
  const double d2 = coherent_tail_mass(alpha2, dim2);
  s.norm_deficit = d1 + d2 - d1 * d2;
  return s;
}

/// <psi_cat|psi_cat> from untruncated coherent-state overlaps.
inline double cat_norm_sq(cplx alpha1, cplx alpha2) {
  const cplx a[4] = {alpha1, -alpha1, alpha1, -alpha1};
  const cplx b[4] = {alpha2, alpha2, -alpha2, -alpha2};
  const double sign[4] = {1, 1, 1, -1};
  cplx sum = 0;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      sum += sign[i] * sign[j] * coherent_overlap(a[i], a[j]) * coherent_overlap(b[i], b[j]);
    }
  }
  return sum.real() / 4.0;
}

/// |<psi_cat|state>|^2 / <psi_cat|psi_cat>.
inline double cat_fidelity(const TwoModeState& state, cplx alpha1, cplx alpha2) {
  const double d1 = coherent_tail_mass(alpha1, state.dim1());
  const double d2 = coherent_tail_mass(alpha2, state.dim2());
  detail::require_truncation(d1 + d2 - d1 * d2, 1e-10, "cat_fidelity");
  const TwoModeState cat = cat_state(alpha1, alpha2, state.dim1(), state.dim2());
  const cplx overlap = cat.amplitudes.conjugate().cwiseProduct(state.amplitudes).sum();
  return std::norm(overlap) / cat_norm_sq(alpha1, alpha2);
}

/// Von Neumann entropy (nats) of either reduced mode, from the Schmidt
/// coefficients of the amplitude matrix.
inline double entanglement_entropy(const TwoModeState& state) {
  detail::require_truncation(state.norm_deficit, 1e-8, "entanglement_entropy");
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(state.amplitudes);
  const Eigen::VectorXd s = svd.singularValues();
  const double total = s.squaredNorm();
  double entropy = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    const double p = s(k) * s(k) / total;
    if (p > 0) {
      entropy -= p * std::log(p);
    }
  }
  return entropy;
}

} // namespace slowlight

#endif
