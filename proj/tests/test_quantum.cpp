#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "slowlight/fock.hpp"
#include "slowlight/propagation.hpp"
#include "slowlight/quantum.hpp"

using namespace slowlight;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// Entropy from the eigenvalues of rho_1 = A A^dagger, a second route that
// does not share the SVD.
double entropy_from_density(const TwoModeState& s) {
  const Eigen::MatrixXcd a = s.amplitudes / std::sqrt(s.norm_sq());
  const Eigen::MatrixXcd rho = a * a.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
  double h = 0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const double p = es.eigenvalues()(k);
    if (p > 1e-300) {
      h -= p * std::log(p);
    }
  }
  return h;
}

// Phi = pi output written as c_e |a1>|even> + c_o |-a1>|odd>. The reduced
// state of mode 2 is a 2x2 matrix in {even, odd} built from Gram entries.
double cat_entropy_closed_form(double a1, double a2) {
  const double x = std::exp(-2.0 * a2 * a2);
  const double ce2 = (2.0 + 2.0 * x) / 4.0;
  const double co2 = (2.0 - 2.0 * x) / 4.0;
  const double off = std::sqrt(ce2 * co2) * std::exp(-2.0 * a1 * a1);
  const double mean = 0.5 * (ce2 + co2);
  const double rad = std::sqrt(0.25 * (ce2 - co2) * (ce2 - co2) + off * off);
  double h = 0;
  for (double p : {mean + rad, mean - rad}) {
    if (p > 0) {
      h -= p * std::log(p);
    }
  }
  return h;
}

} // namespace

TEST(Fock, TruncationRule) {
  EXPECT_EQ(fock_truncation(0.5), 14u);
  EXPECT_EQ(fock_truncation(1.0), 18u);
  EXPECT_EQ(fock_truncation(2.0), 28u);
  EXPECT_EQ(fock_truncation(cplx(0.0, 2.0)), 28u);
  EXPECT_EQ(fock_truncation(0.0), 10u);
}

TEST(Fock, CoherentStateNormAccountsForTail) {
  for (double a : {0.5, 1.0, 2.0, 3.5}) {
    for (std::size_t dim : {4u, 10u, 40u}) {
      const double kept = coherent_amplitudes(a, dim).squaredNorm();
      EXPECT_NEAR(kept + coherent_tail_mass(a, dim), 1.0, 1e-14) << a << " " << dim;
    }
  }
  EXPECT_NEAR(std::abs(coherent_overlap(1.0, -1.0)), std::exp(-2.0), 1e-15);
}

TEST(Fock, CrossKerrIsPeriodicAndUnitary) {
  const auto in = coherent_product_state(cplx(1.2, 0.3), 1.5);
  const auto same = apply_cross_kerr(in, two_pi);
  EXPECT_LT((same.amplitudes - in.amplitudes).cwiseAbs().maxCoeff(), 1e-12);
  const auto out = apply_cross_kerr(in, 0.7);
  EXPECT_NEAR(out.norm_sq(), in.norm_sq(), 1e-14);
}

TEST(Fock, OracleMatchesClosedFormMeanField) {
  for (cplx a1 : {cplx(0.5), cplx(1.0, -0.5)}) {
    for (double a2 : {0.5, 2.0}) {
      for (double phi : {0.0, 0.3, 1.0, std::numbers::pi, 5.0}) {
        const cplx expect = coherent_mean_field(a2 * a2, a1, phi);
        EXPECT_LT(std::abs(kerr_oracle_mean(a1, a2, phi) - expect), 1e-10);
      }
    }
  }
  // A too-small truncation is refused rather than silently wrong.
  EXPECT_THROW(kerr_oracle_mean(2.0, 2.0, 1.0, 6), std::invalid_argument);
}

TEST(Fock, CatStateAtPi) {
  for (double a : {0.5, 1.0, 2.0}) {
    const auto in = coherent_product_state(a, a);
    const auto out = apply_cross_kerr(in, std::numbers::pi);
    EXPECT_GT(cat_fidelity(out, a, a), 1.0 - 1e-10);
    const auto cat = cat_state(a, a, in.dim1(), in.dim2());
    EXPECT_NEAR(cat.norm_sq(), cat_norm_sq(a, a), 1e-12);
  }
  EXPECT_LT(cat_fidelity(coherent_product_state(2.0, 2.0), 2.0, 2.0), 0.5);
}

TEST(Fock, EntanglementEntropy) {
  EXPECT_NEAR(entanglement_entropy(coherent_product_state(1.0, 2.0)), 0.0, 1e-12);
  for (double a1 : {0.5, 1.0, 2.0}) {
    for (double a2 : {0.5, 1.0, 2.0}) {
      const auto out = apply_cross_kerr(coherent_product_state(a1, a2), std::numbers::pi);
      const double s = entanglement_entropy(out);
      EXPECT_NEAR(s, cat_entropy_closed_form(a1, a2), 1e-9) << a1 << " " << a2;
      EXPECT_NEAR(s, entropy_from_density(out), 1e-9);
      EXPECT_LE(s, std::log(2.0) + 1e-12);
    }
  }
  // Large amplitudes approach one ebit.
  const auto big = apply_cross_kerr(coherent_product_state(3.0, 3.0), std::numbers::pi);
  EXPECT_NEAR(entanglement_entropy(big), std::log(2.0), 1e-6);
}

TEST(Quantum, KerrExponentIdentity) {
  for (double phi : {-3.0, -0.1, 0.0, 0.5, 2.0, 7.0, 40.0}) {
    const cplx e = kerr_exponent(phi);
    EXPECT_NEAR(std::abs(e - (std::polar(1.0, phi) - 1.0)), 0.0, 1e-13);
  }
  EXPECT_EQ(kerr_exponent(two_pi), cplx(0.0, 0.0));
}

TEST(Quantum, CollapseRevivalEndpoints) {
  const auto scan = collapse_revival_scan(2.25, {0.0, std::numbers::pi, two_pi});
  EXPECT_DOUBLE_EQ(scan[0].modulus, 1.0);
  EXPECT_NEAR(scan[2].modulus, 1.0, 1e-15);
  EXPECT_NEAR(scan[1].modulus, std::exp(-4.5), 1e-15);
  EXPECT_THROW(collapse_revival_scan(1.0, {std::nan("")}), std::invalid_argument);
}

TEST(Quantum, SmallPhaseReducesToClassicalCrossPhase) {
  // For Phi -> 0 the mean field passes through unchanged in modulus and picks
  // up the linear phase Phi nbar, the same shift the classical solution gives
  // for eta |E2|^2 z = Phi |alpha2|^2 / bandwidth.
  const double nbar = 3.0;
  for (double phi : {1e-2, 1e-3, 1e-4}) {
    const cplx m = coherent_mean_field(nbar, 1.0, phi);
    EXPECT_NEAR(std::arg(m), phi * nbar, phi * phi * phi * nbar);
    EXPECT_NEAR(std::abs(m), std::exp(-nbar * phi * phi / 2.0), nbar * nbar * std::pow(phi, 4));
  }

  // Same comparison through the classical propagator, pointwise at the peak:
  // eta |E2|^2 z there against Phi nbar with Phi = eta * bandwidth.
  auto c = derive_coefficients(MediumParams{});
  c.kappa = 0;
  c.beta = 0;
  const TimeGrid g(256, -80, 80);
  const auto probe = make_gaussian_pulse(g, 1.0, 10.0, 0.0, 0.2);
  const auto pump = make_gaussian_pulse(g, 1e-3, 10.0, 0.0, 0.2);
  const auto r = propagate_pair(probe, pump, c, 1.0, 4);
  const std::size_t mid = 128;
  const double bandwidth = 0.2;
  const double nbar_pump = std::norm(pump.samples[mid]) / bandwidth;
  const double phi = c.eta.real() * bandwidth; // per-photon phase in these units
  const double quantum = std::arg(coherent_mean_field(nbar_pump, probe.samples[mid], phi));
  EXPECT_NEAR(std::arg(r.env1_out.samples[mid]), quantum, phi * phi * phi * nbar_pump);
  EXPECT_GT(std::arg(r.env1_out.samples[mid]), 0.0);
}

TEST(Quantum, SinglePhotonPacketIsNormalised) {
  const auto p = gaussian_single_photon(10.0, 2.0);
  EXPECT_NEAR(packet_norm(p, -100, 100), 1.0, 1e-12);
  EXPECT_THROW(gaussian_single_photon(0.0), std::invalid_argument);
}

TEST(Quantum, PairCorrelation) {
  const double phi = 1.1, bw = 0.4;
  EXPECT_NEAR(std::abs(pair_factor(phi, bw, 0.0) - std::polar(1.0, phi)), 0.0, 1e-15);
  for (int k = 1; k <= 3; ++k) {
    const double dt = 2.0 * k * std::numbers::pi / bw;
    EXPECT_NEAR(std::abs(pair_factor(phi, bw, dt) - 1.0), 0.0, 1e-12);
  }
  const auto p1 = gaussian_single_photon(10.0);
  const auto p2 = gaussian_single_photon(10.0);
  std::vector<double> t;
  for (int i = -200; i <= 200; ++i) {
    t.push_back(0.25 * i);
  }
  const auto free = photon_pair_correlation(p1, p2, 0.0, bw, t, t);
  EXPECT_NEAR(free.norm_integral(), 1.0, 1e-9);
  EXPECT_EQ(free.at(10, 300), p1.psi_fn(t[10]) * p2.psi_fn(t[300]));
  const auto interacting = photon_pair_correlation(p1, p2, phi, bw, t, t);
  EXPECT_NEAR(std::arg(interacting.at(200, 200)), phi, 1e-12);
}

TEST(Quantum, RetardedExitTime) {
  const auto c = derive_coefficients(MediumParams{});
  EXPECT_NEAR(retarded_exit_time(150.0, c.length, c), 150.0 - 101.0, 1e-12);
  EXPECT_NEAR(retarded_exit_time(150.0, c.length + 3.0, c), 150.0 - 101.0 - 3.0, 1e-12);
}
