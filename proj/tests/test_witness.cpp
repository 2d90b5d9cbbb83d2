#include "sqe/states.hpp"
#include "sqe/witness.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <thread>

using sqe::FockMatrix;
using sqe::FockState;
using sqe::Index;
using cd = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

// <m|f(p)|n> = int conj(<p|m>) <p|n> f(p) dp by a fine trapezoid rule.
FockMatrix momentum_function_matrix(Index n, double lo, double hi, double h, auto&& f) {
  const cd phases[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
  FockMatrix out = FockMatrix::Zero(n, n);
  for (double p = lo; p <= hi; p += h) {
    const Eigen::VectorXd phi = sqe::hermite_functions<double>(n, p);
    const double fp = f(p) * h;
    for (Index m = 0; m < n; ++m) {
      for (Index k = 0; k < n; ++k) out(m, k) += std::conj(phases[m % 4]) * phases[k % 4] * phi(m) * phi(k) * fp;
    }
  }
  return out;
}

// Ideal comb density sum_j rho(p_j) for a Gaussian momentum distribution.
double comb_density_sum(double u, double mean, double var) {
  double acc = 0.0;
  for (long j = -400; j <= 400; ++j) {
    const double p = sqe::comb_point(u, 0.0, j);
    acc += std::exp(-(p - mean) * (p - mean) / (2 * var)) / std::sqrt(2 * kPi * var);
  }
  return acc;
}

// <(x^2 - u^2)^2> for x ~ Normal(mean, var).
double ox_gaussian(double u, double mean, double var) {
  const double m2 = mean * mean + var;
  const double m4 = std::pow(mean, 4) + 6 * mean * mean * var + 3 * var * var;
  return m4 - 2 * u * u * m2 + std::pow(u, 4);
}

}  // namespace

TEST_SUITE("witness") {
  TEST_CASE("spec validation") {
    sqe::WitnessSpec s;
    CHECK_NOTHROW(s.validate());
    s.u = 0;
    CHECK_THROWS_AS(s.validate(), sqe::InvalidArgument);
    s = {};
    s.c = -1;
    CHECK_THROWS_AS(s.validate(), sqe::InvalidArgument);
    s = {};
    s.k = 0;
    CHECK_THROWS_AS(s.validate(), sqe::InvalidArgument);
    s = {};
    s.dim = 0;
    CHECK_THROWS_AS(s.validate(), sqe::InvalidArgument);
  }

  TEST_CASE("comb points") {
    CHECK(sqe::comb_point(1.0, 0.0, 1) == doctest::Approx(kPi / 2));
    CHECK(sqe::comb_point(1.0, 0.0, 0) == doctest::Approx(-kPi / 2));
    CHECK(sqe::comb_point(2.0, 1.0, 2) == doctest::Approx((3 * kPi - 1) / 4));
  }

  TEST_CASE("O_x matches Gauss-Hermite integration of the polynomial") {
    const double u = 2.3;
    const Index n = 12;
    const FockMatrix ox = sqe::build_Ox(u, n);
    const auto rule = sqe::gauss_hermite(n + 4);
    Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index q = 0; q < rule.nodes.size(); ++q) {
      const double x = rule.nodes(q);
      const Eigen::VectorXd phi = sqe::hermite_functions<double>(n, x);
      ref += rule.scaled_weights(q) * std::pow(x * x - u * u, 2) * phi * phi.transpose();
    }
    CHECK((ox - ref.cast<cd>()).cwiseAbs().maxCoeff() < 1e-10);
  }

  TEST_CASE("O~_p matrix elements match a direct momentum-space integral") {
    const double u = 2.0, phi = 0.7;
    const int k = 100;
    const Index n = 8;
    const FockMatrix op = sqe::build_Op_approx(u, phi, k, n);
    const double pref = u / std::sqrt(kPi) * sqe::half_falling_factorial(k);
    const FockMatrix ref = momentum_function_matrix(
        n, -12.0, 12.0, 2e-4, [&](double p) { return pref * std::pow(std::sin(u * p + phi / 2), 2 * k); });
    CHECK((op - ref).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(sqe::is_hermitian(op));
  }

  TEST_CASE("spectral and Fourier routes agree for a broad comb") {
    const FockMatrix fourier = sqe::build_Op_approx(1.0, 0.3, 3, 10, sqe::CombMethod::kFourier);
    const FockMatrix spectral = sqe::build_Op_approx(1.0, 0.3, 3, 10, sqe::CombMethod::kSpectral, 120);
    CHECK((fourier - spectral).cwiseAbs().maxCoeff() < 1e-8);
  }

  TEST_CASE("matrix-free expectation agrees with the matrix") {
    std::mt19937 gen(5);
    std::normal_distribution<double> g;
    sqe::FockVector v(15);
    for (auto& a : v) a = {g(gen), g(gen)};
    const FockState psi = FockState::from_amplitudes(v);
    const FockMatrix op = sqe::build_Op_approx(3.0, 0.4, 100, 15);
    CHECK(sqe::op_approx_expectation(psi, 3.0, 0.4, 100) == doctest::Approx(psi.expectation(op)).epsilon(1e-12));
  }

  TEST_CASE("ideal comb diagonal") {
    for (Index n : {0, 3, 10}) {
      const double u = 1.4, phi = 0.5;
      double direct = 0.0;
      for (long j = -200; j <= 200; ++j) {
        const double p = sqe::comb_point(u, phi, j);
        direct += std::pow(sqe::hermite_functions<double>(n + 1, p)(n), 2);
      }
      CHECK(sqe::exact_Op_diagonal(u, phi, n) == doctest::Approx(direct).epsilon(1e-13));
      CHECK(sqe::exact_Op_diagonal(u, phi, n, 500) == doctest::Approx(direct).epsilon(1e-13));
      const FockMatrix trunc = sqe::build_Op_truncated_eigenkets(u, phi, n + 1);
      CHECK(trunc(n, n).real() == doctest::Approx(direct).epsilon(1e-12));
    }
  }

  TEST_CASE("sharp combs approximate the ideal comb, blunt ones do not") {
    const auto sharp = sqe::accuracy_scan(3.0, 100, 10);
    REQUIRE(sharp.size() == 11);
    for (const auto& row : sharp) CHECK(row.rel_error < 0.02);
    const auto blunt = sqe::accuracy_scan(3.0, 1, 10);
    double worst = 0.0;
    for (const auto& row : blunt) worst = std::max(worst, row.rel_error);
    CHECK(worst > 0.1);
  }

  TEST_CASE("witness is O_x plus c times O~_p") {
    sqe::WitnessSpec s;
    s.u = 2.5;
    s.phi = 0.2;
    s.c = 4.0;
    s.dim = 10;
    s.k = 50;
    const FockMatrix expected = sqe::build_Ox(2.5, 10) + 4.0 * sqe::build_Op_approx(2.5, 0.2, 50, 10);
    CHECK((sqe::build_witness(s) - expected).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("witnesses are positive semidefinite") {
    for (const sqe::WitnessSpec s : {sqe::WitnessSpec{3.0, 0.0, 10.0, 20, 100}, sqe::WitnessSpec{1.0, 2.0, 0.5, 30, 100},
                                     sqe::WitnessSpec{2.0, 0.7, 0.0, 12, 100}, sqe::WitnessSpec{4.0, 3.1, 25.0, 40, 10}}) {
      const auto eig = sqe::hermitian_eig(sqe::build_witness(s));
      const double scale = eig.values.cwiseAbs().maxCoeff();
      CHECK(eig.values(0) >= -1e-8 * scale);
    }
  }

  TEST_CASE("witness cache is shared across threads") {
    sqe::WitnessSpec s;
    s.dim = 9;
    s.c = 3.5;
    std::vector<std::shared_ptr<const FockMatrix>> got(8);
    std::vector<std::thread> pool;
    for (int t = 0; t < 8; ++t) pool.emplace_back([&, t] { got[t] = sqe::cached_witness(s); });
    for (auto& t : pool) t.join();
    for (const auto& p : got) CHECK(p == sqe::cached_witness(s));
    CHECK((*got[0] - sqe::build_witness(s)).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("squeezed-vacuum expectation matches Gaussian moments") {
    for (double r : {-0.7, 0.0, 0.4, 1.1}) {
      for (double c : {0.0, 3.0, 10.0}) {
        const double u = 2.2;
        const double direct = ox_gaussian(u, 0, std::exp(-2 * r) / 2) + c * comb_density_sum(u, 0, std::exp(2 * r) / 2);
        CHECK(sqe::squeezed_vacuum_expectation(u, c, r) == doctest::Approx(direct).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("Gaussian bound at c = 0 and the calculus optimum") {
    const auto b0 = sqe::gaussian_bound(3.0, 0.0, 0.0);
    CHECK(b0.squeezed_min == doctest::Approx(54.0).epsilon(1e-10));
    CHECK(b0.squeezed_argmin == doctest::Approx(-std::log(6.0) / 2).epsilon(1e-6));
    CHECK(b0.bracket_ok);
    CHECK(b0.value == 0.0);
    CHECK(b0.branch == sqe::GaussianBranch::kInfinitelySqueezed);
    CHECK_FALSE(b0.argmin_r.has_value());

    const auto b10 = sqe::gaussian_bound(3.0, 0.0, 10.0);
    CHECK(b10.value == doctest::Approx(std::min(b10.squeezed_min, 30.0 / kPi)));
    CHECK_THROWS_AS(sqe::gaussian_bound(0.0, 0.0, 1.0), sqe::InvalidArgument);
    CHECK_THROWS_AS(sqe::gaussian_bound(1.0, 0.0, -1.0), sqe::InvalidArgument);
  }

  TEST_CASE("Gaussian bound is nondecreasing in c") {
    for (double u : {1.0, 2.0, 3.0}) {
      double prev = -1.0;
      for (double c = 0.0; c <= 20.0; c += 0.5) {
        const double v = sqe::gaussian_bound(u, 0.0, c).value;
        CHECK(v >= prev - 1e-12);
        prev = v;
      }
    }
  }

  TEST_CASE("no random pure Gaussian state beats the bound") {
    std::mt19937 gen(2024);
    std::uniform_real_distribution<double> r_dist(-2.0, 2.0), th_dist(0.0, kPi), mu_dist(-4.0, 4.0);
    for (double c : {0.5, 3.0, 10.0}) {
      const double u = 2.0;
      const double bound = sqe::gaussian_bound(u, 0.0, c).value;
      double lowest = std::numeric_limits<double>::infinity();
      for (int trial = 0; trial < 500; ++trial) {
        const double r = r_dist(gen), th = th_dist(gen), mx = mu_dist(gen), mp = mu_dist(gen);
        // Rotated squeezed vacuum: marginal variances of x and p.
        const double a = std::exp(-2 * r) / 2, b = std::exp(2 * r) / 2;
        const double vx = a * std::cos(th) * std::cos(th) + b * std::sin(th) * std::sin(th);
        const double vp = a * std::sin(th) * std::sin(th) + b * std::cos(th) * std::cos(th);
        lowest = std::min(lowest, ox_gaussian(u, mx, vx) + c * comb_density_sum(u, mp, vp));
      }
      CHECK(lowest >= bound - 1e-9);
    }
  }

  TEST_CASE("squeezing in dB") {
    CHECK(sqe::squeezing_db(2.0, 1.0).db == doctest::Approx(10 * std::log10(2.0)));
    CHECK_FALSE(sqe::squeezing_db(2.0, 1.0).clamped);
    const auto floored = sqe::squeezing_db(-1.0, 1.0);
    CHECK(floored.clamped);
    CHECK(floored.db == doctest::Approx(-140.0));
  }

  TEST_CASE("rescaled witness is g^4 O_x(1/g) plus c O~_p(1/g)") {
    const FockMatrix lhs = sqe::rescaled_witness(0.5, 0.3, 5.0, 12);
    const FockMatrix rhs = 0.0625 * sqe::build_Ox(2.0, 12) + 5.0 * sqe::build_Op_approx(2.0, 0.3, 100, 12);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
    const FockState psi = FockState::basis(12, 3);
    CHECK(sqe::rescaled_witness_expectation(psi, 0.5, 0.3, 5.0) == doctest::Approx(psi.expectation(lhs)).epsilon(1e-10));
  }

  TEST_CASE("min over g beats a dense grid and is squeeze covariant") {
    const FockState cat = sqe::squeezed_cat({2.0, 0.0, 0.0, 60});
    const auto best = sqe::min_over_g(cat, 0.0, 2.0);
    CHECK_FALSE(best.at_boundary);
    double grid_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 400; ++i) {
      const double g = 0.2 * std::pow(10.0, i / 400.0 * 1.2);
      grid_min = std::min(grid_min, sqe::rescaled_witness_expectation(cat, g, 0.0, 2.0));
    }
    CHECK(best.value <= grid_min + 1e-9);

    // The x part is exactly covariant under squeezing; the comb part carries an
    // explicit 1/g prefactor, so only c = 0 gives an exact shift of g*.
    const FockMatrix s = sqe::squeeze(0.3, 60, 80);
    const FockState squeezed = FockState::from_amplitudes(s * cat.amplitudes());
    const auto plain = sqe::min_over_g(cat, 0.0, 0.0);
    const auto moved = sqe::min_over_g(squeezed, 0.0, 0.0);
    CHECK(moved.value == doctest::Approx(plain.value).epsilon(1e-6));
    CHECK(moved.g == doctest::Approx(plain.g * std::exp(0.3)).epsilon(1e-4));
  }
}
