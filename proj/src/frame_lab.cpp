#include "frametol/frame_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "frametol/kernels.hpp"
#include "frametol/rng.hpp"
#include "frametol/tolerance.hpp"

namespace frametol {

namespace {

constexpr double pi = 3.141592653589793238462643383279502884;
constexpr int dense_order_limit = 512;

double sinc_product(const Eigen::MatrixXd& a, int j, const Eigen::MatrixXd& b, int k) {
  double p = 1.0;
  for (int m = 0; m < a.cols(); ++m) p *= kernels::sinc_pi(a(j, m) - b(k, m));
  return p;
}

double defect_from_gram(const Eigen::MatrixXd& diff, const Eigen::VectorXcd& coeffs) {
  const Eigen::VectorXd re = coeffs.real();
  const Eigen::VectorXd im = coeffs.imag();
  // conj(a)^T M a is real for real symmetric M: the cross terms cancel.
  const double q = re.dot(diff * re) + im.dot(diff * im);
  return std::sqrt(std::max(0.0, q));
}

SpectralEstimate lanczos_extremes(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  const int max_steps = std::min(n, 400);

  Eigen::MatrixXd basis(n, max_steps);
  Eigen::VectorXd alpha(max_steps);
  Eigen::VectorXd beta(max_steps);

  SplitMix64 rng(0x6c616e637a6f73ull);  // fixed stream: runs are reproducible
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = 2.0 * rng.uniform01() - 1.0;
  v.normalize();
  basis.col(0) = v;

  double best_residual = std::numeric_limits<double>::infinity();
  for (int k = 0; k < max_steps; ++k) {
    Eigen::VectorXd w = m * basis.col(k);
    alpha(k) = basis.col(k).dot(w);
    w -= alpha(k) * basis.col(k);
    if (k > 0) w -= beta(k - 1) * basis.col(k - 1);
    // full reorthogonalization, applied twice
    const auto span = basis.leftCols(k + 1);
    w -= span * (span.transpose() * w);
    w -= span * (span.transpose() * w);
    const double b = w.norm();

    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(k + 1, k + 1);
    for (int i = 0; i <= k; ++i) tri(i, i) = alpha(i);
    for (int i = 0; i < k; ++i) {
      tri(i, i + 1) = beta(i);
      tri(i + 1, i) = beta(i);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(tri);
    const double lambda_min = ritz.eigenvalues()(0);
    const double lambda_max = ritz.eigenvalues()(k);
    const double scale = std::max(std::abs(lambda_min), std::abs(lambda_max));
    const double bound_min = b * std::abs(ritz.eigenvectors()(k, 0));
    const double bound_max = b * std::abs(ritz.eigenvectors()(k, k));
    best_residual = std::min(best_residual, std::max(bound_min, bound_max));

    const bool breakdown = b <= scale * 1e-13;  // Krylov space became invariant
    if (breakdown || std::max(bound_min, bound_max) <= 0.5e-8 * scale) {
      Eigen::VectorXd v_min = basis.leftCols(k + 1) * ritz.eigenvectors().col(0);
      Eigen::VectorXd v_max = basis.leftCols(k + 1) * ritz.eigenvectors().col(k);
      v_min.normalize();
      v_max.normalize();
      const double residual = std::max((m * v_min - lambda_min * v_min).norm(),
                                       (m * v_max - lambda_max * v_max).norm());
      if (breakdown || residual <= 1e-8 * scale)
        return {lambda_min, lambda_max, SpectralMethod::iterative, residual, k + 1};
    }
    if (k + 1 < max_steps) {
      beta(k) = b;
      basis.col(k + 1) = w / b;
    }
  }
  throw ConvergenceError("Lanczos did not reach the residual target in " +
                         std::to_string(max_steps) +
                         " steps (best residual bound " + std::to_string(best_residual) + ")");
}

}  // namespace

NodeSet::NodeSet(Eigen::MatrixXd frequencies) : freq(std::move(frequencies)) {
  if (freq.rows() < 1 || freq.cols() < 1)
    throw std::domain_error("node set needs n >= 1 nodes in dimension d >= 1");
  if (!freq.allFinite()) throw std::domain_error("node coordinates must be finite");
}

PerturbedSystem::PerturbedSystem(NodeSet base_nodes, NodeSet perturbed_nodes)
    : base(std::move(base_nodes)), perturbed(std::move(perturbed_nodes)), delta(0.0) {
  if (base.freq.rows() != perturbed.freq.rows() || base.freq.cols() != perturbed.freq.cols())
    throw std::domain_error("base and perturbed node sets must have matching shapes");
  delta = (perturbed.freq - base.freq).cwiseAbs().maxCoeff();
}

Eigen::MatrixXd gram(const NodeSet& nodes) {
  const int n = nodes.size();
  Eigen::MatrixXd g(n, n);
  for (int j = 0; j < n; ++j) {
    g(j, j) = 1.0;
    for (int k = j + 1; k < n; ++k) {
      const double value = sinc_product(nodes.freq, j, nodes.freq, k);
      g(j, k) = value;
      g(k, j) = value;
    }
  }
  return g;
}

Eigen::MatrixXd difference_gram(const PerturbedSystem& system) {
  const int n = system.base.size();
  const Eigen::MatrixXd& t = system.base.freq;
  const Eigen::MatrixXd& tau = system.perturbed.freq;
  Eigen::MatrixXd diff(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = j; k < n; ++k) {
      const double value = sinc_product(t, j, t, k) + sinc_product(tau, j, tau, k) -
                           sinc_product(t, j, tau, k) - sinc_product(t, k, tau, j);
      diff(j, k) = value;
      diff(k, j) = value;
    }
  }
  return diff;
}

double upper_bound_B(const NodeSet& nodes) {
  return std::sqrt(std::max(0.0, spectral_extremes(gram(nodes)).lambda_max));
}

double perturbation_defect(const PerturbedSystem& system, const Eigen::VectorXcd& coeffs) {
  if (coeffs.size() != system.base.size())
    throw std::invalid_argument("coefficient vector length must equal the node count");
  return defect_from_gram(difference_gram(system), coeffs);
}

SpectralEstimate spectral_extremes(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() != matrix.cols() || matrix.rows() < 1)
    throw std::invalid_argument("matrix must be square and nonempty");
  if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("matrix must be symmetric within 1e-12");

  const int n = static_cast<int>(matrix.rows());
  if (n > dense_order_limit) return lanczos_extremes(matrix);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix);
  if (solver.info() != Eigen::Success)
    throw ConvergenceError("dense symmetric eigensolver failed to converge");
  const double lambda_min = solver.eigenvalues()(0);
  const double lambda_max = solver.eigenvalues()(n - 1);
  const Eigen::VectorXd v_min = solver.eigenvectors().col(0);
  const Eigen::VectorXd v_max = solver.eigenvectors().col(n - 1);
  const double residual = std::max((matrix * v_min - lambda_min * v_min).norm(),
                                   (matrix * v_max - lambda_max * v_max).norm());
  return {lambda_min, lambda_max, SpectralMethod::dense, residual, 0};
}

LemmaReport lemma_certificate(const PerturbedSystem& system, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::domain_error("trials must be >= 1");
  const int n = system.base.size();
  const int d = system.base.dim();

  const Eigen::MatrixXd diff = difference_gram(system);
  const double worst = std::sqrt(std::max(0.0, spectral_extremes(diff).lambda_max));
  const double finite_b = upper_bound_B(system.base);
  const double bound = finite_b * std::expm1(pi * d * system.delta);

  double random_max = 0.0;
  for (int t = 0; t < trials; ++t) {
    SplitMix64 rng = derive_stream(seed, static_cast<std::uint64_t>(t));
    Eigen::VectorXcd a(n);
    for (int i = 0; i < n; ++i) {
      const double re = 2.0 * rng.uniform01() - 1.0;
      const double im = 2.0 * rng.uniform01() - 1.0;
      a(i) = std::complex<double>(re, im);
    }
    random_max = std::max(random_max, defect_from_gram(diff, a) / a.norm());
  }

  const double allowance = bound * (1.0 + 1e-9);
  return {d,
          n,
          system.delta,
          finite_b,
          bound,
          worst,
          random_max,
          bound > 0.0 ? worst / bound : 0.0,
          worst <= allowance && random_max <= allowance};
}

std::vector<LemmaReport> lemma_suite(int systems, std::uint64_t seed, int trials_per_system) {
  if (systems < 1) throw std::domain_error("suite needs at least one system");
  std::vector<LemmaReport> reports;
  reports.reserve(systems);
  for (int s = 0; s < systems; ++s) {
    SplitMix64 rng = derive_stream(seed, static_cast<std::uint64_t>(s));
    const int d = 1 + s % 3;
    const int n = 1 + static_cast<int>(rng.next() % 40);
    const double radius = 0.2 * (1.0 - rng.uniform01());  // sup-norm cap in (0, 0.2]
    Eigen::MatrixXd base(n, d);
    Eigen::MatrixXd perturbed(n, d);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j) {
        base(i, j) = rng.symmetric(5.0);
        perturbed(i, j) = base(i, j) + rng.symmetric(radius);
      }
    PerturbedSystem system{NodeSet(base), NodeSet(perturbed)};
    reports.push_back(lemma_certificate(system, trials_per_system, rng.next()));
  }
  return reports;
}

Eigen::MatrixXi lattice_window(int dim, int halfwidth) {
  if (dim < 1) throw std::domain_error("window dimension must be >= 1");
  if (halfwidth < 0) throw std::domain_error("window halfwidth must be >= 0");
  const long side = 2L * halfwidth + 1;
  const double sized = std::pow(static_cast<double>(side), dim);
  if (sized > 4e6) throw std::domain_error("lattice window too large");
  const long count = std::lround(sized);

  Eigen::MatrixXi window(count, dim);
  std::vector<int> point(dim, -halfwidth);
  for (long r = 0; r < count; ++r) {
    for (int j = 0; j < dim; ++j) window(r, j) = point[j];
    for (int j = dim - 1; j >= 0; --j) {  // odometer, last coordinate fastest
      if (point[j] < halfwidth) {
        ++point[j];
        break;
      }
      point[j] = -halfwidth;
    }
  }
  return window;
}

Eigen::MatrixXd analysis_section(const NodeSet& perturbed, const Eigen::MatrixXi& window) {
  if (window.rows() < 1) throw std::domain_error("lattice window must be nonempty");
  if (window.cols() != perturbed.dim())
    throw std::domain_error("window dimension must match the node dimension");
  const int rows = perturbed.size();
  const int cols = static_cast<int>(window.rows());
  Eigen::MatrixXd section(rows, cols);
  for (int k = 0; k < rows; ++k)
    for (int m = 0; m < cols; ++m) {
      double p = 1.0;
      for (int j = 0; j < window.cols(); ++j)
        p *= kernels::sinc_pi(perturbed.freq(k, j) - window(m, j));
      section(k, m) = p;
    }
  return section;
}

FrameMarginReport frame_margin_experiment(int dim, int outer_halfwidth, int inner_halfwidth,
                                          double delta, int trials, std::uint64_t seed) {
  if (dim < 1) throw std::domain_error("dimension must be >= 1");
  if (inner_halfwidth < 0 || inner_halfwidth >= outer_halfwidth)
    throw std::domain_error("invalid geometry: require 0 <= M < N");
  if (trials < 1) throw std::domain_error("trials must be >= 1");
  if (!(delta >= 0.0)) throw std::domain_error("delta must be >= 0");
  const double omega = omega_d(dim, FrameRatio::from_rho(1.0));
  if (!(delta < omega))
    throw std::domain_error("delta must stay below ln(2)/(pi d), the hypothesis region");

  const Eigen::MatrixXi outer = lattice_window(dim, outer_halfwidth);
  const Eigen::MatrixXi inner = lattice_window(dim, inner_halfwidth);
  if (static_cast<double>(outer.rows()) * static_cast<double>(inner.rows()) > 1.6e7)
    throw std::domain_error("analysis section too large for this window pair");

  FrameMarginReport report{dim,
                           outer_halfwidth,
                           inner_halfwidth,
                           delta,
                           {},
                           {},
                           std::numeric_limits<double>::infinity(),
                           1.0 - std::expm1(pi * dim * delta)};
  for (int t = 0; t < trials; ++t) {
    SplitMix64 rng = derive_stream(seed, static_cast<std::uint64_t>(t));
    Eigen::MatrixXd nodes = outer.cast<double>();
    for (long r = 0; r < nodes.rows(); ++r)
      for (int j = 0; j < nodes.cols(); ++j) nodes(r, j) += rng.symmetric(delta);

    const Eigen::MatrixXd section = analysis_section(NodeSet(nodes), inner);
    const Eigen::MatrixXd normal = section.transpose() * section;
    const SpectralEstimate extremes = spectral_extremes(normal);
    report.sigma_min.push_back(std::sqrt(std::max(0.0, extremes.lambda_min)));
    report.sigma_max.push_back(std::sqrt(std::max(0.0, extremes.lambda_max)));
  }
  report.worst_sigma_min = *std::min_element(report.sigma_min.begin(), report.sigma_min.end());
  return report;
}

}  // namespace frametol
