#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

// Finite-section laboratory for the frame-theoretic side: exact Gram
// matrices of exponential systems on [-pi, pi]^d, the perturbation
// defect bound B(e^{pi d delta} - 1) as a spectral inequality, and
// lattice perturbation experiments on windowed analysis sections.
//
// Inner products of the normalized exponentials (2pi)^{-d/2} e^{i<x,t>}
// over the cube are real products of sinc values, so all Gram matrices
// here are real symmetric. Coefficient vectors stay complex where the
// defect is defined; the supremum over complex coefficients equals the
// top eigenvalue of the real symmetric difference Gram.

namespace frametol {

// Finite family of frequency vectors; row k of `freq` is t_k in R^d.
struct NodeSet {
  Eigen::MatrixXd freq;  // n x d

  explicit NodeSet(Eigen::MatrixXd frequencies);
  int dim() const { return static_cast<int>(freq.cols()); }
  int size() const { return static_cast<int>(freq.rows()); }
};

// Base nodes t_k with perturbed companions tau_k. delta is recomputed
// from the two node sets on construction, never stored free.
struct PerturbedSystem {
  NodeSet base;
  NodeSet perturbed;
  double delta;  // max_k ||tau_k - t_k||_inf

  PerturbedSystem(NodeSet base_nodes, NodeSet perturbed_nodes);
};

// Gram matrix: entry (j,k) = prod_m sinc(pi (t_{j,m} - t_{k,m})).
// Symmetric with unit diagonal; each pair is computed once.
Eigen::MatrixXd gram(const NodeSet& nodes);

// Gram of the differences (h_k - f_k): G_tt - G_ttau - G_taut + G_tautau.
Eigen::MatrixXd difference_gram(const PerturbedSystem& system);

// Best finite-section constant B with ||sum a_k h_k|| <= B ||a||_2,
// i.e. sqrt(lambda_max) of the Gram.
double upper_bound_B(const NodeSet& nodes);

// || sum_k a_k (h_k - f_k) ||_{L2}, exact via the difference Gram.
double perturbation_defect(const PerturbedSystem& system, const Eigen::VectorXcd& coeffs);

enum class SpectralMethod { dense, iterative };

struct SpectralEstimate {
  double lambda_min;
  double lambda_max;
  SpectralMethod method;
  double residual;  // max ||M v - lambda v|| over the two extreme pairs
  int iterations;   // 0 on the dense path
};

// Dense deterministic solver up to order 512, Lanczos with full
// reorthogonalization above. Residuals certified <= 1e-8 * ||M||.
// Requires symmetry within 1e-12; positive definiteness is not assumed.
SpectralEstimate spectral_extremes(const Eigen::MatrixXd& matrix);

struct LemmaReport {
  int dim;
  int n;
  double delta;
  double finite_b;     // upper_bound_B of the base system
  double bound;        // finite_b * (e^{pi d delta} - 1)
  double worst_defect; // sup over coefficients: sqrt(lambda_max(difference Gram))
  double random_max;   // max defect/||a|| over the sampled coefficient vectors
  double slack;        // worst_defect / bound, 0 when bound is 0
  bool passed;         // both defects <= bound * (1 + 1e-9)
};

// Certifies the defect bound for one system: the exact worst case plus
// `trials` random complex coefficient vectors.
LemmaReport lemma_certificate(const PerturbedSystem& system, int trials, std::uint64_t seed);

// Seeded randomized suite: `systems` systems with dim cycling 1..3,
// n in [1, 40], base nodes uniform in [-5, 5]^d and per-node
// perturbations of sup-norm at most 0.2.
std::vector<LemmaReport> lemma_suite(int systems, std::uint64_t seed, int trials_per_system = 8);

// All integer lattice points of [-halfwidth, halfwidth]^dim in
// lexicographic order; one point per row.
Eigen::MatrixXi lattice_window(int dim, int halfwidth);

// Analysis section: entry (k, m) = prod_j sinc(pi (tau_{k,j} - m_j)).
// Equals the identity pattern when the nodes are the window itself.
Eigen::MatrixXd analysis_section(const NodeSet& perturbed, const Eigen::MatrixXi& window);

struct FrameMarginReport {
  int dim;
  int outer_halfwidth;
  int inner_halfwidth;
  double delta;
  std::vector<double> sigma_min;  // per trial
  std::vector<double> sigma_max;
  double worst_sigma_min;
  double interior_prediction;  // 2 - e^{pi d delta}, the margin with no truncation
};

// Perturbs every lattice node of [-N, N]^dim by an independent uniform
// vector with ||eps||_inf <= delta and reports the extreme singular
// values of the analysis section against the interior window
// [-M, M]^dim. Test frequencies stay interior, so the truncation error
// decays as the margin N - M grows. Requires M < N and
// delta < ln(2)/(pi dim), the hypothesis region of the experiment.
FrameMarginReport frame_margin_experiment(int dim, int outer_halfwidth, int inner_halfwidth,
                                          double delta, int trials, std::uint64_t seed);

}  // namespace frametol
