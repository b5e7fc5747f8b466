#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace excires {

// Reaction-center parameters: the sink site couples only to the acceptor and
// carries the lowest, well-separated energy.  Supplied at run time, never
// baked into the pigment data file.
struct SinkParameters {
  double sink_energy = -500.0;           // omega_{N+1}, typically negative
  double acceptor_sink_coupling = 327.0; // |h_{2,N+1}|, only its square enters
  double sink_rate = 50.1;               // Gamma_{N+1} > 0
};

// (N+1)-site tight-binding network: donor (site 1), acceptor (site 2),
// bath pigments, and the sink slot (site N+1).  Energies and couplings in
// cm^-1 throughout (hbar = 1).
struct ExcitonNetwork {
  int n_sites = 0;             // N+1, includes the sink slot
  Eigen::MatrixXd hamiltonian; // symmetric; (k,k) = site energy, (k,l) = hopping
  int donor_index = 0;         // site 1
  int acceptor_index = 1;      // site 2
  int sink_index = 0;          // site N+1
  std::string label;
};

// One violated structural constraint; `row`/`col` are 1-based site numbers
// as used in reports.
struct ConstraintViolation {
  int row = 0;
  int col = 0;
  std::string what;
};
using ValidationReport = std::vector<ConstraintViolation>;

// Donor/acceptor energies split off from the bath block (pigments 3..N plus
// the sink slot last) and the coupling vectors |g1>, |g2> into that block.
struct SystemPartition {
  double donor_energy = 0.0;
  double acceptor_energy = 0.0;
  Eigen::MatrixXd bath_block;      // (N-1) x (N-1), sink slot last
  Eigen::VectorXd coupling_donor;  // |g1>: (h_13 .. h_1N, 0)
  Eigen::VectorXd coupling_acceptor; // |g2>: (h_23 .. h_2N, h_{2,N+1})
};

// Spectral decomposition of the bath block with per-eigenstate decoherence
// rates and squared coupling weights |<alpha|g_j>|^2.
struct BathSpectrum {
  Eigen::VectorXd eigenvalues;  // ascending
  Eigen::MatrixXd eigenvectors; // orthonormal columns, matching order
  Eigen::VectorXd rates;        // Gamma_alpha, in storage (ascending) order
  Eigen::VectorXd weights_donor;
  Eigen::VectorXd weights_acceptor;
  // Storage index of the exactly-decoupled sink eigenpair, when the bath
  // block has the sink structure (zero sink row/column off the diagonal).
  std::optional<int> sink_position;
};

// Load and validate a network document: JSON with fields `label`,
// `n_pigments`, and `hamiltonian` (row-major (N+1)x(N+1) array, the sink
// row/column zero off the diagonal).  Throws FormatError on shape problems
// (including a matrix missing the sink slot) and ValidationError when the
// structural constraints fail.
ExcitonNetwork load_network(const std::string& path);
ExcitonNetwork parse_network(const std::string& json_text);

// Checks symmetry (within 1e-9 relative to the largest absolute entry),
// h_12 = 0, and h_{j,N+1} = 0 for all j != 2.  Violations are data, not
// errors: an empty report means the network is valid.
ValidationReport validate_constraints(const ExcitonNetwork& net);

// Splits the network into donor/acceptor energies, the bath block with the
// sink row/column installed from `sink`, and the coupling vectors.
// Throws ValidationError (carrying the report text) on constraint failures.
SystemPartition partition(const ExcitonNetwork& net, const SinkParameters& sink);

// Diagonalizes the bath block and attaches one decoherence rate per
// eigenstate.  Rate attachment convention: the last entry of `rates` is
// pinned to the decoupled sink eigenpair (identified by its eigenvector,
// not by sort order); the remaining entries attach to the non-sink
// eigenstates in descending-eigenvalue order, which is the order that
// reproduces the published FMO optimum.  When the block has no decoupled
// sink slot (synthetic inputs), all rates attach in descending order.
BathSpectrum diagonalize_bath(const SystemPartition& part,
                              const std::vector<double>& rates);

}  // namespace excires
