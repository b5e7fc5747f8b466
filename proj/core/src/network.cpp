#include "excires/network.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "excires/errors.hpp"

namespace excires {
namespace {

ExcitonNetwork network_from_matrix(Eigen::MatrixXd h, std::string label) {
  ExcitonNetwork net;
  net.n_sites = static_cast<int>(h.rows());
  net.hamiltonian = std::move(h);
  net.donor_index = 0;
  net.acceptor_index = 1;
  net.sink_index = net.n_sites - 1;
  net.label = std::move(label);
  return net;
}

std::string report_to_string(const ValidationReport& report) {
  std::ostringstream os;
  for (std::size_t i = 0; i < report.size(); ++i) {
    if (i) os << "; ";
    os << report[i].what;
  }
  return os.str();
}

}  // namespace

ExcitonNetwork parse_network(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("network document is not valid JSON: ") + e.what());
  }

  if (!doc.is_object() || !doc.contains("hamiltonian")) {
    throw FormatError("network document must be an object with a 'hamiltonian' field");
  }
  const auto& ham = doc["hamiltonian"];
  if (!ham.is_array() || ham.empty()) {
    throw FormatError("'hamiltonian' must be a non-empty array of rows");
  }

  const int n = static_cast<int>(ham.size());
  Eigen::MatrixXd h(n, n);
  for (int i = 0; i < n; ++i) {
    const auto& row = ham[i];
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      throw FormatError("'hamiltonian' is not square: row " + std::to_string(i + 1) +
                        " has " + std::to_string(row.size()) + " entries, expected " +
                        std::to_string(n));
    }
    for (int j = 0; j < n; ++j) {
      if (!row[j].is_number()) {
        throw FormatError("'hamiltonian' entry (" + std::to_string(i + 1) + "," +
                          std::to_string(j + 1) + ") is not a number");
      }
      h(i, j) = row[j].get<double>();
    }
  }

  if (doc.contains("n_pigments")) {
    const int n_pigments = doc["n_pigments"].get<int>();
    if (n == n_pigments) {
      throw FormatError("hamiltonian is " + std::to_string(n) + "x" + std::to_string(n) +
                        " for n_pigments=" + std::to_string(n_pigments) +
                        ": missing the sink row/column (expected " +
                        std::to_string(n_pigments + 1) + " sites)");
    }
    if (n != n_pigments + 1) {
      throw FormatError("hamiltonian size " + std::to_string(n) +
                        " does not match n_pigments+1 = " + std::to_string(n_pigments + 1));
    }
  }
  if (n < 4) {
    throw FormatError("network needs at least 4 sites (donor, acceptor, one bath pigment, sink); got " +
                      std::to_string(n));
  }

  ExcitonNetwork net = network_from_matrix(
      std::move(h), doc.value("label", std::string{}));
  const ValidationReport report = validate_constraints(net);
  if (!report.empty()) {
    throw ValidationError("network violates structural constraints: " +
                          report_to_string(report));
  }
  return net;
}

ExcitonNetwork load_network(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open network file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_network(buffer.str());
}

ValidationReport validate_constraints(const ExcitonNetwork& net) {
  ValidationReport report;
  const Eigen::MatrixXd& h = net.hamiltonian;
  const int n = net.n_sites;
  if (h.rows() != n || h.cols() != n) {
    report.push_back({0, 0, "hamiltonian shape does not match n_sites"});
    return report;
  }
  if (n < 4) {
    report.push_back({0, 0, "fewer than 4 sites"});
  }

  const double scale = h.cwiseAbs().maxCoeff();
  const double tol = 1e-9 * std::max(scale, 1.0);

  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(h(i, j) - h(j, i)) > tol) {
        report.push_back({i + 1, j + 1,
                          "asymmetric entry at (" + std::to_string(i + 1) + "," +
                              std::to_string(j + 1) + "): " + std::to_string(h(i, j)) +
                              " vs " + std::to_string(h(j, i))});
      }
    }
  }

  if (std::abs(h(net.donor_index, net.acceptor_index)) > tol) {
    report.push_back({1, 2, "donor-acceptor coupling h_12 must be 0, got " +
                                std::to_string(h(net.donor_index, net.acceptor_index))});
  }

  const int sink = net.sink_index;
  for (int j = 0; j < n; ++j) {
    if (j == net.acceptor_index || j == sink) continue;
    if (std::abs(h(j, sink)) > tol) {
      report.push_back({j + 1, sink + 1,
                        "sink couples only to the acceptor: h_{" + std::to_string(j + 1) +
                            "," + std::to_string(sink + 1) + "} must be 0, got " +
                            std::to_string(h(j, sink))});
    }
  }
  return report;
}

SystemPartition partition(const ExcitonNetwork& net, const SinkParameters& sink) {
  const ValidationReport report = validate_constraints(net);
  if (!report.empty()) {
    throw ValidationError("cannot partition an invalid network: " +
                          report_to_string(report));
  }
  if (!std::isfinite(sink.sink_energy) || !std::isfinite(sink.acceptor_sink_coupling) ||
      !std::isfinite(sink.sink_rate)) {
    throw ParameterError("sink parameters must be finite");
  }

  const int n = net.n_sites;
  const int bath_dim = n - 2;  // pigments 3..N plus the sink slot
  SystemPartition part;
  part.donor_energy = net.hamiltonian(net.donor_index, net.donor_index);
  part.acceptor_energy = net.hamiltonian(net.acceptor_index, net.acceptor_index);

  part.bath_block = net.hamiltonian.block(2, 2, bath_dim, bath_dim);
  // Install the sink row/column from the runtime parameters: decoupled from
  // every bath pigment, diagonal entry = sink energy.
  part.bath_block.row(bath_dim - 1).setZero();
  part.bath_block.col(bath_dim - 1).setZero();
  part.bath_block(bath_dim - 1, bath_dim - 1) = sink.sink_energy;

  part.coupling_donor = net.hamiltonian.row(net.donor_index).segment(2, bath_dim);
  part.coupling_donor(bath_dim - 1) = 0.0;  // |g1> never touches the sink
  part.coupling_acceptor = net.hamiltonian.row(net.acceptor_index).segment(2, bath_dim);
  part.coupling_acceptor(bath_dim - 1) = sink.acceptor_sink_coupling;
  return part;
}

BathSpectrum diagonalize_bath(const SystemPartition& part,
                              const std::vector<double>& rates) {
  const int n = static_cast<int>(part.bath_block.rows());
  if (static_cast<int>(rates.size()) != n) {
    throw ParameterError("need one decoherence rate per bath eigenstate: got " +
                         std::to_string(rates.size()) + " for " + std::to_string(n) +
                         " eigenstates");
  }
  for (double g : rates) {
    if (!(g > 0.0)) {
      throw ParameterError("decoherence rates must be strictly positive");
    }
  }

  // The sink slot is decoupled when its row/column vanish off the diagonal;
  // partition() produces exact zeros there.
  bool sink_decoupled = n >= 2;
  for (int j = 0; j + 1 < n && sink_decoupled; ++j) {
    if (part.bath_block(n - 1, j) != 0.0 || part.bath_block(j, n - 1) != 0.0) {
      sink_decoupled = false;
    }
  }

  BathSpectrum bath;
  bath.eigenvalues.resize(n);
  bath.eigenvectors = Eigen::MatrixXd::Zero(n, n);
  bath.rates.resize(n);

  // storage_order[k] = storage index of the k-th ascending eigenvalue source
  if (sink_decoupled) {
    const double sink_energy = part.bath_block(n - 1, n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        part.bath_block.topLeftCorner(n - 1, n - 1));
    const Eigen::VectorXd& pig_vals = solver.eigenvalues();  // ascending
    const Eigen::MatrixXd& pig_vecs = solver.eigenvectors();

    // Insert the exact sink eigenpair at its ascending position.
    int sink_pos = 0;
    while (sink_pos < n - 1 && pig_vals(sink_pos) < sink_energy) ++sink_pos;

    for (int dst = 0, k = 0; dst < n; ++dst) {
      if (dst == sink_pos) {
        bath.eigenvalues(dst) = sink_energy;
        bath.eigenvectors(n - 1, dst) = 1.0;
      } else {
        bath.eigenvalues(dst) = pig_vals(k);
        bath.eigenvectors.col(dst).head(n - 1) = pig_vecs.col(k);
        ++k;
      }
    }
    bath.sink_position = sink_pos;

    // Non-sink eigenstates take rates[0..n-2] in descending-eigenvalue
    // order; the sink eigenpair is pinned to the last rate.
    int next_rate = 0;
    for (int dst = n - 1; dst >= 0; --dst) {
      if (dst == sink_pos) continue;
      bath.rates(dst) = rates[next_rate++];
    }
    bath.rates(sink_pos) = rates[n - 1];
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(part.bath_block);
    bath.eigenvalues = solver.eigenvalues();
    bath.eigenvectors = solver.eigenvectors();
    bath.sink_position = std::nullopt;
    for (int dst = 0; dst < n; ++dst) {
      bath.rates(dst) = rates[n - 1 - dst];  // descending over all slots
    }
  }

  bath.weights_donor.resize(n);
  bath.weights_acceptor.resize(n);
  for (int k = 0; k < n; ++k) {
    const double pd = bath.eigenvectors.col(k).dot(part.coupling_donor);
    const double pa = bath.eigenvectors.col(k).dot(part.coupling_acceptor);
    bath.weights_donor(k) = pd * pd;
    bath.weights_acceptor(k) = pa * pa;
  }
  if (bath.sink_position) {
    // The sink eigenvector is exactly the last basis vector, so the donor
    // weight there is exactly zero and the acceptor weight is h_28^2.
    bath.weights_donor(*bath.sink_position) = 0.0;
  }
  return bath;
}

}  // namespace excires
