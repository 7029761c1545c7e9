#pragma once

#include "bfem/config.hpp"
#include "bfem/sampling.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace bfem {

/// One coarse/fine pairing of an experiment, fully assembled.
struct ProblemCase {
    std::string label;
    MeshHierarchy hierarchy;
    OperatorSpec op;
    LoadFunction load;
    int dofs_per_node = 1;
    AssembledSystem system;
};

std::vector<ProblemCase> build_cases(const ExperimentConfig& config);

/// Writes every output file for the experiment and returns the report that
/// is also saved as <name>_report.json.
nlohmann::json run_experiment(const ExperimentConfig& config);

struct Check {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

std::vector<Check> verify_experiment(const ExperimentConfig& config);

/// Triplet dump ("row col value") of K, M, Kc or Phi for the given case.
void export_matrix(const ExperimentConfig& config, const std::string& which, std::size_t case_index,
                   std::ostream& out);

double pearson_correlation(const Vector& a, const Vector& b);

/// Per-node Euclidean norm of an interleaved interior vector expanded to all
/// nodes (Dirichlet DOFs contribute zero).
Vector nodal_magnitude(const ProblemCase& c, const Vector& interior_values);

/// Mean nodal |value| in the vertical strips below and above the boundary
/// group `hole` (centre and radius estimated from its nodes).
std::pair<double, double> below_above_means(const ProblemCase& c, const Vector& nodal, const std::string& hole);

}  // namespace bfem
