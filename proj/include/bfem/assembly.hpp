#pragma once

#include "bfem/mesh.hpp"
#include "bfem/sparse_matrix.hpp"

#include <functional>
#include <set>
#include <string>
#include <variant>

namespace bfem {

/// -(EA(x) u')' = f on an interval.
struct Poisson1D {
    std::function<double(double)> ea;
};

/// Linear elasticity in plane stress, engineering shear strain.
struct PlaneStress {
    double E = 1.0;
    double nu = 0.0;
    double thickness = 1.0;
};

using OperatorSpec = std::variant<Poisson1D, PlaneStress>;

int dofs_per_node(const OperatorSpec& op);

/// Body load per unit volume; component 1 is ignored for scalar problems.
using LoadFunction = std::function<std::array<double, 2>(const Point&)>;

/// Plane-stress constitutive matrix (Voigt order xx, yy, xy).
std::array<double, 9> plane_stress_matrix(const PlaneStress& op);

SparseMatrix assemble_stiffness(const Mesh& mesh, const OperatorSpec& op);
SparseMatrix assemble_mass(const Mesh& mesh, int dofs_per_node);
Vector assemble_load(const Mesh& mesh, const LoadFunction& load, int dofs_per_node);

struct CoarseOperators {
    SparseMatrix Kc;
    SparseMatrix Mc;
    Vector g;
};

CoarseOperators restrict_to_coarse(const SparseMatrix& K, const SparseMatrix& M, const Vector& f,
                                   const SparseMatrix& Phi);

/// Fine operators over the full DOF set with the DOF-level prolongation.
struct FullSystem {
    SparseMatrix K;
    SparseMatrix M;
    Vector f;
    SparseMatrix Phi;
};

/// Interior-block system. H = Phi^T K is the mixed coarse-test/fine-trial
/// stiffness; K_id couples interior rows to Dirichlet columns.
struct AssembledSystem {
    SparseMatrix K;
    SparseMatrix M;
    Vector f;
    SparseMatrix Phi;
    SparseMatrix Kc;
    SparseMatrix Mc;
    Vector g;
    SparseMatrix H;
    SparseMatrix K_id;
    DofPartition fine;
    DofPartition coarse;

    [[nodiscard]] Index n() const noexcept { return K.rows(); }
    [[nodiscard]] Index m() const noexcept { return Kc.rows(); }
};

AssembledSystem eliminate_dirichlet(const FullSystem& full, const DofPartition& fine, const DofPartition& coarse);

/// Assembles, restricts and eliminates in one go for a mesh hierarchy.
AssembledSystem assemble_system(const MeshHierarchy& hierarchy, const OperatorSpec& op, const LoadFunction& load,
                                const std::set<std::string>& dirichlet_tags);

}  // namespace bfem
