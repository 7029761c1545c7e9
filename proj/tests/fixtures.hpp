// Library-side builders for the two test problems.
#pragma once

#include "bfem/assembly.hpp"
#include "bfem/error.hpp"
#include "bfem/mesh.hpp"
#include "oracles.hpp"

#include <fstream>
#include <string>

#ifndef BFEM_DATA_DIR
#define BFEM_DATA_DIR "data"
#endif

namespace fixture {

using bfem::Index;

inline const std::string kPlateMesh = std::string(BFEM_DATA_DIR) + "/plate_with_hole.msh";

inline bfem::MeshHierarchy bar_hierarchy(Index m, Index n) {
    const auto coarse = bfem::generate_interval_mesh(m, 0.0, 1.0);
    int levels = 0;
    for (Index r = n / m; r > 1; r /= 2) ++levels;
    return levels == 0 ? bfem::identity_hierarchy(coarse) : bfem::refine_hierarchical(coarse, levels);
}

inline bfem::OperatorSpec bar_operator() { return bfem::Poisson1D{oracle::bar_ea}; }

inline bfem::LoadFunction unit_load(double fx = 1.0, double fy = 0.0) {
    return [fx, fy](const bfem::Point&) { return std::array<double, 2>{fx, fy}; };
}

inline bfem::AssembledSystem bar_system(Index m, Index n) {
    return bfem::assemble_system(bar_hierarchy(m, n), bar_operator(), unit_load(), {"left", "right"});
}

inline bfem::Mesh plate_coarse_mesh() {
    std::ifstream in(kPlateMesh);
    if (!in) throw bfem::Error("cannot open " + kPlateMesh);
    return bfem::parse_mesh_file(in);
}

inline constexpr double kPlateE = 3.0;
inline constexpr double kPlateNu = 0.2;

inline bfem::OperatorSpec plate_operator() { return bfem::PlaneStress{kPlateE, kPlateNu, 1.0}; }

inline bfem::MeshHierarchy plate_hierarchy() { return bfem::refine_hierarchical(plate_coarse_mesh(), 1); }

inline bfem::AssembledSystem plate_system(const bfem::MeshHierarchy& h) {
    return bfem::assemble_system(h, plate_operator(), unit_load(1.0, 0.0), {"left"});
}

}  // namespace fixture
