#pragma once

#include "bfem/sparse_matrix.hpp"

#include <array>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bfem {

using Point = std::array<double, 2>;  ///< (x, y); y is 0 for 1D meshes
using Edge = std::array<Index, 2>;
using TagMap = std::map<std::string, std::vector<Index>>;
using EdgeTagMap = std::map<std::string, std::vector<Edge>>;

/// P1 simplex mesh: 2-node segments in 1D, counterclockwise 3-node triangles
/// in 2D. Boundary groups are named node sets; in 2D each group may also
/// carry its boundary edges so refinement can tag new edge midpoints.
/// Immutable after construction.
class Mesh {
public:
    Mesh(int dim, std::vector<Point> nodes, std::vector<Index> connectivity, TagMap boundary_tags = {},
         EdgeTagMap boundary_edges = {});

    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] int nodes_per_element() const noexcept { return dim_ + 1; }
    [[nodiscard]] Index num_nodes() const noexcept { return static_cast<Index>(nodes_.size()); }
    [[nodiscard]] Index num_elements() const noexcept {
        return static_cast<Index>(connectivity_.size()) / nodes_per_element();
    }

    [[nodiscard]] const Point& node(Index i) const { return nodes_.at(static_cast<std::size_t>(i)); }
    [[nodiscard]] const std::vector<Point>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] std::span<const Index> element(Index e) const {
        return std::span<const Index>(connectivity_).subspan(static_cast<std::size_t>(e * nodes_per_element()),
                                                              static_cast<std::size_t>(nodes_per_element()));
    }
    [[nodiscard]] const std::vector<Index>& connectivity() const noexcept { return connectivity_; }

    [[nodiscard]] const TagMap& boundary_tags() const noexcept { return tags_; }
    [[nodiscard]] const EdgeTagMap& boundary_edges() const noexcept { return edges_; }
    [[nodiscard]] bool has_tag(const std::string& name) const { return tags_.contains(name); }
    [[nodiscard]] const std::vector<Index>& tag(const std::string& name) const;

    /// Segment length (1D) or signed area (2D).
    [[nodiscard]] double element_measure(Index e) const;
    /// Sum of element measures.
    [[nodiscard]] double measure() const;

private:
    int dim_;
    std::vector<Point> nodes_;
    std::vector<Index> connectivity_;
    TagMap tags_;
    EdgeTagMap edges_;
};

/// Values of the element's P1 shape functions at x (barycentric coordinates);
/// entries beyond nodes_per_element are zero.
std::array<double, 3> shape_values(const Mesh& mesh, Index element, const Point& x);

/// Coarse mesh, its hierarchical refinement, and the prolongation Phi
/// (fine nodes x coarse nodes) with psi = Phi^T phi. Coarse node k is fine
/// node k.
struct MeshHierarchy {
    Mesh coarse;
    Mesh fine;
    SparseMatrix prolongation;
    std::vector<Index> parent_map;  ///< fine element -> coarse element

    /// Phi expanded to `dofs_per_node` interleaved components.
    [[nodiscard]] SparseMatrix dof_prolongation(int dofs_per_node) const {
        return expand_blocks(prolongation, dofs_per_node);
    }
};

Mesh generate_interval_mesh(Index n_elems, double a, double b);

/// `levels` nested refinements: 1:2 midpoint split in 1D, 1:4 edge-midpoint
/// split in 2D. New nodes are appended in (element, local edge) order and
/// deduplicated through a sorted node-pair key.
MeshHierarchy refine_hierarchical(const Mesh& coarse, int levels);

/// Trivial hierarchy with fine == coarse and Phi = I.
MeshHierarchy identity_hierarchy(const Mesh& mesh);

/// Reads the ASCII MSH 2.2 subset: $MeshFormat, $PhysicalNames, $Nodes and
/// $Elements with 2-node lines (type 1, boundary groups) and 3-node
/// triangles (type 2). Throws ParseError with the offending line number.
Mesh parse_mesh_file(std::istream& in);
Mesh parse_mesh_text(std::string_view text);

/// Scalar DOF partition into Dirichlet and remaining ("interior") DOFs, each
/// in increasing DOF order. DOFs are interleaved per node.
struct DofPartition {
    Index num_dofs = 0;
    std::vector<Index> interior;
    std::vector<Index> dirichlet;
};

DofPartition partition_dofs(const Mesh& mesh, const std::set<std::string>& dirichlet_tags, int dofs_per_node);

}  // namespace bfem
