#include "bfem/error.hpp"
#include "bfem/mesh.hpp"
#include "bfem/random.hpp"
#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace bfem;

namespace {

// Direct coarse hat value of coarse node `node` at x (1D: piecewise linear).
double coarse_basis(const Mesh& coarse, Index element, Index local, const Point& x) {
    return shape_values(coarse, element, x)[static_cast<std::size_t>(local)];
}

const char* kSingleTriangle = R"($MeshFormat
2.2 0 8
$EndMeshFormat
$PhysicalNames
2
1 1 "edge"
2 2 "body"
$EndPhysicalNames
$Nodes
3
1 0 0 0
2 1 0 0
3 0 1 0
$EndNodes
$Elements
2
1 1 2 1 1 1 2
2 2 2 2 1 1 2 3
$EndElements
)";

std::string replace(std::string s, const std::string& from, const std::string& to) {
    s.replace(s.find(from), from.size(), to);
    return s;
}

}  // namespace

TEST(IntervalMesh, SixtyFourElements) {
    const Mesh m = generate_interval_mesh(64, 0.0, 1.0);
    ASSERT_EQ(m.num_nodes(), 65);
    for (Index k = 0; k <= 64; ++k) EXPECT_DOUBLE_EQ(m.node(k)[0], static_cast<double>(k) / 64.0);
    EXPECT_EQ(m.tag("left"), std::vector<Index>{0});
    EXPECT_EQ(m.tag("right"), std::vector<Index>{64});
}

TEST(IntervalMesh, MinimalAndSpacing) {
    const Mesh one = generate_interval_mesh(1, 0.0, 1.0);
    EXPECT_EQ(one.num_nodes(), 2);
    EXPECT_EQ(one.num_elements(), 1);
    const Mesh four = generate_interval_mesh(4, 0.0, 2.0);
    const double expected[] = {0.0, 0.5, 1.0, 1.5, 2.0};
    for (Index k = 0; k < 5; ++k) EXPECT_DOUBLE_EQ(four.node(k)[0], expected[k]);
}

TEST(IntervalMesh, InvalidArguments) {
    EXPECT_THROW((void)generate_interval_mesh(0, 0.0, 1.0), InvalidArgument);
    EXPECT_THROW((void)generate_interval_mesh(3, 1.0, 1.0), InvalidArgument);
    EXPECT_THROW((void)generate_interval_mesh(3, 2.0, 1.0), InvalidArgument);
}

TEST(Refinement, TwoElementBarInteriorColumn) {
    const auto h = refine_hierarchical(generate_interval_mesh(2, 0.0, 1.0), 1);
    EXPECT_EQ(h.fine.num_elements(), 4);
    // Fine nodes at 0.25, 0.5, 0.75 against coarse node 1 (x = 0.5).
    const Matrix phi = h.prolongation.to_dense();
    auto fine_index = [&](double x) {
        for (Index k = 0; k < h.fine.num_nodes(); ++k)
            if (h.fine.node(k)[0] == x) return k;
        return Index{-1};
    };
    EXPECT_DOUBLE_EQ(phi(fine_index(0.25), 1), 0.5);
    EXPECT_DOUBLE_EQ(phi(fine_index(0.5), 1), 1.0);
    EXPECT_DOUBLE_EQ(phi(fine_index(0.75), 1), 0.5);
    EXPECT_DOUBLE_EQ(phi(fine_index(0.0), 1), 0.0);
}

TEST(Refinement, FourLevelsGiveSixtyFour) {
    const auto h = refine_hierarchical(generate_interval_mesh(4, 0.0, 1.0), 4);
    EXPECT_EQ(h.fine.num_elements(), 64);
    EXPECT_EQ(h.fine.num_nodes(), 65);
    EXPECT_EQ(h.prolongation.rows(), 65);
    EXPECT_EQ(h.prolongation.cols(), 5);
}

TEST(Refinement, SingleTriangleMidpointRows) {
    const Mesh tri(2, {{0, 0}, {1, 0}, {0, 1}}, {0, 1, 2});
    const auto h = refine_hierarchical(tri, 1);
    EXPECT_EQ(h.fine.num_elements(), 4);
    EXPECT_EQ(h.fine.num_nodes(), 6);
    const Matrix phi = h.prolongation.to_dense();
    for (Index k = 3; k < 6; ++k) {
        int halves = 0;
        for (Index j = 0; j < 3; ++j) {
            if (phi(k, j) == 0.5) ++halves;
            else EXPECT_EQ(phi(k, j), 0.0);
        }
        EXPECT_EQ(halves, 2);
    }
    for (Index e = 0; e < 4; ++e) EXPECT_NEAR(h.fine.element_measure(e), 0.125, 1e-15);
    for (const auto p : h.parent_map) EXPECT_EQ(p, 0);
}

TEST(Refinement, InterpolationPropertyRandomPoints) {
    // psi_i(x) = sum_j Phi_ji phi_j(x) at random points, 1D and 2D.
    const auto check = [](const MeshHierarchy& h) {
        CounterRng rng(99);
        const Matrix phi = h.prolongation.to_dense();
        double worst = 0.0;
        for (Index fe = 0; fe < h.fine.num_elements(); ++fe) {
            const Index ce = h.parent_map[static_cast<std::size_t>(fe)];
            const auto fel = h.fine.element(fe);
            const auto cel = h.coarse.element(ce);
            for (int s = 0; s < 200; ++s) {
                // random barycentric point inside the fine element
                double l[3] = {rng.next_unit(), rng.next_unit(), h.fine.dim() == 2 ? rng.next_unit() : 0.0};
                const double sum = l[0] + l[1] + l[2];
                Point x{0, 0};
                for (std::size_t a = 0; a < fel.size(); ++a)
                    for (int c = 0; c < 2; ++c) x[static_cast<std::size_t>(c)] += l[a] / sum * h.fine.node(fel[a])[static_cast<std::size_t>(c)];
                const auto fv = shape_values(h.fine, fe, x);
                for (std::size_t b = 0; b < cel.size(); ++b) {
                    double via_phi = 0.0;
                    for (std::size_t a = 0; a < fel.size(); ++a) via_phi += phi(fel[a], cel[b]) * fv[a];
                    worst = std::max(worst, std::abs(via_phi - coarse_basis(h.coarse, ce, static_cast<Index>(b), x)));
                }
            }
        }
        return worst;
    };
    EXPECT_LE(check(refine_hierarchical(generate_interval_mesh(4, 0.0, 1.0), 2)), 1e-12);
    EXPECT_LE(check(fixture::plate_hierarchy()), 1e-12);
}

TEST(Refinement, PartitionOfUnityAndNesting) {
    for (const auto& h : {fixture::bar_hierarchy(4, 64), fixture::plate_hierarchy()}) {
        const Matrix phi = h.prolongation.to_dense();
        EXPECT_LE((phi.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
        for (Index k = 0; k < h.coarse.num_nodes(); ++k) EXPECT_EQ(h.coarse.node(k), h.fine.node(k));
        EXPECT_EQ(h.parent_map.size(), static_cast<std::size_t>(h.fine.num_elements()));
    }
}

TEST(Refinement, CompositionMatchesProduct) {
    const Mesh coarse = fixture::plate_coarse_mesh();
    const auto one = refine_hierarchical(coarse, 1);
    const auto two = refine_hierarchical(one.fine, 1);
    const auto both = refine_hierarchical(coarse, 2);
    const Matrix product = two.prolongation.to_dense() * one.prolongation.to_dense();
    EXPECT_LE((both.prolongation.to_dense() - product).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(both.fine.num_elements(), 16 * coarse.num_elements());
    for (std::size_t e = 0; e < both.parent_map.size(); ++e)
        EXPECT_EQ(both.parent_map[e], one.parent_map[static_cast<std::size_t>(two.parent_map[e])]);
}

TEST(Refinement, DirichletBlockDecouples) {
    // Phi_di = 0: fine Dirichlet nodes get no weight from coarse interior nodes.
    const auto h = fixture::plate_hierarchy();
    const auto fine = partition_dofs(h.fine, {"left"}, 2);
    const auto coarse = partition_dofs(h.coarse, {"left"}, 2);
    const auto phi = h.dof_prolongation(2);
    EXPECT_EQ(phi.submatrix(fine.dirichlet, coarse.interior).nnz(), 0);
    const auto bh = fixture::bar_hierarchy(4, 64);
    EXPECT_EQ(bh.prolongation
                  .submatrix(partition_dofs(bh.fine, {"left", "right"}, 1).dirichlet,
                             partition_dofs(bh.coarse, {"left", "right"}, 1).interior)
                  .nnz(),
              0);
}

TEST(Refinement, BoundaryTagsFollowMidpoints) {
    const auto h = fixture::plate_hierarchy();
    for (const auto& [name, nodes] : h.coarse.boundary_tags())
        EXPECT_EQ(h.fine.tag(name).size(), 2 * nodes.size() - (name == "hole" ? 0 : 1)) << name;
    for (const Index k : h.fine.tag("left")) EXPECT_DOUBLE_EQ(h.fine.node(k)[0], 0.0);
}

TEST(MeshParser, PlateAssetCounts) {
    std::ifstream in(fixture::kPlateMesh);
    std::string line;
    Index declared_nodes = -1, declared_elements = -1, lines = 0, triangles = 0;
    while (std::getline(in, line)) {
        if (line == "$Nodes") in >> declared_nodes;
        if (line == "$Elements") {
            in >> declared_elements;
            for (Index k = 0; k < declared_elements; ++k) {
                long long id, type;
                in >> id >> type;
                std::getline(in, line);
                (type == 1 ? lines : triangles)++;
            }
        }
    }
    const Mesh m = fixture::plate_coarse_mesh();
    EXPECT_EQ(m.num_nodes(), declared_nodes);
    EXPECT_EQ(m.num_elements(), triangles);
    EXPECT_EQ(lines + triangles, declared_elements);
    Index edges = 0;
    for (const auto& [name, list] : m.boundary_edges()) edges += static_cast<Index>(list.size());
    EXPECT_EQ(edges, lines);
    for (const char* tag : {"left", "right", "top", "bottom", "hole"}) EXPECT_TRUE(m.has_tag(tag)) << tag;
    // Domain: 4 x 2 rectangle minus a disc of radius 0.8, polygonal.
    EXPECT_NEAR(m.measure(), 8.0 - 3.14159265 * 0.64, 0.05);
}

TEST(MeshParser, SingleTriangle) {
    const Mesh m = parse_mesh_text(kSingleTriangle);
    EXPECT_EQ(m.num_elements(), 1);
    EXPECT_DOUBLE_EQ(m.measure(), 0.5);
    EXPECT_EQ(m.tag("edge"), (std::vector<Index>{0, 1}));
}

TEST(MeshParser, DanglingNodeNamesElement) {
    const std::string bad = replace(kSingleTriangle, "2 2 2 2 1 1 2 3", "2 2 2 2 1 1 2 999");
    try {
        (void)parse_mesh_text(bad);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 18u);
        EXPECT_NE(std::string(e.what()).find("element 2"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("999"), std::string::npos);
    }
}

TEST(MeshParser, RejectsMalformedInput) {
    EXPECT_THROW((void)parse_mesh_text(replace(kSingleTriangle, "$Nodes", "$Nodez")), ParseError);
    EXPECT_THROW((void)parse_mesh_text(replace(kSingleTriangle, "$EndNodes", "$EndNode")), ParseError);
    EXPECT_THROW((void)parse_mesh_text(replace(kSingleTriangle, "2 2 2 2 1 1 2 3", "2 3 2 2 1 1 2 3 3")), ParseError);
    // clockwise triangle
    try {
        (void)parse_mesh_text(replace(kSingleTriangle, "2 2 2 2 1 1 2 3", "2 2 2 2 1 1 3 2"));
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 18u);
        EXPECT_NE(std::string(e.what()).find("area"), std::string::npos);
    }
    EXPECT_THROW((void)parse_mesh_text("$MeshFormat\n4.1 0 8\n$EndMeshFormat\n"), ParseError);
}

TEST(MeshValidation, RejectsBadElements) {
    EXPECT_THROW(Mesh(2, {{0, 0}, {1, 0}, {0, 1}}, {0, 2, 1}), InvalidArgument);
    EXPECT_THROW(Mesh(2, {{0, 0}, {1, 0}, {0, 1}}, {0, 1, 1}), InvalidArgument);
    EXPECT_THROW(Mesh(1, {{0, 0}, {1, 0}}, {0, 2}), InvalidArgument);
}

TEST(PartitionDofs, BarClampedBothEnds) {
    const auto h = fixture::bar_hierarchy(4, 64);
    const auto p = partition_dofs(h.fine, {"left", "right"}, 1);
    EXPECT_EQ(p.dirichlet, (std::vector<Index>{0, 4}));  // coarse end nodes keep their indices
    EXPECT_EQ(p.interior.size(), 63u);
    const auto g = partition_dofs(generate_interval_mesh(64, 0, 1), {"left", "right"}, 1);
    EXPECT_EQ(g.dirichlet, (std::vector<Index>{0, 64}));
    for (Index k = 1; k < 64; ++k) EXPECT_EQ(g.interior[static_cast<std::size_t>(k - 1)], k);
}

TEST(PartitionDofs, PlateLeftEdgeBothComponents) {
    const Mesh m = fixture::plate_coarse_mesh();
    const auto p = partition_dofs(m, {"left"}, 2);
    EXPECT_EQ(p.dirichlet.size(), 2 * m.tag("left").size());
    for (std::size_t k = 0; k < p.dirichlet.size(); k += 2) {
        EXPECT_EQ(p.dirichlet[k] + 1, p.dirichlet[k + 1]);
        EXPECT_DOUBLE_EQ(m.node(p.dirichlet[k] / 2)[0], 0.0);
    }
    EXPECT_EQ(p.interior.size() + p.dirichlet.size(), static_cast<std::size_t>(2 * m.num_nodes()));
}

TEST(PartitionDofs, EmptyTagsAndUnknownTag) {
    const Mesh m = generate_interval_mesh(3, 0, 1);
    const auto p = partition_dofs(m, {}, 1);
    EXPECT_TRUE(p.dirichlet.empty());
    EXPECT_EQ(p.interior.size(), 4u);
    EXPECT_THROW((void)partition_dofs(m, {"top"}, 1), InvalidArgument);
}
