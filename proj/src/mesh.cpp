#include "bfem/mesh.hpp"

#include "bfem/error.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace bfem {

namespace {

double signed_area(const Point& a, const Point& b, const Point& c) {
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

void sort_unique(std::vector<Index>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

struct EdgeKeyHash {
    std::size_t operator()(const Edge& e) const noexcept {
        return std::hash<Index>{}(e[0]) * 0x9e3779b97f4a7c15ULL ^ std::hash<Index>{}(e[1]);
    }
};

Edge edge_key(Index a, Index b) { return a < b ? Edge{a, b} : Edge{b, a}; }

struct SingleLevel {
    Mesh fine;
    SparseMatrix prolongation;
    std::vector<Index> parent;
};

SingleLevel refine_once(const Mesh& coarse) {
    const Index nc = coarse.num_nodes();
    std::vector<Point> nodes = coarse.nodes();
    std::vector<Index> conn;
    std::vector<Index> parent;
    std::vector<Triplet> phi;
    for (Index k = 0; k < nc; ++k) phi.push_back({k, k, 1.0});

    std::unordered_map<Edge, Index, EdgeKeyHash> midpoint;
    auto midpoint_of = [&](Index a, Index b) {
        const Edge key = edge_key(a, b);
        if (auto it = midpoint.find(key); it != midpoint.end()) return it->second;
        const Index m = static_cast<Index>(nodes.size());
        const Point& pa = nodes[static_cast<std::size_t>(a)];
        const Point& pb = nodes[static_cast<std::size_t>(b)];
        nodes.push_back({0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])});
        phi.push_back({m, a, 0.5});
        phi.push_back({m, b, 0.5});
        midpoint.emplace(key, m);
        return m;
    };

    if (coarse.dim() == 1) {
        for (Index e = 0; e < coarse.num_elements(); ++e) {
            const auto el = coarse.element(e);
            const Index m = midpoint_of(el[0], el[1]);
            conn.insert(conn.end(), {el[0], m, m, el[1]});
            parent.insert(parent.end(), {e, e});
        }
    } else if (coarse.dim() == 2) {
        for (Index e = 0; e < coarse.num_elements(); ++e) {
            const auto el = coarse.element(e);
            const Index v0 = el[0], v1 = el[1], v2 = el[2];
            const Index m01 = midpoint_of(v0, v1);
            const Index m12 = midpoint_of(v1, v2);
            const Index m20 = midpoint_of(v2, v0);
            conn.insert(conn.end(), {v0, m01, m20, m01, v1, m12, m20, m12, v2, m01, m12, m20});
            parent.insert(parent.end(), {e, e, e, e});
        }
    } else {
        throw UnsupportedElement("refine_hierarchical: unsupported mesh dimension");
    }

    TagMap tags = coarse.boundary_tags();
    EdgeTagMap edges;
    for (const auto& [name, list] : coarse.boundary_edges()) {
        auto& out = edges[name];
        auto& node_set = tags[name];
        for (const auto& [a, b] : list) {
            const auto it = midpoint.find(edge_key(a, b));
            if (it == midpoint.end())
                throw InvalidArgument("refine_hierarchical: boundary edge (" + std::to_string(a) + ", " +
                                      std::to_string(b) + ") of group '" + name + "' is not a mesh edge");
            out.push_back({a, it->second});
            out.push_back({it->second, b});
            node_set.push_back(it->second);
        }
    }

    const Index nf = static_cast<Index>(nodes.size());
    Mesh fine(coarse.dim(), std::move(nodes), std::move(conn), std::move(tags), std::move(edges));
    return {std::move(fine), SparseMatrix::from_triplets(nf, nc, phi), std::move(parent)};
}

}  // namespace

Mesh::Mesh(int dim, std::vector<Point> nodes, std::vector<Index> connectivity, TagMap boundary_tags,
           EdgeTagMap boundary_edges)
    : dim_(dim), nodes_(std::move(nodes)), connectivity_(std::move(connectivity)), tags_(std::move(boundary_tags)),
      edges_(std::move(boundary_edges)) {
    if (dim_ != 1 && dim_ != 2) throw InvalidArgument("Mesh: dimension must be 1 or 2");
    const Index npe = nodes_per_element();
    if (connectivity_.size() % static_cast<std::size_t>(npe) != 0)
        throw InvalidArgument("Mesh: connectivity length is not a multiple of the element size");
    const Index nn = num_nodes();
    for (Index e = 0; e < num_elements(); ++e) {
        const auto el = element(e);
        for (Index a = 0; a < npe; ++a) {
            if (el[a] < 0 || el[a] >= nn)
                throw InvalidArgument("Mesh: element " + std::to_string(e) + " references missing node " +
                                      std::to_string(el[a]));
            for (Index b = 0; b < a; ++b)
                if (el[a] == el[b]) throw InvalidArgument("Mesh: element " + std::to_string(e) + " repeats a node");
        }
        const double meas = element_measure(e);
        if (dim_ == 2 && !(meas > 0.0))
            throw InvalidArgument("Mesh: triangle " + std::to_string(e) + " has non-positive area");
        if (dim_ == 1 && meas == 0.0)
            throw InvalidArgument("Mesh: segment " + std::to_string(e) + " has zero length");
    }
    for (auto& [name, list] : edges_) {
        auto& node_set = tags_[name];
        for (const auto& [a, b] : list) {
            if (a < 0 || a >= nn || b < 0 || b >= nn || a == b)
                throw InvalidArgument("Mesh: invalid boundary edge in group '" + name + "'");
            node_set.push_back(a);
            node_set.push_back(b);
        }
    }
    for (auto& [name, list] : tags_) {
        sort_unique(list);
        if (!list.empty() && (list.front() < 0 || list.back() >= nn))
            throw InvalidArgument("Mesh: boundary group '" + name + "' references a missing node");
    }
}

const std::vector<Index>& Mesh::tag(const std::string& name) const {
    const auto it = tags_.find(name);
    if (it == tags_.end()) throw InvalidArgument("Mesh: unknown boundary group '" + name + "'");
    return it->second;
}

double Mesh::element_measure(Index e) const {
    const auto el = element(e);
    if (dim_ == 1) return std::abs(node(el[1])[0] - node(el[0])[0]);
    return signed_area(node(el[0]), node(el[1]), node(el[2]));
}

double Mesh::measure() const {
    double total = 0.0;
    for (Index e = 0; e < num_elements(); ++e) total += element_measure(e);
    return total;
}

std::array<double, 3> shape_values(const Mesh& mesh, Index element, const Point& x) {
    const auto el = mesh.element(element);
    if (mesh.dim() == 1) {
        const double xa = mesh.node(el[0])[0];
        const double xb = mesh.node(el[1])[0];
        const double t = (x[0] - xa) / (xb - xa);
        return {1.0 - t, t, 0.0};
    }
    const Point& a = mesh.node(el[0]);
    const Point& b = mesh.node(el[1]);
    const Point& c = mesh.node(el[2]);
    const double area = signed_area(a, b, c);
    const double l0 = signed_area(x, b, c) / area;
    const double l1 = signed_area(a, x, c) / area;
    return {l0, l1, 1.0 - l0 - l1};
}

Mesh generate_interval_mesh(Index n_elems, double a, double b) {
    if (n_elems < 1) throw InvalidArgument("generate_interval_mesh: need at least one element");
    if (!(a < b)) throw InvalidArgument("generate_interval_mesh: require a < b");
    std::vector<Point> nodes(static_cast<std::size_t>(n_elems) + 1);
    const double h = (b - a) / static_cast<double>(n_elems);
    for (Index k = 0; k <= n_elems; ++k) nodes[static_cast<std::size_t>(k)] = {a + h * static_cast<double>(k), 0.0};
    nodes.back()[0] = b;
    std::vector<Index> conn;
    conn.reserve(static_cast<std::size_t>(2 * n_elems));
    for (Index k = 0; k < n_elems; ++k) conn.insert(conn.end(), {k, k + 1});
    return Mesh(1, std::move(nodes), std::move(conn), TagMap{{"left", {0}}, {"right", {n_elems}}});
}

MeshHierarchy refine_hierarchical(const Mesh& coarse, int levels) {
    if (levels < 1) throw InvalidArgument("refine_hierarchical: levels must be >= 1");
    SingleLevel step = refine_once(coarse);
    SparseMatrix phi = std::move(step.prolongation);
    std::vector<Index> parent = std::move(step.parent);
    Mesh fine = std::move(step.fine);
    for (int l = 1; l < levels; ++l) {
        SingleLevel next = refine_once(fine);
        phi = next.prolongation * phi;
        for (auto& p : next.parent) p = parent[static_cast<std::size_t>(p)];
        parent = std::move(next.parent);
        fine = std::move(next.fine);
    }
    return {coarse, std::move(fine), std::move(phi), std::move(parent)};
}

MeshHierarchy identity_hierarchy(const Mesh& mesh) {
    std::vector<Index> parent(static_cast<std::size_t>(mesh.num_elements()));
    std::iota(parent.begin(), parent.end(), Index{0});
    return {mesh, mesh, SparseMatrix::identity(mesh.num_nodes()), std::move(parent)};
}

namespace {

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    bool next(std::string& line) {
        while (std::getline(in_, line)) {
            ++number_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.find_first_not_of(" \t") != std::string::npos) return true;
        }
        return false;
    }

    std::string require(const char* what) {
        std::string line;
        if (!next(line)) throw ParseError(number_, std::string("unexpected end of file, expected ") + what);
        return line;
    }

    [[nodiscard]] std::size_t line() const noexcept { return number_; }

private:
    std::istream& in_;
    std::size_t number_ = 0;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

Index parse_count(LineReader& r, const char* section) {
    const std::string line = r.require(section);
    std::istringstream ss(line);
    long long count = -1;
    std::string extra;
    if (!(ss >> count) || count < 0 || (ss >> extra))
        throw ParseError(r.line(), std::string("malformed count in ") + section);
    return static_cast<Index>(count);
}

void expect_end(LineReader& r, const std::string& name) {
    const std::string line = trim(r.require(("$End" + name).c_str()));
    if (line != "$End" + name) throw ParseError(r.line(), "expected $End" + name + ", found '" + line + "'");
}

}  // namespace

Mesh parse_mesh_file(std::istream& in) {
    LineReader r(in);
    bool seen_format = false;
    bool seen_nodes = false;
    bool seen_elements = false;
    std::map<int, std::string> physical_names;
    std::vector<Point> nodes;
    std::unordered_map<long long, Index> node_index;
    std::vector<Index> triangles;
    std::vector<std::size_t> triangle_lines;
    std::vector<long long> triangle_ids;
    std::vector<std::pair<int, Edge>> lines;

    std::string line;
    while (r.next(line)) {
        const std::string header = trim(line);
        if (header.empty() || header[0] != '$' || header.find(' ') != std::string::npos)
            throw ParseError(r.line(), "malformed section header '" + header + "'");
        const std::string name = header.substr(1);

        if (name == "MeshFormat") {
            std::istringstream ss(r.require("format line"));
            std::string version;
            int file_type = -1, data_size = 0;
            if (!(ss >> version >> file_type >> data_size) || version.rfind("2.", 0) != 0 || file_type != 0)
                throw ParseError(r.line(), "only ASCII MSH 2.x is supported");
            seen_format = true;
        } else if (name == "PhysicalNames") {
            const Index count = parse_count(r, "$PhysicalNames");
            for (Index k = 0; k < count; ++k) {
                const std::string entry = r.require("physical name");
                std::istringstream ss(entry);
                int dim = 0, tag = 0;
                if (!(ss >> dim >> tag)) throw ParseError(r.line(), "malformed physical name entry");
                const auto q0 = entry.find('"');
                const auto q1 = entry.rfind('"');
                if (q0 == std::string::npos || q1 == q0) throw ParseError(r.line(), "physical name must be quoted");
                physical_names[tag] = entry.substr(q0 + 1, q1 - q0 - 1);
            }
        } else if (name == "Nodes") {
            const Index count = parse_count(r, "$Nodes");
            nodes.reserve(static_cast<std::size_t>(count));
            for (Index k = 0; k < count; ++k) {
                std::istringstream ss(r.require("node"));
                long long id = 0;
                double x = 0, y = 0, z = 0;
                if (!(ss >> id >> x >> y >> z)) throw ParseError(r.line(), "malformed node entry");
                if (!node_index.emplace(id, static_cast<Index>(nodes.size())).second)
                    throw ParseError(r.line(), "duplicate node id " + std::to_string(id));
                nodes.push_back({x, y});
            }
            seen_nodes = true;
        } else if (name == "Elements") {
            if (!seen_nodes) throw ParseError(r.line(), "$Elements before $Nodes");
            const Index count = parse_count(r, "$Elements");
            for (Index k = 0; k < count; ++k) {
                std::istringstream ss(r.require("element"));
                long long id = 0;
                int type = 0, ntags = 0;
                if (!(ss >> id >> type >> ntags) || ntags < 0) throw ParseError(r.line(), "malformed element entry");
                std::vector<long long> tags(static_cast<std::size_t>(ntags));
                for (auto& t : tags)
                    if (!(ss >> t)) throw ParseError(r.line(), "element " + std::to_string(id) + ": missing tags");
                int nv = 0;
                if (type == 1) nv = 2;
                else if (type == 2) nv = 3;
                else
                    throw ParseError(r.line(),
                                     "element " + std::to_string(id) + ": unsupported element type " + std::to_string(type));
                std::array<Index, 3> v{};
                for (int a = 0; a < nv; ++a) {
                    long long node_id = 0;
                    if (!(ss >> node_id)) throw ParseError(r.line(), "element " + std::to_string(id) + ": missing nodes");
                    const auto it = node_index.find(node_id);
                    if (it == node_index.end())
                        throw ParseError(r.line(), "element " + std::to_string(id) + " references missing node " +
                                                       std::to_string(node_id));
                    v[static_cast<std::size_t>(a)] = it->second;
                }
                if (type == 1) {
                    if (tags.empty()) throw ParseError(r.line(), "line element " + std::to_string(id) + " has no physical tag");
                    lines.push_back({static_cast<int>(tags[0]), Edge{v[0], v[1]}});
                } else {
                    triangles.insert(triangles.end(), v.begin(), v.end());
                    triangle_lines.push_back(r.line());
                    triangle_ids.push_back(id);
                }
            }
            seen_elements = true;
        } else {
            throw ParseError(r.line(), "unsupported section '" + header + "'");
        }
        expect_end(r, name);
    }
    if (!seen_format) throw ParseError(r.line(), "missing $MeshFormat");
    if (!seen_elements) throw ParseError(r.line(), "missing $Elements");
    if (triangles.empty()) throw ParseError(r.line(), "mesh has no triangles");

    for (std::size_t t = 0; t < triangle_ids.size(); ++t) {
        const auto& a = nodes[static_cast<std::size_t>(triangles[3 * t])];
        const auto& b = nodes[static_cast<std::size_t>(triangles[3 * t + 1])];
        const auto& c = nodes[static_cast<std::size_t>(triangles[3 * t + 2])];
        if (!(signed_area(a, b, c) > 0.0))
            throw ParseError(triangle_lines[t], "triangle " + std::to_string(triangle_ids[t]) + " has non-positive area");
    }

    EdgeTagMap edges;
    for (const auto& [tag, e] : lines) {
        const auto it = physical_names.find(tag);
        edges[it != physical_names.end() ? it->second : std::to_string(tag)].push_back(e);
    }
    return Mesh(2, std::move(nodes), std::move(triangles), {}, std::move(edges));
}

Mesh parse_mesh_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_mesh_file(in);
}

DofPartition partition_dofs(const Mesh& mesh, const std::set<std::string>& dirichlet_tags, int dofs_per_node) {
    if (dofs_per_node != 1 && dofs_per_node != 2) throw InvalidArgument("partition_dofs: dofs_per_node must be 1 or 2");
    std::vector<char> fixed(static_cast<std::size_t>(mesh.num_nodes()), 0);
    for (const auto& name : dirichlet_tags)
        for (const Index node : mesh.tag(name)) fixed[static_cast<std::size_t>(node)] = 1;

    DofPartition part;
    part.num_dofs = mesh.num_nodes() * dofs_per_node;
    for (Index node = 0; node < mesh.num_nodes(); ++node)
        for (int c = 0; c < dofs_per_node; ++c)
            (fixed[static_cast<std::size_t>(node)] ? part.dirichlet : part.interior).push_back(node * dofs_per_node + c);
    return part;
}

}  // namespace bfem
