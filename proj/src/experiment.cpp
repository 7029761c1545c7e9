#include "bfem/experiment.hpp"

#include "bfem/error.hpp"
#include "bfem/expression.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace bfem {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kReportVersion = 1;

// Library errors raised inside a numerical stage are re-labelled with the
// stage; parse and config errors keep their type so the CLI can map them.
template <class F>
auto in_stage(const char* stage, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ParseError&) {
        throw;
    } catch (const ConfigError&) {
        throw;
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError(stage, e.what());
    }
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double rel_max_diff(const SparseMatrix& a, const SparseMatrix& b) {
    const double scale = b.max_abs();
    const double diff = add(a, b, 1.0, -1.0).max_abs();
    return scale > 0.0 ? diff / scale : diff;
}

double rel_norm(const Vector& a, const Vector& b) {
    const double scale = b.norm();
    const double diff = (a - b).norm();
    return scale > 0.0 ? diff / scale : diff;
}

LoadFunction make_load(const std::vector<std::string>& exprs) {
    std::vector<Expression> parsed;
    for (const auto& e : exprs) parsed.emplace_back(e);
    return [parsed](const Point& x) {
        std::array<double, 2> v{0.0, 0.0};
        for (std::size_t c = 0; c < parsed.size(); ++c) v[c] = parsed[c](x[0], x[1]);
        return v;
    };
}

Mesh load_mesh(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("/plate/mesh", "cannot open mesh file '" + path.string() + "'");
    return parse_mesh_file(in);
}

// Interior vector -> full DOF vector with zero Dirichlet values.
Vector expand(const AssembledSystem& s, const Vector& v) {
    Vector full = Vector::Zero(s.fine.num_dofs);
    for (std::size_t k = 0; k < s.fine.interior.size(); ++k) full[s.fine.interior[k]] = v[static_cast<Index>(k)];
    return full;
}

std::vector<Index> nodes_by_x(const Mesh& mesh) {
    std::vector<Index> order(static_cast<std::size_t>(mesh.num_nodes()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return mesh.node(a)[0] < mesh.node(b)[0]; });
    return order;
}

struct Column {
    std::string name;
    Vector values;  // full DOF vector
};

void write_csv(const fs::path& path, const Mesh& mesh, const std::vector<Column>& cols) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw StageError("output", "cannot write '" + path.string() + "'");
    out << "x";
    for (const auto& c : cols) out << ',' << c.name;
    out << '\n';
    for (const Index node : nodes_by_x(mesh)) {
        out << num(mesh.node(node)[0]);
        for (const auto& c : cols) out << ',' << num(c.values[node]);
        out << '\n';
    }
}

void write_vtk(const fs::path& path, const Mesh& mesh, const std::string& title, const std::vector<Column>& scalars,
               const std::vector<Column>& vectors) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw StageError("output", "cannot write '" + path.string() + "'");
    const Index nn = mesh.num_nodes();
    const Index ne = mesh.num_elements();
    out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << nn << " double\n";
    for (const auto& p : mesh.nodes()) out << num(p[0]) << ' ' << num(p[1]) << " 0\n";
    out << "CELLS " << ne << ' ' << 4 * ne << '\n';
    for (Index e = 0; e < ne; ++e) {
        const auto el = mesh.element(e);
        out << "3 " << el[0] << ' ' << el[1] << ' ' << el[2] << '\n';
    }
    out << "CELL_TYPES " << ne << '\n';
    for (Index e = 0; e < ne; ++e) out << "5\n";
    out << "POINT_DATA " << nn << '\n';
    for (const auto& c : scalars) {
        out << "SCALARS " << c.name << " double 1\nLOOKUP_TABLE default\n";
        for (Index k = 0; k < nn; ++k) out << num(c.values[k]) << '\n';
    }
    for (const auto& c : vectors) {
        out << "VECTORS " << c.name << " double\n";
        for (Index k = 0; k < nn; ++k) out << num(c.values[2 * k]) << ' ' << num(c.values[2 * k + 1]) << " 0\n";
    }
}

// Per-node norm of a full interleaved vector.
Vector node_norm(const Vector& full, int dpn) {
    const Index nn = full.size() / dpn;
    Vector out(nn);
    for (Index k = 0; k < nn; ++k) {
        double s = 0.0;
        for (int c = 0; c < dpn; ++c) s += full[dpn * k + c] * full[dpn * k + c];
        out[k] = std::sqrt(s);
    }
    return out;
}

class Stopwatch {
public:
    double lap() {
        const auto now = std::chrono::steady_clock::now();
        const double ms = std::chrono::duration<double, std::milli>(now - last_).count();
        last_ = now;
        return ms;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

SparseMatrix direct_coarse_stiffness(const ProblemCase& c) {
    return assemble_stiffness(c.hierarchy.coarse, c.op).submatrix(c.system.coarse.interior, c.system.coarse.interior);
}

Vector direct_coarse_load(const ProblemCase& c) {
    const Vector full = assemble_load(c.hierarchy.coarse, c.load, c.dofs_per_node);
    Vector g(static_cast<Index>(c.system.coarse.interior.size()));
    for (std::size_t k = 0; k < c.system.coarse.interior.size(); ++k)
        g[static_cast<Index>(k)] = full[c.system.coarse.interior[k]];
    return g;
}

PriorSpec with_noise(PriorSpec p, double sigma_e) {
    p.sigma_e = sigma_e;
    return p;
}

}  // namespace

double pearson_correlation(const Vector& a, const Vector& b) {
    if (a.size() != b.size() || a.size() < 2) throw InvalidArgument("pearson_correlation: sizes");
    const Vector da = a.array() - a.mean();
    const Vector db = b.array() - b.mean();
    const double den = da.norm() * db.norm();
    return den > 0.0 ? da.dot(db) / den : 0.0;
}

Vector nodal_magnitude(const ProblemCase& c, const Vector& interior_values) {
    return node_norm(expand(c.system, interior_values), c.dofs_per_node);
}

std::pair<double, double> below_above_means(const ProblemCase& c, const Vector& nodal, const std::string& hole) {
    const Mesh& mesh = c.hierarchy.fine;
    const auto& ring = mesh.tag(hole);
    double cx = 0.0, cy = 0.0;
    for (const Index k : ring) {
        cx += mesh.node(k)[0];
        cy += mesh.node(k)[1];
    }
    cx /= static_cast<double>(ring.size());
    cy /= static_cast<double>(ring.size());
    double radius = 0.0;
    for (const Index k : ring) radius += std::hypot(mesh.node(k)[0] - cx, mesh.node(k)[1] - cy);
    radius /= static_cast<double>(ring.size());

    double below = 0.0, above = 0.0;
    Index nb = 0, na = 0;
    for (Index k = 0; k < mesh.num_nodes(); ++k) {
        const auto& p = mesh.node(k);
        if (std::abs(p[0] - cx) > radius) continue;
        if (p[1] < cy) {
            below += nodal[k];
            ++nb;
        } else if (p[1] > cy) {
            above += nodal[k];
            ++na;
        }
    }
    if (nb == 0 || na == 0) throw InvalidArgument("below_above_means: empty strip");
    return {below / static_cast<double>(nb), above / static_cast<double>(na)};
}

std::vector<ProblemCase> build_cases(const ExperimentConfig& config) {
    std::vector<ProblemCase> cases;
    if (config.problem == ProblemKind::Bar) {
        const Expression ea(config.bar.ea);
        const OperatorSpec op = Poisson1D{[ea](double x) { return ea(x); }};
        for (const Index m : config.bar.coarse_elements) {
            const Mesh coarse = generate_interval_mesh(m, 0.0, config.bar.length);
            int levels = 0;
            for (Index r = config.bar.fine_elements / m; r > 1; r /= 2) ++levels;
            ProblemCase c{"m" + std::to_string(m),
                          levels == 0 ? identity_hierarchy(coarse) : refine_hierarchical(coarse, levels),
                          op, make_load(config.load), 1, {}};
            c.system = in_stage("assembly",
                                [&] { return assemble_system(c.hierarchy, c.op, c.load, config.dirichlet); });
            cases.push_back(std::move(c));
        }
    } else {
        const Mesh coarse = in_stage("mesh", [&] { return load_mesh(config.plate.mesh); });
        for (const auto& tag : config.dirichlet)
            if (!coarse.has_tag(tag)) throw ConfigError("/dirichlet", "mesh has no boundary group '" + tag + "'");
        const OperatorSpec op = PlaneStress{config.plate.E, config.plate.nu, config.plate.thickness};
        ProblemCase c{"levels" + std::to_string(config.plate.levels),
                      config.plate.levels == 0 ? identity_hierarchy(coarse)
                                               : refine_hierarchical(coarse, config.plate.levels),
                      op, make_load(config.load), 2, {}};
        c.system = in_stage("assembly", [&] { return assemble_system(c.hierarchy, c.op, c.load, config.dirichlet); });
        cases.push_back(std::move(c));
    }
    return cases;
}

json run_experiment(const ExperimentConfig& config) {
    Stopwatch total;
    const auto cases = build_cases(config);
    fs::create_directories(config.outputs.directory);
    const double assembly_ms = total.lap();

    json report;
    report["schema_version"] = kReportVersion;
    report["name"] = config.name;
    report["problem"] = config.problem == ProblemKind::Bar ? "bar" : "plate";
    report["prior"] = {{"type", config.prior.is_greens() ? "greens" : "white_noise"},
                       {"sigma_e", config.prior.noise_std()}};
    if (!config.prior.is_greens()) report["prior"]["alpha"] = std::get<WhiteNoise>(config.prior.kind).alpha;
    report["sampling"] = {{"samples", config.sampling.samples},
                          {"seed", config.sampling.seed},
                          {"method", config.sampling.via_u ? "u" : "f"}};
    report["timings_ms"]["assembly"] = assembly_ms;
    report["cases"] = json::array();

    for (const auto& c : cases) {
        Stopwatch sw;
        const auto& s = c.system;
        json cr;
        json diag;
        json timing;
        cr["label"] = c.label;
        cr["n"] = s.n();
        cr["m"] = s.m();
        cr["fine_nodes"] = c.hierarchy.fine.num_nodes();
        cr["coarse_nodes"] = c.hierarchy.coarse.num_nodes();

        const auto post = in_stage("posterior", [&] { return posterior_moments(config.prior, s); });
        const CholeskyFactor coarse_factor = in_stage("posterior", [&] { return CholeskyFactor(s.Kc); });
        const Vector u_hat = post.stiffness_factor().solve(s.f);
        const Vector u_c = coarse_factor.solve(s.g);
        const Vector coarse = s.Phi * u_c;
        const Vector e = u_hat - coarse;
        timing["posterior"] = sw.lap();

        diag["galerkin_kc_residual"] = rel_max_diff(s.Kc, direct_coarse_stiffness(c));
        diag["galerkin_g_residual"] = rel_norm(s.g, direct_coarse_load(c));
        diag["error_norm"] = e.norm();
        diag["error_max"] = e.cwiseAbs().maxCoeff();
        if (config.prior.is_greens()) diag["mean_vs_coarse_residual"] = rel_norm(post.mean(), coarse);
        if (config.prior.is_greens() && config.prior.noise_std() == 0.0) {
            const Vector rec = error_recovery(post, s.f);
            diag["error_recovery_residual"] = e.norm() > 0.0 ? rel_norm(rec, e) : rec.norm();
        }
        if (!config.prior.is_greens()) {
            const Vector fh = f_hat_projection(s.M, s.Phi, s.f, 0.0);
            diag["f_hat_orthogonality"] = s.Phi.transpose_times(s.f - fh).norm() / s.g.norm();
        }

        Vector var;
        Vector std_rescaled;
        Vector recovered = in_stage("posterior", [&] { return post.cov_action(s.f); });
        const bool dense = config.outputs.dense && s.n() <= config.dense_cap;
        diag["dense"] = dense;
        if (dense) {
            const Matrix sigma_star = post.dense_covariance(config.dense_cap);
            const Matrix sigma_prior = post.dense_prior_covariance(config.dense_cap);
            var = sigma_star.diagonal();
            diag["sigma_star_max"] = sigma_star.cwiseAbs().maxCoeff();
            diag["prior_cov_max"] = sigma_prior.cwiseAbs().maxCoeff();
            diag["sigma_star_relative_max"] =
                sigma_star.cwiseAbs().maxCoeff() / sigma_prior.cwiseAbs().maxCoeff();
            diag["contraction_residual"] = contraction_check(post, s, config.dense_cap);
            timing["dense_covariance"] = sw.lap();
            Vector lambda;
            if (config.outputs.rescale) {
                const auto r = in_stage("rescaling", [&] { return rescale_eigenvalues(sigma_star, s.f, config.dense_cap); });
                lambda = r.lambda;
                std_rescaled = r.diagonal().cwiseMax(0.0).cwiseSqrt();
                diag["rescaled_consistency_residual"] =
                    recovered.norm() > 0.0 ? rel_norm(r.Q * r.e_tilde, recovered) : (r.Q * r.e_tilde).norm();
                diag["rescaled_std_error_correlation"] = pearson_correlation(std_rescaled, e.cwiseAbs());
                timing["rescaling"] = sw.lap();
            } else {
                lambda = in_stage("rescaling", [&] { return sym_eig(sigma_star, config.dense_cap).values; });
            }
            diag["psd_min_eigenvalue"] = lambda.minCoeff();
            diag["psd_max_eigenvalue"] = lambda.maxCoeff();
        } else {
            var = post.variance();
            timing["variance"] = sw.lap();
        }
        const Vector std_dev = var.cwiseMax(0.0).cwiseSqrt();
        diag["max_posterior_std"] = std_dev.maxCoeff();

        const Index N = config.sampling.samples;
        const SamplingOptions sopts{config.sampling.diagonal_sigma_f};
        Ensemble ens;
        if (N > 0) {
            ens = in_stage("sampling", [&] {
                return config.sampling.via_u ? sample_posterior_via_u(post, N, config.sampling.seed, sopts)
                                             : sample_posterior_via_f(post, N, config.sampling.seed, sopts);
            });
            timing["sampling"] = sw.lap();
        }

        // Output files.
        const std::string stem = config.name + "_" + c.label;
        std::vector<std::string> files;
        const Mesh& fine = c.hierarchy.fine;
        if (c.dofs_per_node == 1) {
            std::vector<Column> cols{{"mean", expand(s, post.mean())}, {"std", expand(s, std_dev)},
                                     {"coarse", expand(s, coarse)},    {"fine", expand(s, u_hat)},
                                     {"error", expand(s, e)}};
            for (Index j = 0; j < N; ++j) cols.push_back({"sample_" + std::to_string(j), expand(s, ens.X.col(j))});
            write_csv(config.outputs.directory / (stem + ".csv"), fine, cols);
            files.push_back(stem + ".csv");

            std::vector<Column> extra{{"error_recovered", expand(s, recovered)}};
            if (std_rescaled.size() != 0) extra.push_back({"std_rescaled", expand(s, std_rescaled)});
            write_csv(config.outputs.directory / (stem + "_extras.csv"), fine, extra);
            files.push_back(stem + "_extras.csv");

            if (config.outputs.prior) {
                Vector prior_var(s.n());
                Vector unit = Vector::Zero(s.n());
                for (Index k = 0; k < s.n(); ++k) {
                    unit[k] = 1.0;
                    prior_var[k] = post.prior_cov_action(unit)[k];
                    unit[k] = 0.0;
                }
                std::vector<Column> pcols{{"mean", Vector::Zero(s.fine.num_dofs)},
                                          {"std", expand(s, prior_var.cwiseMax(0.0).cwiseSqrt())}};
                if (N > 0) {
                    const Ensemble pe = in_stage("sampling", [&] {
                        return sample_prior(post, N, config.sampling.seed, sopts);
                    });
                    for (Index j = 0; j < N; ++j)
                        pcols.push_back({"sample_" + std::to_string(j), expand(s, pe.X.col(j))});
                }
                write_csv(config.outputs.directory / (stem + "_prior.csv"), fine, pcols);
                files.push_back(stem + "_prior.csv");
            }
        } else {
            const int dpn = c.dofs_per_node;
            // std magnitude: sqrt(var_x + var_y) per node
            std::vector<Column> scalars{{"mean", node_norm(expand(s, post.mean()), dpn)},
                                        {"std", node_norm(expand(s, std_dev), dpn)}};
            if (std_rescaled.size() != 0)
                scalars.push_back({"std_rescaled", node_norm(expand(s, std_rescaled), dpn)});
            scalars.push_back({"error", node_norm(expand(s, e), dpn)});
            scalars.push_back({"coarse", node_norm(expand(s, coarse), dpn)});
            scalars.push_back({"fine", node_norm(expand(s, u_hat), dpn)});
            scalars.push_back({"error_recovered", node_norm(expand(s, recovered), dpn)});
            std::vector<Column> vectors{{"mean_vector", expand(s, post.mean())},
                                        {"error_vector", expand(s, e)},
                                        {"fine_vector", expand(s, u_hat)}};
            for (Index j = 0; j < std::min<Index>(N, 5); ++j)
                vectors.push_back({"sample_" + std::to_string(j), expand(s, ens.X.col(j))});
            write_vtk(config.outputs.directory / (stem + ".vtk"), fine, config.name + " " + c.label, scalars, vectors);
            files.push_back(stem + ".vtk");
            if (fine.has_tag("hole")) {
                const auto [below, above] = below_above_means(c, node_norm(expand(s, e), dpn), "hole");
                diag["error_mean_below_hole"] = below;
                diag["error_mean_above_hole"] = above;
            }
        }
        timing["output"] = sw.lap();
        cr["diagnostics"] = diag;
        cr["timings_ms"] = timing;
        cr["files"] = files;
        report["cases"].push_back(cr);
    }
    report["timings_ms"]["total"] = total.lap() + assembly_ms;

    std::ofstream out(config.outputs.directory / (config.name + "_report.json"), std::ios::binary);
    if (!out) throw StageError("output", "cannot write report");
    out << report.dump(2) << '\n';
    return report;
}

std::vector<Check> verify_experiment(const ExperimentConfig& config) {
    std::vector<Check> checks;
    auto at_most = [&](std::string name, double value, double tol) {
        checks.push_back({std::move(name), value, tol, value <= tol});
    };
    auto at_least = [&](std::string name, double value, double bound) {
        checks.push_back({std::move(name), value, bound, value >= bound});
    };

    const auto cases = build_cases(config);
    std::vector<double> max_std;
    for (const auto& c : cases) {
        const auto& s = c.system;
        const std::string p = c.label + ".";
        at_most(p + "galerkin_kc", rel_max_diff(s.Kc, direct_coarse_stiffness(c)), 1e-12);
        at_most(p + "galerkin_g", rel_norm(s.g, direct_coarse_load(c)), 1e-12);
        at_most(p + "galerkin_h", rel_max_diff(s.H, s.Phi.transpose() * s.K), 1e-12);

        const Vector e = in_stage("posterior", [&] { return discretization_error(s); });
        const bool full = s.n() == s.m();
        if (full) at_most(p + "limit_error_norm", e.norm(), 1e-12);

        const auto greens = in_stage("posterior", [&] { return posterior_moments(with_noise(PriorSpec::greens(), 0.0), s); });
        const Vector u_c = CholeskyFactor(s.Kc).solve(s.g);
        at_most(p + "greens_mean_vs_coarse", rel_norm(greens.mean(), s.Phi * u_c), 1e-10);
        const Vector rec = error_recovery(greens, s.f);
        at_most(p + "error_recovery", e.norm() > 0.0 ? rel_norm(rec, e) : rec.norm(), full ? 1e-12 : 1e-8);
        for (int k = 0; k < 5; ++k) {
            auto rng = CounterRng::split(config.sampling.seed + 7919, static_cast<std::uint64_t>(k));
            const Vector f2 = gaussian_vector(rng, s.n());
            const Vector e2 = discretization_error(s, f2);
            const Vector r2 = error_recovery(greens, f2);
            at_most(p + "error_recovery_load_" + std::to_string(k), e2.norm() > 0.0 ? rel_norm(r2, e2) : r2.norm(),
                    full ? 1e-12 : 1e-8);
        }
        max_std.push_back(greens.std_dev().maxCoeff());

        const Vector fh = f_hat_projection(s.M, s.Phi, s.f, 0.0);
        at_most(p + "f_hat_orthogonality", s.Phi.transpose_times(s.f - fh).norm() / s.g.norm(), 1e-10);

        const double alpha = config.prior.is_greens() ? 1.0 : std::get<WhiteNoise>(config.prior.kind).alpha;
        const auto wn1 = posterior_moments(PriorSpec::white_noise(1.0, 0.0), s);
        const auto wna = posterior_moments(PriorSpec::white_noise(alpha == 1.0 ? 2.0 : alpha, 0.0), s);
        const double a2 = alpha == 1.0 ? 4.0 : alpha * alpha;
        at_most(p + "white_noise_alpha_mean_invariance", rel_norm(wna.mean(), wn1.mean()), 1e-12);

        if (config.outputs.dense && s.n() <= config.dense_cap) {
            const Matrix d1 = wn1.dense_covariance(config.dense_cap);
            const Matrix da = wna.dense_covariance(config.dense_cap);
            const double scale = (a2 * d1).cwiseAbs().maxCoeff();
            at_most(p + "white_noise_alpha_cov_scaling",
                    scale > 0.0 ? (da - a2 * d1).cwiseAbs().maxCoeff() / scale : da.cwiseAbs().maxCoeff(), 1e-10);
            at_most(p + "contraction_greens", contraction_check(greens, s, config.dense_cap), 1e-8);
            at_most(p + "contraction_white_noise", contraction_check(wn1, s, config.dense_cap), 1e-8);

            const auto post = posterior_moments(config.prior, s);
            const Matrix sigma_star = post.dense_covariance(config.dense_cap);
            const auto r = rescale_eigenvalues(sigma_star, s.f, config.dense_cap);
            // relative to the prior scale so that a vanishing Sigma* still has a yardstick
            const double lmax = std::max(r.lambda.maxCoeff(), post.dense_prior_covariance(config.dense_cap).diagonal().maxCoeff());
            at_least(p + "psd_min_eigenvalue", r.lambda.minCoeff(), -1e-10 * lmax);
            const Matrix hat = r.matrix();
            const auto hat_eig = sym_eig(hat, config.dense_cap);
            at_least(p + "rescaled_psd_min_eigenvalue", hat_eig.values.minCoeff(),
                     -1e-10 * std::max(hat_eig.values.maxCoeff(), lmax));
            if (config.prior.is_greens() && config.prior.noise_std() == 0.0) {
                const Vector rec_post = post.cov_action(s.f);
                at_most(p + "rescaled_consistency",
                        rec_post.norm() > 0.0 ? rel_norm(r.Q * r.e_tilde, rec_post) : (r.Q * r.e_tilde).norm(),
                        full ? 1e-12 : 1e-8);
            }
            if (full) {
                const Matrix g_dense = greens.dense_covariance(config.dense_cap);
                const Matrix g_prior = greens.dense_prior_covariance(config.dense_cap);
                at_most(p + "limit_posterior_cov", g_dense.cwiseAbs().maxCoeff() / g_prior.cwiseAbs().maxCoeff(), 1e-10);
            }
        }

        if (c.dofs_per_node == 2 && c.hierarchy.fine.has_tag("hole")) {
            const auto [below, above] = below_above_means(c, nodal_magnitude(c, e), "hole");
            at_least(p + "error_below_minus_above_hole", below - above, 0.0);
        }
    }
    for (std::size_t k = 1; k < max_std.size(); ++k) {
        const bool finer = config.problem == ProblemKind::Bar &&
                           config.bar.coarse_elements[k] > config.bar.coarse_elements[k - 1];
        if (finer)
            at_least(cases[k - 1].label + "_to_" + cases[k].label + ".greens_max_std_decrease",
                     max_std[k - 1] - max_std[k], 0.0);
    }
    return checks;
}

void export_matrix(const ExperimentConfig& config, const std::string& which, std::size_t case_index,
                   std::ostream& out) {
    const auto cases = build_cases(config);
    if (case_index >= cases.size()) throw ConfigError("--case", "no such case");
    const auto& s = cases[case_index].system;
    const SparseMatrix* a = nullptr;
    if (which == "K") a = &s.K;
    else if (which == "M") a = &s.M;
    else if (which == "Kc") a = &s.Kc;
    else if (which == "Phi") a = &s.Phi;
    else throw ConfigError("--which", "expected K, M, Kc or Phi");
    out << "# " << which << ' ' << a->rows() << ' ' << a->cols() << ' ' << a->nnz() << '\n';
    for (const auto& t : a->triplets()) out << t.row << ' ' << t.col << ' ' << num(t.value) << '\n';
}

}  // namespace bfem
