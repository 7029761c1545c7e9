#pragma once

#include "bfem/bayes.hpp"

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

namespace bfem {

enum class ProblemKind { Bar, Plate };

struct BarConfig {
    double length = 1.0;
    Index fine_elements = 64;
    std::vector<Index> coarse_elements{4};
    std::string ea = "0.1 - 0.099*x";
};

struct PlateConfig {
    std::filesystem::path mesh;  ///< absolute after loading
    int levels = 1;
    double E = 3.0;
    double nu = 0.2;
    double thickness = 1.0;
};

struct SamplingConfig {
    Index samples = 30;
    std::uint64_t seed = 0;
    bool via_u = false;
    bool diagonal_sigma_f = false;
};

struct OutputConfig {
    std::filesystem::path directory;  ///< absolute after loading
    bool dense = true;                 ///< dense Sigma* (PSD check, contraction, rescaling) when under the cap
    bool rescale = true;
    bool prior = true;
};

/// One experiment, as read from a JSON document. Relative paths are resolved
/// against the directory holding the document.
struct ExperimentConfig {
    std::string name = "experiment";
    ProblemKind problem = ProblemKind::Bar;
    BarConfig bar;
    PlateConfig plate;
    std::vector<std::string> load{"1"};  ///< one expression per displacement component
    std::set<std::string> dirichlet;
    PriorSpec prior;
    SamplingConfig sampling;
    OutputConfig outputs;
    Index dense_cap = kDefaultDenseCap;
};

/// Throws ConfigError naming the offending field.
ExperimentConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& file);

}  // namespace bfem
