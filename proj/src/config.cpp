#include "bfem/config.hpp"

#include "bfem/error.hpp"
#include "bfem/expression.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace bfem {

namespace {

using nlohmann::json;

void allow_only(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) throw ConfigError(path.empty() ? "/" : path, "expected an object");
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* k : keys) known = known || key == k;
        if (!known) throw ConfigError(path + "/" + key, "unknown field");
    }
}

double get_number(const json& obj, const std::string& path, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(path + "/" + key, "expected a number");
    return v.get<double>();
}

long long get_integer(const json& obj, const std::string& path, const char* key, long long fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError(path + "/" + key, "expected an integer");
    return v.get<long long>();
}

bool get_bool(const json& obj, const std::string& path, const char* key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_boolean()) throw ConfigError(path + "/" + key, "expected true or false");
    return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& path, const char* key, const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_string()) throw ConfigError(path + "/" + key, "expected a string");
    return v.get<std::string>();
}

std::string expression_field(const json& v, const std::string& path) {
    std::string text;
    if (v.is_number()) {
        std::ostringstream ss;
        ss.precision(17);
        ss << v.get<double>();
        text = ss.str();
    } else if (v.is_string()) {
        text = v.get<std::string>();
    } else {
        throw ConfigError(path, "expected an expression string or a number");
    }
    try {
        (void)Expression(text);
    } catch (const InvalidArgument& e) {
        throw ConfigError(path, e.what());
    }
    return text;
}

void parse_bar(const json& j, BarConfig& bar) {
    const std::string p = "/bar";
    allow_only(j, p, {"length", "fine_elements", "coarse_elements", "EA"});
    bar.length = get_number(j, p, "length", bar.length);
    if (!(bar.length > 0.0)) throw ConfigError(p + "/length", "must be positive");
    bar.fine_elements = get_integer(j, p, "fine_elements", bar.fine_elements);
    if (bar.fine_elements < 1) throw ConfigError(p + "/fine_elements", "must be at least 1");
    if (j.contains("coarse_elements")) {
        const auto& c = j.at("coarse_elements");
        bar.coarse_elements.clear();
        if (c.is_number_integer()) {
            bar.coarse_elements.push_back(c.get<Index>());
        } else if (c.is_array() && !c.empty()) {
            for (std::size_t k = 0; k < c.size(); ++k) {
                if (!c[k].is_number_integer())
                    throw ConfigError(p + "/coarse_elements/" + std::to_string(k), "expected an integer");
                bar.coarse_elements.push_back(c[k].get<Index>());
            }
        } else {
            throw ConfigError(p + "/coarse_elements", "expected an integer or a non-empty array");
        }
    }
    for (std::size_t k = 0; k < bar.coarse_elements.size(); ++k) {
        const Index m = bar.coarse_elements[k];
        const std::string at = p + "/coarse_elements/" + std::to_string(k);
        if (m < 1) throw ConfigError(at, "must be at least 1");
        if (bar.fine_elements % m != 0) throw ConfigError(at, "fine_elements must be a multiple of it");
        const Index ratio = bar.fine_elements / m;
        if ((ratio & (ratio - 1)) != 0)
            throw ConfigError(at, "fine_elements / coarse_elements must be a power of two (1:2 refinement)");
    }
    if (j.contains("EA")) bar.ea = expression_field(j.at("EA"), p + "/EA");
}

void parse_plate(const json& j, PlateConfig& plate, const std::filesystem::path& base) {
    const std::string p = "/plate";
    allow_only(j, p, {"mesh", "levels", "E", "nu", "thickness"});
    if (!j.contains("mesh")) throw ConfigError(p + "/mesh", "required");
    plate.mesh = (base / get_string(j, p, "mesh", "")).lexically_normal();
    plate.levels = static_cast<int>(get_integer(j, p, "levels", plate.levels));
    if (plate.levels < 0) throw ConfigError(p + "/levels", "must be non-negative");
    plate.E = get_number(j, p, "E", plate.E);
    plate.nu = get_number(j, p, "nu", plate.nu);
    plate.thickness = get_number(j, p, "thickness", plate.thickness);
    if (!(plate.E > 0.0)) throw ConfigError(p + "/E", "must be positive");
    if (!(plate.nu >= 0.0 && plate.nu < 0.5)) throw ConfigError(p + "/nu", "must lie in [0, 0.5)");
    if (!(plate.thickness > 0.0)) throw ConfigError(p + "/thickness", "must be positive");
}

PriorSpec parse_prior(const json& j) {
    const std::string p = "/prior";
    allow_only(j, p, {"type", "alpha", "sigma_e"});
    const std::string type = get_string(j, p, "type", "greens");
    PriorSpec prior;
    if (type == "greens") {
        if (j.contains("alpha")) throw ConfigError(p + "/alpha", "only meaningful for the white_noise prior");
        prior = PriorSpec::greens();
    } else if (type == "white_noise") {
        const double alpha = get_number(j, p, "alpha", 1.0);
        if (!(alpha > 0.0)) throw ConfigError(p + "/alpha", "must be positive");
        prior = PriorSpec::white_noise(alpha);
    } else {
        throw ConfigError(p + "/type", "expected 'greens' or 'white_noise'");
    }
    if (j.contains("sigma_e") && !j.at("sigma_e").is_null()) {
        const double s = get_number(j, p, "sigma_e", 0.0);
        if (!(s >= 0.0)) throw ConfigError(p + "/sigma_e", "must be non-negative");
        prior.sigma_e = s;
    }
    return prior;
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("/", std::string("invalid JSON: ") + e.what());
    }
    allow_only(j, "", {"name", "problem", "bar", "plate", "load", "dirichlet", "prior", "sampling", "outputs",
                       "dense_cap"});
    ExperimentConfig c;
    c.name = get_string(j, "", "name", c.name);
    if (c.name.empty() || c.name.find_first_of("/\\") != std::string::npos)
        throw ConfigError("/name", "must be a non-empty file-name stem");

    const std::string problem = get_string(j, "", "problem", "");
    if (problem == "bar") {
        c.problem = ProblemKind::Bar;
        c.dirichlet = {"left", "right"};
        parse_bar(j.value("bar", json::object()), c.bar);
        if (j.contains("plate")) throw ConfigError("/plate", "not used by the bar problem");
    } else if (problem == "plate") {
        c.problem = ProblemKind::Plate;
        c.dirichlet = {"left"};
        if (!j.contains("plate")) throw ConfigError("/plate", "required for the plate problem");
        parse_plate(j.at("plate"), c.plate, base_dir);
        if (j.contains("bar")) throw ConfigError("/bar", "not used by the plate problem");
    } else {
        throw ConfigError("/problem", "expected 'bar' or 'plate'");
    }

    const std::size_t components = c.problem == ProblemKind::Bar ? 1 : 2;
    if (j.contains("load")) {
        const auto& l = j.at("load");
        c.load.clear();
        if (l.is_array()) {
            for (std::size_t k = 0; k < l.size(); ++k)
                c.load.push_back(expression_field(l[k], "/load/" + std::to_string(k)));
        } else {
            c.load.push_back(expression_field(l, "/load"));
        }
    } else if (components == 2) {
        c.load = {"1", "0"};
    }
    if (c.load.size() != components)
        throw ConfigError("/load", "expected " + std::to_string(components) + " component expression(s)");

    if (j.contains("dirichlet")) {
        const auto& d = j.at("dirichlet");
        if (!d.is_array()) throw ConfigError("/dirichlet", "expected an array of boundary group names");
        c.dirichlet.clear();
        for (std::size_t k = 0; k < d.size(); ++k) {
            if (!d[k].is_string()) throw ConfigError("/dirichlet/" + std::to_string(k), "expected a string");
            c.dirichlet.insert(d[k].get<std::string>());
        }
    }

    if (j.contains("prior")) c.prior = parse_prior(j.at("prior"));

    if (j.contains("sampling")) {
        const auto& s = j.at("sampling");
        const std::string p = "/sampling";
        allow_only(s, p, {"samples", "seed", "method", "diagonal_sigma_f"});
        c.sampling.samples = get_integer(s, p, "samples", c.sampling.samples);
        if (c.sampling.samples < 0) throw ConfigError(p + "/samples", "must be non-negative");
        const long long seed = get_integer(s, p, "seed", 0);
        if (seed < 0) throw ConfigError(p + "/seed", "must be non-negative");
        c.sampling.seed = static_cast<std::uint64_t>(seed);
        const std::string method = get_string(s, p, "method", "f");
        if (method != "f" && method != "u") throw ConfigError(p + "/method", "expected 'f' or 'u'");
        c.sampling.via_u = method == "u";
        c.sampling.diagonal_sigma_f = get_bool(s, p, "diagonal_sigma_f", false);
    }

    std::string out_dir = "output";
    if (j.contains("outputs")) {
        const auto& o = j.at("outputs");
        const std::string p = "/outputs";
        allow_only(o, p, {"directory", "dense", "rescale", "prior"});
        out_dir = get_string(o, p, "directory", out_dir);
        c.outputs.dense = get_bool(o, p, "dense", c.outputs.dense);
        c.outputs.rescale = get_bool(o, p, "rescale", c.outputs.rescale);
        c.outputs.prior = get_bool(o, p, "prior", c.outputs.prior);
        if (c.outputs.rescale && !c.outputs.dense) throw ConfigError(p + "/rescale", "requires outputs.dense");
    }
    c.outputs.directory = (base_dir / out_dir).lexically_normal();

    c.dense_cap = get_integer(j, "", "dense_cap", c.dense_cap);
    if (c.dense_cap < 1) throw ConfigError("/dense_cap", "must be positive");
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("/", "cannot open config file '" + file.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    const auto base = std::filesystem::absolute(file).parent_path();
    return parse_config(ss.str(), base);
}

}  // namespace bfem
