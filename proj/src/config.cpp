#include "levy/config.hpp"

#include "levy/errors.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace levy {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& what) { throw ConfigError(key + ": " + what); }

const json& require(const json& j, const std::string& parent, const char* key) {
    if (!j.is_object()) fail(parent, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(parent + "." + key, "missing required key");
    return *it;
}

double number(const json& j, const std::string& key) {
    if (!j.is_number()) fail(key, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(key, "expected a finite number");
    return v;
}

double positive(const json& j, const std::string& key) {
    const double v = number(j, key);
    if (!(v > 0.0)) fail(key, "must be positive");
    return v;
}

bool boolean(const json& j, const std::string& key) {
    if (!j.is_boolean()) fail(key, "expected true or false");
    return j.get<bool>();
}

std::string text(const json& j, const std::string& key) {
    if (!j.is_string()) fail(key, "expected a string");
    return j.get<std::string>();
}

Vector vector_of(const json& j, const std::string& key, Eigen::Index dim = -1) {
    if (!j.is_array()) fail(key, "expected an array of numbers");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], key);
    if (dim >= 0 && v.size() != dim) fail(key, "expected " + std::to_string(dim) + " entries");
    return v;
}

Matrix matrix_of(const json& j, const std::string& key, Eigen::Index dim) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != dim)
        fail(key, "expected " + std::to_string(dim) + " rows");
    Matrix m(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) m.row(i) = vector_of(j[static_cast<std::size_t>(i)], key, dim).transpose();
    return m;
}

JumpLaw law_from_json(const json& j, const std::string& where, Eigen::Index dim) {
    const std::string kind = text(require(j, where, "kind"), where + ".kind");
    if (kind == "exp_along") {
        return ExponentialAlong{vector_of(require(j, where, "direction"), where + ".direction", dim),
                                positive(require(j, where, "rate"), where + ".rate")};
    }
    if (kind == "gaussian") {
        return GaussianJump{vector_of(require(j, where, "mean"), where + ".mean", dim),
                            matrix_of(require(j, where, "cov"), where + ".cov", dim)};
    }
    if (kind == "points") {
        const auto& atoms = require(j, where, "atoms");
        const std::string key = where + ".atoms";
        if (!atoms.is_array() || atoms.empty()) fail(key, "expected a nonempty array");
        PointMasses pm;
        for (const auto& a : atoms) {
            pm.atoms.push_back({vector_of(require(a, key, "point"), key + ".point", dim),
                                number(require(a, key, "prob"), key + ".prob")});
        }
        return pm;
    }
    fail(where + ".kind", "unknown jump law '" + kind + "' (expected exp_along, gaussian or points)");
}

// nlohmann/json keeps integers exact; doubles are printed shortest round-trip.
std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

const char* const kEstimateCsvHeader = "s,method,delta,n,p_hat,std_err,ci_lo,ci_hi,seed";

LevyModel model_from_json(const json& j, const std::string& where) {
    const auto& dim_j = require(j, where, "dim");
    if (!dim_j.is_number_integer() || dim_j.get<long>() < 1) fail(where + ".dim", "expected an integer >= 1");
    const auto dim = static_cast<Eigen::Index>(dim_j.get<long>());
    Vector drift = vector_of(require(j, where, "drift"), where + ".drift", dim);
    Matrix cov = matrix_of(require(j, where, "cov"), where + ".cov", dim);
    std::optional<JumpComponent> jumps;
    if (auto it = j.find("jumps"); it != j.end() && !it->is_null()) {
        const std::string jw = where + ".jumps";
        jumps = JumpComponent{positive(require(*it, jw, "intensity"), jw + ".intensity"),
                              law_from_json(require(*it, jw, "law"), jw + ".law", dim)};
    }
    try {
        return LevyModel(std::move(drift), std::move(cov), std::move(jumps));
    } catch (const DomainError& e) {
        fail(where, e.what());
    }
}

RunConfig config_from_json(const json& j) {
    if (!j.is_object()) fail("config", "expected a JSON object");
    LevyModel model = model_from_json(require(j, "config", "model"));

    const auto& target_j = require(j, "config", "target");
    Vector g = vector_of(require(target_j, "target", "g"), "target.g", model.dim());
    if (!(g.array() > 0.0).all()) fail("target.g", "all components must be strictly positive");

    RunConfig cfg{std::move(model), OrthantTarget(std::move(g)), {}, {}, {}, {}, {}, {}};

    if (auto it = j.find("s_grid"); it != j.end()) {
        if (!it->is_array() || it->empty()) fail("s_grid", "expected a nonempty array");
        for (const auto& v : *it) cfg.s_grid.push_back(positive(v, "s_grid"));
        for (std::size_t i = 1; i < cfg.s_grid.size(); ++i)
            if (!(cfg.s_grid[i] > cfg.s_grid[i - 1])) fail("s_grid", "must be strictly increasing");
    }

    if (auto it = j.find("sim"); it != j.end()) {
        const auto& sj = *it;
        if (!sj.is_object()) fail("sim", "expected an object");
        if (sj.contains("delta")) cfg.sim.delta = positive(sj["delta"], "sim.delta");
        if (sj.contains("horizon")) cfg.sim.horizon = positive(sj["horizon"], "sim.horizon");
        if (sj.contains("n_paths")) {
            if (!sj["n_paths"].is_number_integer() || sj["n_paths"].get<std::int64_t>() < 1)
                fail("sim.n_paths", "expected an integer >= 1");
            cfg.sim.n_paths = sj["n_paths"].get<std::int64_t>();
        }
        if (sj.contains("master_seed")) {
            if (!sj["master_seed"].is_number_integer() && !sj["master_seed"].is_number_unsigned())
                fail("sim.master_seed", "expected an integer");
            cfg.sim.master_seed = sj["master_seed"].get<std::uint64_t>();
        }
        if (sj.contains("chunk_size")) {
            if (!sj["chunk_size"].is_number_integer() || sj["chunk_size"].get<std::int64_t>() < 1)
                fail("sim.chunk_size", "expected an integer >= 1");
            cfg.sim.chunk_size = sj["chunk_size"].get<std::int64_t>();
        }
        if (sj.contains("is_cap_factor")) cfg.sim.is_cap_factor = positive(sj["is_cap_factor"], "sim.is_cap_factor");
        try {
            validate(cfg.sim);
        } catch (const ConfigError& e) {
            fail("sim", e.what());
        }
    }

    if (auto it = j.find("methods"); it != j.end()) {
        if (!it->is_array() || it->empty()) fail("methods", "expected a nonempty array");
        for (const auto& m : *it) {
            try {
                cfg.methods.push_back(method_from_string(text(m, "methods")));
            } catch (const ConfigError& e) {
                fail("methods", e.what());
            }
        }
    } else {
        cfg.methods = {Method::importance};
    }

    if (auto it = j.find("tolerances"); it != j.end()) {
        const auto& tj = *it;
        if (!tj.is_object()) fail("tolerances", "expected an object");
        auto& t = cfg.tolerances;
        if (tj.contains("newton_tol")) t.newton_tol = positive(tj["newton_tol"], "tolerances.newton_tol");
        if (tj.contains("root_tol")) t.root_tol = positive(tj["root_tol"], "tolerances.root_tol");
        if (tj.contains("max_iter")) {
            if (!tj["max_iter"].is_number_integer() || tj["max_iter"].get<int>() < 1)
                fail("tolerances.max_iter", "expected an integer >= 1");
            t.max_iter = tj["max_iter"].get<int>();
        }
        if (tj.contains("bracket_lo")) t.bracket_lo = positive(tj["bracket_lo"], "tolerances.bracket_lo");
        if (tj.contains("bracket_hi")) t.bracket_hi = positive(tj["bracket_hi"], "tolerances.bracket_hi");
        if (!(t.bracket_lo < t.bracket_hi)) fail("tolerances.bracket_hi", "must exceed bracket_lo");
    }

    if (auto it = j.find("flags"); it != j.end()) {
        if (!it->is_object()) fail("flags", "expected an object");
        if (it->contains("require_conditions"))
            cfg.flags.require_conditions = boolean((*it)["require_conditions"], "flags.require_conditions");
        if (it->contains("assume_c1")) cfg.flags.assume_c1 = boolean((*it)["assume_c1"], "flags.assume_c1");
    }

    if (auto it = j.find("output"); it != j.end()) {
        if (!it->is_object()) fail("output", "expected an object");
        auto& o = cfg.output;
        if (it->contains("report_path")) o.report_path = text((*it)["report_path"], "output.report_path");
        if (it->contains("csv_path")) o.csv_path = text((*it)["csv_path"], "output.csv_path");
        if (it->contains("fit_path")) o.fit_path = text((*it)["fit_path"], "output.fit_path");
        if (it->contains("chunk_csv_path")) o.chunk_csv_path = text((*it)["chunk_csv_path"], "output.chunk_csv_path");
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
    return config_from_json(j);
}

json to_json(const ConditionReport& report) {
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    json out;
    out["c1"] = {{"verdict", to_string(report.c1.verdict)}, {"reason", report.c1.reason}};
    out["c2"] = {{"verdict", to_string(report.c2.verdict)}, {"reason", report.c2.reason}};
    out["c3"] = {{"vertex_is_mpp", to_string(report.c3.vertex_is_mpp)},
                 {"rg_in_cramer_range", to_string(report.c3.rg_in_cramer_range)},
                 {"normal_strictly_positive", to_string(report.c3.normal_strictly_positive)},
                 {"drift_inner_product_negative", to_string(report.c3.drift_inner_product_negative)},
                 {"overall", to_string(report.c3.overall)},
                 {"reason", report.c3.reason}};
    out["r_g"] = opt(report.r_g);
    out["d_of_g"] = opt(report.d_of_g);
    if (report.normal) {
        out["normal"] = json::array();
        for (Eigen::Index i = 0; i < report.normal->size(); ++i) out["normal"].push_back((*report.normal)[i]);
    } else {
        out["normal"] = nullptr;
    }
    out["mean_inner"] = opt(report.mean_inner);
    return out;
}

json to_json(const AsymptoticFit& fit) {
    json out;
    out["a0_hat"] = fit.a0_hat;
    out["a0_ci95"] = {fit.a0_ci95.first, fit.a0_ci95.second};
    out["shape_slope"] = fit.shape_slope;
    out["shape_slope_ci95"] = {fit.shape_slope_ci95.first, fit.shape_slope_ci95.second};
    out["per_s_ratio"] = json::array();
    for (const auto& [s, r] : fit.per_s_ratio) out["per_s_ratio"].push_back({s, r});
    return out;
}

std::string csv_row(const HitEstimate& est) {
    std::ostringstream os;
    os << format_double(est.s) << ',' << to_string(est.method) << ',' << format_double(est.delta) << ','
       << est.n_paths << ',' << format_double(est.p_hat) << ',' << format_double(est.std_err) << ','
       << format_double(est.ci_lo) << ',' << format_double(est.ci_hi) << ',' << est.seed;
    return os.str();
}

std::vector<HitEstimate> read_estimates_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("output.csv_path: estimates file is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kEstimateCsvHeader)
        throw ConfigError(std::string("output.csv_path: unexpected header, expected '") + kEstimateCsvHeader + "'");
    std::vector<HitEstimate> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != 9)
            throw ConfigError("output.csv_path: line " + std::to_string(lineno) + " does not have 9 columns");
        try {
            HitEstimate e;
            e.s = std::stod(f[0]);
            e.method = method_from_string(f[1]);
            e.delta = std::stod(f[2]);
            e.n_paths = std::stoll(f[3]);
            e.p_hat = std::stod(f[4]);
            e.std_err = std::stod(f[5]);
            e.ci_lo = std::stod(f[6]);
            e.ci_hi = std::stod(f[7]);
            e.seed = std::stoull(f[8]);
            e.truncation_bias_flag = e.method == Method::crude;
            rows.push_back(e);
        } catch (const std::logic_error&) {
            throw ConfigError("output.csv_path: line " + std::to_string(lineno) + " is malformed");
        }
    }
    return rows;
}

void write_chunk_csv(std::ostream& out, const std::vector<ChunkStats>& chunks) {
    out << "chunk,n,hits_or_weightsum,weightsq_sum,max_weight\n";
    for (const auto& c : chunks)
        out << c.chunk << ',' << c.n << ',' << format_double(c.hits_or_weightsum) << ','
            << format_double(c.weightsq_sum) << ',' << format_double(c.max_weight) << '\n';
}

}  // namespace levy
