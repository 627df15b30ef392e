#pragma once

#include "levy/asympt.hpp"
#include "levy/conditions.hpp"
#include "levy/model.hpp"
#include "levy/rates.hpp"
#include "levy/sim.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace levy {

struct RunFlags {
    bool require_conditions = false;
    bool assume_c1 = false;
};

struct OutputPaths {
    std::string report_path = "report.json";
    std::string csv_path = "estimates.csv";
    std::string fit_path = "fit.json";
    std::string chunk_csv_path;  // empty: no per-chunk dump
};

struct RunConfig {
    LevyModel model;
    OrthantTarget target;
    std::vector<double> s_grid;
    SimConfig sim;
    std::vector<Method> methods;
    ToleranceProfile tolerances;
    RunFlags flags;
    OutputPaths output;
};

// All parsers throw ConfigError with the dotted path of the offending key.
LevyModel model_from_json(const nlohmann::json& j, const std::string& where = "model");
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

nlohmann::json to_json(const ConditionReport& report);
nlohmann::json to_json(const AsymptoticFit& fit);

// Estimates CSV: header `s,method,delta,n,p_hat,std_err,ci_lo,ci_hi,seed`.
extern const char* const kEstimateCsvHeader;
std::string csv_row(const HitEstimate& est);
std::vector<HitEstimate> read_estimates_csv(std::istream& in);

// Per-chunk debug dump: header `chunk,n,hits_or_weightsum,weightsq_sum,max_weight`.
void write_chunk_csv(std::ostream& out, const std::vector<ChunkStats>& chunks);

}  // namespace levy
