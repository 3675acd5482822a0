#pragma once

#include "finsler/metric.hpp"

#include <string>
#include <vector>

namespace finsler {

// One checker invocation. Unused parameters keep their defaults.
struct CheckSpec {
    std::string kind;
    double p = 2.0;
    double K = 0.0;
    double theta = 0.0;
    double Xi = 2.0;
    double r = 0.0;
    double R = 0.0;
    double r1 = 0.0;
    double r2 = 0.0;
    double R1 = 0.0;
    double R2 = 0.0;
    double r_inner = 0.0;
};

struct PointSpec {
    Vec x;
    Vec y;
};

struct RunConfig {
    std::string name;
    MetricSpec metric = MetricSpec::euclidean(2);
    MeasureSpec measure = MeasureSpec::lebesgue();
    std::vector<Vec> base_points;
    int directions = 32;
    double h = 0.01;
    double r_max = 1.0;
    int ricci_grid = 0;
    std::vector<CheckSpec> suite;
    std::vector<PointSpec> points;
    std::string out_dir = "out";
    bool csv = true;
    bool json = true;
    // FNV-1a of the canonical (key-sorted, compact) JSON text.
    std::string hash;
};

// Parses and validates; ConfigError names the offending field.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Checker ids accepted in "suite".
const std::vector<std::string>& check_kinds();
// Suite used when the config has none, scaled to r_max.
std::vector<CheckSpec> default_suite(const RunConfig& c);

// Metric and measure families with their parameters, as JSON text.
std::string catalog_json();

} // namespace finsler
