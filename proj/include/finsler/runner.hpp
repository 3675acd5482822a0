#pragma once

#include "finsler/comparison.hpp"
#include "finsler/config.hpp"
#include "finsler/parallel.hpp"

#include <string>
#include <vector>

namespace finsler {

struct RunOptions {
    int jobs = default_jobs();
    double tolerance_scale = 1.0;
    // Overrides the config's output directory when non-empty.
    std::string out_dir;
    bool emit_plot_script = false;
    bool write_files = true;
};

struct ReportEntry {
    int base_index = 0;
    std::string check;
    ComparisonReport report;
    std::string csv;
};

struct VerifyOutcome {
    int exit_code = 0;
    std::vector<ReportEntry> reports;
    std::string summary;
};

enum ExitCode { exit_pass = 0, exit_fail = 1, exit_unmet = 2, exit_config = 3 };

// 1 if any report failed, else 2 if any hypothesis or threshold is unmet, else 0.
int exit_code_for(const std::vector<ReportEntry>& reports);

VerifyOutcome run_verify(const RunConfig& c, const RunOptions& o);
// Pointwise F, g, Cartan tensor, Ric, S, S' and Ric_inf at the configured points, as JSON.
std::string run_compute(const RunConfig& c);
// One polar-field CSV per base point; returns the file names.
std::vector<std::string> run_polar(const RunConfig& c, const RunOptions& o);

} // namespace finsler
