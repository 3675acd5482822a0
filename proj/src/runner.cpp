#include "finsler/runner.hpp"

#include "finsler/curvature.hpp"
#include "finsler/errors.hpp"
#include "finsler/measure_geometry.hpp"
#include "finsler/spectral.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace finsler {

namespace {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string number_text(double v)
{
    if (!std::isfinite(v)) {
        return "null";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

// nlohmann prints shortest round-trip floats; summaries use fixed 17-digit scientific text.
void emit(const ojson& j, std::ostream& os, int depth)
{
    const std::string pad(static_cast<std::size_t>(2 * depth + 2), ' ');
    const std::string close(static_cast<std::size_t>(2 * depth), ' ');
    if (j.is_object()) {
        if (j.empty()) {
            os << "{}";
            return;
        }
        os << "{\n";
        std::size_t i = 0;
        for (auto it = j.begin(); it != j.end(); ++it, ++i) {
            os << pad << ojson(it.key()).dump() << ": ";
            emit(it.value(), os, depth + 1);
            os << (i + 1 < j.size() ? ",\n" : "\n");
        }
        os << close << "}";
    } else if (j.is_array()) {
        if (j.empty()) {
            os << "[]";
            return;
        }
        os << "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            os << pad;
            emit(j[i], os, depth + 1);
            os << (i + 1 < j.size() ? ",\n" : "\n");
        }
        os << close << "]";
    } else if (j.is_number_float()) {
        os << number_text(j.get<double>());
    } else {
        os << j.dump();
    }
}

std::string json_text(const ojson& j)
{
    std::ostringstream os;
    emit(j, os, 0);
    os << "\n";
    return os.str();
}

ojson vec_json(const Vec& v)
{
    ojson a = ojson::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        a.push_back(v[i]);
    }
    return a;
}

ojson mat_json(const Mat& m)
{
    ojson a = ojson::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        a.push_back(vec_json(m.row(i).transpose()));
    }
    return a;
}

fs::path output_dir(const RunConfig& c, const RunOptions& o)
{
    return o.out_dir.empty() ? fs::path(c.out_dir) : fs::path(o.out_dir);
}

void write_file(const fs::path& p, const std::string& text)
{
    std::ofstream out(p, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + p.string());
    }
    out << text;
}

// Shared per-run inputs of the isoperimetric and spectral checks.
struct SpectralInputs {
    double Lambda = 1.0;
};

struct CheckOutput {
    std::vector<ComparisonReport> reports;
    // Extra CSV tables keyed by a suffix.
    std::vector<std::pair<std::string, std::string>> tables;
};

bool threshold_for(const PolarField& f, const IsoConstants& c, double p, double theta)
{
    return c.converged && curvature_threshold_certified(f, p, 1.0 / c.r0, theta);
}

CheckOutput run_check(const PolarField& f, const CheckSpec& s, const SpectralInputs& in, double scale)
{
    const int n = f.dim();
    const Tolerance tol = Tolerance{}.scaled(scale);
    const Tolerance loose = Tolerance{1e-4, 0.0}.scaled(scale);
    CheckOutput out;
    auto& reps = out.reports;
    if (s.kind == "riccati") {
        reps.push_back(riccati_check(f, ModelFunctions(n, s.K, s.theta), loose));
    } else if (s.kind == "laplacian") {
        auto [a, b] = check_laplacian_comparison(f, s.p, s.K, s.theta, tol);
        reps.push_back(std::move(a));
        reps.push_back(std::move(b));
    } else if (s.kind == "volume") {
        auto [a, b] = check_volume_comparison(f, s.p, s.K, s.theta, s.r, s.R, tol);
        reps.push_back(std::move(a));
        reps.push_back(std::move(b));
    } else if (s.kind == "doubling") {
        reps.push_back(check_doubling(f, s.p, s.K, s.theta, s.Xi, s.r1, s.r2, s.R, tol));
    } else if (s.kind == "relative_volume") {
        reps.push_back(check_relative_volume(f, s.p, s.K, s.theta, s.r1, s.r2, s.R1, s.R2, tol));
    } else if (s.kind == "volume_growth") {
        reps.push_back(check_volume_growth(f, s.p, s.R, tol));
    } else if (s.kind == "norm_relation") {
        reps.push_back(check_norm_relation(f, s.p, s.K, s.theta, s.Xi, s.r1, s.r2, tol));
    } else if (s.kind == "iso_bound") {
        const IsoConstants c = r0_and_constants(n, in.Lambda, s.theta, s.Xi);
        const IsoProfile prof = iso_profile(f, s.r);
        ComparisonReport rep = check_iso_bound(prof, c, s.r, threshold_for(f, c, s.p, s.theta));
        rep.set("Lambda", in.Lambda);
        reps.push_back(std::move(rep));
        std::ostringstream os;
        write_csv(prof, os);
        out.tables.emplace_back("profile", os.str());
    } else if (s.kind == "coarea") {
        reps.push_back(coarea_consistency(f, s.R, {}, loose));
    } else if (s.kind == "eigenvalue") {
        const IsoConstants c = r0_and_constants(n, in.Lambda, s.theta, 2.0);
        EigenResult e = lambda1_radial(f, s.R, c, threshold_for(f, c, s.p, s.theta));
        e.bound_check.set("Lambda", in.Lambda);
        reps.push_back(std::move(e.bound_check));
        std::ostringstream os;
        write_csv(e.profile, os);
        out.tables.emplace_back("eigenprofile", os.str());
    } else if (s.kind == "harmonic") {
        const HarmonicResult h = radial_harmonic(f, s.r_inner, s.R);
        ComparisonReport rep;
        rep.theorem = "harmonic-gradient";
        rep.tol = {0.0, 0.0};
        rep.note = "sphere-averaged radial harmonic function; residual of (A u')' = 0";
        rep.add_row(s.R, h.residual, 1e-8 * scale);
        rep.set("Q", h.Q);
        rep.set("flux", h.flux);
        rep.settle();
        reps.push_back(std::move(rep));
        std::ostringstream os;
        write_csv(h.u, os);
        out.tables.emplace_back("harmonic", os.str());
    } else {
        throw ConfigError("unknown checker '" + s.kind + "'");
    }
    return out;
}

} // namespace

int exit_code_for(const std::vector<ReportEntry>& reports)
{
    bool unmet = false;
    for (const auto& e : reports) {
        if (e.report.status == Status::fail) {
            return exit_fail;
        }
        unmet = unmet || e.report.status == Status::hypothesis_unmet || e.report.status == Status::threshold_unmet;
    }
    return unmet ? exit_unmet : exit_pass;
}

VerifyOutcome run_verify(const RunConfig& c, const RunOptions& o)
{
    const fs::path dir = output_dir(c, o);
    if (o.write_files) {
        fs::create_directories(dir);
    }
    SpectralInputs in;
    in.Lambda = std::max(1.0, reversibility_constant(c.metric, default_sample_points(c.metric)));

    const int n = c.metric.dim();
    const DirectionGrid grid = n == 2 ? DirectionGrid::circle(c.directions)
                                      : DirectionGrid::sphere(std::max(2, c.directions / 2), c.directions);
    PolarOptions po;
    po.h = c.h;
    po.r_max = c.r_max;
    po.ricci = true;
    po.ricci_grid = c.ricci_grid;
    po.jobs = o.jobs;

    VerifyOutcome out;
    ojson reports = ojson::array();
    std::vector<std::pair<std::string, std::string>> files;
    for (std::size_t b = 0; b < c.base_points.size(); ++b) {
        const PolarField f = polar_field(c.metric, c.measure, c.base_points[b], grid, po);
        std::vector<CheckOutput> results(c.suite.size());
        parallel_for(static_cast<int>(c.suite.size()), o.jobs, [&](int i) {
            const CheckSpec& s = c.suite[static_cast<std::size_t>(i)];
            try {
                results[static_cast<std::size_t>(i)] = run_check(f, s, in, o.tolerance_scale);
            } catch (const Error& e) {
                ComparisonReport rep;
                rep.theorem = s.kind;
                rep.status = Status::fail;
                rep.note = e.what();
                results[static_cast<std::size_t>(i)].reports.push_back(std::move(rep));
            }
        });
        for (std::size_t i = 0; i < c.suite.size(); ++i) {
            char stem[64];
            std::snprintf(stem, sizeof stem, "bp%zu_%02zu_", b, i);
            for (const auto& [suffix, text] : results[i].tables) {
                files.emplace_back(std::string(stem) + c.suite[i].kind + "_" + suffix + ".csv", text);
            }
            for (auto& rep : results[i].reports) {
                ReportEntry e;
                e.base_index = static_cast<int>(b);
                e.check = c.suite[i].kind;
                e.csv = std::string(stem) + rep.theorem + ".csv";
                std::ostringstream os;
                write_csv(rep, os);
                files.emplace_back(e.csv, os.str());

                ojson r;
                r["base_point"] = b;
                r["check"] = e.check;
                r["theorem"] = rep.theorem;
                r["status"] = status_name(rep.status);
                r["hypothesis_ok"] = rep.hypothesis_ok;
                r["worst_margin"] = rep.rows.empty() ? std::numeric_limits<double>::quiet_NaN() : rep.worst_margin();
                r["pass"] = rep.status == Status::pass;
                r["rows"] = rep.rows.size();
                r["tolerance"] = {{"abs", rep.tol.abs}, {"rel", rep.tol.rel}};
                ojson values = ojson::object();
                for (const auto& [k, v] : rep.values) {
                    values[k] = v;
                }
                r["values"] = values;
                r["note"] = rep.note;
                r["csv"] = e.csv;
                reports.push_back(std::move(r));
                e.report = std::move(rep);
                out.reports.push_back(std::move(e));
            }
        }
    }
    out.exit_code = exit_code_for(out.reports);

    ojson summary;
    summary["name"] = c.name;
    summary["config_hash"] = c.hash;
    summary["metric"] = c.metric.name();
    summary["measure"] = c.measure.tag();
    summary["dimension"] = n;
    ojson bases = ojson::array();
    for (const Vec& x : c.base_points) {
        bases.push_back(vec_json(x));
    }
    summary["base_points"] = bases;
    summary["grid"] = {{"directions", grid.size()}, {"h", c.h}, {"r_max", c.r_max}, {"ricci_grid", c.ricci_grid}};
    summary["tolerance_scale"] = o.tolerance_scale;
    summary["reversibility_sampled"] = in.Lambda;
    summary["reports"] = reports;
    summary["exit_code"] = out.exit_code;
    out.summary = json_text(summary);

    if (o.write_files) {
        if (c.csv) {
            for (const auto& [name, text] : files) {
                write_file(dir / name, text);
            }
        }
        if (c.json) {
            write_file(dir / "summary.json", out.summary);
        }
        if (o.emit_plot_script) {
            std::ostringstream gp;
            gp << "set datafile separator ','\nset terminal pngcairo size 900,600\nset key autotitle columnhead\n";
            for (const auto& e : out.reports) {
                if (e.report.rows.empty()) {
                    continue;
                }
                const std::string png = e.csv.substr(0, e.csv.size() - 4) + ".png";
                gp << "set output '" << png << "'\n"
                   << "set title '" << e.report.theorem << " (base point " << e.base_index << ")'\n"
                   << "plot '" << e.csv << "' using 1:2 with points title 'lhs', '' using 1:3 with points title 'rhs'\n";
            }
            write_file(dir / "plot.gp", gp.str());
        }
    }
    return out;
}

std::string run_compute(const RunConfig& c)
{
    ojson pts = ojson::array();
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        const PointSpec& p = c.points[i];
        const FundamentalTensor g = fundamental_tensor(c.metric, p.x, p.y);
        const Tensor3 C = cartan_tensor(c.metric, p.x, p.y);
        const WeightedRicci w = weighted_ricci(c.metric, c.measure, p.x, p.y);
        const int n = c.metric.dim();
        ojson cart = ojson::array();
        for (int a = 0; a < n; ++a) {
            ojson plane = ojson::array();
            for (int b = 0; b < n; ++b) {
                ojson row = ojson::array();
                for (int d = 0; d < n; ++d) {
                    row.push_back(C(a, b, d));
                }
                plane.push_back(row);
            }
            cart.push_back(plane);
        }
        ojson e;
        e["x"] = vec_json(p.x);
        e["y"] = vec_json(p.y);
        e["F"] = c.metric.F(p.x, p.y);
        e["g"] = mat_json(g.g);
        e["cartan"] = cart;
        e["ric"] = w.ric;
        e["S"] = w.s;
        e["S_dot"] = w.s_dot;
        e["ric_inf"] = w.ric_inf;
        pts.push_back(e);
    }
    ojson out;
    out["config_hash"] = c.hash;
    out["metric"] = c.metric.name();
    out["measure"] = c.measure.tag();
    out["points"] = pts;
    return json_text(out);
}

std::vector<std::string> run_polar(const RunConfig& c, const RunOptions& o)
{
    const fs::path dir = output_dir(c, o);
    fs::create_directories(dir);
    const int n = c.metric.dim();
    const DirectionGrid grid = n == 2 ? DirectionGrid::circle(c.directions)
                                      : DirectionGrid::sphere(std::max(2, c.directions / 2), c.directions);
    PolarOptions po;
    po.h = c.h;
    po.r_max = c.r_max;
    po.jobs = o.jobs;
    std::vector<std::string> names;
    for (std::size_t b = 0; b < c.base_points.size(); ++b) {
        const PolarField f = polar_field(c.metric, c.measure, c.base_points[b], grid, po);
        std::ostringstream os;
        write_csv(f, os);
        names.push_back("polar_bp" + std::to_string(b) + ".csv");
        write_file(dir / names.back(), os.str());
    }
    return names;
}

} // namespace finsler
