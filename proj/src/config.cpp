#include "finsler/config.hpp"

#include "finsler/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

namespace finsler {

namespace {

using nlohmann::json;

// Typed access to one JSON object; every key read is recorded so leftovers can be rejected.
class Node {
public:
    Node(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) {
            fail("expected an object");
        }
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(where() + ": " + msg); }
    std::string where() const { return path_.empty() ? "<root>" : path_; }
    std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string& key)
    {
        seen_.insert(key);
        return j_.contains(key);
    }

    const json& at(const std::string& key)
    {
        if (!has(key)) {
            fail("missing field '" + key + "'");
        }
        return j_.at(key);
    }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt)
    {
        if (!has(key)) {
            if (fallback) {
                return *fallback;
            }
            fail("missing field '" + key + "'");
        }
        const json& v = j_.at(key);
        if (!v.is_number()) {
            throw ConfigError(child(key) + ": expected a number");
        }
        const double d = v.get<double>();
        if (!std::isfinite(d)) {
            throw ConfigError(child(key) + ": must be finite");
        }
        return d;
    }

    int integer(const std::string& key, std::optional<int> fallback = std::nullopt)
    {
        if (!has(key)) {
            if (fallback) {
                return *fallback;
            }
            fail("missing field '" + key + "'");
        }
        const json& v = j_.at(key);
        if (!v.is_number_integer()) {
            throw ConfigError(child(key) + ": expected an integer");
        }
        return v.get<int>();
    }

    std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt)
    {
        if (!has(key)) {
            if (fallback) {
                return *fallback;
            }
            fail("missing field '" + key + "'");
        }
        const json& v = j_.at(key);
        if (!v.is_string()) {
            throw ConfigError(child(key) + ": expected a string");
        }
        return v.get<std::string>();
    }

    bool boolean(const std::string& key, bool fallback)
    {
        if (!has(key)) {
            return fallback;
        }
        const json& v = j_.at(key);
        if (!v.is_boolean()) {
            throw ConfigError(child(key) + ": expected true or false");
        }
        return v.get<bool>();
    }

    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) {
                throw ConfigError(child(it.key()) + ": unknown field");
            }
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

Vec vector_of(const json& v, int n, const std::string& path)
{
    if (!v.is_array() || static_cast<int>(v.size()) != n) {
        throw ConfigError(path + ": expected an array of " + std::to_string(n) + " numbers");
    }
    Vec out(n);
    for (int i = 0; i < n; ++i) {
        const json& e = v[static_cast<std::size_t>(i)];
        if (!e.is_number() || !std::isfinite(e.get<double>())) {
            throw ConfigError(path + "[" + std::to_string(i) + "]: expected a finite number");
        }
        out[i] = e.get<double>();
    }
    return out;
}

Mat matrix_of(const json& v, int n, const std::string& path)
{
    if (!v.is_array() || static_cast<int>(v.size()) != n) {
        throw ConfigError(path + ": expected " + std::to_string(n) + " rows");
    }
    Mat out(n, n);
    for (int i = 0; i < n; ++i) {
        out.row(i) = vector_of(v[static_cast<std::size_t>(i)], n, path + "[" + std::to_string(i) + "]").transpose();
    }
    return out;
}

std::string indexed(const std::string& path, std::size_t i)
{
    return path + "[" + std::to_string(i) + "]";
}

MetricSpec parse_metric(const json& j)
{
    Node m(j, "metric");
    const std::string family = m.string("family");
    const int n = m.integer("n");
    if (n != 2 && n != 3) {
        throw ConfigError("metric.n: dimension must be 2 or 3");
    }
    try {
        MetricSpec out = MetricSpec::euclidean(n);
        if (family == "euclidean") {
        } else if (family == "poincare") {
            out = MetricSpec::poincare(n, m.number("K", -1.0));
        } else if (family == "sphere") {
            out = MetricSpec::sphere(n, m.number("K", 1.0));
        } else if (family == "minkowski_quartic") {
            out = MetricSpec::minkowski_quartic(n, m.number("eps", 0.1));
        } else if (family == "randers") {
            const Mat a = m.has("a") ? matrix_of(m.at("a"), n, "metric.a") : Mat(Mat::Identity(n, n));
            const Vec b0 = m.has("b0") ? vector_of(m.at("b0"), n, "metric.b0") : Vec(Vec::Zero(n));
            const Mat B = m.has("B") ? matrix_of(m.at("B"), n, "metric.B") : Mat();
            const double radius = m.number("chart_radius", std::numeric_limits<double>::infinity());
            out = MetricSpec::randers(a, b0, B, radius);
        } else if (family == "funk") {
            out = MetricSpec::funk(n);
        } else {
            throw ConfigError("metric.family: unknown family '" + family + "'");
        }
        if (m.boolean("reverse", false)) {
            out = out.reverse();
        }
        m.finish();
        return out;
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(std::string("metric: ") + e.what());
    }
}

MeasureSpec parse_measure(const json& j, int n)
{
    Node m(j, "measure");
    const std::string kind = m.string("kind");
    MeasureSpec out = MeasureSpec::lebesgue();
    if (kind == "lebesgue") {
    } else if (kind == "busemann_hausdorff") {
        out = MeasureSpec::busemann_hausdorff();
    } else if (kind == "gaussian") {
        out = MeasureSpec::gaussian(n);
    } else if (kind == "poly_log_density") {
        const json& terms = m.at("terms");
        if (!terms.is_array() || terms.empty()) {
            throw ConfigError("measure.terms: expected a non-empty array");
        }
        std::vector<PolyTerm> list;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            const std::string path = indexed("measure.terms", i);
            Node t(terms[i], path);
            const json& e = t.at("exponents");
            if (!e.is_array() || static_cast<int>(e.size()) != n) {
                throw ConfigError(path + ".exponents: expected " + std::to_string(n) + " integers");
            }
            PolyTerm term;
            for (const json& k : e) {
                if (!k.is_number_integer() || k.get<int>() < 0) {
                    throw ConfigError(path + ".exponents: expected non-negative integers");
                }
                term.exponents.push_back(k.get<int>());
            }
            term.coef = t.number("coef");
            t.finish();
            list.push_back(std::move(term));
        }
        try {
            out = MeasureSpec::poly_log_density(std::move(list));
        } catch (const Error& e) {
            throw ConfigError(std::string("measure: ") + e.what());
        }
    } else {
        throw ConfigError("measure.kind: unknown kind '" + kind + "'");
    }
    m.finish();
    return out;
}

struct KindInfo {
    const char* id;
    std::vector<const char*> params;
};

const std::vector<KindInfo>& kinds()
{
    static const std::vector<KindInfo> k = {
        {"riccati", {"K", "theta"}},
        {"laplacian", {"p", "K", "theta"}},
        {"volume", {"p", "K", "theta", "r", "R"}},
        {"doubling", {"p", "K", "theta", "Xi", "r1", "r2", "R"}},
        {"relative_volume", {"p", "K", "theta", "r1", "r2", "R1", "R2"}},
        {"volume_growth", {"p", "R"}},
        {"norm_relation", {"p", "K", "theta", "Xi", "r1", "r2"}},
        {"iso_bound", {"p", "theta", "Xi", "r"}},
        {"coarea", {"R"}},
        {"eigenvalue", {"p", "theta", "R"}},
        {"harmonic", {"r_inner", "R"}},
    };
    return k;
}

double* slot(CheckSpec& c, const std::string& key)
{
    if (key == "p") return &c.p;
    if (key == "K") return &c.K;
    if (key == "theta") return &c.theta;
    if (key == "Xi") return &c.Xi;
    if (key == "r") return &c.r;
    if (key == "R") return &c.R;
    if (key == "r1") return &c.r1;
    if (key == "r2") return &c.r2;
    if (key == "R1") return &c.R1;
    if (key == "R2") return &c.R2;
    return &c.r_inner;
}

bool uses(const CheckSpec& c, const std::string& key)
{
    for (const auto& k : kinds()) {
        if (c.kind == k.id) {
            for (const char* p : k.params) {
                if (key == p) {
                    return true;
                }
            }
        }
    }
    return false;
}

void validate_check(const CheckSpec& c, const RunConfig& cfg, const std::string& path)
{
    const int n = cfg.metric.dim();
    const auto bad = [&](const std::string& key, const std::string& msg) {
        throw ConfigError(path + (key.empty() ? "" : "." + key) + ": " + msg);
    };
    if (uses(c, "p") && !(c.p > n / 2.0)) {
        bad("p", "must exceed n/2");
    }
    if (uses(c, "theta") && c.theta < 0.0) {
        bad("theta", "must be non-negative");
    }
    if (uses(c, "Xi") && !(c.Xi > 1.0)) {
        bad("Xi", "must exceed 1");
    }
    const double cap = c.K > 0.0 ? std::numbers::pi / (2.0 * std::sqrt(c.K)) : std::numeric_limits<double>::infinity();
    for (const char* key : {"r", "R", "r1", "r2", "R1", "R2", "r_inner"}) {
        if (!uses(c, key)) {
            continue;
        }
        const double v = *slot(const_cast<CheckSpec&>(c), key);
        const bool zero_ok = std::string(key) == "r1" && c.kind == "relative_volume";
        if (v < 0.0 || (v == 0.0 && !zero_ok) || v > cfg.r_max * (1.0 + 1e-12)) {
            bad(key, "must lie in (0, r_max]");
        }
        const double u = v / cfg.h;
        if (std::abs(u - std::round(u)) > 1e-9) {
            bad(key, "must be a multiple of the radial step h");
        }
        if (uses(c, "K") && v > cap) {
            bad(key, "exceeds pi / (2 sqrt K)");
        }
    }
    if (c.kind == "volume" && !(c.r <= c.R)) {
        bad("r", "must not exceed R");
    }
    if ((c.kind == "doubling" || c.kind == "norm_relation") && !(c.r1 <= c.r2)) {
        bad("r1", "must not exceed r2");
    }
    if (c.kind == "doubling" && !(c.r2 <= c.R)) {
        bad("r2", "must not exceed R");
    }
    if (c.kind == "relative_volume" && !(c.r1 <= c.r2 && c.r2 < c.R1 && c.R1 <= c.R2)) {
        bad("", "radii must satisfy r1 <= r2 < R1 <= R2");
    }
    if (c.kind == "volume_growth" && (c.R < 1.0 || c.R + 1.0 > cfg.r_max * (1.0 + 1e-12))) {
        bad("R", "needs 1 <= R and R + 1 <= r_max");
    }
    if (c.kind == "iso_bound" && c.r > 1.0) {
        bad("r", "must not exceed 1");
    }
    if (c.kind == "harmonic" && !(c.r_inner < c.R)) {
        bad("r_inner", "must be below R");
    }
}

std::string fnv1a(const std::string& s)
{
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// Multiple of h closest to x from below, at least h.
double snap(double x, double h)
{
    return std::max(1.0, std::floor(x / h + 1e-9)) * h;
}

} // namespace

const std::vector<std::string>& check_kinds()
{
    static const std::vector<std::string> ids = [] {
        std::vector<std::string> v;
        for (const auto& k : kinds()) {
            v.emplace_back(k.id);
        }
        return v;
    }();
    return ids;
}

std::vector<CheckSpec> default_suite(const RunConfig& c)
{
    const double R = c.r_max;
    const double h = c.h;
    const auto at = [&](double frac) { return snap(frac * R, h); };
    std::vector<CheckSpec> s;
    const auto add = [&](CheckSpec x) { s.push_back(std::move(x)); };
    add({.kind = "riccati"});
    add({.kind = "laplacian"});
    add({.kind = "volume", .r = at(0.5), .R = R});
    add({.kind = "doubling", .R = R, .r1 = at(0.25), .r2 = at(0.5)});
    add({.kind = "relative_volume", .r1 = 0.0, .r2 = at(0.25), .R1 = at(0.5), .R2 = R});
    add({.kind = "norm_relation", .r1 = at(0.5), .r2 = R});
    if (R >= 2.0) {
        add({.kind = "volume_growth", .R = snap(R - 1.0, h)});
    }
    add({.kind = "iso_bound", .r = std::min(R, 1.0)});
    add({.kind = "coarea", .R = at(0.5)});
    add({.kind = "eigenvalue", .R = R});
    add({.kind = "harmonic", .R = R, .r_inner = at(0.2)});
    return s;
}

RunConfig parse_config(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("line/byte " + std::to_string(e.byte) + ": " + e.what());
    }
    Node root(j, "");
    RunConfig c;
    c.hash = fnv1a(j.dump());
    c.metric = parse_metric(root.at("metric"));
    const int n = c.metric.dim();
    c.measure = parse_measure(root.at("measure"), n);
    c.name = root.string("name", c.metric.name() + "_" + c.measure.tag());

    if (root.has("grids")) {
        Node g(root.at("grids"), "grids");
        c.directions = g.integer("directions", 32);
        c.h = g.number("h", 0.01);
        c.r_max = g.number("r_max", 1.0);
        c.ricci_grid = g.integer("ricci_grid", 0);
        g.finish();
    }
    if (c.directions < 4) {
        throw ConfigError("grids.directions: need at least 4");
    }
    if (!(c.h > 0.0) || !(c.r_max > 0.0)) {
        throw ConfigError("grids: h and r_max must be positive");
    }
    const double steps = c.r_max / c.h;
    if (std::abs(steps - std::round(steps)) > 1e-9 || std::round(steps) < 6) {
        throw ConfigError("grids.r_max: must be a multiple of h with at least 6 steps");
    }
    if (c.ricci_grid < 0) {
        throw ConfigError("grids.ricci_grid: must be non-negative");
    }

    if (root.has("base_points")) {
        const json& b = root.at("base_points");
        if (!b.is_array() || b.empty()) {
            throw ConfigError("base_points: expected a non-empty array");
        }
        for (std::size_t i = 0; i < b.size(); ++i) {
            c.base_points.push_back(vector_of(b[i], n, indexed("base_points", i)));
        }
    } else {
        c.base_points = default_sample_points(c.metric);
    }
    for (std::size_t i = 0; i < c.base_points.size(); ++i) {
        if (!c.metric.in_chart(as_span(c.base_points[i]))) {
            throw ConfigError(indexed("base_points", i) + ": outside the chart");
        }
    }

    if (root.has("suite")) {
        const json& s = root.at("suite");
        if (!s.is_array()) {
            throw ConfigError("suite: expected an array");
        }
        for (std::size_t i = 0; i < s.size(); ++i) {
            const std::string path = indexed("suite", i);
            Node e(s[i], path);
            CheckSpec chk;
            chk.kind = e.string("check");
            const auto& ids = check_kinds();
            if (std::find(ids.begin(), ids.end(), chk.kind) == ids.end()) {
                throw ConfigError(path + ".check: unknown checker '" + chk.kind + "'");
            }
            for (const auto& k : kinds()) {
                if (chk.kind == k.id) {
                    for (const char* key : k.params) {
                        double* v = slot(chk, key);
                        *v = e.number(key, *v);
                    }
                }
            }
            e.finish();
            c.suite.push_back(chk);
        }
    } else {
        c.suite = default_suite(c);
    }
    for (std::size_t i = 0; i < c.suite.size(); ++i) {
        validate_check(c.suite[i], c, indexed("suite", i));
    }

    if (root.has("points")) {
        const json& p = root.at("points");
        if (!p.is_array()) {
            throw ConfigError("points: expected an array");
        }
        for (std::size_t i = 0; i < p.size(); ++i) {
            const std::string path = indexed("points", i);
            Node e(p[i], path);
            PointSpec pt{vector_of(e.at("x"), n, path + ".x"), vector_of(e.at("y"), n, path + ".y")};
            e.finish();
            if (!c.metric.in_chart(as_span(pt.x))) {
                throw ConfigError(path + ".x: outside the chart");
            }
            if (pt.y.squaredNorm() == 0.0) {
                throw ConfigError(path + ".y: must be nonzero");
            }
            c.points.push_back(pt);
        }
    }

    if (root.has("output")) {
        Node o(root.at("output"), "output");
        c.out_dir = o.string("dir", c.out_dir);
        if (o.has("formats")) {
            const json& f = o.at("formats");
            if (!f.is_array()) {
                throw ConfigError("output.formats: expected an array");
            }
            c.csv = c.json = false;
            for (const json& x : f) {
                if (x == "csv") {
                    c.csv = true;
                } else if (x == "json") {
                    c.json = true;
                } else {
                    throw ConfigError("output.formats: expected \"csv\" or \"json\"");
                }
            }
        }
        o.finish();
    }
    root.finish();
    return c;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path + ": cannot open");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string catalog_json()
{
    json metrics = json::array({
        {{"family", "euclidean"}, {"params", json::object()}},
        {{"family", "poincare"}, {"params", {{"K", "negative curvature, default -1"}}}},
        {{"family", "sphere"}, {"params", {{"K", "positive curvature, default 1"}}}},
        {{"family", "minkowski_quartic"}, {"params", {{"eps", "quartic weight, default 0.1"}}}},
        {{"family", "randers"},
         {"params",
          {{"a", "n x n positive definite, default identity"},
           {"b0", "constant drift, default 0"},
           {"B", "n x n linear drift, optional"},
           {"chart_radius", "optional"}}}},
        {{"family", "funk"}, {"params", json::object()}},
    });
    json measures = json::array({
        {{"kind", "lebesgue"}},
        {{"kind", "busemann_hausdorff"}},
        {{"kind", "gaussian"}, {"density", "exp(-|x|^2/2)"}},
        {{"kind", "poly_log_density"}, {"terms", "[{exponents: [..n ints], coef}], density exp(-sum coef x^exponents)"}},
    });
    json checks = json::array();
    for (const auto& k : kinds()) {
        checks.push_back({{"check", k.id}, {"params", k.params}});
    }
    json out = {{"metrics", metrics},
                {"measures", measures},
                {"common_metric_fields", {{"n", "2 or 3"}, {"reverse", "optional bool"}}},
                {"checks", checks}};
    return out.dump(2);
}

} // namespace finsler
