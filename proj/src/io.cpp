#include "dshock/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <openssl/evp.h>

#include "dshock/errors.hpp"

namespace dshock::io {

namespace fs = std::filesystem;

void CsvTable::add(std::string name, std::vector<double> col) {
    if (!cols.empty() && col.size() != rows()) throw UsageError("CsvTable: column " + name + " has the wrong length");
    names.push_back(std::move(name));
    cols.push_back(std::move(col));
}

bool CsvTable::has(const std::string& name) const {
    return std::find(names.begin(), names.end(), name) != names.end();
}

const std::vector<double>& CsvTable::col(const std::string& name) const {
    for (std::size_t k = 0; k < names.size(); ++k)
        if (names[k] == name) return cols[k];
    throw UsageError("CsvTable: no column named " + name);
}

std::string CsvTable::meta_value(const std::string& key) const {
    for (const auto& [k, v] : meta)
        if (k == key) return v;
    return {};
}

void write_csv(const fs::path& path, const CsvTable& t) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw UsageError("cannot write " + path.string());
    std::fprintf(f, "# schema=%d\n", kCsvSchema);
    for (const auto& [k, v] : t.meta) std::fprintf(f, "# %s=%s\n", k.c_str(), v.c_str());
    for (std::size_t k = 0; k < t.names.size(); ++k) std::fprintf(f, "%s%s", k ? "," : "", t.names[k].c_str());
    std::fputc('\n', f);
    for (std::size_t r = 0; r < t.rows(); ++r) {
        for (std::size_t k = 0; k < t.cols.size(); ++k) std::fprintf(f, "%s%.17g", k ? "," : "", t.cols[k][r]);
        std::fputc('\n', f);
    }
    if (std::fclose(f) != 0) throw UsageError("write failed: " + path.string());
}

CsvTable read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read " + path.string());
    CsvTable t;
    std::string line;
    std::size_t lineno = 0;
    bool schema = false, header = false;
    auto fail = [&](const std::string& what) {
        throw UsageError(path.string() + ":" + std::to_string(lineno) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            std::string key = line.substr(1, eq - 1);
            key.erase(0, key.find_first_not_of(' '));
            const std::string val = line.substr(eq + 1);
            if (key == "schema") {
                if (val != std::to_string(kCsvSchema)) fail("unsupported schema " + val);
                schema = true;
            } else {
                t.meta.emplace_back(key, val);
            }
            continue;
        }
        if (!schema) fail("missing '# schema=1' line");
        std::stringstream ss(line);
        std::string cell;
        if (!header) {
            while (std::getline(ss, cell, ',')) {
                t.names.push_back(cell);
                t.cols.emplace_back();
            }
            header = true;
            continue;
        }
        std::size_t k = 0;
        while (std::getline(ss, cell, ',')) {
            if (k >= t.cols.size()) fail("too many fields");
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0') fail("not a number: '" + cell + "'");
            t.cols[k++].push_back(v);
        }
        if (k != t.cols.size()) fail("expected " + std::to_string(t.cols.size()) + " fields");
    }
    if (!header) throw UsageError(path.string() + ": no header row");
    return t;
}

void write_json(const fs::path& path, const json& j) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError(path.string() + ": " + e.what());
    }
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path.string());
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    std::string hex;
    char h[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(h, sizeof h, "%02x", md[i]);
        hex += h;
    }
    return hex;
}

void ArtifactLog::csv(const std::string& rel, const CsvTable& t) {
    write_csv(path(rel), t);
    files_.push_back(rel);
}

void ArtifactLog::write(const std::string& rel, const json& j) {
    write_json(path(rel), j);
    files_.push_back(rel);
}

void ArtifactLog::text(const std::string& rel, const std::string& body) {
    const fs::path p = path(rel);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw UsageError("cannot write " + p.string());
    out << body;
    files_.push_back(rel);
}

json ArtifactLog::listing() const {
    json a = json::array();
    for (const auto& rel : files_)
        a.push_back({{"path", rel}, {"sha256", sha256_file(path(rel))}, {"bytes", fs::file_size(path(rel))}});
    return a;
}

namespace {

double num_or_nan(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::numeric_limits<double>::quiet_NaN();
    return j.at(key).get<double>();
}

FitResult fit_from_json(const json& j) {
    FitResult f;
    f.exponent = num_or_nan(j, "exponent");
    f.prefactor = num_or_nan(j, "prefactor");
    f.r2 = num_or_nan(j, "r2");
    f.window_lo = num_or_nan(j, "window_lo");
    f.window_hi = num_or_nan(j, "window_hi");
    f.points = j.value("points", std::size_t{0});
    return f;
}

}  // namespace

json to_json(const FitResult& f) {
    return {{"exponent", f.exponent}, {"prefactor", f.prefactor}, {"r2", f.r2},
            {"window_lo", f.window_lo}, {"window_hi", f.window_hi}, {"points", f.points}};
}

json to_json(const TemporalFit& f) {
    return {{"beta", f.beta},         {"status", to_string(f.status)}, {"expected", f.expected},
            {"fit", to_json(f.fit)}, {"variation", f.variation}};
}

json to_json(const SpatialFit& f) {
    return {{"slope", to_json(f.slope)},
            {"two_param", {{"c", f.c}, {"delta", f.delta}, {"rms", f.two_param_rms}, {"points", f.two_param_points}}}};
}

json to_json(const TstarEstimate& e) {
    return {{"t_star", e.t_star}, {"fit", to_json(e.fit)}, {"non_monotone_tail", e.non_monotone_tail}};
}

json to_json(const BlowupReport& r) {
    json fits = json::array();
    for (const auto& [beta, f] : r.temporal_fits) fits.push_back(to_json(f));
    return {{"t_star", r.t_star},
            {"x_star", r.x_star},
            {"temporal_fits", fits},
            {"spatial_fit", to_json(r.spatial_fit)},
            {"ux_inverse_fit", to_json(r.ux_inverse_fit)},
            {"warnings", r.warnings}};
}

BlowupReport blowup_report_from_json(const json& j) {
    BlowupReport r;
    r.t_star = num_or_nan(j, "t_star");
    r.x_star = num_or_nan(j, "x_star");
    for (const auto& f : j.at("temporal_fits")) {
        TemporalFit t;
        t.beta = f.at("beta").get<double>();
        t.status = f.at("status").get<std::string>() == "fitted" ? RateStatus::fitted : RateStatus::bounded;
        t.expected = num_or_nan(f, "expected");
        t.fit = fit_from_json(f.at("fit"));
        t.variation = num_or_nan(f, "variation");
        r.temporal_fits[t.beta] = t;
    }
    const json& sp = j.at("spatial_fit");
    r.spatial_fit.slope = fit_from_json(sp.at("slope"));
    r.spatial_fit.c = num_or_nan(sp.at("two_param"), "c");
    r.spatial_fit.delta = num_or_nan(sp.at("two_param"), "delta");
    r.spatial_fit.two_param_rms = num_or_nan(sp.at("two_param"), "rms");
    r.spatial_fit.two_param_points = sp.at("two_param").value("points", std::size_t{0});
    const json& ux = j.at("ux_inverse_fit");
    r.ux_inverse_fit.t_star = num_or_nan(ux, "t_star");
    r.ux_inverse_fit.fit = fit_from_json(ux.at("fit"));
    r.ux_inverse_fit.non_monotone_tail = ux.value("non_monotone_tail", false);
    r.warnings = j.value("warnings", std::vector<std::string>{});
    return r;
}

json to_json(const BlowupEvent& e) {
    return {{"detected", e.detected},   {"t_star", e.t_star},       {"x_star", e.x_star},
            {"alpha_star", e.alpha_star}, {"min_w_at_stop", e.min_w_at_stop}, {"fit_r2", e.fit_r2},
            {"timed_out", e.timed_out}, {"stopped_by_coupled", e.stopped_by_coupled}};
}

json to_json(const ModulationState& m) {
    return {{"t", m.t},         {"s", m.s()},         {"tau", m.tau},          {"kappa", m.kappa},
            {"xi", m.xi},       {"tau_dot", m.tau_dot}, {"kappa_dot", m.kappa_dot}, {"xi_dot", m.xi_dot}};
}

json to_json(const BootstrapMonitor& b) {
    json v = json::array(), k = json::array(), e = json::array();
    for (std::size_t i = 0; i < 7; ++i) {
        v.push_back(b.V[i]);
        k.push_back(b.K[i]);
        e.push_back(b.exceeded[i]);
    }
    return {{"V", v}, {"K", k}, {"exceeded", e}, {"M", b.M}, {"A", b.A}, {"under_resolved", b.under_resolved}};
}

json to_json(const ConditionResult& c) {
    return {{"name", c.name},       {"pass", c.pass},           {"margin", c.margin},
            {"at_x", c.at_x},       {"surrogate", c.surrogate}, {"note", c.note}};
}

json to_json(const AdmissibilityReport& r) {
    json c = json::array();
    for (const auto& x : r.conditions) c.push_back(to_json(x));
    return {{"all_pass", r.all_pass()}, {"A", r.A_value}, {"sup_I", r.sup_I}, {"conditions", c}};
}

json to_json(const InequalityReport& r) {
    return {{"name", r.name},         {"y_lo", r.y_lo},        {"y_hi", r.y_hi},
            {"points", r.points},     {"min_margin", r.min_margin}, {"at_y", r.at_y},
            {"lambda_found", r.lambda_found}, {"pass", r.pass}, {"note", r.note}};
}

json to_json(const std::vector<InequalityReport>& r) {
    json a = json::array();
    bool all = true;
    for (const auto& x : r) {
        a.push_back(to_json(x));
        all = all && x.pass;
    }
    return {{"note", "numerical evidence on a finite grid, not a proof"}, {"all_pass", all}, {"inequalities", a}};
}

json to_json(const MaxPrincipleReport& r) {
    json d = json::array();
    for (const auto& x : r.draws)
        d.push_back({{"index", x.index},       {"m0", x.m0},         {"lambda_D", x.lambda_D},
                     {"delta", x.delta},       {"F0", x.F0},         {"sup_f", x.sup_f},
                     {"sup_omega", x.sup_omega}, {"admissible", x.admissible}, {"holds", x.holds}});
    return {{"note", "numerical evidence on a finite grid, not a proof"},
            {"admissible", r.admissible},
            {"counterexamples", r.counterexamples},
            {"draws", d}};
}

json to_json(const DecayCheck& c) {
    return {{"lambda_D", c.lambda_D}, {"lambda_F", c.lambda_F}, {"F0", c.F0},      {"y_edge", c.y_edge},
            {"f_edge", c.f_edge},     {"bound", c.bound},       {"holds", c.holds}};
}

}  // namespace dshock::io
