// fqr: batch CLI for the quartic Randers-change toolkit.
//
// Subcommands: eval, geodesic, distance, check-reversible, check-flat,
// check-weightable, triangle, catalog. Every check writes the shared
// CheckReport JSON schema; exit status is 0 iff all checks pass, 1 on a
// failed check, 2 on an error (reported as machine-readable JSON).

#include <array>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "finsler/finsler.hpp"

using namespace finsler;
using nlohmann::ordered_json;

namespace {

struct RunManifest {
    std::string command;
    std::string patch_ref;  // catalog name or file path
    std::uint64_t seed = 12345;
    int steps = 512;
    int grid = 9;
    double t_end = 2.0;
    std::optional<double> tol;
    std::string out_dir;  // empty: no files written
    bool json = false;
};

Vec parse_point(const std::string& text, int dim) {
    Vec out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string tok = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw Error("malformed point component '" + tok + "' in \"" + text + "\"");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (static_cast<int>(out.size()) != dim)
        throw Error("point \"" + text + "\" has " + std::to_string(out.size()) +
                    " components, patch dimension is " + std::to_string(dim));
    return out;
}

ManifoldPatch resolve_patch(const std::string& ref) {
    for (const auto& cfg : catalog())
        if (cfg.name == ref) return patch_from_config(cfg);
    return load_patch_file(ref);
}

ordered_json manifest_json(const RunManifest& m, const ManifoldPatch& p) {
    ordered_json j;
    j["command"] = m.command;
    j["patch"] = p.name();
    j["seed"] = m.seed;
    return j;
}

void emit(const RunManifest& m, const ordered_json& payload, const std::string& human) {
    if (m.json)
        std::cout << payload.dump(2) << "\n";
    else
        std::cout << human;
    if (!m.out_dir.empty()) {
        std::filesystem::path file =
            std::filesystem::path(m.out_dir) /
            (m.command + "-" + payload.value("patch", std::string("run")) + ".json");
        write_file_atomic(file, payload.dump(2) + "\n");
    }
}

void write_csv(const RunManifest& m, const ManifoldPatch& p, const GeodesicPath& path,
               const char* tag) {
    if (m.out_dir.empty()) return;
    std::filesystem::path file =
        std::filesystem::path(m.out_dir) / (std::string(tag) + "-" + p.name() + ".csv");
    write_file_atomic(file, path_csv(path));
}

std::vector<DirectionPoint> seeded_direction_points(const ManifoldPatch& p, int k,
                                                    std::uint64_t seed, double shrink) {
    SampleRng rng(seed);
    std::vector<DirectionPoint> out;
    for (int i = 0; i < k; ++i) out.push_back(rng.direction_point(p, shrink));
    return out;
}

int run_eval(const RunManifest& m, const std::string& xs, const std::string& ys) {
    auto p = resolve_patch(m.patch_ref);
    Vec x = parse_point(xs, p.dim());
    Vec y = parse_point(ys, p.dim());
    DirectionPoint dp{x, y};
    auto ft = fundamental_tensor(p, dp);
    ordered_json j = manifest_json(m, p);
    j["x"] = x;
    j["y"] = y;
    j["alpha"] = alpha(p, dp);
    j["beta"] = beta(p, dp);
    j["F"] = F_value(p, dp);
    j["F_reverse"] = F_reverse(p, dp);
    std::vector<Vec> g_rows;
    for (int i = 0; i < p.dim(); ++i) {
        Vec row;
        for (int k = 0; k < p.dim(); ++k) row.push_back(ft.g(i, k));
        g_rows.push_back(row);
    }
    j["g"] = g_rows;
    j["g_min_eigenvalue"] = min_eigenvalue_sym(ft.g);
    j["strongly_convex"] = check_strong_convexity(p, dp, 0.0);
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "patch %s: F = %.9g, F_reverse = %.9g, alpha = %.9g, beta = %.9g\n",
                  p.name().c_str(), F_value(p, dp), F_reverse(p, dp), alpha(p, dp),
                  beta(p, dp));
    emit(m, j, buf);
    return 0;
}

int run_geodesic(const RunManifest& m, const std::string& xs, const std::string& ys) {
    auto p = resolve_patch(m.patch_ref);
    Vec x0 = parse_point(xs, p.dim());
    Vec y0 = parse_point(ys, p.dim());
    GeodesicPath path = integrate_geodesic(p, x0, y0, m.t_end, m.steps);
    ordered_json j = manifest_json(m, p);
    j["t_end"] = m.t_end;
    j["steps"] = m.steps;
    j["endpoint"] = path.back().x;
    j["exited_domain"] = path.exited_domain;
    double lo = 1e300, hi = -1e300;
    for (const auto& node : path.nodes) {
        lo = std::min(lo, node.speed);
        hi = std::max(hi, node.speed);
    }
    j["speed_drift"] = (hi - lo) / lo;
    write_csv(m, p, path, "geodesic");
    if (m.out_dir.empty() && !m.json) {
        path_to_csv(path, std::cout);
        return 0;
    }
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "patch %s: geodesic endpoint (%.9g, %.9g) after t = %g, speed drift %.3g%s\n",
                  p.name().c_str(), path.back().x[0], path.back().x[1], m.t_end,
                  (hi - lo) / lo, path.exited_domain ? " (exited domain)" : "");
    emit(m, j, buf);
    return 0;
}

int run_distance(const RunManifest& m, const std::string& froms, const std::string& tos) {
    auto p = resolve_patch(m.patch_ref);
    Vec from = parse_point(froms, p.dim());
    Vec to = parse_point(tos, p.dim());
    DistanceOptions opt;
    opt.shoot_steps = std::max(32, m.steps / 4);
    DistanceResult res = distance(p, from, to, opt);
    ordered_json j = manifest_json(m, p);
    j["from"] = from;
    j["to"] = to;
    j["value"] = res.value;
    j["method"] = method_name(res.method);
    j["converged"] = res.converged;
    if (m.grid >= 16) {
        double oracle = distance_oracle_grid(p, from, to, m.grid);
        j["grid_oracle"] = oracle;
        j["grid_per_axis"] = m.grid;
    }
    write_csv(m, p, res.path, "distance");
    char buf[256];
    std::snprintf(buf, sizeof buf, "patch %s: d_F = %.9g (%s%s)\n", p.name().c_str(), res.value,
                  method_name(res.method), res.converged ? "" : ", NOT converged");
    emit(m, j, buf);
    return res.converged ? 0 : 1;
}

ordered_json report_block(const CheckReport& r) { return to_json(r); }

int run_check_reversible(const RunManifest& m) {
    auto p = resolve_patch(m.patch_ref);
    double tol = m.tol.value_or(1e-4);

    CheckReport closed = closedness_report(p, std::max(2, m.grid));

    CheckReport criterion;
    criterion.name = "closed-form-criterion";
    criterion.threshold = m.tol ? *m.tol : 1e-8;
    double worst = 0.0;
    auto samples = seeded_direction_points(p, 100, m.seed, 0.6);
    for (const auto& dp : samples) worst = std::max(worst, norm2(closed_form_criterion(p, dp)));
    criterion.samples = static_cast<long>(samples.size());
    criterion.max_residual = worst;
    criterion.pass = worst < criterion.threshold;
    criterion.details.push_back("max |dF/dbeta * (db_i/dx^j - db_j/dx^i) y^j| over samples: " +
                                fmt_g(worst));

    auto trace_samples = seeded_direction_points(p, 4, m.seed + 1, 0.15);
    CheckReport trace = trace_reversibility_defect(p, trace_samples, m.t_end, m.steps, tol);

    bool pass = closed.pass && criterion.pass && trace.pass;
    ordered_json j = manifest_json(m, p);
    j["pass"] = pass;
    j["reports"] = ordered_json::array({report_block(closed), report_block(criterion),
                                        report_block(trace)});
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "patch %s: reversible-geodesics check %s\n"
                  "  closedness: max |db| = %.3g (%s)\n"
                  "  closed-form criterion: max = %.3g (%s)\n"
                  "  trace defect: max = %.3g (%s)\n",
                  p.name().c_str(), pass ? "PASS" : "FAIL", closed.max_residual,
                  closed.pass ? "pass" : "fail", criterion.max_residual,
                  criterion.pass ? "pass" : "fail", trace.max_residual,
                  trace.pass ? "pass" : "fail");
    emit(m, j, buf);
    return pass ? 0 : 1;
}

int run_check_flat(const RunManifest& m) {
    auto p = resolve_patch(m.patch_ref);
    auto samples = seeded_direction_points(p, 60, m.seed, 0.6);
    auto trace_samples = seeded_direction_points(p, 3, m.seed + 1, 0.15);
    CheckReport trace = trace_reversibility_defect(p, trace_samples, m.t_end, m.steps, 1e-4);
    CheckReport rep = flatness_report(p, samples, trace.max_residual);
    if (m.tol) {
        rep.threshold = *m.tol;
        rep.pass = rep.max_residual < *m.tol;
    }
    ordered_json j = manifest_json(m, p);
    j["pass"] = rep.pass;
    j["reports"] = ordered_json::array({report_block(rep), report_block(trace)});
    char buf[256];
    std::snprintf(buf, sizeof buf, "patch %s: projective-flatness check %s (max residual %.3g)\n",
                  p.name().c_str(), rep.pass ? "PASS" : "FAIL", rep.max_residual);
    emit(m, j, buf);
    return rep.pass ? 0 : 1;
}

int run_check_weightable(const RunManifest& m) {
    auto p = resolve_patch(m.patch_ref);
    double tol = m.tol.value_or(1e-4);
    SampleRng rng(m.seed);
    std::vector<Vec> pts;
    for (int i = 0; i < 8; ++i) pts.push_back(rng.point_in(p.domain(), 0.3));
    std::vector<std::pair<Vec, Vec>> pairs;
    for (int i = 0; i < 12; ++i) {
        int a = static_cast<int>(rng.uniform01() * pts.size());
        int b = static_cast<int>(rng.uniform01() * pts.size());
        if (a == b) b = (b + 1) % static_cast<int>(pts.size());
        pairs.emplace_back(pts[static_cast<std::size_t>(a)], pts[static_cast<std::size_t>(b)]);
    }
    std::vector<std::array<Vec, 3>> triples;
    for (int i = 0; i < 6; ++i)
        triples.push_back({rng.point_in(p.domain(), 0.3), rng.point_in(p.domain(), 0.3),
                           rng.point_in(p.domain(), 0.3)});
    Vec base = p.domain().center();
    CheckReport axioms = quasi_axioms_report(p, triples, 1e-6);
    CheckReport weightable = weightability_report(p, base, pairs, tol);
    bool pass = axioms.pass && weightable.pass;
    ordered_json j = manifest_json(m, p);
    j["pass"] = pass;
    j["reports"] = ordered_json::array({report_block(axioms), report_block(weightable)});
    char buf[256];
    std::snprintf(buf, sizeof buf, "patch %s: weightability check %s (axiom residual %.3g)\n",
                  p.name().c_str(), pass ? "PASS" : "FAIL", weightable.max_residual);
    emit(m, j, buf);
    return pass ? 0 : 1;
}

int run_triangle(const RunManifest& m) {
    auto p = resolve_patch(m.patch_ref);
    double tol = m.tol.value_or(1e-4);
    SampleRng rng(m.seed);
    std::vector<std::array<Vec, 3>> triples;
    for (int i = 0; i < 6; ++i)
        triples.push_back({rng.point_in(p.domain(), 0.25), rng.point_in(p.domain(), 0.25),
                           rng.point_in(p.domain(), 0.25)});
    CheckReport rep = triangle_orientation_report(p, triples, tol);
    ordered_json j = manifest_json(m, p);
    j["pass"] = rep.pass;
    j["reports"] = ordered_json::array({report_block(rep)});
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "patch %s: triangle orientation check %s (max defect %.3g)\n",
                  p.name().c_str(), rep.pass ? "PASS" : "FAIL", rep.max_residual);
    emit(m, j, buf);
    return rep.pass ? 0 : 1;
}

int run_catalog(const RunManifest& m) {
    ordered_json list = ordered_json::array();
    std::string human;
    for (const auto& cfg : catalog()) {
        ordered_json e;
        e["name"] = cfg.name;
        e["dim"] = cfg.dim;
        e["a"] = cfg.a;
        e["b"] = cfg.b;
        list.push_back(e);
        human += cfg.name + "  (dim " + std::to_string(cfg.dim) + ", b = [";
        for (std::size_t i = 0; i < cfg.b.size(); ++i)
            human += (i ? ", " : "") + cfg.b[i];
        human += "])\n";
    }
    ordered_json j;
    j["command"] = "catalog";
    j["patches"] = list;
    if (m.json)
        std::cout << j.dump(2) << "\n";
    else
        std::cout << human;
    if (!m.out_dir.empty())
        write_file_atomic(std::filesystem::path(m.out_dir) / "catalog.json", j.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical toolkit for the quartic Randers-change metric F = (a^4+b^4)^(1/4) + b"};
    app.require_subcommand(1);

    RunManifest m;
    std::string xs, ys, froms, tos;

    auto add_common = [&m](CLI::App* cmd, bool patch_required = true) {
        auto* opt = cmd->add_option("--patch", m.patch_ref, "catalog name or patch file path");
        if (patch_required) opt->required();
        cmd->add_option("--out", m.out_dir, "directory for report/CSV artifacts");
        cmd->add_option("--seed", m.seed, "sample-generation seed");
        cmd->add_option("--steps", m.steps, "integrator steps");
        cmd->add_option("--grid", m.grid, "grid resolution (closedness scan / distance oracle)");
        cmd->add_option("--tol", m.tol, "override the primary pass threshold");
        cmd->add_flag("--json", m.json, "print the full JSON payload to stdout");
    };

    auto* eval = app.add_subcommand("eval", "evaluate F, its reverse and g at a point");
    add_common(eval);
    eval->add_option("--x", xs, "base point, comma-separated")->required();
    eval->add_option("--y", ys, "tangent vector, comma-separated")->required();

    auto* geo = app.add_subcommand("geodesic", "integrate a geodesic and export CSV");
    add_common(geo);
    geo->add_option("--x", xs, "initial point")->required();
    geo->add_option("--y", ys, "initial velocity")->required();
    geo->add_option("--t-end", m.t_end, "integration time");

    auto* dist = app.add_subcommand("distance", "quasi-distance between two points");
    add_common(dist);
    dist->add_option("--from", froms, "start point")->required();
    dist->add_option("--to", tos, "end point")->required();
    dist->get_option("--grid")->default_val(0);

    auto* rev = app.add_subcommand("check-reversible",
                                   "closedness, closed-form criterion and trace defect");
    add_common(rev);
    rev->add_option("--t-end", m.t_end, "trace integration time");
    rev->get_option("--steps")->default_val(1024);

    auto* flat = app.add_subcommand("check-flat", "Hamel projective-flatness report");
    add_common(flat);

    auto* wtb = app.add_subcommand("check-weightable",
                                   "quasi-metric axioms and weightability report");
    add_common(wtb);

    auto* tri = app.add_subcommand("triangle", "geodesic triangle orientation report");
    add_common(tri);

    auto* cat = app.add_subcommand("catalog", "list built-in patches");
    cat->add_option("--out", m.out_dir, "directory for the catalog listing");
    cat->add_flag("--json", m.json, "print JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (eval->parsed()) {
            m.command = "eval";
            return run_eval(m, xs, ys);
        }
        if (geo->parsed()) {
            m.command = "geodesic";
            return run_geodesic(m, xs, ys);
        }
        if (dist->parsed()) {
            m.command = "distance";
            return run_distance(m, froms, tos);
        }
        if (rev->parsed()) {
            m.command = "check-reversible";
            return run_check_reversible(m);
        }
        if (flat->parsed()) {
            m.command = "check-flat";
            return run_check_flat(m);
        }
        if (wtb->parsed()) {
            m.command = "check-weightable";
            return run_check_weightable(m);
        }
        if (tri->parsed()) {
            m.command = "triangle";
            return run_triangle(m);
        }
        if (cat->parsed()) {
            m.command = "catalog";
            return run_catalog(m);
        }
    } catch (const std::exception& e) {
        ordered_json err;
        err["error"]["type"] = error_kind(e);
        err["error"]["message"] = e.what();
        std::cout << err.dump(2) << "\n";
        return 2;
    }
    return 2;
}
