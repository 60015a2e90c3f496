// quadtope: command-line front end. Reads the JSON formats documented in
// docs/formats.md, runs the library, and emits deterministic JSON/CSV
// reports. Exit codes: 0 success, 1 structured error (JSON on stderr),
// 2 audit findings (the audit ran fine but found violations).

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "quadtope/agrachev.hpp"
#include "quadtope/fibers.hpp"
#include "quadtope/homology.hpp"
#include "quadtope/poly.hpp"
#include "quadtope/qform.hpp"
#include "quadtope/rng.hpp"
#include "quadtope/signcond.hpp"
#include "quadtope/strata.hpp"

namespace q = quadtope;
using q::Rat;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "quadtope 1.0.0";

int worker_cap() {
    const char* env = std::getenv("QUADTOPE_THREADS");
    if (!env) return 1;
    const int n = std::atoi(env);
    if (n < 1) throw q::Error("bad_threads", "QUADTOPE_THREADS must be a positive integer");
    return n;
}

// Deterministic parallel map: results land in slot order no matter which
// worker produced them.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn fn) {
    const int w = std::min<int>(threads, static_cast<int>(n));
    if (w <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < w; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

json read_json(const std::string& path) {
    try {
        if (path == "-") return json::parse(std::cin);
        std::ifstream in(path);
        if (!in) throw q::Error("io_error", "cannot open file: " + path);
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw q::Error("bad_json", std::string("malformed JSON: ") + e.what(),
                       {{"file", path}, {"byte", e.byte}});
    }
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw q::Error("io_error", "cannot write file: " + path);
    out << text;
}

void emit(const json& j, const std::string& out) { write_text(out, j.dump(2) + "\n"); }

// "[a,b,...]" or "a,b,..." as exact rationals
std::vector<Rat> parse_rats(std::string s) {
    std::erase_if(s, [](char c) { return c == '[' || c == ']' || std::isspace(c); });
    std::vector<Rat> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(q::rat_parse(tok));
    return out;
}

std::set<int> parse_index_set(const std::string& s) {
    std::set<int> out;
    for (const Rat& r : parse_rats(s)) {
        if (r.get_den() != 1 || r < 1)
            throw q::Error("bad_subset", "index sets need positive integers: " + s);
        out.insert(static_cast<int>(r.get_num().get_si()));
    }
    if (out.empty()) throw q::Error("bad_subset", "empty index set");
    return out;
}

std::pair<Rat, Rat> parse_segment(const std::string& s) {
    const auto v = parse_rats(s);
    if (v.size() != 2 || v[0] >= v[1])
        throw q::Error("bad_segment", "segment must be \"[a,b]\" with a < b: " + s);
    return {v[0], v[1]};
}

// a file holding either a plain form {"matrix":...} or a family; families
// are specialized at (--i, --x)
q::QuadForm load_form(const std::string& path, int i, const std::string& x) {
    const json j = read_json(path);
    if (j.contains("forms")) {
        const q::QuadFamily fam = q::QuadFamily::from_json(j);
        if (i < 1 || i > fam.m) throw q::Error("bad_index", "--i out of range 1..m");
        return fam.form_at(i - 1, parse_rats(x));
    }
    return q::quadform_from_json(j);
}

q::Field parse_field(const std::string& s) {
    if (s == "Q") return q::Field::Rationals;
    if (s == "F2") return q::Field::F2;
    throw q::Error("bad_field", "--field must be Q or F2");
}

std::vector<q::SimplicialComplex> load_cover_parts(const std::string& path) {
    const json j = read_json(path);
    std::vector<q::SimplicialComplex> parts;
    for (const auto& p : j.at("parts")) parts.push_back(q::SimplicialComplex::from_json(p));
    if (parts.empty()) throw q::Error("empty_cover", "cover has no parts");
    return parts;
}

json signature_json(const q::Signature& s) {
    return {{"neg", s.neg}, {"zero", s.zero}, {"pos", s.pos}};
}

json betti_json(const q::BettiVector& b) {
    return {{"betti", b.b}, {"field", q::field_name(b.field)}};
}

struct RunConfig {
    std::uint64_t seed = 7;
    std::string eta = "1/16";
    int mesh_depth = 2;
    int budget = 4000;
    std::size_t landmarks = 80;
    std::string field = "Q";
    std::string out;  // empty = stdout

    q::OracleConfig oracle() const {
        q::OracleConfig cfg;
        cfg.budget = budget;
        cfg.landmark_count = landmarks;
        cfg.field = parse_field(field);
        cfg.seed = seed;
        return cfg;
    }

    json to_json() const {
        return {{"version", kVersion},
                {"seed", seed},
                {"eta", eta},
                {"mesh_depth", mesh_depth},
                {"sample_budget", budget},
                {"landmarks", landmarks},
                {"field", field},
                {"threads", worker_cap()},
                {"out", out.empty() ? "-" : out}};
    }
};

void add_run_config_flags(CLI::App* cmd, RunConfig& rc) {
    cmd->add_option("--seed", rc.seed, "master seed for all randomness");
    cmd->add_option("--samples", rc.budget, "sampling-oracle budget");
    cmd->add_option("--landmarks", rc.landmarks, "sampling-oracle landmark count");
    cmd->add_option("--field", rc.field, "homology coefficients: Q or F2");
    cmd->add_option("--out", rc.out, "output file (default stdout)");
}

// census/sweep core shared by the two subcommands; representative and wall
// rows are evaluated in parallel (QUADTOPE_THREADS) and assembled in x order
q::SweepReport sweep_bundle(const q::ExampleBundle& bundle, const std::pair<Rat, Rat>& segment,
                            int resolution, const Rat& eta, const q::OracleConfig& cfg,
                            const q::BoundParams& bp) {
    const int l = bundle.lattice ? static_cast<int>(bundle.candidates.front().size())
                                 : bundle.fam.l;
    const q::EpsDeltaLadder ladder = q::build_ladder(l, eta);
    const std::vector<Rat> walls = q::wall_sweep(bundle, segment, resolution, ladder);

    q::SweepReport rep;
    rep.walls = walls;
    rep.representatives = q::representatives(walls, segment);

    std::vector<std::pair<Rat, bool>> points;
    for (const auto& t : rep.representatives) points.push_back({t, false});
    for (const auto& w : walls) points.push_back({w, true});
    std::sort(points.begin(), points.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    rep.rows.resize(points.size());
    parallel_for(points.size(), worker_cap(), [&](std::size_t i) {
        rep.rows[i].x = points[i].first;
        rep.rows[i].is_wall = points[i].second;
        rep.rows[i].invariant = bundle.invariant_at({points[i].first}, cfg);
    });
    std::set<std::string> classes;
    for (const auto& row : rep.rows) classes.insert(row.invariant.proxy_key());
    rep.distinct_count = static_cast<int>(classes.size());

    rep.bound_comparisons = q::bound_others(bp);
    rep.bound_comparisons["main"] = q::bound_main(bp).get_str();
    rep.bound_comparisons["C"] = bp.C;
    rep.bound_comparisons["within_main_bound"] = mpz_class(rep.distinct_count) <= q::bound_main(bp);
    rep.inputs = {{"segment", {q::rat_str(segment.first), q::rat_str(segment.second)}},
                  {"oracle", cfg.to_json()},
                  {"family", bundle.name.empty() ? "(inline)" : bundle.name},
                  {"resolution", resolution},
                  {"eta", q::rat_str(eta)},
                  {"ladder", ladder.to_json()}};
    return rep;
}

// best-effort size parameters for the bound table when none are given
q::BoundParams derive_bound_params(const q::ExampleBundle& bundle, int C) {
    q::BoundParams bp;
    bp.C = C;
    if (bundle.lattice) {
        bp.m = static_cast<int>(bundle.polys.size());
        bp.l = static_cast<int>(bundle.candidates.front().size());
        bp.k = bundle.k;
        bp.d = 1;
        for (const auto& p : bundle.polys)
            bp.d = std::max(bp.d, static_cast<int>(p.deg_block('y')));
    } else {
        bp.m = bundle.fam.m;
        bp.l = bundle.fam.l;
        bp.k = bundle.fam.k;
        bp.d = std::max(1, bundle.fam.d);
    }
    return bp;
}

q::ExampleBundle load_bundle(const std::string& bundle_path, const std::string& family_path,
                             const std::string& phi_path) {
    if (!bundle_path.empty()) return q::ExampleBundle::from_json(read_json(bundle_path));
    if (family_path.empty())
        throw q::Error("missing_input", "need --bundle or --family (with --phi)");
    q::ExampleBundle b;
    b.fam = q::QuadFamily::from_json(read_json(family_path));
    b.k = b.fam.k;
    b.phi = phi_path.empty() ? q::PClosedFormula::atom(0, q::Rel::Le)
                             : q::PClosedFormula::from_json(read_json(phi_path));
    return b;
}

int run(int argc, char** argv) {
    CLI::App app{"quadratic-family topology toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    int exit_code = 0;

    // --- index -------------------------------------------------------------
    auto* c_index = app.add_subcommand("index", "exact signature of a quadratic form");
    static std::string form_path, x_str = "[]";
    static int form_i = 1;
    c_index->add_option("--form", form_path, "form or family JSON")->required();
    c_index->add_option("--i", form_i, "1-based form index within a family");
    c_index->add_option("--x", x_str, "parameter point, e.g. \"[1,-1/2]\"");
    static RunConfig rc_index;
    c_index->add_option("--out", rc_index.out, "output file (default stdout)");
    c_index->callback([&] {
        const q::QuadForm f = load_form(form_path, form_i, x_str);
        emit({{"run_config", rc_index.to_json()}, {"signature", signature_json(q::signature_of(f))}},
             rc_index.out);
    });

    // --- charpoly ----------------------------------------------------------
    auto* c_char = app.add_subcommand("charpoly", "coefficients of det(M + T*Id)");
    static std::string cp_form, cp_x = "[]", cp_out;
    static int cp_i = 1;
    c_char->add_option("--form", cp_form, "form or family JSON")->required();
    c_char->add_option("--i", cp_i, "1-based form index within a family");
    c_char->add_option("--x", cp_x, "parameter point");
    c_char->add_option("--out", cp_out, "output file (default stdout)");
    c_char->callback([&] {
        const q::QuadForm f = load_form(cp_form, cp_i, cp_x);
        const q::CharPoly cp = q::char_poly(f);
        json coeffs = json::array();
        for (const auto& h : cp.coeffs) coeffs.push_back(q::rat_str(h));
        emit({{"leading", "1"},
              {"coeffs_high_to_low", coeffs},
              {"signature", signature_json(q::index_descartes(cp))}},
             cp_out);
    });

    // --- stratify ------------------------------------------------------------
    auto* c_strat = app.add_subcommand("stratify", "index filtration over an Omega mesh");
    static std::string st_family, st_I = "1", st_x = "[]", st_out;
    static int st_depth = 2;
    c_strat->add_option("--family", st_family, "family JSON")->required();
    c_strat->add_option("--I", st_I, "coefficient subset, e.g. \"1,2\"");
    c_strat->add_option("--depth", st_depth, "barycentric refinement depth");
    c_strat->add_option("--x", st_x, "parameter point");
    c_strat->add_option("--out", st_out, "output file (default stdout)");
    c_strat->callback([&] {
        const q::QuadFamily fam = q::QuadFamily::from_json(read_json(st_family));
        const q::OmegaMesh mesh = q::mesh_omega(parse_index_set(st_I), st_depth);
        const q::IndexFiltration filt = q::index_filtration(fam, parse_rats(st_x), mesh);
        json levels = json::array();
        for (std::size_t j = 0; j < filt.level_sets.size(); ++j)
            levels.push_back({{"j", j},
                              {"vertices", filt.level_sets[j].vertices()},
                              {"euler", filt.level_sets[j].empty() ? 0 : filt.level_sets[j].euler()}});
        json out = filt.to_json();
        out["level_sets"] = levels;
        emit(out, st_out);
    });

    // --- betti ---------------------------------------------------------------
    auto* c_betti = app.add_subcommand("betti", "Betti numbers of a simplicial complex");
    static std::string b_complex, b_field = "Q", b_out;
    c_betti->add_option("--complex", b_complex, "complex JSON")->required();
    c_betti->add_option("--field", b_field, "Q or F2");
    c_betti->add_option("--out", b_out, "output file (default stdout)");
    c_betti->callback([&] {
        const auto k = q::SimplicialComplex::from_json(read_json(b_complex));
        emit(betti_json(q::betti(k, parse_field(b_field))), b_out);
    });

    // --- hocolim ---------------------------------------------------------------
    auto* c_hoco = app.add_subcommand("hocolim", "blow-up complex of a cover");
    static std::string h_cover, h_field = "Q", h_out;
    c_hoco->add_option("--cover", h_cover, "cover JSON: {\"parts\":[complex,...]}")->required();
    c_hoco->add_option("--field", h_field, "Q or F2");
    c_hoco->add_option("--out", h_out, "output file (default stdout)");
    c_hoco->callback([&] {
        q::Cover cover{load_cover_parts(h_cover)};
        const auto blowup = q::hocolim(cover);
        emit({{"hocolim", blowup.to_json()},
              {"nerve", q::nerve(cover).to_json()},
              {"betti", betti_json(q::betti(blowup, parse_field(h_field)))}},
             h_out);
    });

    // --- audit -------------------------------------------------------------
    auto* c_audit = app.add_subcommand("audit", "run a verification audit (exit 2 on findings)");
    c_audit->require_subcommand(1);

    auto* a_mv = c_audit->add_subcommand("mv", "Mayer-Vietoris inequalities on a cover");
    static std::string mv_cover, mv_field = "Q", mv_out;
    static int mv_imax = 3;
    a_mv->add_option("--cover", mv_cover, "cover JSON")->required();
    a_mv->add_option("--imax", mv_imax, "largest homology degree checked");
    a_mv->add_option("--field", mv_field, "Q or F2");
    a_mv->add_option("--out", mv_out, "output file (default stdout)");
    a_mv->callback([&] {
        const auto rep = q::mv_audit(load_cover_parts(mv_cover), mv_imax, parse_field(mv_field));
        emit({{"ok", rep.ok}, {"rows", rep.rows}}, mv_out);
        if (!rep.ok) exit_code = 2;
    });

    auto* a_hoco = c_audit->add_subcommand("hocolim", "blow-up vs union homology");
    static std::string ah_cover, ah_field = "Q", ah_out;
    a_hoco->add_option("--cover", ah_cover, "cover JSON")->required();
    a_hoco->add_option("--field", ah_field, "Q or F2");
    a_hoco->add_option("--out", ah_out, "output file (default stdout)");
    a_hoco->callback([&] {
        const auto rep = q::hocolim_audit({load_cover_parts(ah_cover)}, parse_field(ah_field));
        emit({{"equal", rep.equal},
              {"hocolim_betti", rep.hocolim_betti.b},
              {"union_betti", rep.union_betti.b}},
             ah_out);
        if (!rep.equal) exit_code = 2;
    });

    auto* a_alex = c_audit->add_subcommand("alexander", "set/complement duality for one form");
    static std::string al_form, al_x = "[]";
    static int al_i = 1;
    static RunConfig al_rc;
    a_alex->add_option("--form", al_form, "form or family JSON")->required();
    a_alex->add_option("--i", al_i, "1-based form index within a family");
    a_alex->add_option("--x", al_x, "parameter point");
    add_run_config_flags(a_alex, al_rc);
    a_alex->callback([&] {
        const q::QuadForm f = load_form(al_form, al_i, al_x);
        const int l = f.dim() - 1;
        const q::OracleConfig cfg = al_rc.oracle();
        const auto xs = q::sphere_sample(
            [&](const std::vector<double>& y) { return f.value_at(y) <= 0.0; }, l, cfg.budget,
            cfg.seed, 2);
        const auto cs = q::sphere_sample(
            [&](const std::vector<double>& y) { return f.value_at(y) > 0.0; }, l, cfg.budget,
            cfg.seed, 3);
        const auto rep = q::alexander_audit(xs.points, cs.points, l, cfg);
        emit({{"run_config", al_rc.to_json()},
              {"ok", rep.ok},
              {"x_reduced", rep.x_reduced},
              {"complement_reduced", rep.complement_reduced},
              {"details", rep.details}},
             al_rc.out);
        if (!rep.ok) exit_code = 2;
    });

    auto* a_agr = c_audit->add_subcommand("agrachev", "union/product/bundle-model homology");
    static std::string ag_family, ag_x = "[]", ag_I = "1";
    static int ag_depth = 2;
    static RunConfig ag_rc;
    a_agr->add_option("--family", ag_family, "family JSON")->required();
    a_agr->add_option("--x", ag_x, "parameter point");
    a_agr->add_option("--I", ag_I, "coefficient subset, e.g. \"1,2\"");
    a_agr->add_option("--depth", ag_depth, "base mesh refinement depth");
    add_run_config_flags(a_agr, ag_rc);
    a_agr->callback([&] {
        const q::QuadFamily fam = q::QuadFamily::from_json(read_json(ag_family));
        const auto x = parse_rats(ag_x);
        const auto I = parse_index_set(ag_I);
        const q::OracleConfig cfg = ag_rc.oracle();
        const auto ab = q::audit_A_equals_B(fam, x, I, cfg);
        const auto cp = q::audit_C_prime(fam, x, I, ag_depth, cfg);
        emit({{"run_config", ag_rc.to_json()},
              {"union_vs_product", ab.to_json()},
              {"bundle_model_vs_union", cp.to_json()},
              {"ok", ab.match && cp.match}},
             ag_rc.out);
        if (!(ab.match && cp.match)) exit_code = 2;
    });

    auto* a_dis = c_audit->add_subcommand("disjoint", "thickened-strata disjointness");
    static std::string di_family, di_I = "1";
    static int di_budget = 400;
    static RunConfig di_rc;
    a_dis->add_option("--family", di_family, "family JSON")->required();
    a_dis->add_option("--I", di_I, "coefficient subset");
    a_dis->add_option("--budget", di_budget, "sample count");
    a_dis->add_option("--eta", di_rc.eta, "ladder ratio, e.g. 1/16");
    a_dis->add_option("--seed", di_rc.seed, "master seed");
    a_dis->add_option("--out", di_rc.out, "output file (default stdout)");
    a_dis->callback([&] {
        const q::QuadFamily fam = q::QuadFamily::from_json(read_json(di_family));
        const auto ladder = q::build_ladder(fam.l, q::rat_parse(di_rc.eta));
        const auto rep = q::disjointness_audit(fam, parse_index_set(di_I), ladder,
                                               static_cast<std::size_t>(di_budget), di_rc.seed);
        json out = rep.to_json();
        out["run_config"] = di_rc.to_json();
        out["ladder"] = ladder.to_json();
        emit(out, di_rc.out);
        if (!rep.ok()) exit_code = 2;
    });

    // --- fiber ---------------------------------------------------------------
    auto* c_fiber = app.add_subcommand("fiber", "fiber invariant at one parameter point");
    static std::string fi_bundle, fi_family, fi_phi, fi_x = "[]";
    static RunConfig fi_rc;
    c_fiber->add_option("--bundle", fi_bundle, "bundle JSON (use - for stdin)");
    c_fiber->add_option("--family", fi_family, "family JSON (with --phi)");
    c_fiber->add_option("--phi", fi_phi, "formula JSON");
    c_fiber->add_option("--x", fi_x, "parameter point, e.g. \"[1/2]\"");
    add_run_config_flags(c_fiber, fi_rc);
    c_fiber->callback([&] {
        const auto bundle = load_bundle(fi_bundle, fi_family, fi_phi);
        const auto inv = bundle.invariant_at(parse_rats(fi_x), fi_rc.oracle());
        emit({{"run_config", fi_rc.to_json()}, {"x", fi_x}, {"invariant", inv.to_json()}},
             fi_rc.out);
    });

    // --- sweep / census ------------------------------------------------------
    static std::string sw_bundle, sw_family, sw_phi, sw_segment, sw_csv;
    static int sw_resolution = 64, sw_C = 1;
    static RunConfig sw_rc;
    const auto add_sweep_flags = [&](CLI::App* cmd, bool bundle_default_stdin) {
        cmd->add_option("--bundle", sw_bundle,
                        bundle_default_stdin ? "bundle JSON (default: stdin)" : "bundle JSON");
        cmd->add_option("--family", sw_family, "family JSON (with --phi)");
        cmd->add_option("--phi", sw_phi, "formula JSON");
        cmd->add_option("--segment", sw_segment, "parameter segment, e.g. \"[-2,2]\"");
        cmd->add_option("--resolution", sw_resolution, "wall-scan grid resolution");
        cmd->add_option("--eta", sw_rc.eta, "ladder ratio, e.g. 1/16");
        cmd->add_option("--C", sw_C, "bound constant (reported, default 1)");
        cmd->add_option("--csv", sw_csv, "also write the invariant table as CSV");
        add_run_config_flags(cmd, sw_rc);
    };

    const auto do_sweep = [&](bool bundle_default_stdin) {
        if (sw_bundle.empty() && sw_family.empty() && bundle_default_stdin) sw_bundle = "-";
        const auto bundle = load_bundle(sw_bundle, sw_family, sw_phi);
        const auto segment = sw_segment.empty() ? bundle.segment : parse_segment(sw_segment);
        q::SweepReport rep = sweep_bundle(bundle, segment, sw_resolution,
                                          q::rat_parse(sw_rc.eta), sw_rc.oracle(),
                                          derive_bound_params(bundle, sw_C));
        json out = rep.to_json();
        out["run_config"] = sw_rc.to_json();
        emit(out, sw_rc.out);
        if (!sw_csv.empty()) write_text(sw_csv, rep.to_csv());
    };

    auto* c_sweep = app.add_subcommand("sweep", "wall detection + census over a segment");
    add_sweep_flags(c_sweep, false);
    c_sweep->callback([&] { do_sweep(false); });

    auto* c_census = app.add_subcommand("census", "census of fiber classes (bundle from stdin)");
    add_sweep_flags(c_census, true);
    c_census->callback([&] { do_sweep(true); });

    // --- bounds --------------------------------------------------------------
    auto* c_bounds = app.add_subcommand("bounds", "exact big-integer class-count bounds");
    static int bo_m = 1, bo_l = 1, bo_k = 1, bo_d = 1, bo_C = 1, bo_M = 0, bo_n = 0, bo_s = 0,
               bo_c = 1;
    static std::string bo_out;
    c_bounds->add_option("--m", bo_m, "number of forms");
    c_bounds->add_option("--l", bo_l, "sphere dimension");
    c_bounds->add_option("--k", bo_k, "parameter dimension");
    c_bounds->add_option("--d", bo_d, "coefficient degree");
    c_bounds->add_option("--C", bo_C, "exponent constant (default 1)");
    c_bounds->add_option("--M", bo_M, "metric bound: covering number");
    c_bounds->add_option("--n", bo_n, "projection bound: ambient dimension");
    c_bounds->add_option("--s", bo_s, "projection bound: polynomial count");
    c_bounds->add_option("--c", bo_c, "metric bound exponent constant");
    c_bounds->add_option("--out", bo_out, "output file (default stdout)");
    c_bounds->callback([&] {
        const q::BoundParams bp{bo_m, bo_l, bo_k, bo_d, bo_C};
        json out = q::bound_others(bp, {bo_M, bo_n, bo_s, bo_c});
        out["main"] = q::bound_main(bp).get_str();
        out["params"] = {{"m", bo_m}, {"l", bo_l}, {"k", bo_k}, {"d", bo_d}, {"C", bo_C}};
        emit(out, bo_out);
    });

    // --- examples --------------------------------------------------------------
    auto* c_ex = app.add_subcommand("examples", "built-in example families");
    static std::string ex_name, ex_out;
    static bool ex_list = false;
    c_ex->add_option("--name", ex_name, "family name");
    c_ex->add_flag("--list", ex_list, "list available names");
    c_ex->add_option("--out", ex_out, "output file (default stdout)");
    c_ex->callback([&] {
        if (ex_list || ex_name.empty()) {
            emit(json{{"names", q::example_names()}}, ex_out);
            return;
        }
        emit(q::example_family(ex_name).to_json(), ex_out);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return 0;  // --help / --version
        std::cerr << json{{"error", "bad_usage"}, {"message", e.what()}}.dump(2) << "\n";
        std::cerr << app.help() << std::flush;
        return 1;
    }
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const q::Error& e) {
        std::cerr << e.to_json().dump(2) << std::endl;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump(2) << std::endl;
        return 1;
    }
}
