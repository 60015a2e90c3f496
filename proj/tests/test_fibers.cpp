#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>
#include <vector>

#include "fixtures.hpp"
#include "quadtope/fibers.hpp"

using namespace quadtope;

namespace {

MultiPoly var(const std::string& n) { return MultiPoly::variable(n, 1); }

// k = 1 family with constant forms (x1 appears with degree 0)
QuadFamily constant_k1_family(const QuadForm& q) {
    QuadFamily fam;
    fam.m = 1;
    fam.l = q.dim() - 1;
    fam.k = 1;
    fam.d = 1;
    std::vector<std::vector<MultiPoly>> mat;
    for (const auto& row : q.m) {
        std::vector<MultiPoly> r;
        for (const auto& e : row) r.push_back(MultiPoly::constant(e));
        mat.push_back(r);
    }
    fam.forms.push_back(mat);
    fam.validate();
    return fam;
}

}  // namespace

TEST_CASE("eval_formula") {
    const MultiPoly q = MultiPoly::sub(MultiPoly::mul(var("y1"), var("y1")),
                                       MultiPoly::constant(Rat(1)));  // y1^2 - 1
    const std::vector<MultiPoly> polys = {q, var("y1"), var("x1")};

    SECTION("closed atom holds at a zero") {
        CHECK(eval_formula(PClosedFormula::atom(0, Rel::Le), polys,
                           {{"y1", Rat(1)}, {"x1", Rat(0)}}));
        CHECK(eval_formula(PClosedFormula::atom(0, Rel::Ge), polys,
                           {{"y1", Rat(1)}, {"x1", Rat(0)}}));
    }

    SECTION("contradictory conjunction away from the zero set") {
        const auto phi = PClosedFormula::conj(
            {PClosedFormula::atom(1, Rel::Le), PClosedFormula::atom(1, Rel::Ge)});
        CHECK_FALSE(eval_formula(phi, polys, {{"y1", Rat(1)}, {"x1", Rat(0)}}));
        CHECK(eval_formula(phi, polys, {{"y1", Rat(0)}, {"x1", Rat(0)}}));
    }

    SECTION("tree evaluation matches a truth-table oracle") {
        // phi = atom0<=0 OR (atom1>=0 AND atom2<=0)
        const auto phi = PClosedFormula::disj(
            {PClosedFormula::atom(0, Rel::Le),
             PClosedFormula::conj({PClosedFormula::atom(1, Rel::Ge),
                                   PClosedFormula::atom(2, Rel::Le)})});
        CounterRng rng(47, 1);
        for (int trial = 0; trial < 100; ++trial) {
            std::map<std::string, Rat> pt = {
                {"y1", rat(static_cast<long>(rng.next_below(9)) - 4, 2)},
                {"x1", rat(static_cast<long>(rng.next_below(9)) - 4, 2)}};
            const bool direct = (q.eval(pt) <= 0) ||
                                (pt["y1"] >= 0 && pt["x1"] <= 0);
            CHECK(eval_formula(phi, polys, pt) == direct);
        }
    }

    SECTION("atom index out of range") {
        CHECK_THROWS_AS(eval_formula(PClosedFormula::atom(3, Rel::Le), polys,
                                     {{"y1", Rat(0)}, {"x1", Rat(0)}}),
                        Error);
    }

    SECTION("json round trip") {
        const auto phi = PClosedFormula::disj(
            {PClosedFormula::atom(0, Rel::Eq),
             PClosedFormula::conj({PClosedFormula::atom(1, Rel::Ge),
                                   PClosedFormula::atom(2, Rel::Le)})});
        const auto back = PClosedFormula::from_json(phi.to_json());
        CHECK(back.to_json() == phi.to_json());
        CHECK_THROWS_AS(PClosedFormula::from_json(nlohmann::json{{"op", "not"}}), Error);
    }
}

TEST_CASE("compactify_homogenize") {
    SECTION("rule application on y1^2 - 1") {
        const MultiPoly p = MultiPoly::sub(MultiPoly::mul(var("y1"), var("y1")),
                                           MultiPoly::constant(Rat(1)));
        const auto sys =
            compactify_homogenize({p}, PClosedFormula::atom(0, Rel::Le), 1, 0, rat(1, 2));
        REQUIRE(sys.polys.size() == 2);

        const MultiPoly y0 = var("y0"), y1 = var("y1");
        const MultiPoly expect0 = MultiPoly::sub(MultiPoly::mul(y1, y1), MultiPoly::mul(y0, y0));
        const MultiPoly expect1 = MultiPoly::sub(
            MultiPoly::scale(MultiPoly::mul(y1, y1), rat(1, 4)), MultiPoly::mul(y0, y0));
        CHECK(sys.polys[0] == expect0);
        CHECK(sys.polys[1] == expect1);
        CHECK(sys.phi.kind == PClosedFormula::Kind::And);
        CHECK(sys.phi.args[1].atom_index == 1);
    }

    SECTION("pointwise membership identity on in-ball points") {
        // mixed system in (y1, y2, x1)
        const MultiPoly p1 = MultiPoly::sub(
            MultiPoly::add(MultiPoly::mul(var("y1"), var("y2")), var("x1")),
            MultiPoly::constant(Rat(1)));
        const MultiPoly p2 = MultiPoly::add(var("y1"), MultiPoly::scale(var("y2"), Rat(-3)));
        const auto phi = PClosedFormula::disj(
            {PClosedFormula::atom(0, Rel::Ge), PClosedFormula::atom(1, Rel::Le)});
        const Rat eps = rat(1, 4);
        const auto sys = compactify_homogenize({p1, p2}, phi, 2, 1, eps);

        CounterRng rng(53, 1);
        int in_ball = 0;
        for (int trial = 0; trial < 400 && in_ball < 100; ++trial) {
            const Rat y1v = rat(static_cast<long>(rng.next_below(17)) - 8, 4);
            const Rat y2v = rat(static_cast<long>(rng.next_below(17)) - 8, 4);
            const Rat x1v = rat(static_cast<long>(rng.next_below(17)) - 8, 4);
            if (eps * eps * (y1v * y1v + y2v * y2v + x1v * x1v) > 1) continue;
            ++in_ball;
            const std::map<std::string, Rat> pt = {{"y1", y1v}, {"y2", y2v}, {"x1", x1v}};
            std::map<std::string, Rat> lifted = pt;
            lifted["y0"] = Rat(1);
            CHECK(eval_formula(phi, {p1, p2}, pt) ==
                  eval_formula(sys.phi, sys.polys, lifted));
        }
        CHECK(in_ball >= 100);
    }

    SECTION("compactified fiber doubles the bounded component count") {
        // original set {y1^2 <= 1} is one segment; on S^1 the homogenized
        // system cuts two antipodal arcs
        const MultiPoly p = MultiPoly::sub(MultiPoly::mul(var("y1"), var("y1")),
                                           MultiPoly::constant(Rat(1)));
        const auto sys =
            compactify_homogenize({p}, PClosedFormula::atom(0, Rel::Le), 1, 0, rat(1, 2));
        QuadFamily fam;
        fam.m = 2;
        fam.l = 1;
        fam.k = 0;
        fam.d = 0;
        for (const auto& poly : sys.polys) {
            const QuadForm q = form_from_poly(poly, 1);
            std::vector<std::vector<MultiPoly>> mat;
            for (const auto& row : q.m) {
                std::vector<MultiPoly> r;
                for (const auto& e : row) r.push_back(MultiPoly::constant(e));
                mat.push_back(r);
            }
            fam.forms.push_back(mat);
        }
        fam.validate();
        OracleConfig cfg;
        const auto inv = fiber_invariant(fam, sys.phi, {}, cfg);
        CHECK_FALSE(inv.empty);
        CHECK(inv.betti.trimmed() == std::vector<long>{2});
    }

    SECTION("validation") {
        const MultiPoly cubic = MultiPoly::mul(MultiPoly::mul(var("y1"), var("y1")), var("y1"));
        CHECK_THROWS_AS(
            compactify_homogenize({cubic}, PClosedFormula::atom(0, Rel::Le), 1, 0, Rat(1)),
            Error);
        CHECK_THROWS_AS(
            compactify_homogenize({var("y1")}, PClosedFormula::atom(0, Rel::Le), 1, 0, Rat(0)),
            Error);
        CHECK_THROWS_AS(
            compactify_homogenize({var("y1")}, PClosedFormula::atom(1, Rel::Le), 1, 0, Rat(1)),
            Error);
    }
}

TEST_CASE("fiber_invariant") {
    OracleConfig cfg;

    SECTION("single atom closed forms") {
        const auto fam_pos = fixtures::constant_family({QuadForm::identity(3)});
        const auto empty_inv =
            fiber_invariant(fam_pos, PClosedFormula::atom(0, Rel::Le), {}, cfg);
        CHECK(empty_inv.empty);
        CHECK(empty_inv.exact);

        const auto fam1 =
            fixtures::constant_family({QuadForm::diagonal({Rat(1), Rat(1), Rat(-1)})});
        const auto inv = fiber_invariant(fam1, PClosedFormula::atom(0, Rel::Le), {}, cfg);
        CHECK(inv.betti.trimmed() == std::vector<long>{2});
        CHECK(inv.exact);
        // histogram is over the combined form at omega = -e_1, i.e. -Q
        CHECK(inv.index_histogram == std::map<int, int>{{2, 1}});

        // mirror relation: {Q >= 0} of the same form is a band around the
        // equator
        const auto inv_ge = fiber_invariant(fam1, PClosedFormula::atom(0, Rel::Ge), {}, cfg);
        CHECK(inv_ge.betti.trimmed() == std::vector<long>{1, 1});
    }

    SECTION("single-pencil parameter dependence") {
        const auto fam = fixtures::single_pencil();
        const auto phi = PClosedFormula::atom(0, Rel::Le);
        CHECK(fiber_invariant(fam, phi, {Rat(-1)}, cfg).empty);
        CHECK(fiber_invariant(fam, phi, {Rat(0)}, cfg).betti.trimmed() ==
              std::vector<long>{2});
        CHECK(fiber_invariant(fam, phi, {Rat(1)}, cfg).betti.trimmed() ==
              std::vector<long>{2});
    }

    SECTION("closed form agrees with the sampling oracle on random forms") {
        // pinned sampling distribution: nondegenerate forms with eigenvalue
        // spread bounded by 0.3, oracle budget 16000 with 160 landmarks --
        // thinner regions than that defeat a fixed-radius rips oracle
        OracleConfig big = cfg;
        big.budget = 16000;
        big.landmark_count = 160;
        CounterRng rng(59, 1);
        int done = 0;
        for (int trial = 0; trial < 600 && done < 50; ++trial) {
            const int l = 1 + static_cast<int>(rng.next_below(3));
            const QuadForm q = fixtures::random_symmetric(rng, l + 1, 5);
            const Signature s = signature_of(q);
            if (s.zero > 0) continue;
            const auto d = eigen_decomp(q);
            double mn = 1e300, mx = 0.0;
            for (double v : d.values) {
                mn = std::min(mn, std::abs(v));
                mx = std::max(mx, std::abs(v));
            }
            if (mn / mx < 0.3) continue;
            ++done;
            const auto fam = fixtures::constant_family({q});
            const auto exact = fiber_invariant(fam, PClosedFormula::atom(0, Rel::Le), {}, big);
            // force the sampled path with an equivalent OR of the same atom
            const auto phi_or = PClosedFormula::disj(
                {PClosedFormula::atom(0, Rel::Le), PClosedFormula::atom(0, Rel::Le)});
            const auto sampled = fiber_invariant(fam, phi_or, {}, big);
            INFO("trial " << trial << " l=" << l << " exact "
                          << exact.to_json().dump() << " sampled "
                          << sampled.to_json().dump());
            if (exact.empty) {
                CHECK(sampled.empty);
            } else {
                CHECK(exact.betti.trimmed() == sampled.betti.trimmed());
            }
        }
        CHECK(done == 50);
    }

    SECTION("union of two quadrics via OR") {
        const auto fam = fixtures::diagonal_pencil();
        const auto phi = PClosedFormula::disj(
            {PClosedFormula::atom(0, Rel::Le), PClosedFormula::atom(1, Rel::Le)});
        const auto inv = fiber_invariant(fam, phi, {}, cfg);
        CHECK(inv.betti.trimmed() == std::vector<long>{1, 1});
        CHECK_FALSE(inv.empty);
    }
}

TEST_CASE("example_family") {
    SECTION("name validation") {
        for (const auto& n : example_names()) CHECK(example_family(n).name == n);
        CHECK_THROWS_AS(example_family("nope"), Error);
    }

    SECTION("binary-components enumeration") {
        const auto b = example_family("binary-components");
        REQUIRE(b.lattice);
        CHECK(b.lattice_count({rat(-1, 4)}) == 0);
        CHECK(b.lattice_count({Rat(0)}) == 4);
        CHECK(b.lattice_count({rat(1, 2)}) == 3);
        CHECK(b.lattice_count({rat(3, 2)}) == 2);
        CHECK(b.lattice_count({rat(5, 2)}) == 1);
        CHECK(b.lattice_count({rat(13, 4)}) == 0);
    }

    SECTION("grid-lines counts step down at integers") {
        const auto b = example_family("grid-lines");
        REQUIRE(b.lattice);
        const std::vector<long> expect = {4, 3, 2, 1};
        for (int x = 0; x < 4; ++x) CHECK(b.lattice_count({Rat(x)}) == expect[static_cast<std::size_t>(x)]);
    }

    SECTION("wall-pencil fibers differ across the wall") {
        const auto b = example_family("wall-pencil");
        OracleConfig cfg;
        const auto at_pp = fiber_invariant(b.fam, b.phi, {Rat(1), Rat(1)}, cfg);
        const auto at_mp = fiber_invariant(b.fam, b.phi, {Rat(-1), Rat(1)}, cfg);
        CHECK(at_pp.betti.trimmed() == std::vector<long>{2});
        CHECK(at_mp.betti.trimmed() == std::vector<long>{1, 1});
        CHECK(at_pp.proxy_key() != at_mp.proxy_key());
    }

    SECTION("bundle json round trip") {
        for (const auto& n : example_names()) {
            const auto b = example_family(n);
            const auto back = ExampleBundle::from_json(b.to_json());
            CHECK(back.to_json() == b.to_json());
        }
    }
}

TEST_CASE("simplest_rational") {
    CHECK(detail::simplest_rational(rat(3, 10), rat(3, 5)) == rat(1, 2));
    CHECK(detail::simplest_rational(rat(21, 10), rat(29, 10)) == rat(5, 2));
    CHECK(detail::simplest_rational(rat(-1, 10), rat(1, 10)) == Rat(0));
    CHECK(detail::simplest_rational(rat(-29, 10), rat(-21, 10)) == rat(-5, 2));
    CHECK(detail::simplest_rational(Rat(2), Rat(2)) == Rat(2));
    CHECK(detail::simplest_rational(rat(199, 100), rat(201, 100)) == Rat(2));
    CHECK_THROWS_AS(detail::simplest_rational(Rat(1), Rat(0)), Error);
}

TEST_CASE("wall_sweep") {
    const auto ladder2 = build_ladder(2, rat(1, 16));

    SECTION("constant family has no walls") {
        const auto fam = constant_k1_family(QuadForm::diagonal({Rat(1), Rat(-1), Rat(2)}));
        CHECK(wall_sweep(fam, {Rat(-2), Rat(2)}, 16, ladder2).empty());
    }

    SECTION("single-pencil wall at zero, exactly") {
        const auto fam = fixtures::single_pencil();
        const auto walls = wall_sweep(fam, {Rat(-2), Rat(2)}, 64, ladder2);
        REQUIRE(walls.size() == 1);
        CHECK(walls[0] == Rat(0));
    }

    SECTION("binary-components walls at the integers") {
        const auto b = example_family("binary-components");
        const auto walls = wall_sweep(b, {rat(-1, 2), rat(7, 2)}, 64, ladder2);
        CHECK(walls == std::vector<Rat>{Rat(0), Rat(1), Rat(2), Rat(3)});
    }

    SECTION("walls stable under resolution refinement") {
        const auto b = example_family("binary-components");
        const auto w1 = wall_sweep(b, {rat(-1, 2), rat(7, 2)}, 64, ladder2);
        const auto w2 = wall_sweep(b, {rat(-1, 2), rat(7, 2)}, 128, ladder2);
        CHECK(w1 == w2);
    }
}

TEST_CASE("representatives") {
    CHECK(representatives({}, {Rat(-2), Rat(2)}) == std::vector<Rat>{Rat(0)});
    CHECK(representatives({Rat(0)}, {Rat(-2), Rat(2)}) ==
          std::vector<Rat>{Rat(-1), Rat(1)});
    CHECK(representatives({Rat(0), Rat(1), Rat(2), Rat(3)}, {rat(-1, 2), rat(7, 2)}).size() ==
          5);
    CHECK_THROWS_AS(representatives({Rat(3)}, {Rat(-2), Rat(2)}), Error);
    CHECK_THROWS_AS(representatives({Rat(1), Rat(0)}, {Rat(-2), Rat(2)}), Error);
}

TEST_CASE("bounds") {
    SECTION("main bound") {
        CHECK(bound_main({1, 1, 1, 1, 1}) == 2);
        CHECK(bound_main({2, 3, 1, 1, 1}) == 144);
        // monotone in each argument
        const BoundParams base{2, 3, 2, 2, 1};
        const mpz_class v = bound_main(base);
        CHECK(bound_main({3, 3, 2, 2, 1}) > v);
        CHECK(bound_main({2, 4, 2, 2, 1}) > v);
        CHECK(bound_main({2, 3, 3, 2, 1}) > v);
        CHECK(bound_main({2, 3, 2, 3, 1}) > v);
        CHECK(bound_main({2, 3, 2, 2, 2}) > v);
        CHECK_THROWS_AS(bound_main({0, 1, 1, 1, 1}), Error);
    }

    SECTION("companion bounds") {
        const auto j = bound_others({2, 3, 1, 1, 1});
        CHECK(j["barvinok"] == "36");

        CHECK(bound_others({3, 1, 1, 1, 1})["general"] == "6");

        AuxBoundParams aux;
        aux.M = 2;
        aux.c = 1;
        CHECK(bound_others({1, 2, 1, 1, 1}, aux)["metric"] == "4");

        aux = {};
        aux.n = 2;
        aux.s = 3;
        CHECK(bound_others({1, 1, 1, 1, 1}, aux)["projection"] == "216");

        aux = {};
        aux.n = 2;  // s missing
        CHECK_THROWS_AS(bound_others({1, 1, 1, 1, 1}, aux), Error);
    }
}

TEST_CASE("census and run_sweep") {
    OracleConfig cfg;

    SECTION("binary-components census finds five classes") {
        const auto b = example_family("binary-components");
        const auto rep = run_sweep(b, b.segment, 64, rat(1, 16), cfg, {2, 2, 1, 2, 1});
        CHECK(rep.walls == std::vector<Rat>{Rat(0), Rat(1), Rat(2), Rat(3)});
        CHECK(rep.representatives.size() == 5);
        CHECK(rep.distinct_count == 5);
        // the wall x = 0 realizes the b0 = 4 class; collect all observed b0
        std::set<long> b0s;
        for (const auto& row : rep.rows)
            b0s.insert(row.invariant.empty ? 0 : row.invariant.betti.at(0));
        CHECK(b0s == std::set<long>{0, 1, 2, 3, 4});
        CHECK(rep.bound_comparisons["within_main_bound"] == true);
    }

    SECTION("single-pencil census finds two classes") {
        const auto b = example_family("single-pencil");
        const auto rep = run_sweep(b, b.segment, 64, rat(1, 16), cfg, {1, 2, 1, 1, 1});
        CHECK(rep.walls == std::vector<Rat>{Rat(0)});
        CHECK(rep.distinct_count == 2);
    }

    SECTION("constant family census has one class") {
        ExampleBundle b;
        b.fam = constant_k1_family(QuadForm::diagonal({Rat(1), Rat(1), Rat(-1)}));
        b.phi = PClosedFormula::atom(0, Rel::Le);
        b.k = 1;
        const auto rep = run_sweep(b, {Rat(-2), Rat(2)}, 16, rat(1, 16), cfg, {1, 2, 1, 1, 1});
        CHECK(rep.walls.empty());
        CHECK(rep.distinct_count == 1);
    }

    SECTION("census stability under doubled budgets and resolution") {
        const auto b = example_family("binary-components");
        OracleConfig big = cfg;
        big.budget *= 2;
        const auto r1 = run_sweep(b, b.segment, 64, rat(1, 16), cfg, {2, 2, 1, 2, 1});
        const auto r2 = run_sweep(b, b.segment, 128, rat(1, 16), big, {2, 2, 1, 2, 1});
        CHECK(r1.distinct_count == r2.distinct_count);

        const auto s = example_family("single-pencil");
        const auto s1 = run_sweep(s, s.segment, 64, rat(1, 16), cfg, {1, 2, 1, 1, 1});
        const auto s2 = run_sweep(s, s.segment, 128, rat(1, 16), big, {1, 2, 1, 1, 1});
        CHECK(s1.distinct_count == s2.distinct_count);
    }

    SECTION("reports are byte-identical across runs") {
        const auto b = example_family("single-pencil");
        const auto r1 = run_sweep(b, b.segment, 32, rat(1, 16), cfg, {1, 2, 1, 1, 1});
        const auto r2 = run_sweep(b, b.segment, 32, rat(1, 16), cfg, {1, 2, 1, 1, 1});
        CHECK(r1.to_json().dump() == r2.to_json().dump());
        CHECK(r1.to_csv() == r2.to_csv());
        CHECK(r1.to_csv().rfind("x,is_wall", 0) == 0);
    }
}
