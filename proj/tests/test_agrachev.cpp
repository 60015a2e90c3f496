#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <vector>

#include "fixtures.hpp"
#include "quadtope/agrachev.hpp"

using namespace quadtope;

namespace {

QuadFamily single_form(const QuadForm& q) { return fixtures::constant_family({q}); }

QuadForm neg_identity(int n) {
    QuadForm q = QuadForm::identity(n);
    for (auto& row : q.m)
        for (auto& c : row) c = -c;
    return q;
}

}  // namespace

TEST_CASE("sample_B") {
    SECTION("negative definite form accepts everything") {
        const auto fam = single_form(neg_identity(3));
        const auto s = sample_B(fam, {}, {1}, 500, 7);
        CHECK(s.acceptance_rate == 1.0);
        CHECK_FALSE(s.possibly_empty);
        CHECK(s.points.size() == 500);
        // omega block is the single coordinate -1, y block is unit
        for (const auto& p : s.points) {
            REQUIRE(p.size() == 4);
            CHECK(p[0] == Catch::Approx(-1.0));
            double n2 = p[1] * p[1] + p[2] * p[2] + p[3] * p[3];
            CHECK(std::abs(n2 - 1.0) < 1e-12);
        }
    }

    SECTION("positive definite form gives the empty signal") {
        const auto fam = single_form(QuadForm::identity(3));
        const auto s = sample_B(fam, {}, {1}, 500, 7);
        CHECK(s.possibly_empty);
        CHECK(s.acceptance_rate == 0.0);
    }

    SECTION("pencil fixture: acceptance strictly between 0 and 1") {
        const auto fam = fixtures::diagonal_pencil();
        const auto s = sample_B(fam, {}, {1, 2}, 1000, 7);
        CHECK(s.acceptance_rate > 0.0);
        CHECK(s.acceptance_rate < 1.0);
    }

    SECTION("determinism and validation") {
        const auto fam = fixtures::diagonal_pencil();
        const auto a = sample_B(fam, {}, {1, 2}, 200, 11);
        const auto b = sample_B(fam, {}, {1, 2}, 200, 11);
        CHECK(a.points == b.points);
        CHECK_THROWS_AS(sample_B(fam, {}, {1, 2}, 0, 7), Error);
        CHECK_THROWS_AS(sample_B(fam, {}, {}, 10, 7), Error);
        CHECK_THROWS_AS(sample_B(fam, {}, {3}, 10, 7), Error);
    }
}

TEST_CASE("audit_A_equals_B") {
    OracleConfig cfg;

    SECTION("index-1 quadric on S^2: two caps on both sides") {
        const auto fam = single_form(QuadForm::diagonal({Rat(1), Rat(1), Rat(-1)}));
        const auto rep = audit_A_equals_B(fam, {}, {1}, cfg);
        CHECK(rep.match);
        CHECK(rep.left.b == std::vector<long>{2, 0, 0});
    }

    SECTION("positive definite form: both sides empty") {
        const auto fam = single_form(QuadForm::identity(3));
        const auto rep = audit_A_equals_B(fam, {}, {1}, cfg);
        CHECK(rep.match);
        CHECK(rep.left_empty);
        CHECK(rep.right_empty);
    }

    SECTION("two-quadric union fixture") {
        const auto fam = fixtures::diagonal_pencil();
        OracleConfig c = cfg;
        c.budget = 8000;
        c.landmark_count = 120;
        const auto rep = audit_A_equals_B(fam, {}, {1, 2}, c);
        INFO(rep.to_json().dump());
        CHECK(rep.match);
        CHECK(rep.left.b == std::vector<long>{1, 1, 0});
    }
}

TEST_CASE("build_bundle_model") {
    SECTION("point base: the total space is one fiber sphere") {
        for (int pos = 0; pos <= 3; ++pos) {
            std::vector<Rat> diag(3, Rat(-1));
            for (int t = 0; t < pos; ++t) diag[static_cast<std::size_t>(t)] = Rat(1);
            const auto fam = single_form(QuadForm::diagonal(diag));
            const auto model = build_bundle_model(fam, {}, {1}, 0);
            // index of -Q = number of positive eigenvalues of Q
            if (pos == 3) {
                CHECK(model.total.empty());
                CHECK(model.fiber_dims == std::vector<int>{-1});
            } else {
                const auto expect = betti(sphere_complex(2 - pos));
                CHECK(betti(model.total).b == expect.b);
            }
        }
    }

    SECTION("closed form over random rational forms up to l = 4") {
        CounterRng rng(41, 1);
        for (int trial = 0; trial < 60; ++trial) {
            const int l = 1 + static_cast<int>(rng.next_below(4));
            const QuadForm q = fixtures::random_symmetric(rng, l + 1);
            const auto fam = single_form(q);
            const auto model = build_bundle_model(fam, {}, {1}, 0);
            const Signature s = signature_of(q);
            if (s.neg + s.zero == 0) {
                CHECK(model.total.empty());
            } else {
                CHECK(betti(model.total).trimmed() ==
                      betti(sphere_complex(s.neg + s.zero - 1)).trimmed());
            }
        }
    }

    SECTION("arc with constant index: product with an interval") {
        const QuadForm q = QuadForm::diagonal({Rat(-1), Rat(-1), Rat(1)});
        QuadForm q3 = q;
        for (auto& row : q3.m)
            for (auto& c : row) c *= Rat(3);
        const auto fam = fixtures::constant_family({q, q3});
        const auto model = build_bundle_model(fam, {}, {1, 2}, 2);
        CHECK(betti(model.total).trimmed() == betti(sphere_complex(1)).trimmed());
    }

    SECTION("pencil arc: strands plus the midpoint circle give S^1") {
        const auto fam = fixtures::diagonal_pencil();
        const auto model = build_bundle_model(fam, {}, {1, 2}, 2);
        CHECK(betti(model.total).trimmed() == std::vector<long>{1, 1});
    }

    SECTION("block bookkeeping") {
        const auto fam = fixtures::diagonal_pencil();
        const auto model = build_bundle_model(fam, {}, {1, 2}, 1);
        // depth-1 arc: 3 vertices (indices 2,1,2), 2 edges
        // vertex blocks: S^0 + S^1 + S^0 = 2 + 4 + 2 top cells
        // edge blocks: fiber S^0 (max index 2), prism = 2 quads = 2 cells each
        CHECK(model.block_cells == 2 + 4 + 2 + 2 + 2);
        CHECK(betti(model.total).trimmed() == std::vector<long>{1, 1});
    }

    SECTION("base dimension > 1 is rejected") {
        const auto fam = fixtures::constant_family(
            {neg_identity(3), neg_identity(3), neg_identity(3)});
        CHECK_THROWS_AS(build_bundle_model(fam, {}, {1, 2, 3}, 1), Error);
    }
}

TEST_CASE("audit_C_prime") {
    OracleConfig cfg;

    SECTION("single form across indices") {
        for (int pos = 0; pos <= 3; ++pos) {
            std::vector<Rat> diag(3, Rat(-1));
            for (int t = 0; t < pos; ++t) diag[static_cast<std::size_t>(t)] = Rat(1);
            const auto fam = single_form(QuadForm::diagonal(diag));
            const auto rep = audit_C_prime(fam, {}, {1}, 0, cfg);
            INFO("pos=" << pos << " " << rep.to_json().dump());
            CHECK(rep.match);
        }
    }

    SECTION("diagonal pencil at depth >= 2") {
        const auto fam = fixtures::diagonal_pencil();
        OracleConfig c = cfg;
        c.budget = 8000;
        c.landmark_count = 120;
        const auto rep = audit_C_prime(fam, {}, {1, 2}, 2, c);
        INFO(rep.to_json().dump());
        CHECK(rep.match);
        CHECK(rep.left.trimmed() == std::vector<long>{1, 1});
    }

    SECTION("refinement stability of the model") {
        const auto fam = fixtures::diagonal_pencil();
        const auto m2 = build_bundle_model(fam, {}, {1, 2}, 2);
        const auto m3 = build_bundle_model(fam, {}, {1, 2}, 3);
        CHECK(betti(m2.total).trimmed() == betti(m3.total).trimmed());
    }
}
