#include "doctest.h"

#include <sstream>

#include "tailinv/serialize.hpp"
#include "test_util.hpp"

using namespace tailinv;
using testutil::vec;

TEST_CASE("measure JSON round trips with the exact field names") {
    const auto m = make_discrete(2, {{{1.0, -2.0}, 0.5}, {{0.25, 3.0}, 1.5}});
    const Json j = to_json(m);
    CHECK(j.contains("dim"));
    CHECK(j.contains("atoms"));
    CHECK(j["atoms"][0].contains("x"));
    CHECK(j["atoms"][0].contains("m"));
    const auto back = discrete_from_json(j);
    REQUIRE(back.atoms().size() == m.atoms().size());
    for (std::size_t i = 0; i < m.atoms().size(); ++i) {
        CHECK(back.atoms()[i].point == m.atoms()[i].point);
        CHECK(back.atoms()[i].mass == m.atoms()[i].mass);
    }

    const HomogeneousTailMeasure mu(2, 1.5, {{vec({0.6, 0.8}), 2.0}, {vec({-1.0, 0.0}), 0.5}});
    const Json jm = to_json(mu);
    CHECK(jm.contains("alpha"));
    CHECK(jm["spectral"][0].contains("dir"));
    CHECK(jm["spectral"][0].contains("w"));
    const auto mu_back = tail_measure_from_json(jm);
    REQUIRE(mu_back.spectral().size() == mu.spectral().size());
    for (std::size_t i = 0; i < mu.spectral().size(); ++i) {
        CHECK(mu_back.spectral()[i].direction == mu.spectral()[i].direction);
        CHECK(mu_back.spectral()[i].weight == mu.spectral()[i].weight);
    }
}

TEST_CASE("weight family JSON round trips for all kinds") {
    const auto scal = WeightFamily::scalars(1, {1.0, -0.5, 0.25});
    const auto scal_back = weight_family_from_json(to_json(scal));
    CHECK(scal_back.kind() == WeightKind::Scalars);
    CHECK(scal_back.scalar_entries() == scal.scalar_entries());

    const auto diag = WeightFamily::diagonals({vec({1.0, 2.0}), vec({-0.5, 0.5})});
    const auto diag_back = weight_family_from_json(to_json(diag));
    CHECK(diag_back.kind() == WeightKind::DiagonalVectors);
    CHECK(diag_back.diagonal_entries()[1] == diag.diagonal_entries()[1]);

    const auto mats = WeightFamily::matrices({testutil::rotation2(0.4), 0.5 * Mat::Identity(2, 2)});
    const auto mats_back = weight_family_from_json(to_json(mats));
    CHECK(mats_back.kind() == WeightKind::Matrices);
    CHECK(mats_back.matrix_entries()[0].isApprox(mats.matrix_entries()[0]));

    CHECK(to_json(diag)["kind"] == "diag");
    CHECK_THROWS_AS(weight_family_from_json(Json{{"kind", "nope"}, {"entries", Json::array()}}),
                    ValidationError);
}

TEST_CASE("eval set JSON round trips") {
    const auto sets = {EvalSet::norm_exceed(2, 1.5), EvalSet::rect(vec({0.5, -1.0}), vec({2.0, 1.0})),
                       EvalSet::half_line({+1, -1}, vec({1.0, 0.5}))};
    for (const EvalSet& s : sets) {
        const auto back = eval_set_from_json(to_json(s));
        CHECK(back.dim() == s.dim());
        // compare by behaviour on a few points
        for (double x : {0.6, 1.2, 3.0})
            for (double y : {-2.0, 0.7})
                CHECK(back.contains(vec({x, y})) == s.contains(vec({x, y})));
    }
}

TEST_CASE("verdict JSON carries the report fields") {
    DeterminingVerdict v;
    v.status = VerdictStatus::Refuted;
    v.condition_id = "eq3.3";
    v.witness_theta = vec({4.5323});
    v.witness_abs_value = 1e-12;
    v.theta_max = 50.0;
    v.min_abs_value = 1e-12;
    v.conditions_checked = {"eq3.3", "eq3.4"};
    const Json j = to_json(v);
    CHECK(j["status"] == "Refuted");
    CHECK(j["condition"] == "eq3.3");
    CHECK(j["witness_theta"][0] == doctest::Approx(4.5323));
    CHECK(j["theta_max"] == 50.0);
    CHECK(j.contains("min_abs_value"));
}

TEST_CASE("batch binary round trip") {
    SampleBatch batch;
    batch.dim = 2;
    batch.n = 3;
    batch.seed = 77;
    batch.provenance = "test";
    batch.values = {1.0, -2.0, 0.5, 3.25, -0.125, 9.0};
    std::stringstream ss;
    write_batch(ss, batch);
    const auto back = read_batch(ss);
    CHECK(back.dim == batch.dim);
    CHECK(back.n == batch.n);
    CHECK(back.seed == batch.seed);
    CHECK(back.provenance == batch.provenance);
    CHECK(back.values == batch.values);

    std::stringstream truncated(ss.str().substr(0, 20));
    CHECK_THROWS(read_batch(truncated));
}
