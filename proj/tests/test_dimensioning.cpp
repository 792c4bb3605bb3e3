#include <doctest.h>

#include "qmemdim/dimensioning.hpp"
#include "qmemdim/errors.hpp"
#include "qmemdim/state_space.hpp"

using namespace qmemdim;

TEST_SUITE("dimensioning") {

TEST_CASE("minimum memory with verified boundary") {
    const auto found = min_memory(0.9, 1, 2, 0, 1e-3, 1, 32);
    REQUIRE(found.has_value());
    CHECK(*found == 13);

    // Explicit boundary re-check through the analysis pipeline.
    const DistillationLadder ladder(werner_state(0.9), 2);
    const StateSpace below(MemoryConfig{12, 2});
    const StateSpace at(MemoryConfig{13, 2});
    CHECK(bootstrap_outage(below, ladder, 1, 0).outage_probability > 1e-3);
    CHECK(bootstrap_outage(at, ladder, 1, 0).outage_probability <= 1e-3);

    const auto high_fidelity = min_memory(0.99, 1, 2, 0, 1e-3, 1, 32);
    REQUIRE(high_fidelity.has_value());
    CHECK(*high_fidelity == 10);
}

TEST_CASE("minimum memory can be absent or at the range edge") {
    CHECK_FALSE(min_memory(0.9, 1, 2, 0, 1e-3, 1, 5).has_value());
    // Range that starts at the answer: nothing below it to verify.
    const auto edge = min_memory(0.9, 1, 2, 0, 1e-3, 13, 20);
    REQUIRE(edge.has_value());
    CHECK(*edge == 13);
}

TEST_CASE("degenerate no-distillation case") {
    // With d = 0 the memory holds raw pairs only and outage is 0 iff M >= c.
    const auto found = min_memory(0.9, 3, 0, 0, 1e-3, 3, 3);
    REQUIRE(found.has_value());
    CHECK(*found == 3);

    const DistillationLadder ladder(werner_state(0.9), 0);
    const StateSpace space(MemoryConfig{3, 0});
    CHECK(bootstrap_outage(space, ladder, 3, 0).outage_probability == 0.0);
    CHECK(bootstrap_outage(space, ladder, 4, 0).outage_probability == 1.0);
}

TEST_CASE("argument validation") {
    CHECK_THROWS_AS(min_memory(0.9, 0, 2, 0, 1e-3, 1, 10), ValidationError);
    CHECK_THROWS_AS(min_memory(0.9, 1, 2, 0, 0.0, 1, 10), ValidationError);
    CHECK_THROWS_AS(min_memory(0.9, 1, 2, 0, 1e-3, 10, 5), ValidationError);
    CHECK_THROWS_AS(min_memory(1.5, 1, 2, 0, 1e-3, 1, 10), ValidationError);
}

TEST_CASE("sweep covers the grid in spec order") {
    SweepSpec spec;
    spec.f0_values = {0.9};
    spec.wait_values = {0};
    spec.consumption = 1;
    spec.max_steps = 2;
    spec.m_min = 10;
    spec.m_max = 14;
    spec.target_outage = 1e-3;

    const SweepResult result = sweep(spec);
    REQUIRE(result.rows.size() == 5);
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        CHECK(result.rows[i].memory_size == 10 + static_cast<int>(i));
        CHECK(result.rows[i].converged);
        CHECK(result.rows[i].outage >= 0.0);
        CHECK(result.rows[i].outage <= 1.0);
    }
    // Outage decreases over this window.
    for (std::size_t i = 1; i < result.rows.size(); ++i) {
        CHECK(result.rows[i].outage < result.rows[i - 1].outage);
    }
    REQUIRE(result.min_memory.size() == 1);
    REQUIRE(result.min_memory[0].memory_size.has_value());
    CHECK(*result.min_memory[0].memory_size == 13);
    CHECK(result.warnings.empty());

    // Rows match the single-configuration pipeline.
    const DistillationLadder ladder(werner_state(0.9), 2);
    const StateSpace space(MemoryConfig{12, 2});
    const double direct = bootstrap_outage(space, ladder, 1, 0).outage_probability;
    CHECK(result.rows[2].outage == direct);
}

TEST_CASE("sweep is deterministic across thread counts") {
    SweepSpec spec;
    spec.f0_values = {0.85, 0.95};
    spec.wait_values = {0, 1};
    spec.consumption = 1;
    spec.max_steps = 1;
    spec.m_min = 2;
    spec.m_max = 6;
    spec.target_outage = 1e-2;

    const SweepResult serial = sweep(spec, 1);
    const SweepResult threaded = sweep(spec, 4);
    REQUIRE(serial.rows.size() == threaded.rows.size());
    for (std::size_t i = 0; i < serial.rows.size(); ++i) {
        CHECK(serial.rows[i].f0 == threaded.rows[i].f0);
        CHECK(serial.rows[i].wait == threaded.rows[i].wait);
        CHECK(serial.rows[i].memory_size == threaded.rows[i].memory_size);
        CHECK(serial.rows[i].outage == threaded.rows[i].outage); // bit-identical
    }
}

TEST_CASE("solver failures mark rows instead of aborting") {
    SweepSpec spec;
    spec.f0_values = {0.9};
    spec.wait_values = {0};
    spec.consumption = 1;
    spec.max_steps = 2;
    spec.m_min = 10;
    spec.m_max = 12;
    spec.target_outage = 1e-3;
    spec.analysis.solver.max_iterations = 2;

    const SweepResult result = sweep(spec);
    REQUIRE(result.rows.size() == 3);
    for (const SweepRow& row : result.rows) {
        CHECK_FALSE(row.converged);
    }
    CHECK_FALSE(result.min_memory[0].memory_size.has_value());
}

TEST_CASE("spec validation") {
    SweepSpec spec;
    spec.f0_values = {};
    spec.wait_values = {0};
    CHECK_THROWS_AS(sweep(spec), ValidationError);
    spec.f0_values = {0.9};
    spec.m_min = 5;
    spec.m_max = 4;
    CHECK_THROWS_AS(sweep(spec), ValidationError);
    spec.m_max = 6;
    spec.target_outage = 1.5;
    CHECK_THROWS_AS(sweep(spec), ValidationError);
}

} // TEST_SUITE
