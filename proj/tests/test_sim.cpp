#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "inverterlab/errors.hpp"
#include "inverterlab/sim.hpp"
#include "oracles.hpp"

using namespace inverterlab;
using namespace inverterlab::sim;
using Catch::Approx;

namespace {

// Max |x1 error| over one LC period of the unforced loop.
double lc_period_error(double h) {
    const plant::PlantParams p{3e-3, 30e-6, 400.0};
    const auto load = plant::LoadModel::constant(plant::kNoLoadResistance);
    const double period = 2.0 * std::numbers::pi * std::sqrt(p.inductance * p.capacitance);
    const auto steps = static_cast<int>(std::ceil(period / h));
    plant::PlantState s{100.0, 0.0, 0.0};
    double worst = 0.0;
    for (int k = 1; k <= steps; ++k) {
        s = rk4_step(s, 0.0, h, p, load);
        const auto exact = oracle::damped_lc(p.inductance, p.capacitance, plant::kNoLoadResistance, 100.0, 0.0, k * h);
        worst = std::max(worst, std::abs(s.x1 - exact.x1));
    }
    return worst;
}

}  // namespace

TEST_CASE("rk4 keeps an equilibrium", "[sim]") {
    const plant::PlantParams p;
    const auto next = rk4_step({0.0, 0.0, 0.0}, 0.0, 1e-6, p, plant::LoadModel::constant(50.0));
    CHECK(next.x1 == 0.0);
    CHECK(next.x2 == 0.0);
    CHECK(next.t == 1e-6);
}

TEST_CASE("rk4 follows the analytic LC oscillation at fourth order", "[sim][oracle]") {
    const double e1 = lc_period_error(20e-6);
    const double e2 = lc_period_error(10e-6);
    const double e3 = lc_period_error(5e-6);
    CHECK(e3 < 1e-4);
    CHECK(e1 / e2 == Approx(16.0).margin(2.0));
    CHECK(e2 / e3 == Approx(16.0).margin(2.0));
}

TEST_CASE("rk4 energy drift on the lossless loop is small", "[sim]") {
    const plant::PlantParams p;
    const auto load = plant::LoadModel::constant(1e12);
    plant::PlantState s{100.0, 0.0, 0.0};
    const double e0 = plant::stored_energy(s, p);
    for (int k = 0; k < 2000; ++k) s = rk4_step(s, 0.0, 1e-6, p, load);
    CHECK(std::abs(plant::stored_energy(s, p) - e0) < 1e-9 * e0);
}

TEST_CASE("zero reference from rest stays at rest", "[sim]") {
    SimConfig cfg;
    cfg.reference = reference::ReferenceSpec(0.0, 50.0);
    for (auto kind : {ControllerKind::backstepping, ControllerKind::sliding, ControllerKind::fuzzy}) {
        cfg.controller = kind;
        const auto r = run_scenario(cfg);
        for (const auto& rec : r.trace) {
            CHECK(rec.x1 == 0.0);
            CHECK(rec.u == 0.0);
        }
        CHECK_FALSE(r.summary.thd.has_value());
    }
}

TEST_CASE("nominal sliding run settles to 230 V RMS", "[sim]") {
    SimConfig cfg;
    const auto r = run_scenario(cfg);
    CHECK(r.trace.size() == 1000);
    CHECK(r.summary.output_rms == Approx(230.0).epsilon(0.02));

    cfg.controller = ControllerKind::backstepping;
    const auto b = run_scenario(cfg);
    CHECK(b.summary.output_rms == Approx(r.summary.output_rms).epsilon(1e-3));
}

TEST_CASE("trace grid is exact", "[sim]") {
    SimConfig cfg;
    cfg.duration = 0.04;
    const auto r = run_scenario(cfg);
    for (std::size_t n = 0; n < r.trace.size(); ++n) CHECK(r.trace[n].t == static_cast<double>(n) * 1e-4);
}

TEST_CASE("load step keeps x1 continuous and steps i_S", "[sim]") {
    SimConfig cfg;
    cfg.controller = ControllerKind::backstepping;
    cfg.load = plant::LoadModel({{0.0, 50.0}, {0.0605, 25.0}});  // mid-swing, where x1 != 0
    const auto r = run_scenario(cfg);
    const auto& before = r.trace[604];
    const auto& at = r.trace[605];
    CHECK(at.t == Approx(0.0605));
    CHECK(std::abs(at.x1 - before.x1) < 0.05 * 325.27);
    CHECK(at.i_s == Approx(at.x1 / 25.0));
    CHECK(before.i_s == Approx(before.x1 / 50.0));
}

TEST_CASE("channels follow the controller and model", "[sim]") {
    SimConfig cfg;
    cfg.duration = 0.04;
    cfg.controller = ControllerKind::sliding;
    auto r = run_scenario(cfg);
    CHECK(r.trace[5].s.has_value());
    CHECK_FALSE(r.trace[5].v2.has_value());
    CHECK_FALSE(r.trace[5].mu.has_value());

    cfg.controller = ControllerKind::backstepping;
    cfg.model = ModelKind::switched;
    r = run_scenario(cfg);
    CHECK(r.trace[5].v2.has_value());
    CHECK(r.trace[5].mu.has_value());
}

TEST_CASE("backstepping V2 falls during the start-up transient", "[sim]") {
    SimConfig cfg;
    cfg.controller = ControllerKind::backstepping;
    const auto r = run_scenario(cfg);
    const double v0 = *r.trace.front().v2;
    double worst_late = 0.0;
    for (std::size_t n = 200; n < r.trace.size(); ++n) worst_late = std::max(worst_late, *r.trace[n].v2);
    CHECK(worst_late < v0 / 50.0);
}

TEST_CASE("filtered load-current differentiator still regulates", "[sim]") {
    SimConfig cfg;
    cfg.load_rate = LoadRateMode::filtered;
    const auto r = run_scenario(cfg);
    CHECK(r.summary.tracking.rms_error_pct < 2.0);
}

TEST_CASE("config validation names the key", "[sim]") {
    auto key_of = [](const SimConfig& cfg) {
        try {
            cfg.validate();
        } catch (const ConfigError& e) {
            return e.key();
        }
        return std::string("ok");
    };
    SimConfig cfg;
    CHECK(key_of(cfg) == "ok");

    cfg.plant.dc_bus = 100.0;
    CHECK(key_of(cfg) == "plant.dc_bus_E");
    cfg = {};
    cfg.control_period = 1.5e-6 * 67;
    CHECK(key_of(cfg) == "sim.control_period_s");
    cfg = {};
    cfg.duration = 0.03;
    CHECK(key_of(cfg) == "sim.duration_s");
    cfg = {};
    cfg.model = ModelKind::switched;
    cfg.step = 2e-6;
    CHECK(key_of(cfg) == "sim.step_s");
    cfg = {};
    cfg.control_period = 3e-4;  // 66.7 samples per cycle
    cfg.step = 1e-5;
    CHECK(key_of(cfg) == "sim.control_period_s");
}

TEST_CASE("non-finite initial state is rejected", "[sim]") {
    SimConfig cfg;
    cfg.initial.x1 = std::nan("");
    CHECK_THROWS_AS(run_scenario(cfg), ConfigError);
}

TEST_CASE("trace csv layout", "[sim]") {
    std::vector<TraceRecord> trace(2);
    trace[0] = {0.0, 1.5, 0.0, -2.0, 0.03, 0.25, std::nullopt, 3.0, std::nullopt, false};
    trace[1] = {1e-4, 2.0, 0.5, -1.0, 0.04, 1.0, 1, std::nullopt, 0.125, true};
    CHECK(trace_csv(trace) ==
          "t,x1,x1_ref,x2,i_s,u,mu,s,V2,sat\n"
          "0,1.5,0,-2,0.03,0.25,,3,,0\n"
          "0.0001,2,0.5,-1,0.04,1,1,,0.125,1\n");
}
