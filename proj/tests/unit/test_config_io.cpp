#include <doctest.h>

#include <cmath>
#include <functional>
#include <string>

#include "mirrorsim/config_io.hpp"
#include "mirrorsim/constants.hpp"
#include "mirrorsim/errors.hpp"

using namespace mirrorsim;
using nlohmann::json;

namespace {
std::string field_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<no error>";
}
}  // namespace

TEST_CASE("empty document gives the canonical defaults") {
  const auto c = run_config_from_json(json::object());
  const auto d = default_mirror();
  CHECK(c.device.mechanics.stiffness_k == d.mechanics.stiffness_k);
  CHECK(c.device.geometry.theta_max == d.geometry.theta_max);
  CHECK(c.device.charge.k_inj == ChargeModelParams::kDefaultInjection);
  CHECK(c.sweep.frequency == 4.0);
  CHECK(c.endurance.cycles == 10000);
}

TEST_CASE("device keys") {
  const auto doc = json::parse(R"({"device": {"half_length_a_m": 2.5e-4, "alpha_max_deg": 1.2,
      "electrode_r2_m": 2e-4, "resonance_f0_hz": 5000, "damping_ratio": 0.3, "oxide_eps_r": 4.5}})");
  const auto c = run_config_from_json(doc);
  CHECK(c.device.geometry.half_length_a == 2.5e-4);
  CHECK(c.device.geometry.theta_max == deg_to_rad(1.2));
  CHECK(c.device.mechanics.resonance_f0 == 5000.0);
  CHECK(c.device.oxide.eps_r == 4.5);
  CHECK(c.device.geometry.width_w == 600e-6);

  CHECK(field_of([] { run_config_from_json(json::parse(R"({"device": {"gap_m": 1}})")); }) == "device.gap_m");
  CHECK(field_of([] { run_config_from_json(json::parse(R"({"device": {"width_w_m": "wide"}})")); }) ==
        "device.width_w_m");
  CHECK(field_of([] { run_config_from_json(json::parse(R"({"devices": {}})")); }) == "devices");
  CHECK(field_of([] { run_config_from_json(json::parse(R"({"device": {"electrode_r1_m": 3e-4}})")); }).find(
            "electrode") != std::string::npos);
}

TEST_CASE("charge section with infinite decay") {
  const auto c = run_config_from_json(
      json::parse(R"({"charge": {"k_inj": 0, "tau_decay_s": "inf", "landing_electrode_grounded": true}})"));
  CHECK(c.device.charge.k_inj == 0.0);
  CHECK(std::isinf(c.device.charge.tau_decay));
  CHECK(c.device.charge.landing_electrode_grounded);
  const auto c2 = run_config_from_json(json::parse(R"({"charge": {"tau_decay_s": 12.5}})"));
  CHECK(c2.device.charge.tau_decay == 12.5);
  CHECK(field_of([] { run_config_from_json(json::parse(R"({"charge": {"tau_decay_s": -1}})")); }) ==
        "charge.tau_decay_s");
}

TEST_CASE("drive section") {
  const auto c = run_config_from_json(json::parse(R"({"drive": {"channel": "left", "segments": [
      {"duration_s": 0.01, "type": "dc", "volts_V": 40},
      {"duration_s": 0.01, "type": "bipolar", "frequency_hz": 70000, "amplitude_V": 60},
      {"duration_s": 0.01, "type": "ground"},
      {"duration_s": 0.25, "type": "triangle", "frequency_hz": 4, "v_min_V": 0, "v_max_V": 100},
      {"duration_s": 0.01, "type": "square", "frequency_hz": 1000, "v_high_V": 5, "v_low_V": 0, "duty": 0.5}]}})"));
  CHECK(c.drive.channel == Channel::left);
  REQUIRE(c.drive.segments.size() == 5);
  const auto s = drive_schedule(c.drive);
  CHECK(s.voltage(Channel::left, 0.005) == 40.0);
  CHECK(s.voltage(Channel::right, 0.005) == 0.0);

  CHECK(field_of([] {
          run_config_from_json(json::parse(R"({"drive": {"segments": [{"duration_s": 1, "type": "sine"}]}})"));
        }) == "drive.segments[0].type");
  CHECK(field_of([] {
          run_config_from_json(json::parse(R"({"drive": {"segments": [{"duration_s": 1, "type": "dc", "v": 1}]}})"));
        }) == "drive.segments[0].v");
  CHECK_THROWS_AS(
      run_config_from_json(json::parse(R"({"drive": {"segments": [{"duration_s": -1, "type": "ground"}]}})")),
      ConfigError);
}

TEST_CASE("malformed JSON reports line and column") {
  try {
    parse_json_text("{\n  \"device\": {\n    \"width_w_m\": 6e-4,,\n  }\n}", "cfg.json");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    CHECK(what.find("line 3") != std::string::npos);
    CHECK(what.find("column 23") != std::string::npos);
  }
}

TEST_CASE("dot-path overrides") {
  json doc = json::object();
  apply_override(doc, "charge.k_inj=0");
  apply_override(doc, "experiment.sweep.periods=5");
  apply_override(doc, "drive.channel=left");
  apply_override(doc, "experiment.sweep.freeze_charge=false");
  CHECK(doc["charge"]["k_inj"] == 0);
  CHECK(doc["drive"]["channel"] == "left");
  const auto c = run_config_from_json(doc);
  CHECK(c.sweep.periods == 5);
  CHECK_FALSE(c.sweep.freeze_charge);
  CHECK_THROWS_AS(apply_override(doc, "no_equals_sign"), ConfigError);
  CHECK_THROWS_AS(apply_override(doc, "charge..k=1"), ConfigError);
  CHECK_THROWS_AS(apply_override(doc, "charge.k_inj.x=1"), ConfigError);
}

TEST_CASE("experiment settings are validated") {
  CHECK(field_of([] { run_config_from_json(json::parse(R"({"experiment": {"sweep": {"periods": 0}}})")); }) ==
        "experiment.sweep.periods");
  CHECK(field_of([] {
          run_config_from_json(json::parse(R"({"experiment": {"hold": {"interrupt_len_s": 1.0}}})"));
        }) == "experiment.hold.interrupt_len_s");
  CHECK(field_of([] { run_config_from_json(json::parse(R"({"experiment": {"warp": {}}})")); }) ==
        "experiment.warp");
  CHECK(field_of([] { run_config_from_json(json::parse(R"({"experiment": {"drift": {"cycles": 2.5}}})")); }) ==
        "experiment.drift.cycles");
}

TEST_CASE("resolved config round-trips exactly") {
  json doc = json::object();
  apply_override(doc, "device.alpha_max_deg=1.3");
  apply_override(doc, "charge.tau_decay_s=\"inf\"");
  const auto c = resolve_defaults(run_config_from_json(doc));
  CHECK(c.hold.amplitude > 0.0);
  CHECK(c.endurance.v_on > 0.0);
  CHECK(c.simulate.duration == 5e-3);
  const json once = to_json(c);
  const auto again = resolve_defaults(run_config_from_json(json::parse(once.dump())));
  CHECK(to_json(again).dump() == once.dump());
  CHECK(again.device.geometry.theta_max == c.device.geometry.theta_max);
  CHECK(again.device.mechanics.stiffness_k == c.device.mechanics.stiffness_k);
}
