#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mirrorsim/drive.hpp"
#include "mirrorsim/experiments.hpp"
#include "mirrorsim/model.hpp"

namespace mirrorsim {

/// Drive program for the `simulate` command. An empty segment list means a
/// 5 ms DC step to 1.2·V_pi on the channel.
struct DriveSpec {
  Channel channel = Channel::right;
  std::vector<Segment> segments;
};

struct SimulateSettings {
  double duration = 0.0;  // s; 0 = schedule length
  double sample_dt = 1e-6;
};

struct RunConfig {
  DeviceConfig device;
  DriveSpec drive;
  SweepSettings sweep;
  DriftSettings drift;
  HoldSettings hold;
  EnduranceSettings endurance;
  SimulateSettings simulate;
};

/// Canonical device and experiment defaults.
RunConfig default_run_config();

/// Parses JSON text; syntax errors become ConfigError carrying line and column.
nlohmann::json parse_json_text(std::string_view text, const std::string& source);

/// Applies `a.b.c=value` to the document. The value is read as JSON when it
/// parses as such, otherwise as a string. Missing objects on the path are created.
void apply_override(nlohmann::json& document, std::string_view assignment);

/// Overlays `document` on the defaults and validates the device. Unknown keys
/// are configuration errors.
RunConfig run_config_from_json(const nlohmann::json& document);

/// Fully resolved document; feeding it back reproduces the same RunConfig.
nlohmann::json to_json(const RunConfig& config);
nlohmann::json device_to_json(const DeviceConfig& device);
nlohmann::json charge_to_json(const ChargeModelParams& charge);
nlohmann::json drive_to_json(const DriveSpec& drive);
nlohmann::json settings_to_json(const SweepSettings& settings);
nlohmann::json settings_to_json(const DriftSettings& settings);
nlohmann::json settings_to_json(const HoldSettings& settings);
nlohmann::json settings_to_json(const EnduranceSettings& settings);
nlohmann::json settings_to_json(const SimulateSettings& settings);

/// File (optional) + overrides, in that order.
RunConfig load_run_config(const std::optional<std::filesystem::path>& path,
                          const std::vector<std::string>& overrides);

/// Replaces every "derive from V_pi" placeholder (hold amplitude, endurance
/// V_on, default drive, simulate duration) with its concrete value.
RunConfig resolve_defaults(RunConfig config);

Schedule drive_schedule(const DriveSpec& drive);

}  // namespace mirrorsim
