#include "mirrorsim/config_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <variant>

#include <fmt/format.h>

#include "mirrorsim/constants.hpp"
#include "mirrorsim/errors.hpp"
#include "mirrorsim/quasistatics.hpp"

namespace mirrorsim {

using nlohmann::json;

namespace {

using Slot = std::variant<double*, int*, long*, bool*>;
using SlotMap = std::map<std::string, Slot>;

void assign(double& out, const json& value, const std::string& path) {
  if (value.is_number()) {
    out = value.get<double>();
    return;
  }
  if (value.is_string()) {
    const auto s = value.get<std::string>();
    if (s == "inf" || s == "infinity" || s == "Infinity") {
      out = std::numeric_limits<double>::infinity();
      return;
    }
  }
  throw ConfigError(path, "expected a number");
}

template <typename Int>
void assign_integer(Int& out, const json& value, const std::string& path) {
  if (value.is_number_integer()) {
    out = value.get<Int>();
    return;
  }
  if (value.is_number_float()) {
    const double d = value.get<double>();
    if (std::floor(d) == d && std::abs(d) < 9e15) {
      out = static_cast<Int>(d);
      return;
    }
  }
  throw ConfigError(path, "expected an integer");
}

void assign(int& out, const json& value, const std::string& path) { assign_integer(out, value, path); }
void assign(long& out, const json& value, const std::string& path) { assign_integer(out, value, path); }

void assign(bool& out, const json& value, const std::string& path) {
  if (!value.is_boolean()) throw ConfigError(path, "expected true or false");
  out = value.get<bool>();
}

void read_section(const json& object, const std::string& path, const SlotMap& slots) {
  if (!object.is_object()) throw ConfigError(path, "expected an object");
  for (const auto& [key, value] : object.items()) {
    const auto it = slots.find(key);
    if (it == slots.end()) throw ConfigError(path + "." + key, "unknown key");
    std::visit([&](auto* target) { assign(*target, value, path + "." + key); }, it->second);
  }
}

json number(double v) {
  if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
  return json(v);
}

// Degree value whose conversion reproduces `radians` exactly, so a written
// config reloads bit for bit.
double exact_degrees(double radians) {
  double d = rad_to_deg(radians);
  for (double probe : {d, std::nextafter(d, 0.0), std::nextafter(d, 360.0)}) {
    if (deg_to_rad(probe) == radians) return probe;
  }
  return d;
}

void require(bool ok, const std::string& path, const char* what) {
  if (!ok) throw ConfigError(path, what);
}

void check_settings(const RunConfig& c) {
  require(c.sweep.frequency > 0.0, "experiment.sweep.frequency_hz", "must be > 0");
  require(c.sweep.v_max > 0.0, "experiment.sweep.v_max_V", "must be > 0");
  require(c.sweep.periods >= 1, "experiment.sweep.periods", "must be >= 1");
  require(c.sweep.sample_dt > 0.0, "experiment.sweep.sample_dt_s", "must be > 0");

  require(c.drift.cycles >= 1, "experiment.drift.cycles", "must be >= 1");
  require(c.drift.hold_per_cycle > 0.0, "experiment.drift.hold_per_cycle_s", "must be > 0");
  require(c.drift.ground_per_cycle >= 0.0, "experiment.drift.ground_per_cycle_s", "must be >= 0");
  require(c.drift.probe_every >= 1, "experiment.drift.probe_every", "must be >= 1");
  require(c.drift.v_on >= 0.0, "experiment.drift.v_on_V", "must be >= 0");
  require(c.drift.substeps >= 1, "experiment.drift.substeps", "must be >= 1");
  require(c.drift.nominal_duration > 0.0, "experiment.drift.nominal_duration_s", "must be > 0");

  require(c.hold.amplitude >= 0.0, "experiment.hold.amplitude_V", "must be >= 0");
  require(c.hold.amplitude_factor > 0.0, "experiment.hold.amplitude_factor", "must be > 0");
  require(c.hold.frequency > 0.0, "experiment.hold.frequency_hz", "must be > 0");
  require(c.hold.interrupts >= 0, "experiment.hold.interrupts", "must be >= 0");
  require(c.hold.interrupt_every > 0.0, "experiment.hold.interrupt_every_s", "must be > 0");
  require(c.hold.interrupt_len > 0.0 && c.hold.interrupt_len < c.hold.interrupt_every,
          "experiment.hold.interrupt_len_s", "must lie in (0, interrupt_every_s)");
  require(c.hold.sample_dt > 0.0, "experiment.hold.sample_dt_s", "must be > 0");

  require(c.endurance.period > 0.0, "experiment.endurance.period_s", "must be > 0");
  require(c.endurance.v_on >= 0.0, "experiment.endurance.v_on_V", "must be >= 0");
  require(c.endurance.v_on_factor > 0.0, "experiment.endurance.v_on_factor", "must be > 0");
  require(c.endurance.cycles >= 1, "experiment.endurance.cycles", "must be >= 1");
  require(c.endurance.sample_dt > 0.0, "experiment.endurance.sample_dt_s", "must be > 0");

  require(c.simulate.duration >= 0.0, "experiment.simulate.duration_s", "must be >= 0");
  require(c.simulate.sample_dt > 0.0, "experiment.simulate.sample_dt_s", "must be > 0");
}

Segment segment_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  if (!j.contains("type") || !j.at("type").is_string()) throw ConfigError(path + ".type", "missing waveform type");
  const auto type = j.at("type").get<std::string>();

  Segment seg;
  SlotMap slots{{"duration_s", &seg.duration}};
  if (type == "ground") {
    seg.waveform = Ground{};
  } else if (type == "dc") {
    seg.waveform = DcLevel{};
    slots.emplace("volts_V", &std::get<DcLevel>(seg.waveform).volts);
  } else if (type == "triangle") {
    seg.waveform = Triangle{};
    auto& w = std::get<Triangle>(seg.waveform);
    slots.emplace("frequency_hz", &w.frequency);
    slots.emplace("v_min_V", &w.v_min);
    slots.emplace("v_max_V", &w.v_max);
  } else if (type == "square") {
    seg.waveform = Square{};
    auto& w = std::get<Square>(seg.waveform);
    slots.emplace("frequency_hz", &w.frequency);
    slots.emplace("v_high_V", &w.v_high);
    slots.emplace("v_low_V", &w.v_low);
    slots.emplace("duty", &w.duty);
  } else if (type == "bipolar") {
    seg.waveform = BipolarSquare{};
    auto& w = std::get<BipolarSquare>(seg.waveform);
    slots.emplace("frequency_hz", &w.frequency);
    slots.emplace("amplitude_V", &w.amplitude);
  } else {
    throw ConfigError(path + ".type", fmt::format("unknown waveform type '{}'", type));
  }

  json rest = j;
  rest.erase("type");
  read_section(rest, path, slots);
  if (!j.contains("duration_s")) throw ConfigError(path + ".duration_s", "missing");
  return seg;
}

json segment_to_json(const Segment& seg) {
  json j{{"duration_s", seg.duration}};
  std::visit(
      [&](const auto& w) {
        using W = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<W, Ground>) {
          j["type"] = "ground";
        } else if constexpr (std::is_same_v<W, DcLevel>) {
          j["type"] = "dc";
          j["volts_V"] = w.volts;
        } else if constexpr (std::is_same_v<W, Triangle>) {
          j["type"] = "triangle";
          j["frequency_hz"] = w.frequency;
          j["v_min_V"] = w.v_min;
          j["v_max_V"] = w.v_max;
        } else if constexpr (std::is_same_v<W, Square>) {
          j["type"] = "square";
          j["frequency_hz"] = w.frequency;
          j["v_high_V"] = w.v_high;
          j["v_low_V"] = w.v_low;
          j["duty"] = w.duty;
        } else {
          j["type"] = "bipolar";
          j["frequency_hz"] = w.frequency;
          j["amplitude_V"] = w.amplitude;
        }
      },
      seg.waveform);
  return j;
}

}  // namespace

RunConfig default_run_config() {
  RunConfig config;
  config.device = default_mirror();
  return config;
}

json parse_json_text(std::string_view text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character.
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string detail = e.what();
    if (const auto pos = detail.find("syntax error"); pos != std::string::npos) detail = detail.substr(pos);
    throw ConfigError(source, fmt::format("malformed JSON at line {}, column {}: {}", line, column, detail));
  }
}

void apply_override(json& document, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("override", fmt::format("expected key=value, got '{}'", assignment));
  }
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));

  std::vector<std::string> parts;
  std::stringstream ss(key);
  for (std::string part; std::getline(ss, part, '.');) {
    if (part.empty()) throw ConfigError("override", fmt::format("empty path component in '{}'", key));
    parts.push_back(part);
  }
  if (key.back() == '.') throw ConfigError("override", fmt::format("empty path component in '{}'", key));

  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  if (!document.is_object()) document = json::object();
  json* node = &document;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    json& child = (*node)[parts[i]];
    if (child.is_null()) child = json::object();
    if (!child.is_object()) throw ConfigError(key, fmt::format("'{}' is not a section", parts[i]));
    node = &child;
  }
  (*node)[parts.back()] = value;
}

RunConfig run_config_from_json(const json& document) {
  if (!document.is_object()) throw ConfigError("config", "top level must be an object");
  RunConfig config;
  DeviceConfig device = default_mirror_inputs();

  for (const auto& [key, value] : document.items()) {
    if (key != "device" && key != "charge" && key != "drive" && key != "experiment") {
      throw ConfigError(key, "unknown section");
    }
  }

  if (document.contains("device")) {
    auto& g = device.geometry;
    double alpha_deg = exact_degrees(g.theta_max);
    read_section(document.at("device"), "device",
                 {{"half_length_a_m", &g.half_length_a},
                  {"width_w_m", &g.width_w},
                  {"thickness_t_m", &g.thickness_t},
                  {"density_rho_kg_m3", &device.density_rho},
                  {"alpha_max_deg", &alpha_deg},
                  {"electrode_r1_m", &g.electrode_inner_r1},
                  {"electrode_r2_m", &g.electrode_outer_r2},
                  {"oxide_thickness_m", &device.oxide.thickness},
                  {"oxide_eps_r", &device.oxide.eps_r},
                  {"resonance_f0_hz", &device.mechanics.resonance_f0},
                  {"damping_ratio", &device.mechanics.damping_ratio_zeta}});
    if (!(alpha_deg > 0.0 && alpha_deg < 90.0)) throw ConfigError("device.alpha_max_deg", "must lie in (0, 90)");
    g.theta_max = deg_to_rad(alpha_deg);
  }

  if (document.contains("charge")) {
    auto& c = device.charge;
    read_section(document.at("charge"), "charge",
                 {{"k_inj", &c.k_inj},
                  {"e_th_v_per_m", &c.e_threshold},
                  {"exponent_p", &c.exponent_p},
                  {"tau_decay_s", &c.tau_decay},
                  {"landing_electrode_grounded", &c.landing_electrode_grounded}});
  }
  config.device = validate(device);

  if (document.contains("drive")) {
    const json& d = document.at("drive");
    if (!d.is_object()) throw ConfigError("drive", "expected an object");
    for (const auto& [key, value] : d.items()) {
      if (key != "channel" && key != "segments") throw ConfigError("drive." + key, "unknown key");
    }
    if (d.contains("channel")) {
      const json& ch = d.at("channel");
      if (ch == "left") {
        config.drive.channel = Channel::left;
      } else if (ch == "right") {
        config.drive.channel = Channel::right;
      } else {
        throw ConfigError("drive.channel", "must be \"left\" or \"right\"");
      }
    }
    if (d.contains("segments")) {
      const json& segs = d.at("segments");
      if (!segs.is_array()) throw ConfigError("drive.segments", "expected an array");
      for (std::size_t i = 0; i < segs.size(); ++i) {
        config.drive.segments.push_back(segment_from_json(segs[i], fmt::format("drive.segments[{}]", i)));
      }
      drive_schedule(config.drive);  // validates
    }
  }

  if (document.contains("experiment")) {
    const json& e = document.at("experiment");
    if (!e.is_object()) throw ConfigError("experiment", "expected an object");
    for (const auto& [key, value] : e.items()) {
      const std::string path = "experiment." + key;
      if (key == "sweep") {
        auto& s = config.sweep;
        read_section(value, path,
                     {{"frequency_hz", &s.frequency},
                      {"v_max_V", &s.v_max},
                      {"periods", &s.periods},
                      {"freeze_charge", &s.freeze_charge},
                      {"sample_dt_s", &s.sample_dt}});
      } else if (key == "drift") {
        auto& s = config.drift;
        read_section(value, path,
                     {{"cycles", &s.cycles},
                      {"hold_per_cycle_s", &s.hold_per_cycle},
                      {"ground_per_cycle_s", &s.ground_per_cycle},
                      {"probe_every", &s.probe_every},
                      {"v_on_V", &s.v_on},
                      {"substeps", &s.substeps},
                      {"nominal_duration_s", &s.nominal_duration}});
      } else if (key == "hold") {
        auto& s = config.hold;
        read_section(value, path,
                     {{"amplitude_V", &s.amplitude},
                      {"amplitude_factor", &s.amplitude_factor},
                      {"frequency_hz", &s.frequency},
                      {"interrupts", &s.interrupts},
                      {"interrupt_every_s", &s.interrupt_every},
                      {"interrupt_len_s", &s.interrupt_len},
                      {"sample_dt_s", &s.sample_dt},
                      {"dc_control", &s.dc_control}});
      } else if (key == "endurance") {
        auto& s = config.endurance;
        read_section(value, path,
                     {{"period_s", &s.period},
                      {"v_on_V", &s.v_on},
                      {"v_on_factor", &s.v_on_factor},
                      {"cycles", &s.cycles},
                      {"sample_dt_s", &s.sample_dt}});
      } else if (key == "simulate") {
        auto& s = config.simulate;
        read_section(value, path, {{"duration_s", &s.duration}, {"sample_dt_s", &s.sample_dt}});
      } else {
        throw ConfigError(path, "unknown experiment");
      }
    }
  }
  check_settings(config);
  return config;
}

json device_to_json(const DeviceConfig& device) {
  const auto& g = device.geometry;
  return json{{"half_length_a_m", g.half_length_a},
              {"width_w_m", g.width_w},
              {"thickness_t_m", g.thickness_t},
              {"density_rho_kg_m3", device.density_rho},
              {"alpha_max_deg", exact_degrees(g.theta_max)},
              {"electrode_r1_m", g.electrode_inner_r1},
              {"electrode_r2_m", g.electrode_outer_r2},
              {"oxide_thickness_m", device.oxide.thickness},
              {"oxide_eps_r", device.oxide.eps_r},
              {"resonance_f0_hz", device.mechanics.resonance_f0},
              {"damping_ratio", device.mechanics.damping_ratio_zeta}};
}

json charge_to_json(const ChargeModelParams& c) {
  return json{{"k_inj", c.k_inj},
              {"e_th_v_per_m", c.e_threshold},
              {"exponent_p", c.exponent_p},
              {"tau_decay_s", number(c.tau_decay)},
              {"landing_electrode_grounded", c.landing_electrode_grounded}};
}

json drive_to_json(const DriveSpec& drive) {
  json segs = json::array();
  for (const auto& s : drive.segments) segs.push_back(segment_to_json(s));
  return json{{"channel", drive.channel == Channel::left ? "left" : "right"}, {"segments", segs}};
}

json settings_to_json(const SweepSettings& s) {
  return json{{"frequency_hz", s.frequency},
              {"v_max_V", s.v_max},
              {"periods", s.periods},
              {"freeze_charge", s.freeze_charge},
              {"sample_dt_s", s.sample_dt}};
}

json settings_to_json(const DriftSettings& s) {
  return json{{"cycles", s.cycles},
              {"hold_per_cycle_s", s.hold_per_cycle},
              {"ground_per_cycle_s", s.ground_per_cycle},
              {"probe_every", s.probe_every},
              {"v_on_V", s.v_on},
              {"substeps", s.substeps},
              {"nominal_duration_s", s.nominal_duration}};
}

json settings_to_json(const HoldSettings& s) {
  return json{{"amplitude_V", s.amplitude},
              {"amplitude_factor", s.amplitude_factor},
              {"frequency_hz", s.frequency},
              {"interrupts", s.interrupts},
              {"interrupt_every_s", s.interrupt_every},
              {"interrupt_len_s", s.interrupt_len},
              {"sample_dt_s", s.sample_dt},
              {"dc_control", s.dc_control}};
}

json settings_to_json(const EnduranceSettings& s) {
  return json{{"period_s", s.period},
              {"v_on_V", s.v_on},
              {"v_on_factor", s.v_on_factor},
              {"cycles", s.cycles},
              {"sample_dt_s", s.sample_dt}};
}

json settings_to_json(const SimulateSettings& s) {
  return json{{"duration_s", s.duration}, {"sample_dt_s", s.sample_dt}};
}

json to_json(const RunConfig& c) {
  json experiment{{"sweep", settings_to_json(c.sweep)},
                  {"drift", settings_to_json(c.drift)},
                  {"hold", settings_to_json(c.hold)},
                  {"endurance", settings_to_json(c.endurance)},
                  {"simulate", settings_to_json(c.simulate)}};
  return json{{"device", device_to_json(c.device)},
              {"charge", charge_to_json(c.device.charge)},
              {"drive", drive_to_json(c.drive)},
              {"experiment", experiment}};
}

RunConfig load_run_config(const std::optional<std::filesystem::path>& path,
                          const std::vector<std::string>& overrides) {
  json document = json::object();
  if (path) {
    std::ifstream in(*path, std::ios::binary);
    if (!in) throw ConfigError(path->string(), "cannot open config file");
    std::ostringstream text;
    text << in.rdbuf();
    document = parse_json_text(text.str(), path->string());
  }
  for (const auto& o : overrides) apply_override(document, o);
  return run_config_from_json(document);
}

Schedule drive_schedule(const DriveSpec& drive) {
  if (drive.segments.empty()) throw ScheduleError("drive.segments", "no segments");
  return Schedule::single_channel(drive.channel, drive.segments);
}

RunConfig resolve_defaults(RunConfig config) {
  const bool need_v_pi = config.hold.amplitude == 0.0 || config.endurance.v_on == 0.0 || config.drive.segments.empty();
  const double v_pi = need_v_pi ? find_pull_in(config.device, 0.0).voltage : 0.0;
  if (config.hold.amplitude == 0.0) config.hold.amplitude = config.hold.amplitude_factor * v_pi;
  if (config.endurance.v_on == 0.0) config.endurance.v_on = config.endurance.v_on_factor * v_pi;
  if (config.drive.segments.empty()) config.drive.segments.push_back({5e-3, DcLevel{1.2 * v_pi}});
  if (config.simulate.duration == 0.0) config.simulate.duration = drive_schedule(config.drive).total_duration();
  return config;
}

}  // namespace mirrorsim
