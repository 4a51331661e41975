#pragma once

#include <optional>
#include <variant>
#include <vector>

namespace mirrorsim {

struct Ground {};

struct DcLevel {
  double volts = 0.0;
};

/// Rises linearly v_min → v_max over the first half-period, falls back over the second.
struct Triangle {
  double frequency = 0.0;
  double v_min = 0.0;
  double v_max = 0.0;
};

/// v_high for the first `duty` fraction of each period, v_low for the rest.
struct Square {
  double frequency = 0.0;
  double v_high = 0.0;
  double v_low = 0.0;
  double duty = 0.5;
};

/// +amplitude on the first half-period, −amplitude on the second.
struct BipolarSquare {
  double frequency = 0.0;
  double amplitude = 0.0;
};

using Waveform = std::variant<Ground, DcLevel, Triangle, Square, BipolarSquare>;

/// Throws ScheduleError if a waveform invariant is violated.
void check_waveform(const Waveform& waveform);

/// Voltage at time `t` measured from the segment start.
double sample(const Waveform& waveform, double t);

/// Analytic RMS over one period (|level| for Ground/DcLevel).
double rms(const Waveform& waveform);

/// Repetition frequency, if periodic.
std::optional<double> frequency(const Waveform& waveform);

enum class Channel { left, right };

struct Segment {
  double duration = 0.0;
  Waveform waveform;
};

/// Per-electrode voltage programs. Both channels cover [0, total_duration]
/// without gaps; beyond the end both read 0 V.
class Schedule {
 public:
  Schedule(std::vector<Segment> left, std::vector<Segment> right);

  /// Both channels grounded for `total`.
  static Schedule grounded(double total);

  /// `segments` on `active`, the other channel grounded.
  static Schedule single_channel(Channel active, std::vector<Segment> segments);

  double voltage(Channel channel, double t) const;

  double total_duration() const { return total_; }
  const std::vector<Segment>& segments(Channel channel) const;
  /// Start time of each segment on `channel`.
  const std::vector<double>& starts(Channel channel) const;

  /// Sorted, de-duplicated segment boundaries of both channels including 0 and the end.
  std::vector<double> breakpoints() const;

  /// Highest waveform frequency present, 0 if none is periodic.
  double max_frequency() const;

 private:
  struct Track {
    std::vector<Segment> segments;
    std::vector<double> starts;
  };
  static Track make_track(std::vector<Segment> segments, const char* name);
  const Track& track(Channel channel) const { return channel == Channel::left ? left_ : right_; }

  Track left_;
  Track right_;
  double total_ = 0.0;
};

/// Bipolar hold on `active`, grounded for `interrupt_len` at the end of every
/// `interrupt_every` interval; the opposite channel stays grounded.
Schedule build_hold_with_interruptions(double amplitude, double frequency, double interrupt_every,
                                       double interrupt_len, double total, Channel active = Channel::right);

/// Alternates DC(v_on) between the right (first half-period) and left channel,
/// with the idle channel grounded. `total` is rounded to whole half-periods.
Schedule build_toggle(double period, double v_on, double total);

}  // namespace mirrorsim
