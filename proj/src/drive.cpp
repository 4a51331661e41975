#include "mirrorsim/drive.hpp"

#include <algorithm>
#include <cmath>

#include "mirrorsim/errors.hpp"

namespace mirrorsim {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double phase(double frequency, double t) {
  const double cycles = t * frequency;
  return cycles - std::floor(cycles);
}

void require_frequency(double f) {
  if (!(f > 0.0) || !std::isfinite(f)) throw ScheduleError("waveform.frequency_hz", "must be > 0");
}

// Relative slack when comparing accumulated segment durations.
constexpr double kCoverageTol = 1e-9;

}  // namespace

void check_waveform(const Waveform& waveform) {
  std::visit(overloaded{
                 [](const Ground&) {},
                 [](const DcLevel& w) {
                   if (!std::isfinite(w.volts)) throw ScheduleError("waveform.voltage_v", "must be finite");
                 },
                 [](const Triangle& w) {
                   require_frequency(w.frequency);
                   if (!(w.v_max >= w.v_min)) throw ScheduleError("waveform.v_max_v", "must be >= v_min");
                 },
                 [](const Square& w) {
                   require_frequency(w.frequency);
                   if (!(w.duty > 0.0 && w.duty < 1.0)) throw ScheduleError("waveform.duty", "must lie in (0, 1)");
                 },
                 [](const BipolarSquare& w) {
                   require_frequency(w.frequency);
                   if (!(w.amplitude >= 0.0)) throw ScheduleError("waveform.amplitude_v", "must be >= 0");
                 },
             },
             waveform);
}

double sample(const Waveform& waveform, double t) {
  return std::visit(overloaded{
                        [](const Ground&) { return 0.0; },
                        [](const DcLevel& w) { return w.volts; },
                        [t](const Triangle& w) {
                          const double p = phase(w.frequency, t);
                          const double span = w.v_max - w.v_min;
                          return p < 0.5 ? w.v_min + span * 2.0 * p : w.v_max - span * (2.0 * p - 1.0);
                        },
                        [t](const Square& w) { return phase(w.frequency, t) < w.duty ? w.v_high : w.v_low; },
                        [t](const BipolarSquare& w) {
                          return phase(w.frequency, t) < 0.5 ? w.amplitude : -w.amplitude;
                        },
                    },
                    waveform);
}

double rms(const Waveform& waveform) {
  return std::visit(overloaded{
                        [](const Ground&) { return 0.0; },
                        [](const DcLevel& w) { return std::abs(w.volts); },
                        [](const Triangle& w) {
                          const double a = w.v_min, b = w.v_max;
                          return std::sqrt((a * a + a * b + b * b) / 3.0);
                        },
                        [](const Square& w) {
                          return std::sqrt(w.duty * w.v_high * w.v_high + (1.0 - w.duty) * w.v_low * w.v_low);
                        },
                        [](const BipolarSquare& w) { return std::abs(w.amplitude); },
                    },
                    waveform);
}

std::optional<double> frequency(const Waveform& waveform) {
  return std::visit(overloaded{
                        [](const Ground&) -> std::optional<double> { return std::nullopt; },
                        [](const DcLevel&) -> std::optional<double> { return std::nullopt; },
                        [](const auto& w) -> std::optional<double> { return w.frequency; },
                    },
                    waveform);
}

Schedule::Track Schedule::make_track(std::vector<Segment> segments, const char* name) {
  Track track;
  double t = 0.0;
  for (const auto& segment : segments) {
    if (!(segment.duration > 0.0) || !std::isfinite(segment.duration)) {
      throw ScheduleError(std::string(name) + ".duration_s", "segment durations must be > 0");
    }
    check_waveform(segment.waveform);
    track.starts.push_back(t);
    t += segment.duration;
  }
  track.segments = std::move(segments);
  return track;
}

Schedule::Schedule(std::vector<Segment> left, std::vector<Segment> right)
    : left_(make_track(std::move(left), "left")), right_(make_track(std::move(right), "right")) {
  auto end = [](const Track& tr) {
    return tr.segments.empty() ? 0.0 : tr.starts.back() + tr.segments.back().duration;
  };
  const double left_end = end(left_);
  const double right_end = end(right_);
  if (!(left_end > 0.0) || !(right_end > 0.0)) throw ScheduleError("schedule", "empty schedule");
  if (std::abs(left_end - right_end) > kCoverageTol * std::max(left_end, right_end)) {
    throw ScheduleError("schedule", "left and right channels must cover the same duration");
  }
  total_ = std::max(left_end, right_end);
}

Schedule Schedule::grounded(double total) { return Schedule({{total, Ground{}}}, {{total, Ground{}}}); }

Schedule Schedule::single_channel(Channel active, std::vector<Segment> segments) {
  double total = 0.0;
  for (const auto& s : segments) total += s.duration;
  std::vector<Segment> idle{{total, Ground{}}};
  return active == Channel::left ? Schedule(std::move(segments), std::move(idle))
                                 : Schedule(std::move(idle), std::move(segments));
}

double Schedule::voltage(Channel channel, double t) const {
  const auto& tr = track(channel);
  if (t < 0.0 || t >= total_) return 0.0;
  const auto it = std::upper_bound(tr.starts.begin(), tr.starts.end(), t);
  const auto index = static_cast<std::size_t>(std::distance(tr.starts.begin(), it)) - 1;
  return sample(tr.segments[index].waveform, t - tr.starts[index]);
}

const std::vector<Segment>& Schedule::segments(Channel channel) const { return track(channel).segments; }

const std::vector<double>& Schedule::starts(Channel channel) const { return track(channel).starts; }

std::vector<double> Schedule::breakpoints() const {
  std::vector<double> points(left_.starts);
  points.insert(points.end(), right_.starts.begin(), right_.starts.end());
  points.push_back(total_);
  std::sort(points.begin(), points.end());
  // Channels accumulate their own start times; merge boundaries that differ only by rounding.
  const double tol = kCoverageTol * total_;
  points.erase(std::unique(points.begin(), points.end(), [tol](double a, double b) { return b - a <= tol; }),
               points.end());
  points.back() = total_;
  return points;
}

double Schedule::max_frequency() const {
  double f_max = 0.0;
  for (const auto* tr : {&left_, &right_}) {
    for (const auto& s : tr->segments) f_max = std::max(f_max, frequency(s.waveform).value_or(0.0));
  }
  return f_max;
}

Schedule build_hold_with_interruptions(double amplitude, double frequency, double interrupt_every,
                                       double interrupt_len, double total, Channel active) {
  if (!(interrupt_len > 0.0)) throw ScheduleError("interrupt_len_s", "must be > 0");
  if (!(interrupt_len < interrupt_every)) throw ScheduleError("interrupt_len_s", "must be shorter than interrupt_every_s");
  if (!(total > 0.0)) throw ScheduleError("total_s", "must be > 0");

  const Waveform hold = BipolarSquare{frequency, amplitude};
  std::vector<Segment> segments;
  const auto count = static_cast<long>(std::floor(total / interrupt_every * (1.0 + 1e-12)));
  for (long i = 0; i < count; ++i) {
    segments.push_back({interrupt_every - interrupt_len, hold});
    segments.push_back({interrupt_len, Ground{}});
  }
  const double remainder = total - static_cast<double>(count) * interrupt_every;
  if (remainder > kCoverageTol * total) segments.push_back({remainder, hold});
  return Schedule::single_channel(active, std::move(segments));
}

Schedule build_toggle(double period, double v_on, double total) {
  if (!(period > 0.0)) throw ScheduleError("period_s", "must be > 0");
  if (!(total > 0.0)) throw ScheduleError("total_s", "empty schedule");
  const double half = 0.5 * period;
  const auto halves = std::max<long>(1, std::lround(total / half));
  std::vector<Segment> left, right;
  for (long i = 0; i < halves; ++i) {
    const bool right_on = i % 2 == 0;
    right.push_back({half, right_on ? Waveform{DcLevel{v_on}} : Waveform{Ground{}}});
    left.push_back({half, right_on ? Waveform{Ground{}} : Waveform{DcLevel{v_on}}});
  }
  return Schedule(std::move(left), std::move(right));
}

}  // namespace mirrorsim
