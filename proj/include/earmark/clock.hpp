#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <string>

namespace earmark {

using Timestamp =
    std::chrono::time_point<std::chrono::system_clock, std::chrono::milliseconds>;

class Clock {
 public:
  virtual ~Clock() = default;
  virtual Timestamp now() const = 0;
};

class SystemClock final : public Clock {
 public:
  Timestamp now() const override {
    return std::chrono::time_point_cast<std::chrono::milliseconds>(
        std::chrono::system_clock::now());
  }
};

/// Test clock; only moves when told to.
class ManualClock final : public Clock {
 public:
  explicit ManualClock(std::int64_t start_ms = 1'700'000'000'000)
      : ms_(start_ms) {}

  Timestamp now() const override {
    return Timestamp(std::chrono::milliseconds(ms_.load()));
  }
  void advance(std::chrono::milliseconds d) { ms_ += d.count(); }
  void set(std::int64_t epoch_ms) { ms_ = epoch_ms; }

 private:
  std::atomic<std::int64_t> ms_;
};

inline std::int64_t to_epoch_ms(Timestamp t) {
  return t.time_since_epoch().count();
}
inline Timestamp from_epoch_ms(std::int64_t ms) {
  return Timestamp(std::chrono::milliseconds(ms));
}

/// "2024-05-01T12:00:00.000Z"
std::string to_iso8601(Timestamp t);

}  // namespace earmark
