#pragma once

#include <string>

namespace tta {

/// Worst-case delay of a flow: a finite value in µs, or the reason there is none.
struct Delay {
  enum class Kind { Finite, Unstable, Unscheduled };

  Kind kind = Kind::Unscheduled;
  double us = 0;

  static Delay finite(double us) { return {Kind::Finite, us}; }
  static Delay unstable() { return {Kind::Unstable, 0}; }
  static Delay unscheduled() { return {Kind::Unscheduled, 0}; }

  bool is_finite() const { return kind == Kind::Finite; }
  bool operator==(const Delay&) const = default;
};

inline std::string to_string(const Delay& d) {
  switch (d.kind) {
    case Delay::Kind::Finite:
      return std::to_string(d.us);
    case Delay::Kind::Unstable:
      return "unstable";
    case Delay::Kind::Unscheduled:
      break;
  }
  return "unscheduled";
}

}  // namespace tta
