#pragma once

#include <stdexcept>
#include <vector>

#include "jrtp/instance.hpp"

namespace jrtp {

struct Shift {
  int index = 0;
  Minutes start = 0;
  Minutes end = 0;

  friend bool operator==(const Shift&, const Shift&) = default;
};

// Candidate shifts of length `duration` starting every `step` minutes from
// `earliest`. The count is ceil((latest - earliest - duration) / step) + 1;
// when the slack is not a multiple of `step` the last start is pulled back
// to `latest - duration`.
inline std::vector<Shift> enumerate_shifts(Minutes earliest, Minutes latest, Minutes duration,
                                           Minutes step) {
  if (step <= 0) throw std::invalid_argument("shift step must be positive");
  if (duration <= 0) throw std::invalid_argument("shift duration must be positive");
  if (duration > latest - earliest)
    throw std::invalid_argument("shift duration exceeds the service horizon");
  const Minutes slack = latest - earliest - duration;
  const int last_k = (slack + step - 1) / step;
  std::vector<Shift> shifts;
  shifts.reserve(last_k + 1);
  for (int k = 0; k <= last_k; ++k) {
    const Minutes start = std::min(earliest + k * step, latest - duration);
    shifts.push_back({k, start, start + duration});
  }
  return shifts;
}

inline std::vector<Shift> enumerate_shifts(const Instance& inst) {
  return enumerate_shifts(inst.shift_earliest, inst.shift_latest, inst.shift_duration,
                          inst.shift_step);
}

}  // namespace jrtp
