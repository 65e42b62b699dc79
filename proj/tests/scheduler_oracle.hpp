#pragma once

// Brute-force placement oracles for the ASAP scheduler, written against the
// raw slot semantics only (no scheduler internals).

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "tta/model.hpp"
#include "tta/scheduler.hpp"

namespace tta::testing {

/// occupancy[link][cell] = true when taken.
using Occupancy = std::vector<std::vector<bool>>;

inline Occupancy occupancy_of(const SlotGrid& g) {
  Occupancy o(g.link_count(), std::vector<bool>(g.cells_per_link()));
  for (std::size_t l = 0; l < g.link_count(); ++l)
    for (std::size_t c = 0; c < g.cells_per_link(); ++c) o[l][c] = !g.is_free(l, c);
  return o;
}

inline std::int64_t release_of(std::int64_t k, std::int64_t period, double slot) {
  return static_cast<std::int64_t>(std::ceil(static_cast<double>(k * period) / slot - 1e-9));
}

inline bool free_run(const Occupancy& o, std::size_t link, std::int64_t start, std::int64_t len) {
  if (start < 0 || start + len > static_cast<std::int64_t>(o[link].size())) return false;
  for (std::int64_t c = start; c < start + len; ++c)
    if (o[link][static_cast<std::size_t>(c)]) return false;
  return true;
}

/// Greedy rule at one offset: first hop exactly at release + offset, every
/// later hop at the first free run at or after the previous hop's end,
/// instances in order, each seeing the cells of the ones before.
inline bool greedy_fits(Occupancy o, const std::vector<std::size_t>& route, std::int64_t instances,
                        std::int64_t period, double slot, std::int64_t len, std::int64_t offset,
                        std::vector<std::vector<std::int64_t>>* starts = nullptr) {
  if (starts) starts->assign(static_cast<std::size_t>(instances), {});
  for (std::int64_t k = 0; k < instances; ++k) {
    std::int64_t from = release_of(k, period, slot) + offset;
    for (std::size_t hop = 0; hop < route.size(); ++hop) {
      std::int64_t s = from;
      if (hop == 0) {
        if (!free_run(o, route[hop], s, len)) return false;
      } else {
        while (s + len <= static_cast<std::int64_t>(o[route[hop]].size()) && !free_run(o, route[hop], s, len)) ++s;
        if (!free_run(o, route[hop], s, len)) return false;
      }
      for (std::int64_t c = s; c < s + len; ++c) o[route[hop]][static_cast<std::size_t>(c)] = true;
      if (starts) (*starts)[static_cast<std::size_t>(k)].push_back(s);
      from = s + len;
    }
  }
  return true;
}

/// Any placement of a single instance: first hop at `first`, each later hop
/// anywhere at or after the previous hop's end. Exhaustive DFS.
inline bool any_chain_fits(const Occupancy& o, const std::vector<std::size_t>& route, std::size_t hop,
                           std::int64_t from, std::int64_t len, bool exact) {
  if (hop == route.size()) return true;
  const auto n = static_cast<std::int64_t>(o[route[hop]].size());
  for (std::int64_t s = from; s + len <= n; ++s) {
    if (free_run(o, route[hop], s, len) && any_chain_fits(o, route, hop + 1, s + len, len, false)) return true;
    if (exact) break;
  }
  return false;
}

}  // namespace tta::testing
