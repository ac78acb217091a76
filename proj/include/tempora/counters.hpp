#pragma once

#include <cstdint>

namespace tempora {

// Work accounting for one successor-forest instance.  `rewires` counts only
// parent assignments that actually changed a pointer, which is what the
// validator observes as a parent-map diff; `forest_ops` counts raw dynamic
// forest mutations (add/remove/link/cut) including idempotent relinks.
struct UpdateCounters {
  std::uint64_t fix_parent_calls = 0;
  std::uint64_t rewires = 0;
  std::uint64_t forest_ops = 0;

  UpdateCounters operator-(const UpdateCounters& o) const {
    return {fix_parent_calls - o.fix_parent_calls, rewires - o.rewires,
            forest_ops - o.forest_ops};
  }
};

}  // namespace tempora
