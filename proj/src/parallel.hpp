#pragma once

#include <tbb/parallel_for.h>

namespace ipld::detail {

/// Runs body(i) for i in [0, n). Each call must write only to slot i so
/// that results do not depend on scheduling.
template <class Body>
void parallel_for_each_block(int n, const Body& body) {
  tbb::parallel_for(0, n, [&](int i) { body(i); });
}

}  // namespace ipld::detail
