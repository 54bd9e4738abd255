#pragma once

#include <vector>

#include "ccra/model.hpp"

namespace ccra {

// Loop-free path enumeration over a directed topology. For every ordered
// node pair, up to per_pair_limit paths ordered by (total link cost, link
// count, lexicographic link ids). Unreachable pairs yield nothing. Path ids
// are assigned sequentially over pairs in (head, tail) order.
std::vector<PathSpec> enumerate_paths(const std::vector<NodeSpec>& nodes,
                                      const std::vector<LinkSpec>& links,
                                      int per_pair_limit);

// Paths for a single ordered pair, same ordering, ids unset.
std::vector<PathSpec> enumerate_pair_paths(const std::vector<NodeSpec>& nodes,
                                           const std::vector<LinkSpec>& links,
                                           int head, int tail, int per_pair_limit);

}  // namespace ccra
