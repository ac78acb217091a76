#pragma once

#include <string>
#include <vector>

#include "tempora/forest_topology.hpp"
#include "tempora/snapshot.hpp"
#include "tempora/time_value.hpp"

namespace tempora::oracle {

// Reference query answers computed directly on the plain representation by
// greedy walks; O(path length * labels per edge) per query.  These are the
// ground truth the sublinear structures are tested against.

// Earliest arrival at v over temporal paths leaving u no earlier than t.
TimeValue ea(const ForestTopology& topo, VertexId u, VertexId v, TimeValue t);

// Latest departure from u over temporal paths reaching v no later than t.
// Computed on the negated mirrored instance via the earliest-arrival walk.
TimeValue ld(const ForestTopology& topo, VertexId u, VertexId v, TimeValue t);

// Independent backward greedy used to cross-check ld in tests.
TimeValue ld_backward(const ForestTopology& topo, VertexId u, VertexId v,
                      TimeValue t);

// Whether some temporal path departs u at >= t_dep and arrives at v by
// <= t_arr.
bool reach(const ForestTopology& topo, VertexId u, VertexId v, TimeValue t_dep,
           TimeValue t_arr);

// Exhaustive variants enumerate every label assignment along the unique
// path; exponential, for cross-checks on tiny instances only.
TimeValue ea_exhaustive(const ForestTopology& topo, VertexId u, VertexId v,
                        TimeValue t);
TimeValue ld_exhaustive(const ForestTopology& topo, VertexId u, VertexId v,
                        TimeValue t);

// Reference queries over a standalone path: positions 0..n-1, edge i joins
// positions i and i+1 and carries labels[i] (possibly empty).  Labels are
// direction-agnostic, so leftward queries run the same greedy walk.
TimeValue path_ea(const std::vector<std::vector<TemporalLabel>>& labels,
                  std::size_t i, std::size_t j, TimeValue t);
TimeValue path_ld(const std::vector<std::vector<TemporalLabel>>& labels,
                  std::size_t i, std::size_t j, TimeValue t);

// Recomputes every successor pointer of the given snapshot from scratch and
// reports all discrepancies; an empty result means the snapshot is exactly
// the successor forest of `topo`.  Covers both the latency-free and the
// latency-aware rules (the former is the arrival == departure special case),
// plus per-node degree bounds and, when present, block head sets.
std::vector<std::string> validate(const ForestTopology& topo,
                                  const StructureSnapshot& snap);

// Same check for a path-shaped structure rooted at the right end: position
// i+1 is the parent of position i and edge i carries labels[i].  Unlike
// forests, path edges may carry empty label sets.
std::vector<std::string> validate_chain(
    const std::vector<std::vector<TemporalLabel>>& labels,
    const StructureSnapshot& snap);

}  // namespace tempora::oracle
