#pragma once

namespace voxband::mc {

// Corner layout: bit i set when corner i is inside (value < 0).
//   0:(0,0,0) 1:(1,0,0) 2:(1,1,0) 3:(0,1,0)
//   4:(0,0,1) 5:(1,0,1) 6:(1,1,1) 7:(0,1,1)
// Edge e connects corners edge_corners[e][0..1].
extern const int edge_corners[12][2];

// Standard 256-case triangulation, -1 terminated rows of edge indices.
extern const int tri_table[256][16];

}  // namespace voxband::mc
