#include "xxlseg/tiling.hpp"

#include <algorithm>

namespace xxlseg {

BlockTiling make_tiling(const VolumeMeta& meta, std::int64_t block_edge, std::int64_t overlap) {
  if (block_edge < 1) throw InvalidArgument("block_edge must be >= 1");
  if (overlap < 0) throw InvalidArgument("overlap must be >= 0");
  BlockTiling t;
  t.dims = meta.dims;
  t.block_edge = block_edge;
  t.overlap = overlap;

  Vec3 counts;
  for (int a = 0; a < 3; ++a) counts[a] = (meta.dims[a] + block_edge - 1) / block_edge;
  t.blocks.reserve(static_cast<std::size_t>(counts.product()));
  for (std::int64_t bz = 0; bz < counts.z; ++bz)
    for (std::int64_t by = 0; by < counts.y; ++by)
      for (std::int64_t bx = 0; bx < counts.x; ++bx) {
        const Vec3 b{bx, by, bz};
        Block block;
        for (int a = 0; a < 3; ++a) {
          block.core.lo[a] = b[a] * block_edge;
          block.core.hi[a] = std::min(meta.dims[a], (b[a] + 1) * block_edge);
          block.padded.lo[a] = std::max<std::int64_t>(0, block.core.lo[a] - overlap);
          block.padded.hi[a] = std::min(meta.dims[a], block.core.hi[a] + overlap);
        }
        t.blocks.push_back(block);
      }
  return t;
}

}  // namespace xxlseg
