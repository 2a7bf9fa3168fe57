#pragma once

#include <functional>
#include <vector>

#include "xxlseg/volume.hpp"

namespace xxlseg {

struct Block {
  Box core;    // disjoint across blocks; union is the whole volume
  Box padded;  // core grown by the overlap on every face, clamped to the volume
};

struct BlockTiling {
  Vec3 dims;
  std::int64_t block_edge = 64;
  std::int64_t overlap = 8;
  std::vector<Block> blocks;  // z-major, x-fastest block order
};

BlockTiling make_tiling(const VolumeMeta& meta, std::int64_t block_edge = 64, std::int64_t overlap = 8);

/// Runs `fn` on every padded block and writes each result's core region
/// back into a volume of the input's dims. `fn` must return a volume with
/// the padded block's dims. Blocks may run concurrently; the output does
/// not depend on the thread count.
template <typename T, typename U>
Volume<U> process_blockwise(const Volume<T>& volume, const BlockTiling& tiling,
                            const std::function<Volume<U>(const Volume<T>&)>& fn);

}  // namespace xxlseg

#include "xxlseg/parallel.hpp"

namespace xxlseg {

template <typename T, typename U>
Volume<U> process_blockwise(const Volume<T>& volume, const BlockTiling& tiling,
                            const std::function<Volume<U>(const Volume<T>&)>& fn) {
  if (volume.dims() != tiling.dims) throw InvalidArgument("tiling dims do not match volume");
  Volume<U> out(volume.dims(), U{}, volume.meta().origin);
  const auto n = static_cast<std::int64_t>(tiling.blocks.size());
  parallel_for(0, n, [&](std::int64_t b0, std::int64_t b1, int) {
    for (std::int64_t b = b0; b < b1; ++b) {
      const Block& block = tiling.blocks[static_cast<std::size_t>(b)];
      const Volume<U> result = fn(crop(volume, block.padded));
      if (result.dims() != block.padded.extent()) {
        throw InvalidArgument("block function changed the block dims");
      }
      // Cores are disjoint, so concurrent writes never alias.
      paste(out, result, block.padded.lo, block.core);
    }
  });
  return out;
}

}  // namespace xxlseg
