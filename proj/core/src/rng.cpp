#include "graphtx/rng.hpp"

namespace gtx {

uint64_t stream_seed(uint64_t seed, std::string_view label, uint64_t index) {
  // FNV-1a over (seed, label, index), then one splitmix scramble.
  uint64_t h = 0xcbf29ce484222325ULL;
  auto mix_byte = [&h](uint8_t b) {
    h ^= b;
    h *= 0x100000001b3ULL;
  };
  for (int i = 0; i < 8; ++i) mix_byte(static_cast<uint8_t>(seed >> (8 * i)));
  for (char c : label) mix_byte(static_cast<uint8_t>(c));
  for (int i = 0; i < 8; ++i) mix_byte(static_cast<uint8_t>(index >> (8 * i)));
  Rng scramble(h);
  return scramble.next_u64();
}

}  // namespace gtx
