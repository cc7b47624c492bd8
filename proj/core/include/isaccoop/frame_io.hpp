#pragma once

#include <string>

#include "isaccoop/signal.hpp"

namespace isaccoop {

/// Debug dump of a frame's received grid: little-endian complex64 (float32
/// re/im pairs) in row-major order at `path`, plus an 8-field JSON sidecar
/// header at `path + ".json"`.  See docs/frame-format.md.
void dump_frame(const EchoFrame& frame, const std::string& path);

/// Reads a dump back; x_ref and truth are not part of the format and come
/// back empty / zero.
EchoFrame load_frame(const std::string& path);

}  // namespace isaccoop
