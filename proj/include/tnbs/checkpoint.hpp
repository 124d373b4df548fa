#pragma once

// Binary state checkpoints; the byte layout is described in
// docs/checkpoint-format.md.

#include <filesystem>
#include <iosfwd>

#include "tnbs/state.hpp"

namespace tnbs {

void write_checkpoint(std::ostream& os, const CanonicalTNState& state);
CanonicalTNState read_checkpoint(std::istream& is);

void save_checkpoint(const std::filesystem::path& path, const CanonicalTNState& state);
CanonicalTNState load_checkpoint(const std::filesystem::path& path);

}  // namespace tnbs
