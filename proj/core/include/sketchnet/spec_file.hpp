#pragma once

#include <filesystem>
#include <string>

#include "sketchnet/network.hpp"

namespace sketchnet {

/// Reads a layer list, one layer per line:
///
///   # kernel out_channels activation
///   5 64 relu
///   3 1 none
///
/// '#' starts a comment. The usual NetworkSpec invariants apply.
NetworkSpec load_spec_file(const std::filesystem::path& path, std::size_t in_channels);

/// A builtin name ("sr", "small", "medium", "large") or a path to a layer list.
NetworkSpec resolve_architecture(const std::string& name_or_path, std::size_t in_channels);

}  // namespace sketchnet
