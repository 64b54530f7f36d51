#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "dandelion/topology.hpp"

namespace dandelion {

// Edge list: `n <count>` then one `src dst` per line.
void write_edge_list(std::ostream& out, const Digraph& g);
// Roles: one `node role support` line per node, role in {h, a}, support in {0, 1}.
void write_roles(std::ostream& out, const Digraph& g);

// Parse errors name the source and the offending line.
Digraph read_edge_list(std::istream& in, const std::string& origin);
void read_roles(std::istream& in, const std::string& origin, Digraph& g);

std::filesystem::path roles_path_for(const std::filesystem::path& edges);

// Writes `path` and the companion roles file `path.roles`.
void serialize_graph(const Digraph& g, const std::filesystem::path& path);
// Reads `path` and, when present, `path.roles`.
Digraph load_graph(const std::filesystem::path& path);

}  // namespace dandelion
