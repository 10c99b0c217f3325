#pragma once

#include <filesystem>
#include <string>

#include "gridlat/grid.hpp"

namespace gridlat {

/// Parse a grid description from JSON text. Throws Error with stage "parse"
/// on malformed input and runs validate() before returning.
[[nodiscard]] GridSpec parse_grid_json(const std::string& text);

[[nodiscard]] GridSpec load_grid(const std::filesystem::path& path);

/// Serialize with enough precision that load(save(g)) round-trips every
/// numeric field bit for bit.
[[nodiscard]] std::string grid_to_json(const GridSpec& spec);

void save_grid(const GridSpec& spec, const std::filesystem::path& path);

/// Branch list as "from,to,susceptance_pu[,length_mi]" CSV with a header row.
[[nodiscard]] std::vector<Branch> parse_branches_csv(const std::string& text);

/// Load list as "node,p_mw[,d_l_pct[,evcs_max_kw]]" CSV with a header row.
[[nodiscard]] std::vector<LoadParams> parse_loads_csv(const std::string& text);

}  // namespace gridlat
