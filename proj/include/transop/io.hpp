#pragma once

#include "transop/bundle.hpp"
#include "transop/clustering.hpp"
#include "transop/dynamics.hpp"
#include "transop/graph.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace transop::io {

namespace fs = std::filesystem;

/// Shortest round-trip decimal form.
std::string format_double(double v);

void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);
void write_json(const fs::path& path, const nlohmann::json& j);
nlohmann::json read_json(const fs::path& path);

/// Header-less dense CSV, one row per line.
void write_matrix_csv(const fs::path& path, const Matrix& a);
Matrix read_matrix_csv(const fs::path& path);

/// CSV `x1,...,xd,y1,...,yd` plus a sidecar `<stem>.json` holding lag, seed,
/// discarded and mode.
void write_pair_dataset(const fs::path& csv, const PairDataset& data);
PairDataset read_pair_dataset(const fs::path& csv);

/// manifest.json plus K.csv, T.csv, F.csv, B.csv, P.csv and, when present,
/// mu.csv / nu.csv in `dir`. `extra` is merged into the manifest.
void write_bundle(const fs::path& dir, const OperatorBundle& bundle,
                  const nlohmann::json& extra = nlohmann::json::object());
OperatorBundle read_bundle(const fs::path& dir);

/// `vertex,label` with -1 for unassigned.
void write_partition_csv(const fs::path& path, const Partition& part);
Partition read_partition_csv(const fs::path& path);

/// `src dst weight` lines, `#` comments. Undirected graphs are written with
/// each edge once and mirrored on load.
void write_edge_list(const fs::path& path, const Graph& g, const std::string& comment = {});
Graph read_edge_list(const fs::path& path, bool directed, Index n = -1);
std::string edge_list_text(const Graph& g, const std::string& comment = {});
Graph parse_edge_list(const std::string& text, bool directed, Index n = -1);

/// `layer src dst weight` lines; layers are numbered from 0.
void write_layered_edge_list(const fs::path& path, const LayeredGraph& lg,
                             const std::string& comment = {});
LayeredGraph read_layered_edge_list(const fs::path& path, bool directed, Index n = -1);
LayeredGraph parse_layered_edge_list(const std::string& text, bool directed, Index n = -1);

}  // namespace transop::io
