#include "transop/io.hpp"

#include "transop/error.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace transop::io {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const fs::path& where, std::size_t line) {
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
  if (begin < end && *begin == '+') ++begin;
  double v = 0.0;
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    fail(Errc::io, where.string() + ":" + std::to_string(line) + ": cannot parse number '" + s + "'");
  }
  return v;
}

std::vector<std::vector<std::string>> tokenize(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
    rows.push_back(std::move(tokens));
  }
  return rows;
}

Index parse_index(const std::string& s, std::size_t line) {
  Index v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || v < 0) {
    fail(Errc::io, "edge list line " + std::to_string(line) + ": bad vertex id '" + s + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  require(static_cast<bool>(os), Errc::io, "cannot open " + path.string() + " for writing");
  os << text;
  require(static_cast<bool>(os), Errc::io, "failed writing " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  require(static_cast<bool>(is), Errc::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_json(const fs::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

nlohmann::json read_json(const fs::path& path) {
  try {
    return nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::io, path.string() + ": " + e.what());
  }
}

void write_matrix_csv(const fs::path& path, const Matrix& a) {
  std::string out;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      if (j) out += ',';
      out += format_double(a(i, j));
    }
    out += '\n';
  }
  write_text(path, out);
}

Matrix read_matrix_csv(const fs::path& path) {
  std::istringstream is(read_text(path));
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t ln = 0;
  while (std::getline(is, line)) {
    ++ln;
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    for (const auto& cell : split(line, ',')) row.push_back(parse_double(cell, path, ln));
    require(rows.empty() || row.size() == rows.front().size(), Errc::io,
            path.string() + ":" + std::to_string(ln) + ": ragged row");
    rows.push_back(std::move(row));
  }
  Matrix a(static_cast<Index>(rows.size()), rows.empty() ? 0 : static_cast<Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) a(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  }
  return a;
}

void write_pair_dataset(const fs::path& csv, const PairDataset& data) {
  const Index d = data.dimension();
  std::string out;
  for (Index j = 0; j < d; ++j) out += (j ? ",x" : "x") + std::to_string(j + 1);
  for (Index j = 0; j < d; ++j) out += ",y" + std::to_string(j + 1);
  out += '\n';
  for (Index k = 0; k < data.size(); ++k) {
    for (Index j = 0; j < d; ++j) {
      if (j) out += ',';
      out += format_double(data.xs(k, j));
    }
    for (Index j = 0; j < d; ++j) out += ',' + format_double(data.ys(k, j));
    out += '\n';
  }
  write_text(csv, out);
  fs::path meta = csv;
  meta.replace_extension(".json");
  write_json(meta, {{"lag", data.lag},
                    {"seed", data.seed},
                    {"discarded", data.discarded},
                    {"mode", to_string(data.mode)},
                    {"pairs", data.size()},
                    {"dimension", d}});
}

PairDataset read_pair_dataset(const fs::path& csv) {
  std::istringstream is(read_text(csv));
  std::string header;
  require(static_cast<bool>(std::getline(is, header)), Errc::io, csv.string() + ": empty file");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  const auto cols = split(header, ',');
  require(!cols.empty() && cols.size() % 2 == 0, Errc::io,
          csv.string() + ": header must be x1,...,xd,y1,...,yd");
  const auto d = static_cast<Index>(cols.size() / 2);
  for (Index j = 0; j < d; ++j) {
    require(cols[static_cast<std::size_t>(j)] == "x" + std::to_string(j + 1) &&
                cols[static_cast<std::size_t>(j + d)] == "y" + std::to_string(j + 1),
            Errc::io, csv.string() + ": header must be x1,...,xd,y1,...,yd");
  }
  std::vector<double> values;
  std::string line;
  std::size_t ln = 1;
  while (std::getline(is, line)) {
    ++ln;
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line, ',');
    require(static_cast<Index>(cells.size()) == 2 * d, Errc::io,
            csv.string() + ":" + std::to_string(ln) + ": expected " + std::to_string(2 * d) + " fields");
    for (const auto& c : cells) values.push_back(parse_double(c, csv, ln));
  }
  const auto m = static_cast<Index>(values.size()) / (2 * d);
  PairDataset data;
  data.xs.resize(m, d);
  data.ys.resize(m, d);
  for (Index k = 0; k < m; ++k) {
    for (Index j = 0; j < d; ++j) {
      data.xs(k, j) = values[static_cast<std::size_t>(k * 2 * d + j)];
      data.ys(k, j) = values[static_cast<std::size_t>(k * 2 * d + d + j)];
    }
  }
  fs::path meta = csv;
  meta.replace_extension(".json");
  if (fs::exists(meta)) {
    const auto j = read_json(meta);
    data.lag = j.value("lag", 0.0);
    data.seed = j.value("seed", std::uint64_t{0});
    data.discarded = j.value("discarded", std::size_t{0});
    if (j.contains("mode")) data.mode = parse_sample_mode(j.at("mode").get<std::string>());
  }
  return data;
}

void write_bundle(const fs::path& dir, const OperatorBundle& b, const nlohmann::json& extra) {
  fs::create_directories(dir);
  nlohmann::json files = nlohmann::json::object();
  const std::pair<const char*, const Matrix*> mats[] = {
      {"K", &b.K}, {"T", &b.T}, {"F", &b.F}, {"B", &b.B}, {"P", &b.P}};
  for (const auto& [name, m] : mats) {
    const std::string file = std::string(name) + ".csv";
    write_matrix_csv(dir / file, *m);
    files[name] = file;
  }
  if (b.mu.size()) {
    write_matrix_csv(dir / "mu.csv", b.mu);
    files["mu"] = "mu.csv";
  }
  if (b.nu.size()) {
    write_matrix_csv(dir / "nu.csv", b.nu);
    files["nu"] = "nu.csv";
  }
  nlohmann::json manifest = {
      {"n", b.size()},
      {"provenance",
       {{"kind", b.provenance.kind == Provenance::Kind::estimated ? "estimated" : "exact"},
        {"id", b.provenance.id}}},
      {"files", files}};
  manifest.update(extra);
  write_json(dir / "manifest.json", manifest);
}

OperatorBundle read_bundle(const fs::path& dir) {
  const auto manifest = read_json(dir / "manifest.json");
  OperatorBundle b;
  try {
    const auto& files = manifest.at("files");
    b.K = read_matrix_csv(dir / files.at("K").get<std::string>());
    b.T = read_matrix_csv(dir / files.at("T").get<std::string>());
    b.F = read_matrix_csv(dir / files.at("F").get<std::string>());
    b.B = read_matrix_csv(dir / files.at("B").get<std::string>());
    b.P = read_matrix_csv(dir / files.at("P").get<std::string>());
    if (files.contains("mu")) b.mu = read_matrix_csv(dir / files.at("mu").get<std::string>()).col(0);
    if (files.contains("nu")) b.nu = read_matrix_csv(dir / files.at("nu").get<std::string>()).col(0);
    const auto& prov = manifest.at("provenance");
    b.provenance.kind = prov.at("kind") == "estimated" ? Provenance::Kind::estimated
                                                       : Provenance::Kind::exact;
    b.provenance.id = prov.at("id").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::io, (dir / "manifest.json").string() + ": " + e.what());
  }
  return b;
}

void write_partition_csv(const fs::path& path, const Partition& part) {
  std::string out = "vertex,label\n";
  for (std::size_t v = 0; v < part.labels.size(); ++v) {
    out += std::to_string(v) + ',' + std::to_string(part.labels[v]) + '\n';
  }
  write_text(path, out);
}

Partition read_partition_csv(const fs::path& path) {
  std::istringstream is(read_text(path));
  std::string line;
  std::getline(is, line);
  Partition p;
  std::size_t ln = 1;
  while (std::getline(is, line)) {
    ++ln;
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line, ',');
    require(cells.size() == 2, Errc::io, path.string() + ":" + std::to_string(ln) + ": expected vertex,label");
    require(static_cast<std::size_t>(parse_double(cells[0], path, ln)) == p.labels.size(), Errc::io,
            path.string() + ":" + std::to_string(ln) + ": vertices must be listed in order");
    const int label = static_cast<int>(parse_double(cells[1], path, ln));
    p.labels.push_back(label);
    p.m = std::max(p.m, label + 1);
  }
  return p;
}

std::string edge_list_text(const Graph& g, const std::string& comment) {
  std::string out;
  if (!comment.empty()) out += "# " + comment + "\n";
  out += "# n " + std::to_string(g.size()) + (g.directed() ? " directed\n" : " undirected\n");
  for (const Edge& e : g.canonical_edges()) {
    out += std::to_string(e.src) + ' ' + std::to_string(e.dst) + ' ' + format_double(e.weight) + '\n';
  }
  return out;
}

void write_edge_list(const fs::path& path, const Graph& g, const std::string& comment) {
  write_text(path, edge_list_text(g, comment));
}

namespace {

// Vertex count: explicit n, else a "# n N" comment, else max id + 1.
Index declared_size(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string hash, key;
    Index n = -1;
    if (ls >> hash >> key >> n && hash == "#" && key == "n" && n >= 0) return n;
  }
  return -1;
}

}  // namespace

Graph parse_edge_list(const std::string& text, bool directed, Index n) {
  if (n < 0) n = declared_size(text);
  std::vector<Edge> edges;
  Index top = -1;
  std::size_t ln = 0;
  for (const auto& tokens : tokenize(text)) {
    ++ln;
    if (tokens.empty()) continue;
    require(tokens.size() == 3, Errc::io, "edge list line " + std::to_string(ln) + ": expected 'src dst weight'");
    Edge e{parse_index(tokens[0], ln), parse_index(tokens[1], ln),
           parse_double(tokens[2], "edge list", ln)};
    top = std::max({top, e.src, e.dst});
    edges.push_back(e);
  }
  if (n < 0) n = top + 1;
  return Graph::from_edges(n, edges, directed);
}

Graph read_edge_list(const fs::path& path, bool directed, Index n) {
  return parse_edge_list(read_text(path), directed, n);
}

void write_layered_edge_list(const fs::path& path, const LayeredGraph& lg, const std::string& comment) {
  std::string out;
  if (!comment.empty()) out += "# " + comment + "\n";
  out += "# n " + std::to_string(lg.size()) + "\n";
  for (std::size_t l = 0; l < lg.layers.size(); ++l) {
    for (const Edge& e : lg.layers[l].canonical_edges()) {
      out += std::to_string(l) + ' ' + std::to_string(e.src) + ' ' + std::to_string(e.dst) + ' ' +
             format_double(e.weight) + '\n';
    }
  }
  write_text(path, out);
}

LayeredGraph parse_layered_edge_list(const std::string& text, bool directed, Index n) {
  if (n < 0) n = declared_size(text);
  std::map<Index, std::vector<Edge>> by_layer;
  Index top = -1;
  Index last_layer = -1;
  std::size_t ln = 0;
  for (const auto& tokens : tokenize(text)) {
    ++ln;
    if (tokens.empty()) continue;
    require(tokens.size() == 4, Errc::io,
            "layered edge list line " + std::to_string(ln) + ": expected 'layer src dst weight'");
    const Index layer = parse_index(tokens[0], ln);
    Edge e{parse_index(tokens[1], ln), parse_index(tokens[2], ln),
           parse_double(tokens[3], "layered edge list", ln)};
    top = std::max({top, e.src, e.dst});
    last_layer = std::max(last_layer, layer);
    by_layer[layer].push_back(e);
  }
  require(last_layer >= 0, Errc::io, "layered edge list has no edges");
  if (n < 0) n = top + 1;
  LayeredGraph lg;
  for (Index l = 0; l <= last_layer; ++l) {
    lg.layers.push_back(Graph::from_edges(n, by_layer[l], directed));
    lg.times.push_back(static_cast<double>(l));
  }
  return lg;
}

LayeredGraph read_layered_edge_list(const fs::path& path, bool directed, Index n) {
  return parse_layered_edge_list(read_text(path), directed, n);
}

}  // namespace transop::io
