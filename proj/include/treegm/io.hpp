#pragma once

// File formats: the plain-text graph format and headerless CSV matrices.
//
// Graph files: '#' starts a comment, blank lines are skipped, the first
// payload line is "p <count>", every following line is one edge "u v".

#include <Eigen/Dense>
#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "treegm/graph.hpp"

namespace treegm {

namespace detail {

inline std::string strip_comment(const std::string& line) {
  auto hash = line.find('#');
  std::string s = hash == std::string::npos ? line : line.substr(0, hash);
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace detail

inline LabeledGraph read_graph(std::istream& in) {
  std::string line;
  int p = -1;
  LabeledGraph g;
  while (std::getline(in, line)) {
    std::string payload = detail::strip_comment(line);
    if (payload.empty()) continue;
    std::istringstream fields(payload);
    if (p < 0) {
      std::string tag;
      fields >> tag >> p;
      if (tag != "p" || fields.fail() || p < 1) throw validation_error("graph file: expected header 'p <count>'");
      std::string extra;
      if (fields >> extra) throw validation_error("graph file: trailing tokens after header");
      g = LabeledGraph(p);
    } else {
      int u, v;
      fields >> u >> v;
      if (fields.fail()) throw validation_error("graph file: malformed edge line: " + payload);
      std::string extra;
      if (fields >> extra) throw validation_error("graph file: trailing tokens on edge line: " + payload);
      g.add_edge(u, v);  // validates range, self-loops, duplicates
    }
  }
  if (p < 0) throw validation_error("graph file: missing header");
  return g;
}

inline LabeledGraph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open graph file: " + path);
  return read_graph(in);
}

inline void write_graph(std::ostream& out, const LabeledGraph& g) {
  out << "p " << g.p() << "\n";
  for (auto [u, v] : g.edges()) out << u << " " << v << "\n";
}

inline void write_graph_file(const std::string& path, const LabeledGraph& g) {
  std::ofstream out(path);
  if (!out) throw validation_error("cannot open graph file for writing: " + path);
  write_graph(out, g);
}

// Headerless CSV of doubles; all rows must have equal length.
inline Eigen::MatrixXd read_csv_matrix(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    // tolerate trailing \r and skip blank lines
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    bool blank = true;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
    if (blank) continue;

    std::vector<double> row;
    std::istringstream fields(line);
    std::string cell;
    while (std::getline(fields, cell, ',')) {
      std::size_t used = 0;
      double value;
      try {
        value = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw validation_error("csv: non-numeric cell: '" + cell + "'");
      }
      while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
      if (used != cell.size()) throw validation_error("csv: non-numeric cell: '" + cell + "'");
      row.push_back(value);
    }
    if (row.empty()) throw validation_error("csv: empty row");
    if (!rows.empty() && row.size() != rows.front().size()) throw validation_error("csv: ragged rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw validation_error("csv: empty input");

  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  return m;
}

inline Eigen::MatrixXd read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open csv file: " + path);
  return read_csv_matrix(in);
}

inline void write_csv_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  out.precision(17);
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j) out << ",";
      out << m(i, j);
    }
    out << "\n";
  }
}

inline void write_csv_file(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw validation_error("cannot open csv file for writing: " + path);
  write_csv_matrix(out, m);
}

}  // namespace treegm
