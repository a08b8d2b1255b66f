#include "stratlasso/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "stratlasso/errors.hpp"

namespace stratlasso {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  if (!out.empty() && !out.back().empty() && out.back().back() == '\r')
    out.back().pop_back();
  return out;
}

namespace {

double parse_double(const std::string& s, const std::string& where) {
  double v = 0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw ParseError("bad numeric value '" + s + "' at " + where);
  return v;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

std::vector<FeatureMeta> read_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open schema file: " + path);
  std::vector<FeatureMeta> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3)
      throw ParseError("schema line " + std::to_string(lineno) +
                       " needs name,kind,candidate_flag");
    FeatureMeta f;
    f.name = fields[0];
    const std::string& kind = fields[1];
    if (kind == "continuous") {
      f.kind = FeatureKind::Continuous;
    } else if (kind == "categorical") {
      f.kind = FeatureKind::Categorical;  // levels inferred at ingestion
    } else if (kind.rfind("categorical:", 0) == 0) {
      f.kind = FeatureKind::Categorical;
      f.levels = split_on(kind.substr(12), '|');
      if (f.levels.size() < 2)
        throw ParseError("feature " + f.name + " needs >= 2 levels");
    } else {
      throw ParseError("unknown kind '" + kind + "' for feature " + f.name);
    }
    if (fields[2] == "1" || fields[2] == "true") {
      f.interaction_candidate = true;
    } else if (fields[2] == "0" || fields[2] == "false") {
      f.interaction_candidate = false;
    } else {
      throw ParseError("bad candidate flag '" + fields[2] + "' for " + f.name);
    }
    out.push_back(std::move(f));
  }
  if (out.empty()) throw ParseError("schema file is empty: " + path);
  return out;
}

void write_schema(const std::vector<FeatureMeta>& features, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open for writing: " + path);
  for (const auto& f : features) {
    out << f.name << ',';
    if (f.kind == FeatureKind::Continuous) {
      out << "continuous";
    } else {
      out << "categorical:";
      for (std::size_t i = 0; i < f.levels.size(); ++i) {
        if (i) out << '|';
        out << f.levels[i];
      }
    }
    out << ',' << (f.interaction_candidate ? 1 : 0) << '\n';
  }
}

Dataset read_dataset(const std::string& data_path, const std::string& schema_path,
                     const std::string& outcome_col, const std::string& group_col) {
  auto features = read_schema(schema_path);

  std::ifstream in(data_path);
  if (!in) throw ParseError("cannot open data file: " + data_path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty data file: " + data_path);
  const auto header = split_csv_line(line);

  std::map<std::string, int> col_of;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (!col_of.emplace(header[j], static_cast<int>(j)).second)
      throw ParseError("duplicate column in header: " + header[j]);
  }
  if (!col_of.count(outcome_col))
    throw ParseError("missing outcome column: " + outcome_col);
  if (!col_of.count(group_col)) throw ParseError("missing group column: " + group_col);
  for (const auto& f : features)
    if (!col_of.count(f.name)) throw ParseError("missing feature column: " + f.name);
  if (header.size() != features.size() + 2)
    throw ParseError("data columns do not match schema plus outcome and group");

  const int y_col = col_of[outcome_col];
  const int g_col = col_of[group_col];

  std::vector<std::vector<std::string>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw ParseError("row " + std::to_string(lineno) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(header.size()));
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (fields[j].empty() || fields[j] == "NA")
        throw ParseError("missing cell at row " + std::to_string(lineno) +
                         ", column " + header[j]);
    }
    rows.push_back(std::move(fields));
  }
  if (rows.empty()) throw ParseError("data file has no rows: " + data_path);

  // Infer levels (sorted) for categorical features the schema left open.
  for (auto& f : features) {
    if (f.kind != FeatureKind::Categorical || !f.levels.empty()) continue;
    std::set<std::string> seen;
    const int c = col_of[f.name];
    for (const auto& r : rows) seen.insert(r[static_cast<std::size_t>(c)]);
    f.levels.assign(seen.begin(), seen.end());
    if (f.levels.size() < 2)
      throw ParseError("categorical feature " + f.name + " has < 2 levels in data");
  }

  Dataset ds;
  ds.features = features;
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(features.size());
  ds.X.resize(n, p);
  ds.y.resize(n);
  ds.group.resize(static_cast<std::size_t>(n));

  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    const std::string where_row = "row " + std::to_string(i + 2);
    const std::string& ys = r[static_cast<std::size_t>(y_col)];
    if (ys == "0") {
      ds.y(i) = 0.0;
    } else if (ys == "1") {
      ds.y(i) = 1.0;
    } else {
      throw NonBinaryOutcome("'" + ys + "' at " + where_row);
    }
    ds.group[static_cast<std::size_t>(i)] = r[static_cast<std::size_t>(g_col)];
    for (Eigen::Index j = 0; j < p; ++j) {
      const auto& f = features[static_cast<std::size_t>(j)];
      const std::string& cell = r[static_cast<std::size_t>(col_of[f.name])];
      if (f.kind == FeatureKind::Continuous) {
        ds.X(i, j) = parse_double(cell, where_row + ", " + f.name);
      } else {
        const auto it = std::find(f.levels.begin(), f.levels.end(), cell);
        if (it == f.levels.end())
          throw ParseError("unknown level '" + cell + "' for feature " + f.name +
                           " at " + where_row);
        ds.X(i, j) = static_cast<double>(it - f.levels.begin());
      }
    }
  }
  ds.validate();
  return ds;
}

void write_dataset(const Dataset& dataset, const std::string& data_path,
                   const std::string& outcome_col, const std::string& group_col) {
  std::ofstream out(data_path);
  if (!out) throw ParseError("cannot open for writing: " + data_path);
  out << outcome_col << ',' << group_col;
  for (const auto& f : dataset.features) out << ',' << f.name;
  out << '\n';
  for (Eigen::Index i = 0; i < dataset.n_rows(); ++i) {
    out << static_cast<int>(dataset.y(i)) << ','
        << dataset.group[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < dataset.n_features(); ++j) {
      const auto& f = dataset.features[static_cast<std::size_t>(j)];
      out << ',';
      if (f.kind == FeatureKind::Continuous) {
        out << format_double(dataset.X(i, j));
      } else {
        out << f.levels[static_cast<std::size_t>(dataset.X(i, j))];
      }
    }
    out << '\n';
  }
}

}  // namespace stratlasso
