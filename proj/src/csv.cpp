#include "causalsvm/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "causalsvm/errors.hpp"

namespace causalsvm {

std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (!s.empty() && s.front() == '+') ++begin;
  auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{} || res.ptr != end)
    throw io_error("could not parse number '" + s + "' in " + what);
  return v;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  for (auto& s : out) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
  }
  return out;
}

int parse_pm_one(const std::string& s, const std::string& what) {
  if (s == "1" || s == "+1") return 1;
  if (s == "-1") return -1;
  throw io_error("expected -1 or 1 for " + what + ", got '" + s + "'");
}

struct Header {
  std::vector<int> feature_col;  // column index of f0..f{d-1}
  int group = -1;
  int y_obs = -1;
  int y_t = -1;
  int y_c = -1;
  int ratio = -1;
  std::size_t columns = 0;
};

Header parse_header(const std::string& line, const std::string& path, bool features_only) {
  const auto names = split_line(line);
  Header h;
  h.columns = names.size();
  std::vector<std::pair<int, int>> features;  // (feature index, column)
  for (std::size_t c = 0; c < names.size(); ++c) {
    const std::string& name = names[c];
    const int col = static_cast<int>(c);
    if (name.size() >= 2 && name[0] == 'f' &&
        name.find_first_not_of("0123456789", 1) == std::string::npos) {
      features.emplace_back(std::stoi(name.substr(1)), col);
    } else if (name == "group") {
      h.group = col;
    } else if (name == "y_obs") {
      h.y_obs = col;
    } else if (name == "y_t") {
      h.y_t = col;
    } else if (name == "y_c") {
      h.y_c = col;
    } else if (name == "ratio") {
      h.ratio = col;
    } else if (name.rfind("meta_", 0) == 0) {
      // pass-through, ignored
    } else {
      throw io_error(path + ": unsupported column '" + name + "' in header: " + line);
    }
  }
  if (features.empty()) throw io_error(path + ": no feature columns f0.. in header: " + line);
  std::sort(features.begin(), features.end());
  h.feature_col.resize(features.size());
  for (std::size_t k = 0; k < features.size(); ++k) {
    if (features[k].first != static_cast<int>(k))
      throw io_error(path + ": feature columns must be contiguous f0..f{d-1}");
    h.feature_col[k] = features[k].second;
  }
  if (!features_only) {
    if (h.group < 0 || h.y_obs < 0)
      throw io_error(path + ": dataset CSV needs 'group' and 'y_obs' columns");
  }
  return h;
}

}  // namespace

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw io_error(path + ": empty file");
  const Header h = parse_header(line, path, false);
  const int d = static_cast<int>(h.feature_col.size());

  std::vector<Unit> units;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != h.columns)
      throw io_error(path + ":" + std::to_string(lineno) + ": expected " +
                     std::to_string(h.columns) + " cells, got " + std::to_string(cells.size()));
    Unit u;
    u.x.resize(d);
    const std::string where = path + ":" + std::to_string(lineno);
    for (int k = 0; k < d; ++k)
      u.x[k] = parse_double(cells[static_cast<std::size_t>(h.feature_col[static_cast<std::size_t>(k)])], where);
    const std::string& g = cells[static_cast<std::size_t>(h.group)];
    if (g == "T")
      u.group = Group::Treatment;
    else if (g == "C")
      u.group = Group::Control;
    else
      throw io_error(where + ": group must be T or C, got '" + g + "'");
    u.y_obs = parse_pm_one(cells[static_cast<std::size_t>(h.y_obs)], where + " y_obs");
    if (h.y_t >= 0 && !cells[static_cast<std::size_t>(h.y_t)].empty())
      u.y_t = parse_pm_one(cells[static_cast<std::size_t>(h.y_t)], where + " y_t");
    if (h.y_c >= 0 && !cells[static_cast<std::size_t>(h.y_c)].empty())
      u.y_c = parse_pm_one(cells[static_cast<std::size_t>(h.y_c)], where + " y_c");
    if (h.ratio >= 0 && !cells[static_cast<std::size_t>(h.ratio)].empty())
      u.ratio = parse_double(cells[static_cast<std::size_t>(h.ratio)], where + " ratio");
    units.push_back(std::move(u));
  }
  return make_dataset(std::move(units));
}

void write_dataset_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write " + path);
  bool any_yt = false, any_yc = false, any_ratio = false;
  for (const Unit& u : ds.units) {
    any_yt |= u.y_t.has_value();
    any_yc |= u.y_c.has_value();
    any_ratio |= u.ratio.has_value();
  }
  for (int k = 0; k < ds.dim; ++k) out << "f" << k << ",";
  out << "group,y_obs";
  if (any_yt) out << ",y_t";
  if (any_yc) out << ",y_c";
  if (any_ratio) out << ",ratio";
  out << "\n";
  for (const Unit& u : ds.units) {
    for (int k = 0; k < ds.dim; ++k) out << format_double(u.x[k]) << ",";
    out << (u.group == Group::Treatment ? "T" : "C") << "," << u.y_obs;
    if (any_yt) out << "," << (u.y_t ? std::to_string(*u.y_t) : std::string());
    if (any_yc) out << "," << (u.y_c ? std::to_string(*u.y_c) : std::string());
    if (any_ratio) out << "," << (u.ratio ? format_double(*u.ratio) : std::string());
    out << "\n";
  }
  if (!out) throw io_error("write failed for " + path);
}

Eigen::MatrixXd read_features_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw io_error(path + ": empty file");
  const Header h = parse_header(line, path, true);
  const int d = static_cast<int>(h.feature_col.size());

  std::vector<Eigen::VectorXd> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != h.columns)
      throw io_error(path + ":" + std::to_string(lineno) + ": ragged row");
    Eigen::VectorXd x(d);
    for (int k = 0; k < d; ++k)
      x[k] = parse_double(cells[static_cast<std::size_t>(h.feature_col[static_cast<std::size_t>(k)])],
                          path + ":" + std::to_string(lineno));
    rows.push_back(std::move(x));
  }
  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), d);
  for (std::size_t i = 0; i < rows.size(); ++i) X.row(static_cast<Eigen::Index>(i)) = rows[i];
  return X;
}

}  // namespace causalsvm
