#include "alphacomb/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace alphacomb {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& cell, Index row, Index col) {
  const char* b = cell.data();
  const char* e = b + cell.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  const char* stop = e;
  while (stop > b && (stop[-1] == ' ' || stop[-1] == '\t' || stop[-1] == '\r')) --stop;
  double v = 0.0;
  auto res = std::from_chars(b, stop, v);
  if (res.ec != std::errc{} || res.ptr != stop || !std::isfinite(v)) {
    throw ParseError("malformed numeric cell '" + cell + "' at row " + std::to_string(row) +
                     ", column " + std::to_string(col));
  }
  return v;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  return s;
}

void write_value(std::FILE* f, double v) {
  std::fprintf(f, "%.15g", v);
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_out(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "w"));
  if (!f) throw ParseError("cannot open " + path + " for writing");
  return f;
}

}  // namespace

void ReturnsPanel::validate() const {
  const Index n = n_alphas();
  const Index cols = n_obs();
  if (n < 2) throw ValidationError("panel needs at least 2 alphas");
  if (cols < 3) throw ValidationError("panel needs at least 3 observations");
  if (static_cast<Index>(alpha_ids.size()) != n)
    throw ValidationError("alpha_ids size does not match row count");
  if (static_cast<Index>(time_labels.size()) != cols)
    throw ValidationError("time_labels size does not match column count");
  if (!returns.allFinite()) throw ValidationError("panel contains non-finite returns");
  std::unordered_set<std::string> seen;
  for (const auto& id : alpha_ids) {
    if (!seen.insert(id).second) throw ValidationError("duplicate alpha_id '" + id + "'");
  }
  std::unordered_set<std::string> seen_t;
  for (const auto& t : time_labels) {
    if (!seen_t.insert(t).second) throw ValidationError("duplicate time label '" + t + "'");
  }
  for (Index i = 0; i < n; ++i) {
    const double first = returns(i, 0);
    bool constant = true;
    for (Index s = 1; s < cols; ++s) {
      if (returns(i, s) != first) {
        constant = false;
        break;
      }
    }
    if (constant) {
      throw ValidationError("zero variance: alpha '" + alpha_ids[i] +
                            "' is constant across all observations");
    }
  }
}

void ExpectedReturns::validate(Index n_alphas) const {
  if (values.size() != n_alphas)
    throw ValidationError("expected returns length " + std::to_string(values.size()) +
                          " does not match panel N = " + std::to_string(n_alphas));
  if (!values.allFinite()) throw ValidationError("expected returns contain non-finite values");
}

WeightVector normalize_weights(const Vector& raw) {
  const double total = raw.cwiseAbs().sum();
  if (!(total > 0.0) || !std::isfinite(total))
    throw ValidationError("degenerate expected returns: weight normalization undefined");
  WeightVector w;
  w.eta = 1.0 / total;
  w.weights = raw * w.eta;
  return w;
}

ReturnsPanel load_returns_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  auto header = split_csv_line(line);
  if (header.size() < 4 || trim(header[0]) != "alpha_id")
    throw ParseError(path + ": header must be alpha_id,<t_1>,...,<t_{M+1}> with M+1 >= 3");

  ReturnsPanel panel;
  for (size_t c = 1; c < header.size(); ++c) panel.time_labels.push_back(trim(header[c]));

  std::vector<std::vector<double>> rows;
  Index lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw ParseError(path + ": row " + std::to_string(lineno) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(header.size()));
    panel.alpha_ids.push_back(trim(fields[0]));
    std::vector<double> row(fields.size() - 1);
    for (size_t c = 1; c < fields.size(); ++c)
      row[c - 1] = parse_cell(fields[c], lineno, static_cast<Index>(c));
    rows.push_back(std::move(row));
  }
  panel.returns.resize(static_cast<Index>(rows.size()), static_cast<Index>(header.size()) - 1);
  for (Index i = 0; i < panel.returns.rows(); ++i)
    for (Index s = 0; s < panel.returns.cols(); ++s) panel.returns(i, s) = rows[i][s];
  panel.validate();
  return panel;
}

void save_returns_csv(const ReturnsPanel& panel, const std::string& path) {
  auto f = open_out(path);
  std::fprintf(f.get(), "alpha_id");
  for (const auto& t : panel.time_labels) std::fprintf(f.get(), ",%s", t.c_str());
  std::fprintf(f.get(), "\n");
  for (Index i = 0; i < panel.n_alphas(); ++i) {
    std::fprintf(f.get(), "%s", panel.alpha_ids[i].c_str());
    for (Index s = 0; s < panel.n_obs(); ++s) {
      std::fputc(',', f.get());
      write_value(f.get(), panel.returns(i, s));
    }
    std::fputc('\n', f.get());
  }
}

ExpectedReturns load_expected_csv(const std::string& path, const ReturnsPanel& panel) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  auto header = split_csv_line(line);
  if (header.size() != 2 || trim(header[0]) != "alpha_id")
    throw ParseError(path + ": header must be alpha_id,expected_return");

  std::unordered_map<std::string, double> by_id;
  Index lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 2)
      throw ParseError(path + ": row " + std::to_string(lineno) + " needs 2 fields");
    by_id[trim(fields[0])] = parse_cell(fields[1], lineno, 2);
  }
  ExpectedReturns e;
  e.values.resize(panel.n_alphas());
  for (Index i = 0; i < panel.n_alphas(); ++i) {
    auto it = by_id.find(panel.alpha_ids[i]);
    if (it == by_id.end())
      throw ValidationError(path + ": missing expected return for alpha '" + panel.alpha_ids[i] +
                            "'");
    e.values[i] = it->second;
  }
  e.validate(panel.n_alphas());
  return e;
}

void save_expected_csv(const ExpectedReturns& e, const std::vector<std::string>& alpha_ids,
                       const std::string& path) {
  auto f = open_out(path);
  std::fprintf(f.get(), "alpha_id,expected_return\n");
  for (Index i = 0; i < e.values.size(); ++i) {
    std::fprintf(f.get(), "%s,", alpha_ids[i].c_str());
    write_value(f.get(), e.values[i]);
    std::fputc('\n', f.get());
  }
}

PositionHistory load_positions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  auto header = split_csv_line(line);
  if (header.size() != 4 || trim(header[0]) != "alpha_id")
    throw ParseError(path + ": header must be alpha_id,instrument_id,time,position");

  PositionHistory h;
  std::map<std::string, Index> alphas, instruments, times;
  auto intern = [](std::map<std::string, Index>& m, std::vector<std::string>& names,
                   const std::string& key) {
    auto [it, inserted] = m.emplace(key, static_cast<Index>(names.size()));
    if (inserted) names.push_back(key);
    return it->second;
  };

  Index lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 4)
      throw ParseError(path + ": row " + std::to_string(lineno) + " needs 4 fields");
    PositionHistory::Triplet t;
    t.alpha = intern(alphas, h.alpha_ids, trim(fields[0]));
    t.instrument = intern(instruments, h.instrument_ids, trim(fields[1]));
    t.time = intern(times, h.time_labels, trim(fields[2]));
    t.value = parse_cell(fields[3], lineno, 4);
    h.positions.push_back(t);
  }
  h.n_alphas = static_cast<Index>(h.alpha_ids.size());
  h.n_instruments = static_cast<Index>(h.instrument_ids.size());
  h.n_obs = static_cast<Index>(h.time_labels.size());

  // Per-(alpha, time) slices must have unit absolute sum; rescale when the
  // input sum b differs from 1 and reject effectively flat slices.
  std::map<std::pair<Index, Index>, double> abs_sums;
  for (const auto& t : h.positions) abs_sums[{t.alpha, t.time}] += std::abs(t.value);
  for (const auto& [key, b] : abs_sums) {
    if (b < 1e-6) {
      throw ValidationError("positions: alpha '" + h.alpha_ids[key.first] + "' at time '" +
                            h.time_labels[key.second] +
                            "' is effectively flat (absolute sum < 1e-6)");
    }
    if (std::abs(b - 1.0) > 1e-9) ++h.rescale_warnings;
  }
  for (auto& t : h.positions) {
    const double b = abs_sums[{t.alpha, t.time}];
    if (std::abs(b - 1.0) > 1e-9) t.value /= b;
  }
  return h;
}

void save_weights_csv(const WeightVector& w, const std::vector<std::string>& alpha_ids,
                      const std::string& path) {
  auto f = open_out(path);
  std::fprintf(f.get(), "alpha_id,weight\n");
  for (Index i = 0; i < w.weights.size(); ++i) {
    std::fprintf(f.get(), "%s,", alpha_ids[i].c_str());
    write_value(f.get(), w.weights[i]);
    std::fputc('\n', f.get());
  }
}

}  // namespace alphacomb
