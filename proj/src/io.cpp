#include "uwloc/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "uwloc/version.hpp"

namespace uwloc::io {

namespace {

std::string_view trim(std::string_view sv) {
  while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t' ||
                         sv.front() == '\r'))
    sv.remove_prefix(1);
  while (!sv.empty() && (sv.back() == ' ' || sv.back() == '\t' ||
                         sv.back() == '\r'))
    sv.remove_suffix(1);
  return sv;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t k = 0; k <= line.size(); ++k) {
    if (k == line.size() || line[k] == ',') {
      out.push_back(trim(line.substr(start, k - start)));
      start = k + 1;
    }
  }
  return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out)
    throw ParseError("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return in;
}

void write_header(std::ofstream& out, const HeaderEcho& header) {
  out << "# uwloc " << kVersion << "\n";
  for (const auto& [k, v] : header) out << "# " << k << " = " << v << "\n";
}

// Non-comment, non-empty lines with their 1-based line numbers.
std::vector<std::pair<std::size_t, std::string>> content_lines(
    const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::vector<std::pair<std::size_t, std::string>> out;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    const std::string_view sv = trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    out.emplace_back(no, std::string(sv));
  }
  return out;
}

// CSV rows after a mandatory exact header row.
std::vector<std::pair<std::size_t, std::vector<std::string>>> read_csv_rows(
    const std::filesystem::path& path, std::string_view expected_header) {
  const auto lines = content_lines(path);
  if (lines.empty())
    throw ParseError(path.string() + ": missing header row '" +
                     std::string(expected_header) + "'");
  if (lines.front().second != expected_header)
    throw ParseError(path.string() + ": line " +
                     std::to_string(lines.front().first) +
                     ": expected header '" + std::string(expected_header) +
                     "', got '" + lines.front().second + "'");
  const std::size_t ncols = split_csv(expected_header).size();
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto fields = split_csv(lines[r].second);
    if (fields.size() != ncols)
      throw ParseError(path.string() + ": line " +
                       std::to_string(lines[r].first) + ": expected " +
                       std::to_string(ncols) + " fields, got " +
                       std::to_string(fields.size()));
    std::vector<std::string> row;
    row.reserve(fields.size());
    for (auto f : fields) row.emplace_back(f);
    rows.emplace_back(lines[r].first, std::move(row));
  }
  return rows;
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view text, const std::filesystem::path& file,
                    std::size_t line_no) {
  const std::string_view sv = trim(text);
  double value = 0.0;
  const auto res = std::from_chars(sv.data(), sv.data() + sv.size(), value);
  if (res.ec != std::errc{} || res.ptr != sv.data() + sv.size())
    throw ParseError(file.string() + ": line " + std::to_string(line_no) +
                     ": bad number '" + std::string(text) + "'");
  return value;
}

std::map<std::string, std::string> read_key_value_file(
    const std::filesystem::path& path) {
  std::map<std::string, std::string> out;
  for (const auto& [no, line] : content_lines(path)) {
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(path.string() + ": line " + std::to_string(no) +
                       ": expected 'key = value'");
    const std::string key{trim(std::string_view(line).substr(0, eq))};
    const std::string val{trim(std::string_view(line).substr(eq + 1))};
    if (key.empty())
      throw ParseError(path.string() + ": line " + std::to_string(no) +
                       ": empty key");
    out[key] = val;
  }
  return out;
}

namespace {

double require_double(const std::map<std::string, std::string>& kv,
                      const std::string& key,
                      const std::filesystem::path& path) {
  const auto it = kv.find(key);
  if (it == kv.end())
    throw ParseError(path.string() + ": missing key '" + key + "'");
  return parse_double(it->second, path, 0);
}

}  // namespace

void save_channel_model(const ChannelModel& model,
                        const std::filesystem::path& path,
                        const HeaderEcho& header) {
  std::ofstream out = open_out(path);
  write_header(out, header);
  out << "slope_a_db_per_m = " << format_double(model.slope_a) << "\n";
  out << "intercept_b_db = " << format_double(model.intercept_b) << "\n";
  out << "noise_var_db2 = " << format_double(model.noise_var) << "\n";
}

ChannelModel load_channel_model(const std::filesystem::path& path) {
  const auto kv = read_key_value_file(path);
  ChannelModel model;
  model.slope_a = require_double(kv, "slope_a_db_per_m", path);
  model.intercept_b = require_double(kv, "intercept_b_db", path);
  model.noise_var = require_double(kv, "noise_var_db2", path);
  if (model.noise_var < 0.0)
    throw ParseError(path.string() + ": negative noise variance");
  if (model.slope_a == 0.0)
    throw ParseError(path.string() + ": zero slope is not invertible");
  return model;
}

std::vector<GainSample> load_gain_samples(const std::filesystem::path& path) {
  std::vector<GainSample> out;
  for (const auto& [no, row] : read_csv_rows(path, "distance_m,gain_db")) {
    GainSample s;
    s.distance_m = parse_double(row[0], path, no);
    s.gain_db = parse_double(row[1], path, no);
    if (!(s.distance_m > 0.0))
      throw ParseError(path.string() + ": line " + std::to_string(no) +
                       ": distance must be positive");
    out.push_back(s);
  }
  return out;
}

void save_scenario(const Scenario& s, const std::filesystem::path& csv_path,
                   const HeaderEcho& header) {
  {
    std::ofstream out = open_out(csv_path);
    write_header(out, header);
    out << "id,x_m,y_m,is_anchor\n";
    for (NodeId i = 0; i < s.size(); ++i)
      out << i << ',' << format_double(s.positions[i].x) << ','
          << format_double(s.positions[i].y) << ',' << (s.is_anchor(i) ? 1 : 0)
          << "\n";
  }
  std::filesystem::path radii_path = csv_path;
  radii_path += ".radii";
  std::ofstream out = open_out(radii_path);
  write_header(out, header);
  out << "comm_radius_m = " << format_double(s.comm_radius) << "\n";
  out << "sense_radius_m = " << format_double(s.sense_radius) << "\n";
}

Scenario load_scenario(const std::filesystem::path& csv_path) {
  Scenario s;
  for (const auto& [no, row] : read_csv_rows(csv_path, "id,x_m,y_m,is_anchor")) {
    const double id = parse_double(row[0], csv_path, no);
    if (id != static_cast<double>(s.positions.size()))
      throw ParseError(csv_path.string() + ": line " + std::to_string(no) +
                       ": node ids must be dense and ascending from 0");
    s.positions.push_back(
        {parse_double(row[1], csv_path, no), parse_double(row[2], csv_path, no)});
    const double anchor = parse_double(row[3], csv_path, no);
    if (anchor != 0.0 && anchor != 1.0)
      throw ParseError(csv_path.string() + ": line " + std::to_string(no) +
                       ": is_anchor must be 0 or 1");
    s.anchor_mask.push_back(anchor == 1.0 ? 1 : 0);
  }
  if (s.positions.empty())
    throw ParseError(csv_path.string() + ": empty scenario");

  std::filesystem::path radii_path = csv_path;
  radii_path += ".radii";
  const auto kv = read_key_value_file(radii_path);
  s.comm_radius = require_double(kv, "comm_radius_m", radii_path);
  s.sense_radius = require_double(kv, "sense_radius_m", radii_path);
  if (!(s.comm_radius > 0.0) || !(s.sense_radius > 0.0))
    throw ParseError(radii_path.string() + ": radii must be positive");
  return s;
}

std::vector<Position> load_waypoints(const std::filesystem::path& path) {
  std::vector<Position> out;
  for (const auto& [no, row] : read_csv_rows(path, "x_m,y_m"))
    out.push_back({parse_double(row[0], path, no), parse_double(row[1], path, no)});
  return out;
}

srls::SrlsInput load_srls_instance(const std::filesystem::path& path) {
  srls::SrlsInput input;
  for (const auto& [no, row] : read_csv_rows(path, "x_m,y_m,range_m")) {
    input.anchors.push_back(
        {parse_double(row[0], path, no), parse_double(row[1], path, no)});
    input.ranges.push_back(parse_double(row[2], path, no));
  }
  return input;
}

void write_trace_csv(const selfloc::ExperimentTrace& trace,
                     const std::filesystem::path& path,
                     const HeaderEcho& header) {
  std::ofstream out = open_out(path);
  write_header(out, header);
  out << "iteration,node_id,x_est_m,y_est_m\n";
  for (std::size_t it = 0; it < trace.snapshots.size(); ++it)
    for (std::size_t i = 0; i < trace.snapshots[it].size(); ++i)
      out << it << ',' << i << ','
          << format_double(trace.snapshots[it][i].x) << ','
          << format_double(trace.snapshots[it][i].y) << "\n";
}

void write_summary_csv(const selfloc::ExperimentTrace& trace,
                       const std::filesystem::path& path,
                       const HeaderEcho& header) {
  std::ofstream out = open_out(path);
  write_header(out, header);
  out << "iteration,mae_m,objective\n";
  for (std::size_t it = 0; it < trace.mae.size(); ++it)
    out << it << ',' << format_double(trace.mae[it]) << ','
        << format_double(trace.objective[it]) << "\n";
}

void write_curves_csv(std::span<const sim::LossCurve> curves,
                      const std::filesystem::path& path,
                      const HeaderEcho& header) {
  std::ofstream out = open_out(path);
  write_header(out, header);
  out << "loss_prob,iteration,mae_m\n";
  for (const sim::LossCurve& c : curves)
    for (std::size_t it = 0; it < c.mean_mae.size(); ++it)
      out << format_double(c.loss_prob) << ',' << it << ','
          << format_double(c.mean_mae[it]) << "\n";
}

void write_tracking_csv(const sim::TrackingRun& run,
                        const std::filesystem::path& path,
                        const HeaderEcho& header) {
  std::ofstream out = open_out(path);
  write_header(out, header);
  out << "sample,true_x,true_y,est_x,est_y,n_inrange,flagged\n";
  const double nan = std::nan("");
  for (std::size_t k = 0; k < run.samples.size(); ++k) {
    const sim::TrackingSample& s = run.samples[k];
    const Position est = s.estimate.value_or(Position{nan, nan});
    out << k << ',' << format_double(s.truth.x) << ','
        << format_double(s.truth.y) << ',' << format_double(est.x) << ','
        << format_double(est.y) << ',' << s.n_inrange << ','
        << (s.flagged ? 1 : 0) << "\n";
  }
}

}  // namespace uwloc::io
