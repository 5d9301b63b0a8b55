#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "uwloc/channel_model.hpp"
#include "uwloc/network.hpp"
#include "uwloc/selfloc.hpp"
#include "uwloc/sim.hpp"
#include "uwloc/srls.hpp"

namespace uwloc::io {

/// `# key = value` lines written at the top of every output file, after a
/// `# uwloc <version>` banner. Readers skip all `#` lines.
using HeaderEcho = std::vector<std::pair<std::string, std::string>>;

/// Shortest round-trip decimal representation.
std::string format_double(double v);

/// Strict double parse of a whole (trimmed) field.
double parse_double(std::string_view text, const std::filesystem::path& file,
                    std::size_t line_no);

std::map<std::string, std::string> read_key_value_file(
    const std::filesystem::path& path);

void save_channel_model(const ChannelModel& model,
                        const std::filesystem::path& path,
                        const HeaderEcho& header);
ChannelModel load_channel_model(const std::filesystem::path& path);

/// CSV with header `distance_m,gain_db`.
std::vector<GainSample> load_gain_samples(const std::filesystem::path& path);

/// CSV with header `id,x_m,y_m,is_anchor`; radii live in a `<path>.radii`
/// sidecar with keys comm_radius_m and sense_radius_m.
void save_scenario(const Scenario& s, const std::filesystem::path& csv_path,
                   const HeaderEcho& header);
Scenario load_scenario(const std::filesystem::path& csv_path);

/// CSV with header `x_m,y_m`.
std::vector<Position> load_waypoints(const std::filesystem::path& path);

/// CSV with header `x_m,y_m,range_m`, one anchor per row.
srls::SrlsInput load_srls_instance(const std::filesystem::path& path);

/// `iteration,node_id,x_est_m,y_est_m` for every snapshot.
void write_trace_csv(const selfloc::ExperimentTrace& trace,
                     const std::filesystem::path& path,
                     const HeaderEcho& header);

/// `iteration,mae_m,objective`.
void write_summary_csv(const selfloc::ExperimentTrace& trace,
                       const std::filesystem::path& path,
                       const HeaderEcho& header);

/// `loss_prob,iteration,mae_m`.
void write_curves_csv(std::span<const sim::LossCurve> curves,
                      const std::filesystem::path& path,
                      const HeaderEcho& header);

/// `sample,true_x,true_y,est_x,est_y,n_inrange,flagged`; absent estimates are
/// written as nan.
void write_tracking_csv(const sim::TrackingRun& run,
                        const std::filesystem::path& path,
                        const HeaderEcho& header);

}  // namespace uwloc::io
