#pragma once

#include "modmpc/cloop.hpp"
#include "modmpc/moo.hpp"
#include "modmpc/resource.hpp"

#include <string>
#include <vector>

namespace modmpc::io {

/// Shortest round-trip decimal form, locale-independent.
std::string format_double(double x);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// Archive CSV schema: eval_index,h,N,V,eta,rank with rank taken over the
/// whole archive. front_csv keeps the rank-1 rows of the same table.
std::string archive_csv(const moo::Archive& archive);
std::string front_csv(const moo::Archive& archive);

struct ArchiveRow {
  int eval_index = 0;
  double h = 0.0;
  int N = 0;
  double V = 0.0;
  double eta = 0.0;
  int rank = 0;
};
std::vector<ArchiveRow> read_archive_csv(const std::string& path);

/// Trajectory CSV at substep resolution (t, states, held inputs, stage
/// cost) with a trailing comment row carrying the status and the value U.
std::string trajectory_csv(const cloop::Trajectory& traj, double U);

std::string timings_csv(const std::vector<resource::TimingSample>& samples);

}  // namespace modmpc::io
