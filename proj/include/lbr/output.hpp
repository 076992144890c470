#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>

#include "lbr/maxstable.hpp"
#include "lbr/paths.hpp"

namespace lbr {

// Provenance written as the first line of every CSV ("# ...") and as an SVG comment.
struct RunHeader {
  std::string command;
  std::string config;  // config_summary text
  std::uint64_t seed = 0;
  std::string extra;   // free-form, e.g. "a=12 bound=3e-5"
  std::string line() const;
};

// Columns t,value,path_id; one block per path.
void write_paths_csv(std::ostream& out, const RunHeader& header, std::span<const SampledPath> paths);
// Columns t,eta,argmax_id.
void write_field_csv(std::ostream& out, const RunHeader& header, const MaxStableField& field);
// Columns replica,t,value for a set of normalized maxima on a common grid.
void write_replicas_csv(std::ostream& out, const RunHeader& header, std::span<const SampledPath> paths);

// eta as a step plot coloured by the argmax particle; retained particle
// trajectories (if any) are drawn faintly underneath.
void write_field_svg(std::ostream& out, const RunHeader& header, const MaxStableField& field);

}  // namespace lbr
