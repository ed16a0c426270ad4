// Command-line front end: config ingestion, solver dispatch, table and mesh
// output. All commands write records to `out` and diagnostics to `err`, and
// return the process exit code (0 ok, 2 config error, 3 solver error).

#ifndef PENTASING_CLI_HPP
#define PENTASING_CLI_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pentasing/distance.hpp"
#include "pentasing/pentapod.hpp"

namespace pentasing::cli {

struct JobConfig {
    pentapod::Architecture arch;
    pentapod::Configuration pose;
    distance::Mode mode = distance::Mode::general;
    double tol = 1e-10;
    std::uint64_t seed = 0;
    int starts = 5000;
    double box = 0;
    std::string format = "csv";  // csv | json

    // param sampling: explicit t rows win over the low-discrepancy grid
    std::vector<std::array<double, 4>> param_t;
    int param_count = 100;
    double param_range = 10;

    // mesh sampling
    int mesh_grid = 40;
    int mesh_slices = 100;
    double mesh_box = 10;

    std::vector<std::string> warnings;  // schema accepted with normalization
};

// JSON text -> validated config; numbers may be JSON numbers or "p/q" strings.
// Throws config_error on any schema violation.
JobConfig parse_config(const std::string& text);
JobConfig load_config(const std::string& path);

const char* mode_name(distance::Mode mode);
std::optional<distance::Mode> mode_from(const std::string& name);

// Fixed-format float used by every writer: 10 significant digits.
std::string fmt(double x);

int cmd_check(const JobConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_param(const JobConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_dist(const JobConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_mesh(const JobConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace pentasing::cli

#endif
