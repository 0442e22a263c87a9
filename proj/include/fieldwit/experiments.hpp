#pragma once

// Experiment drivers behind the command-line tool. Each takes a resolved JSON
// configuration and returns a table plus a summary object.

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fieldwit/dicke.hpp"
#include "fieldwit/dynamics.hpp"
#include "fieldwit/geometry.hpp"
#include "fieldwit/witness.hpp"

namespace fieldwit {

using Json = nlohmann::json;

/// Invalid configuration: unknown keys, wrong types, out-of-range values.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Subcommand names in the order they are documented.
const std::vector<std::string>& experiment_names();

/// Full default document for a subcommand; every accepted key appears in it.
Json default_config(std::string_view command);

/// Merges `user` into the defaults, rejecting keys the defaults lack and
/// values of the wrong kind. A null default accepts any value.
Json merge_config(const Json& defaults, const Json& user);

/// Applies "a.b.c=value" overrides. The value is parsed as JSON when
/// possible and taken as a string otherwise.
Json apply_overrides(Json config, const std::vector<std::string>& overrides);

/// Defaults, then the user document, then the overrides.
Json resolve_config(std::string_view command, const Json& user, const std::vector<std::string>& overrides);

AtomConfig build_geometry(const Json& config);
std::vector<Direction> build_directions(const Json& config);
/// Exact initial state for the state block (N within the exact cap).
DensityMatrix build_density(const Json& config, int n_atoms);
/// Product-state Bloch angles for the state block (excited, ground, antisym,
/// custom-product).
std::vector<BlochAngles> build_product_angles(const Json& config, int n_atoms);
DickeSpec build_dicke(const Json& config, int n_atoms);

using Cell = std::variant<std::monostate, double, long, std::string>;

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;

    /// Index of a header column; throws std::out_of_range if absent.
    std::size_t column(std::string_view name) const;
};

struct ExperimentResult {
    Table table;
    Json summary;
};

ExperimentResult run_fig1_sphere(const Json& config);
ExperimentResult run_dicke_sweep(const Json& config);
ExperimentResult run_decay(const Json& config);
ExperimentResult run_cumulant_tent(const Json& config);
/// The fuzz report lives in `summary`; the table is empty.
ExperimentResult run_fuzz(const Json& config);

ExperimentResult run_experiment(std::string_view command, const Json& config);

/// Formats with 17 significant digits.
std::string format_double(double v);

/// Config block and summary as '#' comment lines, then the header and rows.
void write_csv(std::ostream& out, const std::string& command, const Json& config, const ExperimentResult& result);

/// Line plot of one column against another as a standalone SVG document.
void write_svg_plot(std::ostream& out, const Table& table, std::string_view x_column, std::string_view y_column,
                    const std::string& title);

/// Per-row colored cells over two grid coordinates (for the sphere scan).
void write_svg_map(std::ostream& out, const Table& table, std::string_view x_column, std::string_view y_column,
                   std::string_view value_column, const std::string& title);

}  // namespace fieldwit
