#pragma once

// Command-line front end: subcommand dispatch, sieve cache handling, JSON
// reports with baseline comparison, and CSV/SVG plot data.

#include <iosfwd>
#include <string>
#include <vector>

namespace pcl::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kRegression = 2, kNumerical = 3 };

// Runs one command; reports go to out (or --out), diagnostics to err.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, char** argv);

// Plot data: column 0 is the abscissa.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

void write_csv(const Table& t, std::ostream& os);
// Self-contained SVG line chart, one polyline per non-abscissa column.
std::string svg_lines(const Table& t, const std::string& title, bool log_y = false);
// Writes csv_path and, when non-empty, svg_path. Throws IoError if unwritable.
void emit_plot_data(const Table& t, const std::string& csv_path, const std::string& svg_path,
                    const std::string& title);

// Plot table from a report produced by dispatch (the "plot" member of its
// results); an empty report yields an empty table.
Table table_from_report(const std::string& report_json);

}  // namespace pcl::cli
