#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "netdyn/sim.hpp"

namespace netdyn {

/// Shortest text that round-trips a double: 17 significant digits.
std::string format_double(double v);

/// "c_m_k" with 1-based opinion m and class k, in extended-state order.
std::vector<std::string> share_columns(int num_opinions, int num_classes);

/// t,c_1_1,...,c_M_K
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, int num_opinions, int num_classes);
/// t,c_1_1,...,c_M_K,std_1_1,...,std_M_K
void write_ensemble_csv(std::ostream& out, const EnsembleStats& stats, int num_opinions, int num_classes);

class CsvError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    /// Index of a column; throws CsvError when absent.
    std::size_t column(const std::string& name) const;
    bool has_column(const std::string& name) const;
    std::vector<double> values(std::size_t col) const;
};

/// Numeric CSV with a header line. Throws CsvError on ragged rows or
/// unparsable cells.
CsvTable read_csv(std::istream& in);

/// One curve source for the chart. Columns named c_* are plotted; when a
/// matching std_* column exists the curve is drawn dashed with a shaded
/// +-std band, otherwise solid.
struct PlotSeries {
    std::string label;
    CsvTable table;
};

/// SVG 1.1 line chart of all share columns against t. Output depends only
/// on the input values. Throws CsvError when the series share no time
/// column or carry no share columns.
std::string render_svg(const std::vector<PlotSeries>& series, const std::string& title = "");

}  // namespace netdyn
