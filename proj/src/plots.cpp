#include <cstdio>
#include <fstream>
#include <sstream>

#include "starris/errors.hpp"
#include "starris/harness.hpp"

namespace starris {

namespace {

std::string cell(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void write_table(const std::filesystem::path& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "\t" : "") << header[i];
    out << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "\t" : "") << cell(r[i]);
        out << '\n';
    }
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

std::vector<std::filesystem::path> emit_plot_data(
    const std::vector<std::pair<std::string, std::filesystem::path>>& inputs, const std::filesystem::path& out_dir) {
    if (inputs.empty()) throw IoError("plots: no metrics files given");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    std::vector<std::filesystem::path> written;
    std::vector<std::vector<AggregateRow>> all;
    for (const auto& [label, path] : inputs) {
        if (!std::filesystem::exists(path)) throw IoError("plots: missing metrics file " + path.string());
        auto agg = aggregate_runs(read_metrics_csv(path));
        if (agg.empty()) throw IoError("plots: no rows in " + path.string());

        std::vector<std::string> header{"episode"};
        for (std::size_t u = 1; u <= agg.front().user_rates.size(); ++u) header.push_back("ue" + std::to_string(u));
        header.push_back("total_rate");
        std::vector<std::vector<double>> rows;
        for (const auto& a : agg) {
            std::vector<double> r{static_cast<double>(a.episode)};
            r.insert(r.end(), a.user_rates.begin(), a.user_rates.end());
            r.push_back(a.total_rate);
            rows.push_back(std::move(r));
        }
        const auto p = out_dir / ("rates_" + label + ".tsv");
        write_table(p, header, rows);
        written.push_back(p);
        all.push_back(std::move(agg));
    }

    // Episode-aligned comparisons across inputs (e.g. one input per mu).
    std::vector<std::string> header{"episode"};
    for (const auto& in : inputs) header.push_back(in.first);
    const std::size_t rows_n = all.front().size();
    for (const auto& a : all) {
        if (a.size() != rows_n) throw ShapeError("plots: inputs cover different episode counts");
    }
    std::vector<std::vector<double>> active, total;
    for (std::size_t i = 0; i < rows_n; ++i) {
        std::vector<double> ra{static_cast<double>(all.front()[i].episode)};
        std::vector<double> rt = ra;
        for (const auto& a : all) {
            ra.push_back(a[i].active_elements_mean);
            rt.push_back(a[i].total_rate);
        }
        active.push_back(std::move(ra));
        total.push_back(std::move(rt));
    }
    write_table(out_dir / "active_elements.tsv", header, active);
    write_table(out_dir / "total_rate.tsv", header, total);
    written.push_back(out_dir / "active_elements.tsv");
    written.push_back(out_dir / "total_rate.tsv");
    return written;
}

std::pair<std::vector<std::string>, std::vector<std::vector<double>>> read_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::pair<std::vector<std::string>, std::vector<std::vector<double>>> out;
    std::string line;
    if (!std::getline(in, line)) throw IoError(path.string() + " is empty");
    {
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, '\t')) out.first.push_back(c);
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string c;
        std::vector<double> row;
        while (std::getline(ss, c, '\t')) {
            try {
                row.push_back(std::stod(c));
            } catch (const std::logic_error&) {
                throw IoError(path.string() + ": non-numeric cell '" + c + "'");
            }
        }
        if (row.size() != out.first.size()) throw IoError(path.string() + ": ragged row");
        out.second.push_back(std::move(row));
    }
    return out;
}

}  // namespace starris
