#pragma once

#include <string>
#include <vector>

#include "kfp/assumptions.hpp"
#include "kfp/lyapunov.hpp"
#include "kfp/propagator.hpp"
#include "kfp/rates.hpp"
#include "kfp/solver.hpp"

#include <json.hpp>

namespace kfp {

using OrderedJson = nlohmann::ordered_json;

/// Shortest exact decimal form: 17 significant digits, '.' decimal point.
std::string format_double(double v);

/// A CSV table with a fixed header; cells are doubles formatted so that
/// parsing reproduces them bit-exactly.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

std::string to_csv(const CsvTable& table);
CsvTable parse_csv(const std::string& text);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

CsvTable series_csv(const FunctionalSeries& s);
FunctionalSeries series_from_csv(const CsvTable& t);

/// Columns: t, norm, envelope_exp, envelope_poly.
CsvTable propagator_csv(const PropagatorCurve& c, double nu);

/// Columns: case, lambda, c, tau, a, A, B, s, c_pi (case encoded 0..3).
CsvTable rate_csv_row(const RateReport& r);
void append_rate_row(CsvTable& t, const RateReport& r);

OrderedJson to_json(const HypoParams& p);
OrderedJson to_json(const RateReport& r);
OrderedJson to_json(const ConditionCertificate& c);
OrderedJson to_json(const LyapunovSelection& s);
OrderedJson to_json(const SandwichConstants& s);
OrderedJson to_json(const HypoellipticCertificate& c);
OrderedJson to_json(const JordanReport& r);
OrderedJson to_json(const FittedRate& r);
OrderedJson to_json(const HypoSlopes& s);

/// Versioned binary snapshot of a field: magic "KFPH", u32 version, u32 nx,
/// u32 nv, extents (Lx, Lv), time, then nx*nv row-major doubles.
void write_snapshot(const std::string& path, const Field& f);
Field read_snapshot(const std::string& path);

} // namespace kfp
