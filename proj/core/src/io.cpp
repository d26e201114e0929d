#include "kfp/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace kfp {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string to_csv(const CsvTable& table) {
    std::string out;
    for (size_t c = 0; c < table.header.size(); ++c) {
        if (c)
            out += ',';
        out += table.header[c];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (size_t c = 0; c < row.size(); ++c) {
            if (c)
                out += ',';
            out += format_double(row[c]);
        }
        out += '\n';
    }
    return out;
}

CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ','))
            cells.push_back(cell);
        if (first) {
            t.header = cells;
            first = false;
        } else {
            std::vector<double> row;
            for (const auto& c : cells)
                row.push_back(std::strtod(c.c_str(), nullptr));
            t.rows.push_back(std::move(row));
        }
    }
    return t;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write \"" + path + "\"");
    out << text;
    if (!out)
        throw std::runtime_error("write failed for \"" + path + "\"");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read \"" + path + "\"");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CsvTable series_csv(const FunctionalSeries& s) {
    CsvTable t;
    t.header = {"t", "mass", "l2sq", "gradx_sq", "gradv_weighted", "S", "Phi"};
    for (const auto& x : s.samples)
        t.rows.push_back({x.t, x.mass, x.l2sq, x.gradx_sq, x.gradv_weighted, x.S, x.Phi});
    return t;
}

FunctionalSeries series_from_csv(const CsvTable& t) {
    FunctionalSeries s;
    for (const auto& r : t.rows) {
        if (r.size() != 7)
            throw std::runtime_error("series_from_csv: expected 7 columns");
        s.samples.push_back({r[0], r[1], r[2], r[3], r[4], r[5], r[6]});
    }
    return s;
}

CsvTable propagator_csv(const PropagatorCurve& c, double nu) {
    CsvTable t;
    t.header = {"t", "norm", "envelope_exp", "envelope_poly"};
    for (size_t i = 0; i < c.times.size(); ++i) {
        const double tt = c.times[i];
        t.rows.push_back({tt, c.norms[i], std::exp(-0.5 * nu * tt),
                          (1.0 + tt) * std::exp(-0.5 * nu * tt)});
    }
    return t;
}

namespace {

double case_code(RateCase c) {
    switch (c) {
    case RateCase::a: return 0.0;
    case RateCase::b: return 1.0;
    case RateCase::c: return 2.0;
    case RateCase::d: return 3.0;
    default: return -1.0;
    }
}

} // namespace

void append_rate_row(CsvTable& t, const RateReport& r) {
    t.rows.push_back({case_code(r.case_tag), r.lambda, r.params.c, r.params.tau,
                      r.intermediates.a, r.intermediates.A, r.intermediates.B,
                      r.intermediates.s, r.c_pi});
}

CsvTable rate_csv_row(const RateReport& r) {
    CsvTable t;
    t.header = {"case", "lambda", "c", "tau", "a", "A", "B", "s", "c_pi"};
    append_rate_row(t, r);
    return t;
}

OrderedJson to_json(const HypoParams& p) {
    return OrderedJson{{"nu", p.nu}, {"sigma", p.sigma}, {"c", p.c}, {"tau", p.tau}};
}

OrderedJson to_json(const RateReport& r) {
    OrderedJson j;
    j["case"] = to_string(r.case_tag);
    j["ok"] = r.ok;
    if (!r.ok)
        j["message"] = r.message;
    j["lambda"] = r.lambda;
    j["two_lambda"] = r.two_lambda;
    j["c_pi"] = r.c_pi;
    j["alpha0"] = r.alpha0;
    j["params"] = to_json(r.params);
    OrderedJson im;
    im["a"] = r.intermediates.a;
    im["A"] = r.intermediates.A;
    im["B"] = r.intermediates.B;
    im["s"] = r.intermediates.s;
    if (r.intermediates.epsilon_b)
        im["epsilon_b"] = *r.intermediates.epsilon_b;
    j["intermediates"] = im;
    j["sharp"] = r.sharp;
    return j;
}

OrderedJson to_json(const ConditionCertificate& c) {
    OrderedJson j;
    j["condition"] = to_string(c.checked_condition);
    j["passed"] = c.passed;
    j["params"] = to_json(c.params);
    j["box"] = OrderedJson{{"lo", c.box.lo}, {"hi", c.box.hi}};
    j["resolution"] = c.resolution;
    j["worst_point"] = c.worst_point;
    j["worst_min_eig"] = c.worst_min_eig;
    j["tol"] = c.tol;
    return j;
}

OrderedJson to_json(const LyapunovSelection& s) {
    return OrderedJson{{"a", s.a},     {"gamma", s.gamma}, {"delta", s.delta},
                       {"eta", s.eta}, {"mu", s.mu}};
}

OrderedJson to_json(const SandwichConstants& s) {
    return OrderedJson{{"c1", s.c1}, {"c2", s.c2}};
}

OrderedJson to_json(const HypoellipticCertificate& c) {
    return OrderedJson{{"t0", c.t0},
                       {"epsilon", c.epsilon},
                       {"gamma1", c.gamma1},
                       {"gamma2", c.gamma2},
                       {"hessnorm_max", c.hessnorm_max},
                       {"feasible", c.feasible},
                       {"worst_margin", c.worst_margin}};
}

OrderedJson to_json(const JordanReport& r) {
    OrderedJson j;
    j["classification"] = to_string(r.classification);
    j["alpha0"] = r.alpha0;
    j["rate"] = r.rate;
    j["defective"] = r.defective;
    j["jordan_block_size"] = r.jordan_block_size;
    j["alphas"] = r.alphas;
    OrderedJson betas = OrderedJson::array();
    for (const auto& b : r.betas)
        betas.push_back(OrderedJson{{"re", b.real()}, {"im", b.imag()}});
    j["betas"] = betas;
    j["defective_indices"] = r.defective_indices;
    return j;
}

OrderedJson to_json(const FittedRate& r) {
    return OrderedJson{{"rate", r.rate},
                       {"poly_degree", r.poly_degree},
                       {"log_poly_coeff", r.log_poly_coeff}};
}

OrderedJson to_json(const HypoSlopes& s) {
    return OrderedJson{
        {"slope_x", s.slope_x}, {"slope_v", s.slope_v}, {"samples", s.samples}};
}

namespace {
constexpr char kMagic[4] = {'K', 'F', 'P', 'H'};
constexpr uint32_t kVersion = 1;
} // namespace

void write_snapshot(const std::string& path, const Field& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write \"" + path + "\"");
    out.write(kMagic, 4);
    const uint32_t ver = kVersion, nx = f.grid.nx, nv = f.grid.nv;
    out.write(reinterpret_cast<const char*>(&ver), 4);
    out.write(reinterpret_cast<const char*>(&nx), 4);
    out.write(reinterpret_cast<const char*>(&nv), 4);
    const double ext[3] = {f.grid.Lx, f.grid.Lv, f.time};
    out.write(reinterpret_cast<const char*>(ext), sizeof ext);
    out.write(reinterpret_cast<const char*>(f.h.data()),
              static_cast<std::streamsize>(f.h.size() * sizeof(double)));
    if (!out)
        throw std::runtime_error("write failed for \"" + path + "\"");
}

Field read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read \"" + path + "\"");
    char magic[4];
    uint32_t ver = 0, nx = 0, nv = 0;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&ver), 4);
    in.read(reinterpret_cast<char*>(&nx), 4);
    in.read(reinterpret_cast<char*>(&nv), 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("snapshot: bad magic in \"" + path + "\"");
    if (ver != kVersion)
        throw std::runtime_error("snapshot: unsupported version");
    double ext[3];
    in.read(reinterpret_cast<char*>(ext), sizeof ext);
    Field f;
    f.grid.nx = static_cast<int>(nx);
    f.grid.nv = static_cast<int>(nv);
    f.grid.Lx = ext[0];
    f.grid.Lv = ext[1];
    f.grid.dx = 2.0 * f.grid.Lx / f.grid.nx;
    f.grid.dv = 2.0 * f.grid.Lv / f.grid.nv;
    f.time = ext[2];
    f.h.resize(f.grid.cells());
    in.read(reinterpret_cast<char*>(f.h.data()),
            static_cast<std::streamsize>(f.h.size() * sizeof(double)));
    if (!in)
        throw std::runtime_error("snapshot: truncated file \"" + path + "\"");
    return f;
}

} // namespace kfp
