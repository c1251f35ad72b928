#include "leakloc/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace leakloc {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string format_iteration_log(const std::vector<IterationRecord>& log) {
    std::string out = "iter,value,cpu_time,n_spikes,inner_iters,k0,c1,c2,slide,merged\n";
    for (const auto& r : log) {
        out += std::to_string(r.iter) + ',' + num(r.value) + ',' + num(r.cpu_time) + ',' +
               std::to_string(r.n_spikes) + ',' + std::to_string(r.inner_iters) + ',' +
               num(r.k0) + ',' + num(r.c1) + ',' + num(r.c2) + ',' +
               std::to_string(r.slide) + ',' + std::to_string(r.merged) + '\n';
    }
    return out;
}

DiracMeasure floored_measure(const DiracMeasure& mu, double floor_rel) {
    double max_rate = 0.0;
    for (const auto& s : mu.spikes) max_rate = std::max(max_rate, s.rate);
    DiracMeasure kept;
    for (const auto& s : mu.spikes)
        if (s.rate >= floor_rel * max_rate && s.rate > 0.0) kept.spikes.push_back(s);
    return kept;
}

std::string format_sources_csv(const DiracMeasure& mu, double floor_rel) {
    std::string out = "x,y,rate\n";
    for (const auto& s : floored_measure(mu, floor_rel).spikes)
        out += num(s.pos.x()) + ',' + num(s.pos.y()) + ',' + num(s.rate) + '\n';
    return out;
}

std::string format_data_csv(const Eigen::MatrixXd& b) {
    std::string out = "beam";
    for (Eigen::Index j = 0; j < b.cols(); ++j) out += ",obs" + std::to_string(j);
    out += '\n';
    for (Eigen::Index i = 0; i < b.rows(); ++i) {
        out += std::to_string(i);
        for (Eigen::Index j = 0; j < b.cols(); ++j) out += ',' + num(b(i, j));
        out += '\n';
    }
    return out;
}

DiracMeasure parse_sources_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "x,y,rate")
        throw IoError("sources csv: expected header 'x,y,rate'");
    DiracMeasure mu;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        double x, y, rate;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &x, &y, &rate) != 3)
            throw IoError("sources csv line " + std::to_string(lineno) + ": expected x,y,rate");
        mu.spikes.push_back({{x, y}, rate});
    }
    return mu;
}

std::string format_snapshot(const StructuredMesh& mesh, const Eigen::VectorXd& field,
                            double t) {
    if (field.size() != mesh.n_nodes())
        throw IoError("snapshot: field size does not match the mesh");
    std::string out = std::to_string(mesh.nx) + ' ' + std::to_string(mesh.ny) + ' ' +
                      num(mesh.Lx) + ' ' + num(mesh.Ly) + ' ' + num(t) + '\n';
    for (int iy = 0; iy < mesh.ny; ++iy) {
        for (int ix = 0; ix < mesh.nx; ++ix) {
            if (ix) out += ' ';
            out += num(field[mesh.node_index(ix, iy)]);
        }
        out += '\n';
    }
    return out;
}

Snapshot parse_snapshot(const std::string& text) {
    std::istringstream in(text);
    Snapshot s;
    if (!(in >> s.nx >> s.ny >> s.Lx >> s.Ly >> s.t))
        throw IoError("snapshot: malformed header");
    if (s.nx < 2 || s.ny < 2) throw IoError("snapshot: bad grid size");
    s.values.resize(static_cast<Eigen::Index>(s.nx) * s.ny);
    for (Eigen::Index i = 0; i < s.values.size(); ++i)
        if (!(in >> s.values[i]))
            throw IoError("snapshot: expected " + std::to_string(s.values.size()) +
                          " nodal values");
    return s;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << content;
    if (!out) throw IoError("short write to '" + path + "'");
}

}  // namespace leakloc
