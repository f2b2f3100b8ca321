// SPDX-License-Identifier: Apache-2.0

#include "nrcba/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "nrcba/rng.hpp"

namespace nrcba {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> fold_and_normalize(const std::vector<double>& raw, int bins) {
    std::vector<double> out(static_cast<size_t>(bins), 0.0);
    const int n = static_cast<int>(raw.size());
    for (int i = 0; i < n; ++i)
        out[static_cast<size_t>(static_cast<long long>(i) * bins / n)] += raw[static_cast<size_t>(i)];
    const double total = std::accumulate(out.begin(), out.end(), 0.0);
    if (total <= 0.0) {
        std::fill(out.begin(), out.end(), 1.0 / bins);
        return out;
    }
    for (double& v : out) v /= total;
    return out;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

IndicatorSchema make_schema(const CodebookConfig& config) {
    IndicatorSchema s;
    s.bitmap_dim = 2 * config.l_beams;
    return s;
}

std::vector<double> angle_power_spectrum(const ChannelRealization& h, const DftBeamGrid& grid,
                                         int bins) {
    const int n_beams = grid.config.n1 * grid.config.n2;
    const int half = n_beams;
    std::vector<double> raw(static_cast<size_t>(n_beams), 0.0);
    for (int x = 0; x < n_beams; ++x) {
        const arma::cx_vec b = grid.beam(grid.config.o1 * (x / grid.config.n2),
                                         grid.config.o2 * (x % grid.config.n2));
        double p = 0.0;
        for (const auto& h_rb : h.per_rb) {
            p += std::pow(arma::norm(h_rb.cols(0, half - 1) * b), 2);
            p += std::pow(arma::norm(h_rb.cols(half, 2 * half - 1) * b), 2);
        }
        raw[static_cast<size_t>(x)] = p;
    }
    return fold_and_normalize(raw, bins);
}

std::vector<double> delay_power_spectrum(const ChannelRealization& h, int bins) {
    const int n_rb = h.n_rb();
    std::vector<double> raw(static_cast<size_t>(n_rb), 0.0);
    for (int i = 0; i < h.n_ue(); ++i)
        for (int j = 0; j < h.n_ports(); ++j)
            for (int k = 0; k < n_rb; ++k) {
                arma::cx_double tap = 0.0;
                for (int n = 0; n < n_rb; ++n)
                    tap += h.per_rb[static_cast<size_t>(n)](static_cast<arma::uword>(i),
                                                            static_cast<arma::uword>(j)) *
                           std::polar(1.0, kTwoPi * n * k / n_rb);
                raw[static_cast<size_t>(k)] += std::norm(tap);
            }
    return fold_and_normalize(raw, bins);
}

double rank_power_ratio(const ChannelRealization& h) {
    const int n_rb = h.n_rb();
    const int n_ue = h.n_ue();
    arma::cx_mat stacked(static_cast<arma::uword>(n_rb * n_ue),
                         static_cast<arma::uword>(h.n_ports()));
    for (int rb = 0; rb < n_rb; ++rb)
        stacked.rows(static_cast<arma::uword>(rb * n_ue),
                     static_cast<arma::uword>((rb + 1) * n_ue - 1)) =
            h.per_rb[static_cast<size_t>(rb)];
    const arma::vec s = arma::svd(stacked);
    if (s.n_elem < 2) return 1.0;
    const double p1 = s(0) * s(0), p2 = s(1) * s(1);
    return p1 + p2 > 0.0 ? p1 / (p1 + p2) : 1.0;
}

std::vector<double> bitmap_density(const ETypeIIPmi& pmi, const CodebookConfig& config) {
    const int rows = 2 * config.l_beams;
    const int m = config.m_bases(pmi.rank);
    std::vector<double> density(static_cast<size_t>(rows), 0.0);
    for (const auto& layer : pmi.layers)
        for (const auto& c : layer.coeffs) density[static_cast<size_t>(c.row)] += 1.0;
    for (double& d : density) d /= static_cast<double>(m) * static_cast<double>(pmi.layers.size());
    return density;
}

IndicatorVector assemble(const ChannelRealization& h, const DftBeamGrid& grid,
                         const CodebookConfig& cb_cfg, const ETypeIIPmi& pmi_type2,
                         const LinkMetrics& link_type1, const LinkMetrics& link_type2,
                         double velocity_mps, double snr_db) {
    const IndicatorSchema schema = make_schema(cb_cfg);
    IndicatorVector x;
    x.values.reserve(static_cast<size_t>(schema.total_dim()));

    const auto aps = angle_power_spectrum(h, grid, schema.aps_bins);
    const auto dps = delay_power_spectrum(h, schema.dps_bins);
    x.values.insert(x.values.end(), aps.begin(), aps.end());
    x.values.insert(x.values.end(), dps.begin(), dps.end());

    x.values.push_back(rank_power_ratio(h));
    x.values.push_back(std::clamp(velocity_mps / 30.0, 0.0, 1.0));
    x.values.push_back(std::clamp((snr_db + 10.0) / 60.0, 0.0, 1.0));
    x.values.push_back(link_type1.cqi / 15.0);
    x.values.push_back(link_type2.cqi / 15.0);

    const auto bitmap = bitmap_density(pmi_type2, cb_cfg);
    if (static_cast<int>(bitmap.size()) != schema.bitmap_dim)
        throw SchemaMismatchError("bitmap density length does not match schema");
    x.values.insert(x.values.end(), bitmap.begin(), bitmap.end());

    if (static_cast<int>(x.values.size()) != schema.total_dim())
        throw SchemaMismatchError("assembled indicator length does not match schema");
    for (double v : x.values)
        if (!std::isfinite(v)) throw SchemaMismatchError("non-finite indicator value");
    return x;
}

void write_dataset_csv(const std::string& path, const std::vector<LabeledSample>& samples,
                       const DatasetMeta& meta) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    char hash[24];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(meta.config_hash));
    out << "# manifest: " << hash << "\n";
    for (int i = 0; i < meta.t_steps * meta.dim; ++i) out << 'f' << i << ',';
    out << "label\n";
    for (const auto& s : samples) {
        if (static_cast<int>(s.sequence.size()) != meta.t_steps)
            throw SchemaMismatchError("sample sequence length does not match metadata");
        for (const auto& step : s.sequence) {
            if (static_cast<int>(step.values.size()) != meta.dim)
                throw SchemaMismatchError("indicator dimension does not match metadata");
            for (double v : step.values) out << format_double(v) << ',';
        }
        out << s.label << "\n";
    }
    if (!out) throw IoError("failed while writing: " + path);
}

std::pair<std::vector<LabeledSample>, DatasetMeta> read_dataset_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    DatasetMeta meta = read_dataset_meta(path + ".json");

    std::string line;
    std::getline(in, line);  // manifest comment
    std::getline(in, line);  // header
    std::vector<LabeledSample> samples;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        LabeledSample s;
        s.sequence.resize(static_cast<size_t>(meta.t_steps));
        const char* p = line.c_str();
        for (int t = 0; t < meta.t_steps; ++t) {
            auto& vals = s.sequence[static_cast<size_t>(t)].values;
            vals.resize(static_cast<size_t>(meta.dim));
            for (int d = 0; d < meta.dim; ++d) {
                char* end = nullptr;
                vals[static_cast<size_t>(d)] = std::strtod(p, &end);
                if (end == p || *end != ',') throw IoError("malformed dataset row in " + path);
                p = end + 1;
            }
        }
        s.label = std::atoi(p);
        samples.push_back(std::move(s));
    }
    if (samples.size() != meta.count) throw SchemaMismatchError("dataset row count != metadata count");
    return {std::move(samples), meta};
}

void write_dataset_meta(const std::string& path, const DatasetMeta& meta) {
    nlohmann::json j{{"schema_version", meta.schema_version},
                     {"t_steps", meta.t_steps},
                     {"dim", meta.dim},
                     {"config_hash", meta.config_hash},
                     {"seed", meta.seed},
                     {"count", meta.count}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
}

DatasetMeta read_dataset_meta(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    nlohmann::json j;
    in >> j;
    DatasetMeta meta;
    meta.schema_version = j.at("schema_version").get<int>();
    meta.t_steps = j.at("t_steps").get<int>();
    meta.dim = j.at("dim").get<int>();
    meta.config_hash = j.at("config_hash").get<uint64_t>();
    meta.seed = j.at("seed").get<uint64_t>();
    meta.count = j.at("count").get<size_t>();
    return meta;
}

}  // namespace nrcba
