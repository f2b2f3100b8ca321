// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "nrcba/harness.hpp"
#include "nrcba/rng.hpp"

namespace nrcba {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_list(const std::vector<double>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
    return s;
}

std::string scenario_label(ProfileKind kind, double speed_mps, double delay_spread_s) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s_v%lld_ds%lld", to_string(kind).c_str(),
                  std::llround(speed_mps * 3.6), std::llround(delay_spread_s * 1e9));
    return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
    cb.validate();
    util.validate();
    fed.validate();
    if (n_rb < cb.n_subbands) throw ConfigError("n_rb must be >= cb.n_subbands");
    if (n_ue_antennas < 2) throw ConfigError("n_ue_antennas must be >= 2");
    if (carrier_hz <= 0.0) throw ConfigError("carrier_hz must be > 0");
    if (snr_grid_db.empty()) throw ConfigError("snr_grid_db must be non-empty");
    if (speeds_mps.empty() || delay_spreads_s.empty())
        throw ConfigError("speeds_mps and delay_spreads_s must be non-empty");
    for (double d : delay_spreads_s)
        if (d <= 0.0) throw ConfigError("delay spreads must be > 0");
    if (kind_weights.empty()) throw ConfigError("kind_weights must be non-empty");
    double wsum = 0.0;
    for (const auto& [kind, w] : kind_weights) {
        if (w < 0.0) throw ConfigError("kind weights must be >= 0");
        wsum += w;
    }
    if (wsum <= 0.0) throw ConfigError("kind weights must sum to > 0");
    if (csi_period_s <= 0.0 || staleness_s < 0.0) throw ConfigError("invalid timing knobs");
    if (sequence_len < 1) throw ConfigError("sequence_len must be >= 1");
    if (samples_per_ue < 0 || val_samples_per_ue < 0) throw ConfigError("negative sample counts");
    if (eval_seeds < 1) throw ConfigError("eval_seeds must be >= 1");
    if (knn_k < 1) throw ConfigError("knn_k must be >= 1");
    if (ue_scenario_mode != "mixed" && ue_scenario_mode != "partition")
        throw ConfigError("ue_scenario_mode must be 'mixed' or 'partition'");
    if (eval_mode != "natural" && eval_mode != "full")
        throw ConfigError("eval_mode must be 'natural' or 'full'");
}

ExperimentConfig default_config() { return ExperimentConfig{}; }

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
    ExperimentConfig cfg;
    auto as_int = [](const std::string& v, int line) {
        try {
            size_t pos = 0;
            const long long r = std::stoll(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("");
            return static_cast<int>(r);
        } catch (...) {
            throw ConfigError("line " + std::to_string(line) + ": expected integer, got '" + v + "'");
        }
    };
    auto as_u64 = [](const std::string& v, int line) {
        try {
            size_t pos = 0;
            const unsigned long long r = std::stoull(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("");
            return static_cast<uint64_t>(r);
        } catch (...) {
            throw ConfigError("line " + std::to_string(line) + ": expected unsigned integer, got '" + v + "'");
        }
    };
    auto as_double = [](const std::string& v, int line) {
        try {
            size_t pos = 0;
            const double r = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("");
            return r;
        } catch (...) {
            throw ConfigError("line " + std::to_string(line) + ": expected number, got '" + v + "'");
        }
    };
    auto as_double_list = [&](const std::string& v, int line) {
        std::vector<double> out;
        for (const auto& part : split(v, ',')) out.push_back(as_double(part, line));
        if (out.empty()) throw ConfigError("line " + std::to_string(line) + ": empty list");
        return out;
    };

    std::istringstream is(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + " line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "master_seed") { cfg.master_seed = as_u64(value, line_no); cfg.fed.master_seed = cfg.master_seed; }
        else if (key == "n_rb") cfg.n_rb = as_int(value, line_no);
        else if (key == "n_ue_antennas") cfg.n_ue_antennas = as_int(value, line_no);
        else if (key == "carrier_hz") cfg.carrier_hz = as_double(value, line_no);
        else if (key == "snr_grid_db") cfg.snr_grid_db = as_double_list(value, line_no);
        else if (key == "speeds_mps") cfg.speeds_mps = as_double_list(value, line_no);
        else if (key == "delay_spreads_s") cfg.delay_spreads_s = as_double_list(value, line_no);
        else if (key == "kind_weights") {
            cfg.kind_weights.clear();
            for (const auto& part : split(value, ',')) {
                const auto colon = part.find(':');
                if (colon == std::string::npos)
                    throw ConfigError(origin + " line " + std::to_string(line_no) +
                                      ": kind_weights entries are kind:weight");
                try {
                    cfg.kind_weights.emplace_back(profile_kind_from_string(trim(part.substr(0, colon))),
                                                  as_double(trim(part.substr(colon + 1)), line_no));
                } catch (const UnknownKindError& e) {
                    throw ConfigError(origin + " line " + std::to_string(line_no) + ": " + e.what());
                }
            }
        }
        else if (key == "csi_period_s") cfg.csi_period_s = as_double(value, line_no);
        else if (key == "staleness_s") cfg.staleness_s = as_double(value, line_no);
        else if (key == "sequence_len") cfg.sequence_len = as_int(value, line_no);
        else if (key == "samples_per_ue") cfg.samples_per_ue = as_int(value, line_no);
        else if (key == "val_samples_per_ue") cfg.val_samples_per_ue = as_int(value, line_no);
        else if (key == "eval_seeds") cfg.eval_seeds = as_int(value, line_no);
        else if (key == "knn_k") cfg.knn_k = as_int(value, line_no);
        else if (key == "ue_scenario_mode") cfg.ue_scenario_mode = value;
        else if (key == "eval_mode") cfg.eval_mode = value;
        else if (key == "cb.n1") cfg.cb.n1 = as_int(value, line_no);
        else if (key == "cb.n2") cfg.cb.n2 = as_int(value, line_no);
        else if (key == "cb.o1") cfg.cb.o1 = as_int(value, line_no);
        else if (key == "cb.o2") cfg.cb.o2 = as_int(value, line_no);
        else if (key == "cb.l_beams") cfg.cb.l_beams = as_int(value, line_no);
        else if (key == "cb.m_low") cfg.cb.m_bases_low_rank = as_int(value, line_no);
        else if (key == "cb.m_high") cfg.cb.m_bases_high_rank = as_int(value, line_no);
        else if (key == "cb.n_subbands") cfg.cb.n_subbands = as_int(value, line_no);
        else if (key == "cb.max_rank") cfg.cb.max_rank = as_int(value, line_no);
        else if (key == "cb.beta") cfg.cb.beta = as_double(value, line_no);
        else if (key == "lambda") cfg.util.lambda = as_double(value, line_no);
        else if (key == "fed.n_ues") cfg.fed.n_ues = as_int(value, line_no);
        else if (key == "fed.rounds") cfg.fed.rounds = as_int(value, line_no);
        else if (key == "fed.lr") cfg.fed.train.lr = as_double(value, line_no);
        else if (key == "fed.batch") cfg.fed.train.batch = as_int(value, line_no);
        else if (key == "fed.epochs") cfg.fed.train.epochs = as_int(value, line_no);
        else if (key == "rc.size") cfg.fed.reservoir_size = as_int(value, line_no);
        else if (key == "rc.rho") cfg.fed.spectral_radius = as_double(value, line_no);
        else if (key == "rc.leak") cfg.fed.leak = as_double(value, line_no);
        else throw ConfigError(origin + " line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    try {
        cfg.validate();
    } catch (const Error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

std::string canonical_config_text(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << "master_seed = " << cfg.master_seed << "\n";
    os << "n_rb = " << cfg.n_rb << "\n";
    os << "n_ue_antennas = " << cfg.n_ue_antennas << "\n";
    os << "carrier_hz = " << fmt(cfg.carrier_hz) << "\n";
    os << "snr_grid_db = " << fmt_list(cfg.snr_grid_db) << "\n";
    os << "speeds_mps = " << fmt_list(cfg.speeds_mps) << "\n";
    os << "delay_spreads_s = " << fmt_list(cfg.delay_spreads_s) << "\n";
    os << "kind_weights = ";
    for (size_t i = 0; i < cfg.kind_weights.size(); ++i)
        os << (i ? "," : "") << to_string(cfg.kind_weights[i].first) << ":"
           << fmt(cfg.kind_weights[i].second);
    os << "\n";
    os << "csi_period_s = " << fmt(cfg.csi_period_s) << "\n";
    os << "staleness_s = " << fmt(cfg.staleness_s) << "\n";
    os << "sequence_len = " << cfg.sequence_len << "\n";
    os << "samples_per_ue = " << cfg.samples_per_ue << "\n";
    os << "val_samples_per_ue = " << cfg.val_samples_per_ue << "\n";
    os << "eval_seeds = " << cfg.eval_seeds << "\n";
    os << "knn_k = " << cfg.knn_k << "\n";
    os << "ue_scenario_mode = " << cfg.ue_scenario_mode << "\n";
    os << "eval_mode = " << cfg.eval_mode << "\n";
    os << "cb.n1 = " << cfg.cb.n1 << "\n";
    os << "cb.n2 = " << cfg.cb.n2 << "\n";
    os << "cb.o1 = " << cfg.cb.o1 << "\n";
    os << "cb.o2 = " << cfg.cb.o2 << "\n";
    os << "cb.l_beams = " << cfg.cb.l_beams << "\n";
    os << "cb.m_low = " << cfg.cb.m_bases_low_rank << "\n";
    os << "cb.m_high = " << cfg.cb.m_bases_high_rank << "\n";
    os << "cb.n_subbands = " << cfg.cb.n_subbands << "\n";
    os << "cb.max_rank = " << cfg.cb.max_rank << "\n";
    os << "cb.beta = " << fmt(cfg.cb.beta) << "\n";
    os << "lambda = " << fmt(cfg.util.lambda) << "\n";
    os << "fed.n_ues = " << cfg.fed.n_ues << "\n";
    os << "fed.rounds = " << cfg.fed.rounds << "\n";
    os << "fed.lr = " << fmt(cfg.fed.train.lr) << "\n";
    os << "fed.batch = " << cfg.fed.train.batch << "\n";
    os << "fed.epochs = " << cfg.fed.train.epochs << "\n";
    os << "rc.size = " << cfg.fed.reservoir_size << "\n";
    os << "rc.rho = " << fmt(cfg.fed.spectral_radius) << "\n";
    os << "rc.leak = " << fmt(cfg.fed.leak) << "\n";
    return os.str();
}

uint64_t config_hash(const ExperimentConfig& cfg) {
    const std::string text = canonical_config_text(cfg);
    return fnv1a64(text.data(), text.size());
}

uint64_t schema_hash(const ExperimentConfig& cfg) {
    std::ostringstream os;
    const IndicatorSchema schema = make_schema(cfg.cb);
    os << cfg.cb.n1 << "," << cfg.cb.n2 << "," << cfg.cb.o1 << "," << cfg.cb.o2 << ","
       << cfg.cb.l_beams << "," << cfg.cb.m_bases_low_rank << "," << cfg.cb.m_bases_high_rank
       << "," << cfg.cb.n_subbands << "," << cfg.cb.max_rank << "," << fmt(cfg.cb.beta) << ","
       << schema.total_dim() << "," << cfg.sequence_len << "," << cfg.fed.reservoir_size;
    const std::string text = os.str();
    return fnv1a64(text.data(), text.size());
}

std::vector<Scenario> training_scenarios(const ExperimentConfig& cfg) {
    double wsum = 0.0;
    for (const auto& [kind, w] : cfg.kind_weights) wsum += w;
    const double cell_div =
        static_cast<double>(cfg.speeds_mps.size() * cfg.delay_spreads_s.size());
    std::vector<Scenario> out;
    for (const auto& [kind, w] : cfg.kind_weights)
        for (double speed : cfg.speeds_mps)
            for (double ds : cfg.delay_spreads_s) {
                Scenario s;
                s.kind = kind;
                s.speed_mps = speed;
                s.delay_spread_s = ds;
                s.weight = w / wsum / cell_div;
                s.label = scenario_label(kind, speed, ds);
                out.push_back(std::move(s));
            }
    return out;
}

std::vector<Scenario> evaluation_scenarios(const ExperimentConfig& cfg) {
    if (cfg.eval_mode == "full") return training_scenarios(cfg);
    const double short_ds = *std::min_element(cfg.delay_spreads_s.begin(), cfg.delay_spreads_s.end());
    const double long_ds = *std::max_element(cfg.delay_spreads_s.begin(), cfg.delay_spreads_s.end());
    std::vector<Scenario> out;
    for (const auto& [kind, w] : cfg.kind_weights) {
        if (w <= 0.0) continue;
        const double ds = kind == ProfileKind::nlos_long_delay ? long_ds : short_ds;
        for (double speed : cfg.speeds_mps) {
            Scenario s;
            s.kind = kind;
            s.speed_mps = speed;
            s.delay_spread_s = ds;
            s.weight = 1.0;
            s.label = scenario_label(kind, speed, ds);
            out.push_back(std::move(s));
        }
    }
    double wsum = static_cast<double>(out.size());
    for (auto& s : out) s.weight /= wsum;
    return out;
}

std::string to_string(Policy p) {
    switch (p) {
        case Policy::type1: return "type1";
        case Policy::etype2: return "etype2";
        case Policy::adaptive: return "adaptive";
        case Policy::oracle: return "oracle";
    }
    return "?";
}

}  // namespace nrcba
