#include "oddm/config.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace oddm {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw std::invalid_argument(key + ": not a number: '" + v + "'");
    }
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const std::int64_t x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw std::invalid_argument(key + ": not an integer: '" + v + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument(key + ": not a boolean: '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::string section;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw std::invalid_argument("config: malformed section " + line);
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("config: expected key = value: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        const std::string full = section + "." + key;

        if (section == "grid") {
            if (key == "M") cfg.M = static_cast<int>(parse_int(full, val));
            else if (key == "N") cfg.N = static_cast<int>(parse_int(full, val));
            else if (key == "T0_us") cfg.T0_us = parse_double(full, val);
            else throw std::invalid_argument("config: unknown key " + full);
        } else if (section == "pulse") {
            if (key == "rho") cfg.rho = parse_double(full, val);
            else if (key == "Q") cfg.Q = static_cast<int>(parse_int(full, val));
            else if (key == "oversample") cfg.oversample = static_cast<int>(parse_int(full, val));
            else if (key == "D") cfg.D = (val == "auto") ? kAutoExtension
                                                         : static_cast<int>(parse_int(full, val));
            else throw std::invalid_argument("config: unknown key " + full);
        } else if (section == "channel") {
            if (key == "profile") cfg.profile = val;
            else if (key == "speed_kmh") cfg.speed_kmh = parse_double(full, val);
            else if (key == "fc_ghz") cfg.fc_ghz = parse_double(full, val);
            else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(full, val));
            else if (key == "on_grid") cfg.on_grid = parse_bool(full, val);
            else if (key == "taps") {
                for (const std::string& t : split_list(val)) {
                    std::stringstream ts(t);
                    std::string part;
                    std::vector<std::string> parts;
                    while (std::getline(ts, part, ':')) parts.push_back(part);
                    if (parts.size() != 4)
                        throw std::invalid_argument("channel.taps: expected l:k:re:im, got '" + t + "'");
                    EsddChannel::Path p;
                    p.l = static_cast<int>(parse_int("channel.taps.l", parts[0]));
                    p.k = static_cast<int>(parse_int("channel.taps.k", parts[1]));
                    p.gain = cd{parse_double("channel.taps.re", parts[2]),
                                parse_double("channel.taps.im", parts[3])};
                    cfg.taps.push_back(p);
                }
            } else throw std::invalid_argument("config: unknown key " + full);
        } else if (section == "sim") {
            if (key == "scheme") cfg.scheme = val;
            else if (key == "detector") cfg.detector = val;
            else if (key == "snr_db") {
                cfg.snr_db.clear();
                for (const std::string& s : split_list(val)) cfg.snr_db.push_back(parse_double(full, s));
            } else if (key == "frames") cfg.frames = static_cast<int>(parse_int(full, val));
            else if (key == "mp_iters") cfg.mp.iters = static_cast<int>(parse_int(full, val));
            else if (key == "mp_damping") cfg.mp.damping = parse_double(full, val);
            else if (key == "mp_tol") cfg.mp.tol = parse_double(full, val);
            else throw std::invalid_argument("config: unknown key " + full);
        } else if (section == "output") {
            if (key == "dir") cfg.out_dir = val;
            else throw std::invalid_argument("config: unknown key " + full);
        } else {
            throw std::invalid_argument("config: unknown section [" + section + "]");
        }
    }

    if (cfg.M <= 1) throw std::invalid_argument("grid.M: must be an integer > 1");
    if (cfg.N <= 1) throw std::invalid_argument("grid.N: must be an integer > 1");
    if (!(cfg.T0_us > 0.0)) throw std::invalid_argument("grid.T0_us: must be > 0");
    if (cfg.rho < 0.0 || cfg.rho > 1.0) throw std::invalid_argument("pulse.rho: must lie in [0, 1]");
    if (cfg.Q < 1) throw std::invalid_argument("pulse.Q: must be >= 1");
    if (cfg.oversample < 2) throw std::invalid_argument("pulse.oversample: must be >= 2");
    if (cfg.frames < 1) throw std::invalid_argument("sim.frames: must be >= 1");
    if (cfg.mp.iters < 1) throw std::invalid_argument("sim.mp_iters: must be >= 1");
    if (cfg.mp.damping <= 0.0 || cfg.mp.damping > 1.0)
        throw std::invalid_argument("sim.mp_damping: must lie in (0, 1]");
    if (cfg.profile != "identity" && cfg.profile != "eva" && cfg.profile != "custom")
        throw std::invalid_argument("channel.profile: must be identity, eva or custom");
    if (cfg.profile == "custom" && cfg.taps.empty())
        throw std::invalid_argument("channel.taps: custom profile needs at least one tap");
    if (cfg.speed_kmh < 0.0) throw std::invalid_argument("channel.speed_kmh: must be >= 0");
    if (!(cfg.fc_ghz > 0.0)) throw std::invalid_argument("channel.fc_ghz: must be > 0");
    scheme_from_string(cfg.scheme);      // validates
    detector_from_string(cfg.detector);  // validates
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("config: cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

std::string render_manifest(const ExperimentConfig& cfg,
                            const std::vector<std::pair<std::string, std::string>>& derived) {
    std::ostringstream o;
    o.precision(17);
    o << "# resolved experiment configuration; re-running from this file\n"
         "# reproduces the outputs bit-for-bit\n";
    for (const auto& [k, v] : derived) o << "# derived " << k << " = " << v << "\n";
    o << "[grid]\nM = " << cfg.M << "\nN = " << cfg.N << "\nT0_us = " << cfg.T0_us << "\n";
    o << "[pulse]\nrho = " << cfg.rho << "\nQ = " << cfg.Q
      << "\noversample = " << cfg.oversample << "\nD = ";
    if (cfg.D == kAutoExtension) o << "auto\n";
    else o << cfg.D << "\n";
    o << "[channel]\nprofile = " << cfg.profile << "\nspeed_kmh = " << cfg.speed_kmh
      << "\nfc_ghz = " << cfg.fc_ghz << "\nseed = " << cfg.seed
      << "\non_grid = " << (cfg.on_grid ? "true" : "false") << "\n";
    if (!cfg.taps.empty()) {
        o << "taps = ";
        for (std::size_t i = 0; i < cfg.taps.size(); ++i) {
            const auto& p = cfg.taps[i];
            if (i) o << ", ";
            o << p.l << ':' << p.k << ':' << p.gain.real() << ':' << p.gain.imag();
        }
        o << "\n";
    }
    o << "[sim]\nscheme = " << cfg.scheme << "\ndetector = " << cfg.detector << "\n";
    if (!cfg.snr_db.empty()) {
        o << "snr_db = ";
        for (std::size_t i = 0; i < cfg.snr_db.size(); ++i) {
            if (i) o << ", ";
            o << cfg.snr_db[i];
        }
        o << "\n";
    }
    o << "frames = " << cfg.frames << "\nmp_iters = " << cfg.mp.iters
      << "\nmp_damping = " << cfg.mp.damping << "\nmp_tol = " << cfg.mp.tol << "\n";
    o << "[output]\ndir = " << cfg.out_dir << "\n";
    return o.str();
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
    {
        std::ofstream f(tmp);
        if (!f) throw std::runtime_error("cannot open " + tmp.string());
        f << contents;
    }
    fs::rename(tmp, target);
}

}  // namespace oddm
