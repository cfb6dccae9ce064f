#include "distcell/config.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace distcell {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value for " + key + ": '" + v + "'");
    }
}

long parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        long d = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer value for " + key + ": '" + v + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config: bad boolean value for " + key + ": '" + v + "'");
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& v,
                          T (*one)(const std::string&, const std::string&)) {
    std::vector<T> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(one(key, trim(item)));
    if (out.empty()) throw ConfigError("config: empty list for " + key);
    return out;
}

double one_double(const std::string& k, const std::string& v) { return parse_double(k, v); }
int one_int(const std::string& k, const std::string& v) {
    return static_cast<int>(parse_int(k, v));
}

// logical (y,x)/(z,y,x) -> physical {z,y,x}
template <typename T>
std::array<T, 3> to_physical(const std::string& key, const std::vector<T>& v, T fill2d) {
    if (v.size() == 2) return {fill2d, v[0], v[1]};
    if (v.size() == 3) return {v[0], v[1], v[2]};
    throw ConfigError("config: " + key + " must have 2 or 3 components");
}

} // namespace

void apply_config_entry(PipelineConfig& cfg, const std::string& raw_key,
                        const std::string& raw_value) {
    const std::string key = trim(raw_key);
    const std::string value = trim(raw_value);

    using Setter = std::function<void(PipelineConfig&, const std::string&)>;
    static const std::map<std::string, Setter> setters = {
        {"paths.work_dir", [](PipelineConfig& c, const std::string& v) { c.work_dir = v; }},
        {"threads",
         [](PipelineConfig& c, const std::string& v) {
             c.threads = std::max(1, one_int("threads", v));
         }},

        {"synth.extents",
         [](PipelineConfig& c, const std::string& v) {
             c.synth.extents = to_physical("synth.extents",
                                           parse_list<int>("synth.extents", v, one_int), 1);
         }},
        {"synth.frames",
         [](PipelineConfig& c, const std::string& v) { c.synth.frames = one_int("synth.frames", v); }},
        {"synth.n_cells",
         [](PipelineConfig& c, const std::string& v) { c.synth.n_cells = one_int("synth.n_cells", v); }},
        {"synth.radius_min",
         [](PipelineConfig& c, const std::string& v) { c.synth.radius_min = parse_double("synth.radius_min", v); }},
        {"synth.radius_max",
         [](PipelineConfig& c, const std::string& v) { c.synth.radius_max = parse_double("synth.radius_max", v); }},
        {"synth.speed_min",
         [](PipelineConfig& c, const std::string& v) { c.synth.speed_min = parse_double("synth.speed_min", v); }},
        {"synth.speed_max",
         [](PipelineConfig& c, const std::string& v) { c.synth.speed_max = parse_double("synth.speed_max", v); }},
        {"synth.division_prob",
         [](PipelineConfig& c, const std::string& v) { c.synth.division_prob = parse_double("synth.division_prob", v); }},
        {"synth.min_gap",
         [](PipelineConfig& c, const std::string& v) { c.synth.min_gap = parse_double("synth.min_gap", v); }},
        {"synth.noise_std",
         [](PipelineConfig& c, const std::string& v) { c.synth.noise_std = parse_double("synth.noise_std", v); }},
        {"synth.seed",
         [](PipelineConfig& c, const std::string& v) {
             c.synth.seed = static_cast<std::uint64_t>(parse_int("synth.seed", v));
         }},

        {"labelgen.closing_radius",
         [](PipelineConfig& c, const std::string& v) {
             c.labelgen.closing_radius = one_int("labelgen.closing_radius", v);
         }},
        {"labelgen.exponent",
         [](PipelineConfig& c, const std::string& v) {
             c.labelgen.scaling_exponent = one_int("labelgen.exponent", v);
         }},

        {"segment.rho_mask",
         [](PipelineConfig& c, const std::string& v) { c.segment.rho_mask = parse_double("segment.rho_mask", v); }},
        {"segment.rho_seed",
         [](PipelineConfig& c, const std::string& v) { c.segment.rho_seed = parse_double("segment.rho_seed", v); }},
        {"segment.sigma",
         [](PipelineConfig& c, const std::string& v) {
             c.sigma = parse_list<double>("segment.sigma", v, one_double);
             if (c.sigma.size() != 2 && c.sigma.size() != 3)
                 throw ConfigError("config: segment.sigma must have 2 or 3 components");
         }},
        {"segment.neighbor_power",
         [](PipelineConfig& c, const std::string& v) {
             c.segment.neighbor_power = one_int("segment.neighbor_power", v);
         }},
        {"segment.min_seed_area",
         [](PipelineConfig& c, const std::string& v) {
             c.segment.min_seed_area = one_int("segment.min_seed_area", v);
         }},
        {"segment.seed_connectivity",
         [](PipelineConfig& c, const std::string& v) {
             if (v == "face")
                 c.segment.seed_connectivity = Connectivity::Face;
             else if (v == "full")
                 c.segment.seed_connectivity = Connectivity::Full;
             else
                 throw ConfigError("config: segment.seed_connectivity must be face or full");
         }},
        {"segment.split_enabled",
         [](PipelineConfig& c, const std::string& v) {
             c.segment.split_enabled = parse_bool("segment.split_enabled", v);
         }},
        {"segment.split_factor",
         [](PipelineConfig& c, const std::string& v) {
             c.segment.split_factor = parse_double("segment.split_factor", v);
         }},
        {"segment.split_rho_step",
         [](PipelineConfig& c, const std::string& v) {
             c.segment.split_rho_step = parse_double("segment.split_rho_step", v);
         }},

        {"tracking.delta_t",
         [](PipelineConfig& c, const std::string& v) { c.tracking.delta_t = one_int("tracking.delta_t", v); }},
        {"tracking.alpha",
         [](PipelineConfig& c, const std::string& v) { c.tracking.alpha = parse_double("tracking.alpha", v); }},
        {"tracking.beta",
         [](PipelineConfig& c, const std::string& v) { c.tracking.beta = parse_double("tracking.beta", v); }},
        {"tracking.gamma_factor",
         [](PipelineConfig& c, const std::string& v) {
             c.tracking.gamma_factor = parse_double("tracking.gamma_factor", v);
         }},
        {"tracking.roi",
         [](PipelineConfig& c, const std::string& v) {
             c.roi = parse_list<int>("tracking.roi", v, one_int);
             if (c.roi.size() != 2 && c.roi.size() != 3)
                 throw ConfigError("config: tracking.roi must have 2 or 3 components");
         }},
        {"tracking.rho_multiplier",
         [](PipelineConfig& c, const std::string& v) {
             c.tracking.rho_multiplier = parse_double("tracking.rho_multiplier", v);
         }},
        {"tracking.track_all",
         [](PipelineConfig& c, const std::string& v) {
             c.tracking.track_all = parse_bool("tracking.track_all", v);
         }},
    };

    auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("config: unknown key '" + key + "'");
    it->second(cfg, value);
}

PipelineConfig parse_config_file(const std::string& path) {
    if (!std::filesystem::exists(path))
        throw MissingInputError("config file not found: " + path);
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);

    PipelineConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) +
                              " is not a key = value assignment");
        apply_config_entry(cfg, t.substr(0, eq), t.substr(eq + 1));
    }
    return cfg;
}

SegmentationConfig resolve_segmentation(const PipelineConfig& cfg, int ndim) {
    SegmentationConfig out = cfg.segment;
    if (cfg.sigma.empty()) {
        out.sigma = SegmentationConfig::defaults(ndim).sigma;
    } else {
        auto phys = to_physical<double>("segment.sigma", cfg.sigma, 0.0);
        out.sigma = phys;
        if (ndim == 2) out.sigma[0] = 0.0;
    }
    return out;
}

TrackingConfig resolve_tracking(const PipelineConfig& cfg, int ndim) {
    TrackingConfig out = cfg.tracking;
    if (cfg.roi.empty()) {
        out.roi_extent = TrackingConfig::defaults(ndim).roi_extent;
    } else {
        out.roi_extent = to_physical<int>("tracking.roi", cfg.roi, 1);
        if (ndim == 2) out.roi_extent[0] = 1;
    }
    return out;
}

} // namespace distcell
