// config.hpp
// Line-oriented sweep configuration:
//
//   # comment (also allowed after a value)
//   [defaults]            optional; updates defaults for later [task] sections
//   key = value           scalars, or comma-separated lists for variants/seeds
//   [task]                one benchmark task; expands to (variants x task)
//   family = moons        moons | circles | blobs
//
// Recognized keys: family, noise, factor, class_sep, d, n_qubits, depth,
// epochs, batch_size, n_train, n_test, latent_dim, lr_theta, lr_obs, lr_ctrl,
// variants, seeds. Unset values fall back to the benchmark defaults (all 7
// variants, seeds 0-4, depth 2, epochs 40, batch 20, 200/100 split, 4 qubits;
// blobs match qubits to d unless n_qubits is given explicitly).
// Every error is fatal and carries the offending line number.

#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpm/experiment.hpp"
#include "qpm/models.hpp"

namespace qpm {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SweepSpec {
    std::vector<ExperimentConfig> configs;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) {
        ++b;
    }
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) {
        --e;
    }
    return s.substr(b, e - b);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> items;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            items.push_back(item);
        }
    }
    return items;
}

struct ConfigParser {
    std::string source;
    int line_no = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError(source + ":" + std::to_string(line_no) + ": " + msg);
    }

    double parse_double(const std::string& v) const {
        std::size_t used = 0;
        double out = 0;
        try {
            out = std::stod(v, &used);
        } catch (const std::exception&) {
            fail("expected a number, got '" + v + "'");
        }
        if (used != v.size()) {
            fail("trailing characters in number '" + v + "'");
        }
        return out;
    }

    long parse_int(const std::string& v) const {
        std::size_t used = 0;
        long out = 0;
        try {
            out = std::stol(v, &used);
        } catch (const std::exception&) {
            fail("expected an integer, got '" + v + "'");
        }
        if (used != v.size()) {
            fail("trailing characters in integer '" + v + "'");
        }
        return out;
    }

    std::uint64_t parse_seed(const std::string& v) const {
        std::size_t used = 0;
        std::uint64_t out = 0;
        try {
            out = std::stoull(v, &used);
        } catch (const std::exception&) {
            fail("expected a seed (unsigned integer), got '" + v + "'");
        }
        if (used != v.size()) {
            fail("trailing characters in seed '" + v + "'");
        }
        return out;
    }
};

// Everything a [task] or [defaults] section may set.
struct SectionValues {
    ExperimentConfig proto; // task + scalar knobs; variant field unused here
    std::vector<VariantKind> variants{kAllVariants.begin(), kAllVariants.end()};
    bool has_family = false;
    bool n_qubits_explicit = false;
};

inline void apply_key(ConfigParser& p, SectionValues& sec,
                      const std::string& key, const std::string& value) {
    ExperimentConfig& cfg = sec.proto;
    if (key == "family") {
        if (value != "moons" && value != "circles" && value != "blobs") {
            p.fail("unknown family '" + value +
                   "'; expected moons, circles, or blobs");
        }
        cfg.task.family = value;
        sec.has_family = true;
    } else if (key == "noise") {
        cfg.task.noise = p.parse_double(value);
    } else if (key == "factor") {
        cfg.task.factor = p.parse_double(value);
    } else if (key == "class_sep") {
        cfg.task.class_sep = p.parse_double(value);
    } else if (key == "d") {
        cfg.task.d = static_cast<int>(p.parse_int(value));
    } else if (key == "n_qubits") {
        cfg.n_qubits = static_cast<int>(p.parse_int(value));
        sec.n_qubits_explicit = true;
    } else if (key == "depth") {
        cfg.depth = static_cast<int>(p.parse_int(value));
    } else if (key == "epochs") {
        cfg.epochs = static_cast<int>(p.parse_int(value));
    } else if (key == "batch_size") {
        cfg.batch_size = static_cast<int>(p.parse_int(value));
    } else if (key == "n_train") {
        cfg.n_train = static_cast<int>(p.parse_int(value));
    } else if (key == "n_test") {
        cfg.n_test = static_cast<int>(p.parse_int(value));
    } else if (key == "latent_dim") {
        cfg.latent_dim = static_cast<int>(p.parse_int(value));
    } else if (key == "lr_theta") {
        cfg.lr_theta = p.parse_double(value);
    } else if (key == "lr_obs") {
        cfg.lr_obs = p.parse_double(value);
    } else if (key == "lr_ctrl") {
        cfg.lr_ctrl = p.parse_double(value);
    } else if (key == "variants") {
        sec.variants.clear();
        for (const std::string& name : split_list(value)) {
            try {
                sec.variants.push_back(variant_from_name(name));
            } catch (const std::invalid_argument& e) {
                p.fail(e.what());
            }
        }
        if (sec.variants.empty()) {
            p.fail("variants list is empty");
        }
    } else if (key == "seeds") {
        cfg.seeds.clear();
        for (const std::string& s : split_list(value)) {
            cfg.seeds.push_back(p.parse_seed(s));
        }
        if (cfg.seeds.empty()) {
            p.fail("seeds list is empty");
        }
    } else {
        p.fail("unknown key '" + key + "'");
    }
}

} // namespace detail

inline SweepSpec parse_config_text(const std::string& text,
                                   const std::string& source = "<config>") {
    detail::ConfigParser p;
    p.source = source;

    detail::SectionValues defaults;
    detail::SectionValues current = defaults;
    bool in_task = false;
    int task_line = 0;
    SweepSpec spec;

    const auto finish_section = [&]() {
        if (!in_task) {
            defaults = current;
            return;
        }
        if (!current.has_family) {
            p.line_no = task_line;
            p.fail("[task] section is missing 'family'");
        }
        if (current.proto.task.family == "blobs" &&
            !current.n_qubits_explicit) {
            current.proto.n_qubits = current.proto.task.d;
        }
        if (current.proto.task.family != "blobs") {
            current.proto.task.d = 2;
        }
        for (const VariantKind v : current.variants) {
            ExperimentConfig cfg = current.proto;
            cfg.variant = v;
            spec.configs.push_back(cfg);
        }
    };

    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        ++p.line_no;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) {
            raw.erase(hash);
        }
        const std::string line = detail::trim(raw);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                p.fail("unterminated section header");
            }
            finish_section();
            const std::string name =
                detail::trim(line.substr(1, line.size() - 2));
            if (name == "defaults") {
                current = defaults;
                in_task = false;
            } else if (name == "task") {
                current = defaults;
                current.has_family = false;
                in_task = true;
                task_line = p.line_no;
            } else {
                p.fail("unknown section [" + name +
                       "]; expected [defaults] or [task]");
            }
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            p.fail("expected 'key = value'");
        }
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) {
            p.fail("empty key");
        }
        if (value.empty()) {
            p.fail("empty value for key '" + key + "'");
        }
        detail::apply_key(p, current, key, value);
    }
    finish_section();

    for (const ExperimentConfig& cfg : spec.configs) {
        try {
            validate_config(cfg);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(source + ": " + config_id(cfg) + ": " + e.what());
        }
    }
    return spec;
}

inline SweepSpec parse_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

} // namespace qpm
