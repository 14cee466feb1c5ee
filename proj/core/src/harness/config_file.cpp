#include "tschac/harness/config_file.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <toml.hpp>

#include "tschac/error.hpp"

namespace tschac::harness {

namespace {

std::string where(const toml::node& node)
{
    const auto& src = node.source();
    return src.begin.line > 0 ? fmt::format(" (line {})", src.begin.line) : std::string{};
}

/// Typed accessors over one TOML table that remember which keys were read,
/// so anything left over can be reported as unknown.
class Section {
public:
    Section(std::string name, const toml::table* table) : name_(std::move(name)), table_(table) {}

    std::string field(std::string_view key) const { return name_ + "." + std::string(key); }

    const toml::node* find(std::string_view key)
    {
        known_.emplace(key);
        return table_ ? table_->get(key) : nullptr;
    }

    void read(std::string_view key, double& out)
    {
        if (const auto* node = find(key)) out = as_double(*node, field(key));
    }

    template <typename Int>
    void read_uint(std::string_view key, Int& out)
    {
        if (const auto* node = find(key)) {
            const auto v = node->value<std::int64_t>();
            if (!node->is_integer() || !v || *v < 0) {
                throw ConfigError(field(key), "expected a non-negative integer" + where(*node));
            }
            out = static_cast<Int>(*v);
        }
    }

    void read(std::string_view key, std::string& out)
    {
        if (const auto* node = find(key)) {
            if (!node->is_string()) throw ConfigError(field(key), "expected a string" + where(*node));
            out = **node->as_string();
        }
    }

    void reject_unknown(const std::set<std::string>& nested = {}) const
    {
        if (!table_) return;
        for (const auto& [key, node] : *table_) {
            const std::string k(key.str());
            if (!known_.contains(k) && !nested.contains(k)) {
                throw ConfigError(field(k), "unknown key" + where(node));
            }
        }
    }

    static double as_double(const toml::node& node, const std::string& field)
    {
        if (node.is_floating_point()) return **node.as_floating_point();
        if (node.is_integer()) return static_cast<double>(**node.as_integer());
        throw ConfigError(field, "expected a number" + where(node));
    }

private:
    std::string name_;
    const toml::table* table_;
    std::set<std::string> known_;
};

const toml::array& require_array(const toml::node& node, const std::string& field)
{
    if (!node.is_array()) throw ConfigError(field, "expected an array" + where(node));
    return *node.as_array();
}

Vec2 parse_heading(const toml::node& node, const std::string& field)
{
    if (node.is_string()) {
        const std::string h = **node.as_string();
        if (h == "+x") return {1.0, 0.0};
        if (h == "-x") return {-1.0, 0.0};
        if (h == "+y") return {0.0, 1.0};
        if (h == "-y") return {0.0, -1.0};
        throw ConfigError(field, "expected \"+x\", \"-x\", \"+y\", \"-y\" or [hx, hy]" + where(node));
    }
    const auto& arr = require_array(node, field);
    if (arr.size() != 2) throw ConfigError(field, "expected two components" + where(node));
    return {Section::as_double(arr[0], field), Section::as_double(arr[1], field)};
}

NodeSpec parse_node(const toml::table& table, std::size_t index)
{
    Section s("scenario.nodes[" + std::to_string(index) + "]", &table);
    NodeSpec n;
    s.read_uint("id", n.id);
    if (!table.contains("id")) throw ConfigError(s.field("id"), "required");
    n.name = std::to_string(n.id);
    s.read("name", n.name);
    std::string role = "child";
    s.read("role", role);
    if (role == "root") {
        n.role = NodeRole::Root;
    } else if (role == "child") {
        n.role = NodeRole::Child;
    } else {
        throw ConfigError(s.field("role"), "expected \"root\" or \"child\"");
    }
    s.read("x", n.position.x);
    s.read("y", n.position.y);
    if (const auto* h = s.find("heading")) n.heading = parse_heading(*h, s.field("heading"));
    s.read("speed", n.base_speed);
    if (s.find("parent")) {
        NodeId parent = 0;
        s.read_uint("parent", parent);
        n.parent_id = parent;
    }
    s.reject_unknown();
    return n;
}

void parse_scenario(Section& s, SimConfig& c)
{
    s.read("grid_width", c.grid.width);
    s.read("grid_height", c.grid.height);
    s.read("duration", c.duration_s);
    s.read("slot_duration", c.slot_duration_s);
    s.read("motion_tick", c.motion_tick_s);
    s.read("traffic_period", c.traffic_period_s);
    s.read_uint("payload_size", c.payload_size);
    std::string mode;
    s.read("mode", mode);
    if (!mode.empty()) {
        try {
            c.ac_mode = parse_ac_mode(mode);
        } catch (const ConfigError& e) {
            throw ConfigError(s.field("mode"), e.what());
        }
    }
    if (const auto* nodes = s.find("nodes")) {
        const auto& arr = require_array(*nodes, s.field("nodes"));
        c.nodes.clear();
        for (std::size_t i = 0; i < arr.size(); ++i) {
            if (!arr[i].is_table()) throw ConfigError(s.field("nodes"), "expected [[scenario.nodes]] tables");
            c.nodes.push_back(parse_node(*arr[i].as_table(), i));
        }
    }
}

void parse_radio(Section& s, RadioParams& r)
{
    s.read("tx_power", r.tx_power_dbm);
    s.read("pl0", r.pl0_db);
    s.read("d0", r.d0_m);
    s.read("eta", r.eta);
    s.read("shadow_sigma", r.shadow_sigma_db);
    s.read("rssi_50", r.rssi50_dbm);
    s.read("logistic_width", r.logistic_width_db);
    s.read("max_range", r.max_range_m);
    s.read("rssi_floor", r.rssi_floor_dbm);
    s.reject_unknown();
}

void parse_mac(Section& s, MacParams& m)
{
    s.read("eb_period", m.eb_period_s);
    s.read("keepalive_timeout", m.keepalive_timeout_s);
    s.read_uint("max_retries", m.max_retries);
    s.read_uint("queue_capacity", m.queue_capacity);
    if (const auto* fhs = s.find("fhs")) {
        const auto& arr = require_array(*fhs, s.field("fhs"));
        m.fhs.channels.clear();
        for (const auto& ch : arr) {
            const auto v = ch.value<std::int64_t>();
            if (!ch.is_integer() || !v || *v < 0 || *v > 255) {
                throw ConfigError(s.field("fhs"), "expected channel numbers" + where(ch));
            }
            m.fhs.channels.push_back(static_cast<std::uint8_t>(*v));
        }
    }
    s.reject_unknown();
}

void parse_ac(Section& s, AcParams& a)
{
    s.read("alpha", a.alpha);
    s.read("t_min", a.t_min_dbm);
    s.read("t_max", a.t_max_dbm);
    s.read("v_min", a.v_min);
    s.read("v_max", a.v_max);
    s.read("accel", a.accel);
    s.read("decel", a.decel);
    s.read("acr_eval_window", a.acr_eval_window_s);
    s.reject_unknown();
}

void parse_sweep(Section& s, SweepSpec& spec)
{
    if (const auto* modes = s.find("modes")) {
        spec.modes.clear();
        for (const auto& m : require_array(*modes, s.field("modes"))) {
            if (!m.is_string()) throw ConfigError(s.field("modes"), "expected mode names" + where(m));
            try {
                spec.modes.push_back(parse_ac_mode(**m.as_string()));
            } catch (const ConfigError& e) {
                throw ConfigError(s.field("modes"), e.what() + where(m));
            }
        }
    }
    if (const auto* alphas = s.find("alphas")) {
        spec.alphas.clear();
        for (const auto& a : require_array(*alphas, s.field("alphas"))) {
            spec.alphas.push_back(Section::as_double(a, s.field("alphas")));
        }
    }
    if (const auto* pairs = s.find("threshold_pairs")) {
        spec.threshold_pairs.clear();
        for (const auto& p : require_array(*pairs, s.field("threshold_pairs"))) {
            const auto& pair = require_array(p, s.field("threshold_pairs"));
            if (pair.size() != 2) {
                throw ConfigError(s.field("threshold_pairs"), "each pair is [t_min, t_max]" + where(p));
            }
            spec.threshold_pairs.push_back({Section::as_double(pair[0], s.field("threshold_pairs")),
                                            Section::as_double(pair[1], s.field("threshold_pairs"))});
        }
    }
    const auto* seeds = s.find("seeds");
    const auto* count = s.find("seed_count");
    if (seeds && count) throw ConfigError(s.field("seeds"), "give either seeds or seed_count, not both");
    if (seeds) {
        spec.seeds.clear();
        for (const auto& v : require_array(*seeds, s.field("seeds"))) {
            const auto x = v.value<std::int64_t>();
            if (!v.is_integer() || !x || *x < 0) {
                throw ConfigError(s.field("seeds"), "expected non-negative integers" + where(v));
            }
            spec.seeds.push_back(static_cast<std::uint64_t>(*x));
        }
    }
    if (count) {
        std::uint64_t n = 0;
        s.read_uint("seed_count", n);
        spec.seeds.clear();
        for (std::uint64_t i = 0; i < n; ++i) spec.seeds.push_back(i);
    }
    s.reject_unknown();
}

SweepSpec from_table(const toml::table& root)
{
    static const std::set<std::string> sections{"scenario", "radio", "mac", "ac", "sweep"};
    SweepSpec spec = default_sweep();

    // Keys outside any [section] are scenario keys.
    toml::table scenario_keys;
    for (const auto& [key, node] : root) {
        const std::string k(key.str());
        if (sections.contains(k)) {
            if (!node.is_table()) throw ConfigError(k, "expected a [" + k + "] section" + where(node));
            continue;
        }
        scenario_keys.insert(key, node);
    }
    if (const auto* sc = root.get_as<toml::table>("scenario")) {
        for (const auto& [key, node] : *sc) {
            if (scenario_keys.contains(key.str())) {
                throw ConfigError("scenario." + std::string(key.str()), "given both at top level and in [scenario]");
            }
            scenario_keys.insert(key, node);
        }
    }

    Section scenario("scenario", &scenario_keys);
    parse_scenario(scenario, spec.base);
    scenario.reject_unknown();

    Section radio("radio", root.get_as<toml::table>("radio"));
    parse_radio(radio, spec.base.radio);
    Section mac("mac", root.get_as<toml::table>("mac"));
    parse_mac(mac, spec.base.mac);
    Section ac("ac", root.get_as<toml::table>("ac"));
    parse_ac(ac, spec.base.ac);
    Section sweep("sweep", root.get_as<toml::table>("sweep"));
    parse_sweep(sweep, spec);

    spec.validate();
    return spec;
}

std::string num(double v)
{
    // Shortest round-trip representation, always readable as a TOML number.
    return fmt::format("{}", v);
}

std::string heading_text(Vec2 h)
{
    if (h == Vec2{1.0, 0.0}) return "\"+x\"";
    if (h == Vec2{-1.0, 0.0}) return "\"-x\"";
    if (h == Vec2{0.0, 1.0}) return "\"+y\"";
    if (h == Vec2{0.0, -1.0}) return "\"-y\"";
    return "[" + num(h.x) + ", " + num(h.y) + "]";
}

}  // namespace

void SweepSpec::validate() const
{
    base.validate();
    if (modes.empty()) throw ConfigError("sweep.modes", "must not be empty");
    if (alphas.empty()) throw ConfigError("sweep.alphas", "must not be empty");
    if (threshold_pairs.empty()) throw ConfigError("sweep.threshold_pairs", "must not be empty");
    if (seeds.empty()) throw ConfigError("sweep.seeds", "must not be empty");
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (!(alphas[i] > 0.0 && alphas[i] <= 1.0)) {
            throw ConfigError("sweep.alphas[" + std::to_string(i) + "]", "must be in (0, 1]");
        }
    }
    for (std::size_t i = 0; i < threshold_pairs.size(); ++i) {
        if (!(threshold_pairs[i].t_min_dbm < threshold_pairs[i].t_max_dbm)) {
            throw ConfigError("sweep.threshold_pairs[" + std::to_string(i) + "]", "t_min must be < t_max");
        }
    }
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
        throw ConfigError("sweep.seeds", "duplicate seed");
    }
    if (std::set<AcMode>(modes.begin(), modes.end()).size() != modes.size()) {
        throw ConfigError("sweep.modes", "duplicate mode");
    }
}

SweepSpec default_sweep()
{
    SweepSpec spec;
    spec.base = default_config();
    for (std::uint64_t s = 0; s < 20; ++s) spec.seeds.push_back(s);
    return spec;
}

SweepSpec parse_config_text(std::string_view text, std::string_view source_name)
{
    toml::table root;
    try {
        root = toml::parse(text, source_name);
    } catch (const toml::parse_error& e) {
        throw ConfigError("", fmt::format("{}: line {}: {}", source_name, e.source().begin.line, e.description()));
    }
    return from_table(root);
}

SweepSpec parse_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("", "cannot open config file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), path.string());
}

std::string serialize_config(const SweepSpec& spec)
{
    const SimConfig& c = spec.base;
    std::ostringstream out;
    out << "[scenario]\n";
    out << "grid_width = " << num(c.grid.width) << "\n";
    out << "grid_height = " << num(c.grid.height) << "\n";
    out << "duration = " << num(c.duration_s) << "\n";
    out << "slot_duration = " << num(c.slot_duration_s) << "\n";
    out << "motion_tick = " << num(c.motion_tick_s) << "\n";
    out << "traffic_period = " << num(c.traffic_period_s) << "\n";
    out << "payload_size = " << c.payload_size << "\n";
    out << "mode = \"" << to_string(c.ac_mode) << "\"\n";
    for (const auto& n : c.nodes) {
        out << "\n[[scenario.nodes]]\n";
        out << "id = " << n.id << "\n";
        out << "name = \"" << n.name << "\"\n";
        out << "role = \"" << (n.role == NodeRole::Root ? "root" : "child") << "\"\n";
        out << "x = " << num(n.position.x) << "\n";
        out << "y = " << num(n.position.y) << "\n";
        out << "heading = " << heading_text(n.heading) << "\n";
        out << "speed = " << num(n.base_speed) << "\n";
        if (n.parent_id) out << "parent = " << *n.parent_id << "\n";
    }
    const RadioParams& r = c.radio;
    out << "\n[radio]\n";
    out << "tx_power = " << num(r.tx_power_dbm) << "\n";
    out << "pl0 = " << num(r.pl0_db) << "\n";
    out << "d0 = " << num(r.d0_m) << "\n";
    out << "eta = " << num(r.eta) << "\n";
    out << "shadow_sigma = " << num(r.shadow_sigma_db) << "\n";
    out << "rssi_50 = " << num(r.rssi50_dbm) << "\n";
    out << "logistic_width = " << num(r.logistic_width_db) << "\n";
    out << "max_range = " << num(r.max_range_m) << "\n";
    out << "rssi_floor = " << num(r.rssi_floor_dbm) << "\n";
    const MacParams& m = c.mac;
    out << "\n[mac]\n";
    out << "eb_period = " << num(m.eb_period_s) << "\n";
    out << "keepalive_timeout = " << num(m.keepalive_timeout_s) << "\n";
    out << "max_retries = " << m.max_retries << "\n";
    out << "queue_capacity = " << m.queue_capacity << "\n";
    std::vector<int> channels(m.fhs.channels.begin(), m.fhs.channels.end());
    out << "fhs = " << fmt::format("[{}]", fmt::join(channels, ", ")) << "\n";
    const AcParams& a = c.ac;
    out << "\n[ac]\n";
    out << "alpha = " << num(a.alpha) << "\n";
    out << "t_min = " << num(a.t_min_dbm) << "\n";
    out << "t_max = " << num(a.t_max_dbm) << "\n";
    out << "v_min = " << num(a.v_min) << "\n";
    out << "v_max = " << num(a.v_max) << "\n";
    out << "accel = " << num(a.accel) << "\n";
    out << "decel = " << num(a.decel) << "\n";
    out << "acr_eval_window = " << num(a.acr_eval_window_s) << "\n";
    out << "\n[sweep]\n";
    std::vector<std::string> modes;
    for (auto mode : spec.modes) modes.push_back("\"" + std::string(to_string(mode)) + "\"");
    out << "modes = [" << fmt::format("{}", fmt::join(modes, ", ")) << "]\n";
    std::vector<std::string> alphas;
    for (double v : spec.alphas) alphas.push_back(num(v));
    out << "alphas = [" << fmt::format("{}", fmt::join(alphas, ", ")) << "]\n";
    std::vector<std::string> pairs;
    for (const auto& p : spec.threshold_pairs) pairs.push_back("[" + num(p.t_min_dbm) + ", " + num(p.t_max_dbm) + "]");
    out << "threshold_pairs = [" << fmt::format("{}", fmt::join(pairs, ", ")) << "]\n";
    out << "seeds = [" << fmt::format("{}", fmt::join(spec.seeds, ", ")) << "]\n";
    return out.str();
}

}  // namespace tschac::harness
