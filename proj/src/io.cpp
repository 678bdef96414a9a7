#include "frechet/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "frechet/error.hpp"

namespace frechet::io {

using nlohmann::json;

namespace {

struct Row {
    std::string obs_id;
    std::string var_name;
    double time;
    double value;
};

double parse_double(std::string_view text, std::size_t line) {
    double v = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": bad number '" + std::string(text) + "'");
    }
    return v;
}

std::vector<Row> read_rows(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "empty CSV");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != csv_header) {
        throw Error(ErrorCode::ParseError, "expected header '" + std::string(csv_header) + "', got '" + line + "'");
    }
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::string_view rest(line);
        std::string_view fields[4];
        for (int f = 0; f < 4; ++f) {
            const auto comma = rest.find(',');
            if (f < 3) {
                if (comma == std::string_view::npos) {
                    throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected 4 fields");
                }
                fields[f] = rest.substr(0, comma);
                rest.remove_prefix(comma + 1);
            } else {
                if (comma != std::string_view::npos) {
                    throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": too many fields");
                }
                fields[f] = rest;
            }
        }
        if (fields[0].empty() || fields[1].empty()) {
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": empty identifier");
        }
        rows.push_back({std::string(fields[0]), std::string(fields[1]), parse_double(fields[2], line_no),
                        parse_double(fields[3], line_no)});
    }
    return rows;
}

bool is_unsigned_integer(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

using Samples = std::vector<std::pair<double, double>>;

struct ObsIdLess {
    bool operator()(const std::string& a, const std::string& b) const { return obs_id_less(a, b); }
};

// obs_id -> var_name -> samples.
using Grouped = std::map<std::string, std::map<std::string, Samples>, ObsIdLess>;

Curve to_curve(Samples samples, const std::string& obs, const std::string& var) {
    std::sort(samples.begin(), samples.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t k = 1; k < samples.size(); ++k) {
        if (samples[k].first == samples[k - 1].first) {
            throw Error(ErrorCode::DuplicateSample, "observation '" + obs + "', variable '" + var + "', time " +
                                                        format_double(samples[k].first));
        }
    }
    std::vector<double> times, values;
    times.reserve(samples.size());
    values.reserve(samples.size());
    for (auto [t, v] : samples) {
        times.push_back(t);
        values.push_back(v);
    }
    return Curve(std::move(times), std::move(values));
}

Grouped group_rows(const std::vector<Row>& rows, std::vector<std::string>& first_seen) {
    Grouped grouped;
    for (const auto& r : rows) {
        if (r.var_name != output_variable &&
            std::find(first_seen.begin(), first_seen.end(), r.var_name) == first_seen.end()) {
            first_seen.push_back(r.var_name);
        }
        grouped[r.obs_id][r.var_name].emplace_back(r.time, r.value);
    }
    return grouped;
}

}  // namespace

bool obs_id_less(const std::string& a, const std::string& b) {
    const bool ia = is_unsigned_integer(a);
    const bool ib = is_unsigned_integer(b);
    if (ia && ib) {
        const auto ta = a.substr(std::min(a.find_first_not_of('0'), a.size() - 1));
        const auto tb = b.substr(std::min(b.find_first_not_of('0'), b.size() - 1));
        if (ta.size() != tb.size()) return ta.size() < tb.size();
        if (ta != tb) return ta < tb;
        return a < b;
    }
    if (ia != ib) return ia;
    return a < b;
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

Dataset load_dataset(std::istream& in, const LoadOptions& options) {
    const auto rows = read_rows(in);
    std::vector<std::string> first_seen;
    auto grouped = group_rows(rows, first_seen);
    if (grouped.empty()) throw Error(ErrorCode::EmptyInput, "dataset has no rows");

    Dataset data;
    data.variable_names = options.variables.empty() ? first_seen : options.variables;
    if (data.variable_names.empty()) throw Error(ErrorCode::IncompleteObservation, "no input variables");
    data.inputs.assign(data.variable_names.size(), {});

    for (auto& [obs, vars] : grouped) {
        data.obs_ids.push_back(obs);
        for (std::size_t j = 0; j < data.variable_names.size(); ++j) {
            auto it = vars.find(data.variable_names[j]);
            if (it == vars.end()) {
                throw Error(ErrorCode::IncompleteObservation,
                            "observation '" + obs + "' lacks variable '" + data.variable_names[j] + "'");
            }
            data.inputs[j].push_back(to_curve(std::move(it->second), obs, data.variable_names[j]));
        }
        auto out = vars.find(std::string(output_variable));
        if (out != vars.end()) {
            data.outputs.push_back(to_curve(std::move(out->second), obs, std::string(output_variable)));
        } else if (options.require_output) {
            throw Error(ErrorCode::IncompleteObservation, "observation '" + obs + "' lacks the output curve");
        }
    }
    if (options.require_output) data.validate();
    return data;
}

Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& options) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
    return load_dataset(in, options);
}

ObservationSet load_observations(std::istream& in, const std::vector<std::string>& variables) {
    const auto rows = read_rows(in);
    std::vector<std::string> first_seen;
    auto grouped = group_rows(rows, first_seen);
    ObservationSet set;
    for (auto& [obs, vars] : grouped) {
        Observation x;
        x.inputs.resize(variables.size());
        for (std::size_t j = 0; j < variables.size(); ++j) {
            auto it = vars.find(variables[j]);
            if (it != vars.end()) x.inputs[j] = to_curve(std::move(it->second), obs, variables[j]);
        }
        set.obs_ids.push_back(obs);
        set.rows.push_back(std::move(x));
    }
    return set;
}

ObservationSet load_observations(const std::filesystem::path& path, const std::vector<std::string>& variables) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
    return load_observations(in, variables);
}

namespace {

void write_curve(std::ostream& out, const std::string& obs, std::string_view var, const Curve& curve) {
    for (std::size_t k = 0; k < curve.size(); ++k) {
        out << obs << ',' << var << ',' << format_double(curve.times()[k]) << ','
            << format_double(curve.values()[k]) << '\n';
    }
}

}  // namespace

void write_dataset(std::ostream& out, const Dataset& data) {
    out << csv_header << '\n';
    for (std::size_t i = 0; i < data.n(); ++i) {
        for (std::size_t j = 0; j < data.p(); ++j) write_curve(out, data.obs_ids[i], data.variable_names[j], data.inputs[j][i]);
        write_curve(out, data.obs_ids[i], output_variable, data.outputs[i]);
    }
}

void write_truth(std::ostream& out, const Dataset& data, const sim::SimTruth& truth) {
    out << "obs_id,G1,G2,beta\n";
    for (std::size_t i = 0; i < data.n(); ++i) {
        out << data.obs_ids[i] << ',' << truth.g1[i] << ',' << truth.g2[i] << ',' << format_double(truth.beta[i])
            << '\n';
    }
}

void write_curve_rows(std::ostream& out, const std::string& obs_id, const Curve& curve) {
    for (std::size_t k = 0; k < curve.size(); ++k) {
        out << obs_id << ',' << format_double(curve.times()[k]) << ',' << format_double(curve.values()[k]) << '\n';
    }
}

json curve_to_json(const Curve& curve) {
    return json{{"times", std::vector<double>(curve.times().begin(), curve.times().end())},
                {"values", std::vector<double>(curve.values().begin(), curve.values().end())}};
}

Curve curve_from_json(const json& doc) {
    return Curve(doc.at("times").get<std::vector<double>>(), doc.at("values").get<std::vector<double>>());
}

json tree_to_json(const Tree& tree) {
    json nodes = json::array();
    for (const auto& node : tree.nodes()) {
        json rec{{"obs", node.obs},
                 {"prediction", curve_to_json(node.prediction)},
                 {"prediction_obs", node.prediction_obs},
                 {"variance", node.variance}};
        if (node.is_leaf()) {
            rec["leaf"] = true;
        } else {
            rec["leaf"] = false;
            rec["variable"] = node.variable;
            rec["left"] = node.left;
            rec["right"] = node.right;
            rec["center_left"] = curve_to_json(node.center_left);
            rec["center_right"] = curve_to_json(node.center_right);
            rec["center_left_obs"] = node.center_left_obs;
            rec["center_right_obs"] = node.center_right_obs;
            rec["gain"] = node.gain;
        }
        nodes.push_back(std::move(rec));
    }
    return json{{"nodes", std::move(nodes)}};
}

Tree tree_from_json(const json& doc) {
    std::vector<TreeNode> nodes;
    for (const auto& rec : doc.at("nodes")) {
        TreeNode node;
        node.obs = rec.at("obs").get<std::vector<std::size_t>>();
        node.prediction = curve_from_json(rec.at("prediction"));
        node.prediction_obs = rec.at("prediction_obs").get<std::int64_t>();
        node.variance = rec.at("variance").get<double>();
        if (!rec.at("leaf").get<bool>()) {
            node.variable = rec.at("variable").get<std::int64_t>();
            node.left = rec.at("left").get<std::int64_t>();
            node.right = rec.at("right").get<std::int64_t>();
            node.center_left = curve_from_json(rec.at("center_left"));
            node.center_right = curve_from_json(rec.at("center_right"));
            node.center_left_obs = rec.at("center_left_obs").get<std::int64_t>();
            node.center_right_obs = rec.at("center_right_obs").get<std::int64_t>();
            node.gain = rec.at("gain").get<double>();
            if (node.variable < 0) throw Error(ErrorCode::ParseError, "internal node with negative variable");
        }
        nodes.push_back(std::move(node));
    }
    return Tree(std::move(nodes));
}

namespace {

std::string to_string(PruneMode mode) {
    switch (mode) {
        case PruneMode::None: return "none";
        case PruneMode::Cv: return "cv";
        case PruneMode::Hubert: return "hubert";
    }
    return "none";
}

PruneMode prune_mode_from(const std::string& s) {
    if (s == "none") return PruneMode::None;
    if (s == "cv") return PruneMode::Cv;
    if (s == "hubert") return PruneMode::Hubert;
    throw Error(ErrorCode::ParseError, "unknown prune mode '" + s + "'");
}

}  // namespace

json model_to_json(const Model& model) {
    const auto& f = model.forest;
    json trees = json::array();
    for (const auto& t : f.trees) trees.push_back(tree_to_json(t));
    json doc{{"format", model_format},
             {"version", model_version},
             {"kind", model.kind == ModelKind::Tree ? "tree" : "forest"},
             {"variable_names", model.variable_names},
             {"n_train", model.n_train},
             {"params",
              {{"trees", f.params.trees},
               {"mtry", f.params.mtry},
               {"min_node_size", f.params.min_node_size},
               {"seed", f.params.seed},
               {"prune_mode", to_string(f.params.prune_mode)},
               {"folds", f.params.folds},
               {"purity_epsilon", f.params.purity_epsilon}}},
             {"training_obs", f.training_obs},
             {"bags", f.bags},
             {"trees", std::move(trees)}};
    if (model.kind == ModelKind::Tree) {
        doc["selection"] = {{"mode", model.select_mode}, {"step", model.selected_step}};
    }
    return doc;
}

Model model_from_json(const json& doc) {
    if (doc.value("format", "") != model_format) throw Error(ErrorCode::ParseError, "not a frechet-forest model");
    if (doc.value("version", 0) != model_version) {
        throw Error(ErrorCode::ParseError, "unsupported model version " + doc.at("version").dump());
    }
    Model model;
    const auto kind = doc.at("kind").get<std::string>();
    if (kind != "tree" && kind != "forest") throw Error(ErrorCode::ParseError, "unknown model kind '" + kind + "'");
    model.kind = kind == "tree" ? ModelKind::Tree : ModelKind::Forest;
    model.variable_names = doc.at("variable_names").get<std::vector<std::string>>();
    model.n_train = doc.at("n_train").get<std::size_t>();

    const auto& p = doc.at("params");
    auto& f = model.forest;
    f.params.trees = p.at("trees").get<std::size_t>();
    f.params.mtry = p.at("mtry").get<std::size_t>();
    f.params.min_node_size = p.at("min_node_size").get<std::size_t>();
    f.params.seed = p.at("seed").get<std::uint64_t>();
    f.params.prune_mode = prune_mode_from(p.at("prune_mode").get<std::string>());
    f.params.folds = p.at("folds").get<std::size_t>();
    f.params.purity_epsilon = p.at("purity_epsilon").get<double>();
    f.training_obs = doc.at("training_obs").get<std::vector<std::size_t>>();
    f.bags = doc.at("bags").get<std::vector<std::vector<std::size_t>>>();
    for (const auto& t : doc.at("trees")) f.trees.push_back(tree_from_json(t));
    if (model.kind == ModelKind::Tree) {
        model.select_mode = doc.at("selection").at("mode").get<std::string>();
        model.selected_step = doc.at("selection").at("step").get<std::size_t>();
    }
    return model;
}

void save_model(const std::filesystem::path& path, const Model& model) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path.string());
    out << model_to_json(model).dump() << '\n';
}

Model load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    try {
        return model_from_json(doc);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

}  // namespace frechet::io
