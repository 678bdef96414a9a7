#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "frechet/dataset.hpp"
#include "frechet/forest.hpp"
#include "frechet/simgen.hpp"
#include "frechet/tree.hpp"

namespace frechet::io {

// Long-format CSV: header "obs_id,var_name,time,value", one sample per row.
// The output curve uses the reserved variable name below.
inline constexpr std::string_view output_variable = "__output__";
inline constexpr std::string_view csv_header = "obs_id,var_name,time,value";

struct LoadOptions {
    // Input variable order. Empty: order of first appearance in the file.
    std::vector<std::string> variables;
    bool require_output = true;
};

// Observations are ordered by obs_id (numerically when both ids are
// non-negative integers, lexicographically otherwise); samples by time.
Dataset load_dataset(std::istream& in, const LoadOptions& options = {});
Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& options = {});

// Inputs for prediction: variables named in `variables` are looked up, any of
// them may be missing, unknown names and the output are ignored.
struct ObservationSet {
    std::vector<std::string> obs_ids;
    std::vector<Observation> rows;
};
ObservationSet load_observations(std::istream& in, const std::vector<std::string>& variables);
ObservationSet load_observations(const std::filesystem::path& path, const std::vector<std::string>& variables);

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

bool obs_id_less(const std::string& a, const std::string& b);

void write_dataset(std::ostream& out, const Dataset& data);
void write_truth(std::ostream& out, const Dataset& data, const sim::SimTruth& truth);
void write_curve_rows(std::ostream& out, const std::string& obs_id, const Curve& curve);

nlohmann::json curve_to_json(const Curve& curve);
Curve curve_from_json(const nlohmann::json& doc);
nlohmann::json tree_to_json(const Tree& tree);
Tree tree_from_json(const nlohmann::json& doc);

inline constexpr std::string_view model_format = "frechet-forest";
inline constexpr int model_version = 1;

enum class ModelKind { Tree, Forest };

// A persisted model. A single tree is stored as a forest of one with no bag.
struct Model {
    ModelKind kind = ModelKind::Forest;
    std::vector<std::string> variable_names;
    std::size_t n_train = 0;
    Forest forest;
    // Tree models only.
    std::string select_mode;
    std::size_t selected_step = 0;
};

nlohmann::json model_to_json(const Model& model);
Model model_from_json(const nlohmann::json& doc);
void save_model(const std::filesystem::path& path, const Model& model);
Model load_model(const std::filesystem::path& path);

}  // namespace frechet::io
