#include "hdfl/model.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hdfl/errors.hpp"
#include "hdfl/stats.hpp"

namespace hdfl {

namespace {

nlohmann::json encode_vec(const Vec& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (double x : v) arr.push_back(format_double_exact(x));
    return arr;
}

Vec decode_vec(const nlohmann::json& arr) {
    Vec v;
    v.reserve(arr.size());
    for (const auto& item : arr) v.push_back(parse_double(item.get<std::string>()));
    return v;
}

} // namespace

double decision_value(const Model& model, const Vec& x) {
    return std::visit([&](const auto& m) { return decision_value(m, x); }, model);
}

int predict(const Model& model, const Vec& x) {
    return std::visit([&](const auto& m) { return predict(m, x); }, model);
}

int model_input_dim(const Model& model) {
    if (const auto* linear = std::get_if<LinearModel>(&model)) return static_cast<int>(linear->w.size());
    if (const auto* mlp = std::get_if<MlpModel>(&model)) return mlp->input_dim;
    return std::get<TreeModel>(model).input_dim;
}

std::string model_kind(const Model& model) {
    if (std::holds_alternative<LinearModel>(model)) return "linear";
    if (std::holds_alternative<MlpModel>(model)) return "mlp";
    return "tree";
}

std::string model_to_json(const Model& model) {
    nlohmann::json doc;
    doc["kind"] = model_kind(model);
    if (const auto* linear = std::get_if<LinearModel>(&model)) {
        doc["dim"] = linear->w.size();
        doc["w"] = encode_vec(linear->w);
        doc["b"] = format_double_exact(linear->b);
    } else if (const auto* mlp = std::get_if<MlpModel>(&model)) {
        doc["input_dim"] = mlp->input_dim;
        nlohmann::json layers = nlohmann::json::array();
        for (const MlpLayer& layer : mlp->layers) {
            nlohmann::json l;
            l["rows"] = layer.fan_out();
            l["cols"] = layer.fan_in();
            nlohmann::json rows = nlohmann::json::array();
            for (const Vec& row : layer.weights) rows.push_back(encode_vec(row));
            l["weights"] = rows;
            l["bias"] = encode_vec(layer.bias);
            layers.push_back(std::move(l));
        }
        doc["layers"] = layers;
    } else {
        const TreeModel& tree = std::get<TreeModel>(model);
        doc["input_dim"] = tree.input_dim;
        doc["depth"] = tree.depth;
        nlohmann::json nodes = nlohmann::json::array();
        for (const TreeNode& node : tree.nodes) {
            nlohmann::json n;
            n["feature"] = node.feature;
            n["threshold"] = format_double_exact(node.threshold);
            n["left"] = node.left;
            n["right"] = node.right;
            n["label"] = node.label;
            nodes.push_back(std::move(n));
        }
        doc["nodes"] = nodes;
    }
    return doc.dump();
}

Model model_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("model JSON parse error: ") + e.what());
    }
    try {
        const std::string kind = doc.at("kind").get<std::string>();
        if (kind == "linear") {
            LinearModel model;
            model.w = decode_vec(doc.at("w"));
            model.b = parse_double(doc.at("b").get<std::string>());
            if (model.w.size() != doc.at("dim").get<std::size_t>())
                throw data_error("model JSON: dim does not match w");
            return model;
        }
        if (kind == "mlp") {
            MlpModel model;
            model.input_dim = doc.at("input_dim").get<int>();
            for (const auto& l : doc.at("layers")) {
                MlpLayer layer;
                for (const auto& row : l.at("weights")) layer.weights.push_back(decode_vec(row));
                layer.bias = decode_vec(l.at("bias"));
                if (layer.fan_out() != l.at("rows").get<int>() ||
                    layer.fan_in() != l.at("cols").get<int>() ||
                    layer.bias.size() != layer.weights.size())
                    throw data_error("model JSON: inconsistent layer shape");
                model.layers.push_back(std::move(layer));
            }
            return model;
        }
        if (kind == "tree") {
            TreeModel model;
            model.input_dim = doc.at("input_dim").get<int>();
            model.depth = doc.at("depth").get<int>();
            for (const auto& n : doc.at("nodes")) {
                TreeNode node;
                node.feature = n.at("feature").get<int>();
                node.threshold = parse_double(n.at("threshold").get<std::string>());
                node.left = n.at("left").get<int>();
                node.right = n.at("right").get<int>();
                node.label = n.at("label").get<int>();
                model.nodes.push_back(node);
            }
            return model;
        }
        throw data_error("model JSON: unknown kind: " + kind);
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("model JSON field error: ") + e.what());
    }
}

void save_model(const Model& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot open for writing: " + path);
    out << model_to_json(model) << '\n';
}

Model load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open model file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

} // namespace hdfl
