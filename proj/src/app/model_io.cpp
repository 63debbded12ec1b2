#include "contrex/app/model_io.hpp"

#include <stdexcept>

#include <fmt/format.h>

#include "contrex/app/netpbm.hpp"

namespace contrex::app {

using nlohmann::json;

namespace {

constexpr const char* kGeneratorFormat = "contrex.generator";
constexpr const char* kClassifierFormat = "contrex.classifier";
constexpr const char* kAttributesFormat = "contrex.attributes";

void expect_format(const json& doc, const char* format) {
    if (!doc.is_object() || doc.value("format", std::string{}) != format) {
        throw std::runtime_error(fmt::format("document is not a {} file", format));
    }
}

Vector vector_from(const json& arr) {
    if (!arr.is_array()) throw std::runtime_error("expected an array of numbers");
    return Vector(arr.get<std::vector<double>>());
}

}  // namespace

json generator_to_json(const GeneratorModel& g, const std::optional<FixtureInfo>& fixture) {
    json doc = {
        {"format", kGeneratorFormat},
        {"version", 1},
        {"height", g.shape().height},
        {"width", g.shape().width},
        {"latent_dim", g.latent_dim()},
        {"basis", g.first_layer_weights().storage()},
        {"bias", g.bias().storage()},
    };
    if (fixture) {
        doc["fixture"] = {{"lesion_axis", fixture->lesion_axis},
                          {"full_lesion_coordinate", fixture->full_lesion_coordinate}};
    }
    return doc;
}

StoredGenerator generator_from_json(const json& doc) {
    expect_format(doc, kGeneratorFormat);
    try {
        const Shape shape{doc.at("height").get<std::size_t>(), doc.at("width").get<std::size_t>()};
        const auto d = doc.at("latent_dim").get<std::size_t>();
        Matrix basis(shape.size(), d, doc.at("basis").get<std::vector<double>>());
        StoredGenerator out{GeneratorModel(shape, std::move(basis), vector_from(doc.at("bias"))), std::nullopt};
        if (doc.contains("fixture")) {
            const auto& f = doc.at("fixture");
            out.fixture = FixtureInfo{f.at("lesion_axis").get<std::size_t>(),
                                      f.at("full_lesion_coordinate").get<double>()};
        }
        return out;
    } catch (const json::exception& e) {
        throw std::runtime_error(fmt::format("malformed generator document: {}", e.what()));
    }
}

json classifier_to_json(const ClassifierModel& c) {
    json doc = {
        {"format", kClassifierFormat},
        {"version", 1},
        {"architecture", std::string(to_string(c.architecture()))},
        {"height", c.input_shape().height},
        {"width", c.input_shape().width},
    };
    if (const auto* lp = std::get_if<LogisticParams>(&c.params())) {
        doc["weights"] = lp->weights;
        doc["bias"] = lp->bias;
    } else {
        const auto& mp = std::get<MlpParams>(c.params());
        doc["hidden_width"] = mp.hidden;
        doc["w1"] = mp.w1;
        doc["b1"] = mp.b1;
        doc["w2"] = mp.w2;
        doc["b2"] = mp.b2;
    }
    return doc;
}

ClassifierModel classifier_from_json(const json& doc) {
    expect_format(doc, kClassifierFormat);
    try {
        const Shape shape{doc.at("height").get<std::size_t>(), doc.at("width").get<std::size_t>()};
        const auto arch = architecture_from_string(doc.at("architecture").get<std::string>());
        if (arch == Architecture::logistic) {
            return {shape, LogisticParams{doc.at("weights").get<std::vector<double>>(), doc.at("bias").get<double>()}};
        }
        MlpParams p;
        p.hidden = doc.at("hidden_width").get<std::size_t>();
        p.w1 = doc.at("w1").get<std::vector<double>>();
        p.b1 = doc.at("b1").get<std::vector<double>>();
        p.w2 = doc.at("w2").get<std::vector<double>>();
        p.b2 = doc.at("b2").get<double>();
        return {shape, std::move(p)};
    } catch (const json::exception& e) {
        throw std::runtime_error(fmt::format("malformed classifier document: {}", e.what()));
    }
}

json attributes_to_json(const StoredAttributes& a) {
    json dirs = json::array();
    for (const auto& d : a.directions) {
        dirs.push_back({{"rank", d.rank()},
                        {"eigenvalue", d.eigenvalue()},
                        {"chosen", d.rank() == a.selected.rank()},
                        {"direction", d.direction().storage()}});
    }
    return {
        {"format", kAttributesFormat},
        {"version", 1},
        {"directions", std::move(dirs)},
        {"selected",
         {{"rank", a.selected.rank()},
          {"eigenvalue", a.selected.eigenvalue()},
          {"seed_contrast_cosine", a.seed_cosine},
          {"direction", a.selected.direction().storage()}}},
    };
}

StoredAttributes attributes_from_json(const json& doc) {
    expect_format(doc, kAttributesFormat);
    try {
        std::vector<AttributeVector> dirs;
        for (const auto& d : doc.at("directions")) {
            dirs.emplace_back(vector_from(d.at("direction")), d.at("rank").get<std::size_t>(),
                              d.at("eigenvalue").get<double>());
        }
        const auto& s = doc.at("selected");
        AttributeVector selected(vector_from(s.at("direction")), s.at("rank").get<std::size_t>(),
                                 s.at("eigenvalue").get<double>());
        return {std::move(dirs), std::move(selected), s.at("seed_contrast_cosine").get<double>()};
    } catch (const json::exception& e) {
        throw std::runtime_error(fmt::format("malformed attributes document: {}", e.what()));
    }
}

json query_to_json(const QueryLatent& q) { return {{"id", q.id}, {"latent", q.latent.storage()}}; }

QueryLatent query_from_json(const json& doc, const std::string& fallback_id) {
    try {
        if (doc.is_array()) return {fallback_id, vector_from(doc)};
        return {doc.value("id", fallback_id), vector_from(doc.at("latent"))};
    } catch (const json::exception& e) {
        throw std::runtime_error(fmt::format("malformed query latent: {}", e.what()));
    }
}

std::vector<QueryLatent> queries_from_json(const json& doc) {
    const json* list = &doc;
    if (doc.is_object()) {
        if (!doc.contains("queries")) return {query_from_json(doc, "q000")};
        list = &doc.at("queries");
    }
    if (!list->is_array()) throw std::runtime_error("query set must be an array");
    std::vector<QueryLatent> out;
    for (std::size_t i = 0; i < list->size(); ++i) {
        out.push_back(query_from_json((*list)[i], fmt::format("q{:03}", i)));
    }
    return out;
}

std::vector<Vector> latents_from_json(const json& doc) {
    const json& list = doc.is_object() ? doc.at("latents") : doc;
    if (!list.is_array()) throw std::runtime_error("latent list must be an array");
    std::vector<Vector> out;
    for (const auto& item : list) out.push_back(vector_from(item.is_object() ? item.at("latent") : item));
    return out;
}

json read_json(const std::filesystem::path& file) {
    try {
        return json::parse(read_file(file));
    } catch (const json::parse_error& e) {
        throw std::runtime_error(fmt::format("'{}' is not valid JSON: {}", file.string(), e.what()));
    }
}

void write_json(const std::filesystem::path& file, const json& doc) {
    write_file_atomic(file, doc.dump(2) + "\n");
}

}  // namespace contrex::app
