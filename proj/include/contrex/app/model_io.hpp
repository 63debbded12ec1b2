#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "contrex/attributes.hpp"
#include "contrex/models.hpp"

namespace contrex::app {

/// Where the lesion lives in a planted fixture generator.
struct FixtureInfo {
    std::size_t lesion_axis = 0;
    double full_lesion_coordinate = 0.0;
};

struct StoredGenerator {
    GeneratorModel model;
    std::optional<FixtureInfo> fixture;
};

nlohmann::json generator_to_json(const GeneratorModel& g, const std::optional<FixtureInfo>& fixture = {});
StoredGenerator generator_from_json(const nlohmann::json& doc);

nlohmann::json classifier_to_json(const ClassifierModel& c);
ClassifierModel classifier_from_json(const nlohmann::json& doc);

struct StoredAttributes {
    std::vector<AttributeVector> directions;
    /// Oriented copy of the chosen direction.
    AttributeVector selected;
    double seed_cosine;
};

nlohmann::json attributes_to_json(const StoredAttributes& a);
StoredAttributes attributes_from_json(const nlohmann::json& doc);

struct QueryLatent {
    std::string id;
    Vector latent;
};

/// {"id": ..., "latent": [...]}
nlohmann::json query_to_json(const QueryLatent& q);
QueryLatent query_from_json(const nlohmann::json& doc, const std::string& fallback_id);
/// A single query document, {"queries": [...]}, or a bare array of either
/// query objects or latent arrays.
std::vector<QueryLatent> queries_from_json(const nlohmann::json& doc);
/// {"latents": [[...], ...]} or a bare array of latent arrays.
std::vector<Vector> latents_from_json(const nlohmann::json& doc);

nlohmann::json read_json(const std::filesystem::path& file);
/// Pretty-printed with a trailing newline, written atomically.
void write_json(const std::filesystem::path& file, const nlohmann::json& doc);

}  // namespace contrex::app
