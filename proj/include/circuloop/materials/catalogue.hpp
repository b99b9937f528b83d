#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace circuloop::materials {

struct Material {
    std::string material_id;
    std::string name;
    std::string category;  // free taxonomy: board, textile, finish, ...
    bool recyclable = false;
    std::optional<std::string> certified;  // certification label
    double embodied_carbon_per_kg = 0.0;
    std::int64_t reusable_cycles = 0;
    std::string fire_rating;
    std::string guidance;
    std::vector<std::string> tags;

    bool operator==(const Material&) const = default;
};

/// Hard constraints filter; terms and bonuses rank.
struct MaterialQuery {
    std::vector<std::string> terms;
    std::optional<std::string> category;
    std::optional<bool> recyclable;
    std::optional<bool> certified;
    std::optional<double> max_carbon_per_kg;
    std::optional<std::int64_t> min_reusable_cycles;
    std::optional<std::string> fire_rating;

    bool empty() const;
    std::size_t constraint_count() const;
};

/// score = term * matched_terms + constraint * satisfied_constraints
///       + recyclable_bonus [recyclable] + certified_bonus [certified]
///       + low_carbon_bonus [carbon <= low_carbon_threshold]
struct ScoringWeights {
    double term = 1.0;
    double constraint = 1.0;
    double recyclable_bonus = 0.5;
    double certified_bonus = 0.5;
    double low_carbon_bonus = 0.5;
    double low_carbon_threshold = 1.0;  // kg CO2e per kg
};

struct ScoredMaterial {
    Material material;
    double score = 0.0;
    std::size_t matched_terms = 0;
};

/// Case-insensitive substring match of one term against name, category,
/// tags, guidance and fire rating.
bool term_matches(const Material& m, std::string_view term);

/// True when every hard constraint (category, properties) holds and, if the
/// query has terms, at least one term matches.
bool satisfies(const Material& m, const MaterialQuery& q);

double score(const Material& m, const MaterialQuery& q, const ScoringWeights& w);

class Catalogue {
public:
    /// Ranked by score descending, then material_id ascending. EmptyQuery when
    /// the query has no terms, category or constraint.
    std::vector<ScoredMaterial> search(const MaterialQuery& query, const ScoringWeights& weights = {}) const;

    /// Inserts or replaces by material_id. Returns true when it was new.
    bool upsert(Material material);

    /// Parses the catalogue CSV and upserts every row; returns rows applied.
    /// The catalogue is unchanged when any row fails.
    std::size_t import_csv(std::string_view text);

    /// ReferencedEntity while `is_linked(material_id)` holds.
    void erase(std::string_view material_id, const std::function<bool(std::string_view)>& is_linked);

    const Material* find(std::string_view material_id) const;
    const Material& get(std::string_view material_id) const;  // UnknownMaterial
    const std::map<std::string, Material, std::less<>>& all() const { return materials_; }
    std::size_t size() const { return materials_.size(); }

    nlohmann::json to_json() const;
    static Catalogue from_json(const nlohmann::json& j);

private:
    std::map<std::string, Material, std::less<>> materials_;
};

/// Catalogue CSV rows in file order. ParseError names the line; a repeated
/// material_id is DuplicateInFile.
std::vector<Material> parse_material_csv(std::string_view text);

std::string to_csv(const std::vector<Material>& materials);

void to_json(nlohmann::json& j, const Material& m);
void from_json(const nlohmann::json& j, Material& m);
void to_json(nlohmann::json& j, const ScoringWeights& w);
void to_json(nlohmann::json& j, const MaterialQuery& q);
void from_json(const nlohmann::json& j, MaterialQuery& q);

}  // namespace circuloop::materials
