#include "circuloop/materials/catalogue.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

#include "circuloop/core/csv.hpp"
#include "circuloop/core/error.hpp"

namespace circuloop::materials {

namespace {

using Json = nlohmann::json;

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

bool contains_ci(std::string_view haystack, std::string_view needle_lower) {
    return lower(haystack).find(needle_lower) != std::string::npos;
}

[[noreturn]] void row_error(const csv::Row& row, const std::string& what) {
    fail(ErrorCode::ParseError, "line " + std::to_string(row.line) + ": " + what);
}

bool parse_bool(const csv::Row& row, const std::string& text, const char* column) {
    auto v = lower(text);
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0" || v.empty()) return false;
    row_error(row, std::string(column) + " is not a boolean: '" + text + "'");
}

std::vector<std::string> split_tags(const std::string& text) {
    std::vector<std::string> tags;
    std::istringstream in(text);
    std::string tag;
    while (std::getline(in, tag, ';')) {
        auto b = tag.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        auto e = tag.find_last_not_of(" \t");
        tags.push_back(tag.substr(b, e - b + 1));
    }
    return tags;
}

}  // namespace

bool MaterialQuery::empty() const {
    bool any_term = std::any_of(terms.begin(), terms.end(), [](const std::string& t) { return !t.empty(); });
    return !any_term && constraint_count() == 0;
}

std::size_t MaterialQuery::constraint_count() const {
    return static_cast<std::size_t>(category.has_value()) + recyclable.has_value() + certified.has_value() +
           max_carbon_per_kg.has_value() + min_reusable_cycles.has_value() + fire_rating.has_value();
}

bool term_matches(const Material& m, std::string_view term) {
    if (term.empty()) return false;
    auto t = lower(term);
    if (contains_ci(m.name, t) || contains_ci(m.category, t) || contains_ci(m.guidance, t) ||
        contains_ci(m.fire_rating, t)) {
        return true;
    }
    return std::any_of(m.tags.begin(), m.tags.end(), [&](const std::string& tag) { return contains_ci(tag, t); });
}

bool satisfies(const Material& m, const MaterialQuery& q) {
    if (q.category && lower(*q.category) != lower(m.category)) return false;
    if (q.recyclable && *q.recyclable != m.recyclable) return false;
    if (q.certified && *q.certified != m.certified.has_value()) return false;
    if (q.max_carbon_per_kg && m.embodied_carbon_per_kg > *q.max_carbon_per_kg) return false;
    if (q.min_reusable_cycles && m.reusable_cycles < *q.min_reusable_cycles) return false;
    if (q.fire_rating && lower(*q.fire_rating) != lower(m.fire_rating)) return false;
    bool any_term = false;
    for (const auto& term : q.terms) {
        if (term.empty()) continue;
        any_term = true;
        if (term_matches(m, term)) return true;
    }
    return !any_term;
}

double score(const Material& m, const MaterialQuery& q, const ScoringWeights& w) {
    std::size_t matched = 0;
    for (const auto& term : q.terms) matched += term_matches(m, term);
    double s = w.term * static_cast<double>(matched) + w.constraint * static_cast<double>(q.constraint_count());
    if (m.recyclable) s += w.recyclable_bonus;
    if (m.certified) s += w.certified_bonus;
    if (m.embodied_carbon_per_kg <= w.low_carbon_threshold) s += w.low_carbon_bonus;
    return s;
}

std::vector<ScoredMaterial> Catalogue::search(const MaterialQuery& query, const ScoringWeights& weights) const {
    if (query.empty()) fail(ErrorCode::EmptyQuery, "query needs a term, a category or a property constraint");
    std::vector<ScoredMaterial> out;
    for (const auto& [id, m] : materials_) {
        if (!satisfies(m, query)) continue;
        std::size_t matched = 0;
        for (const auto& term : query.terms) matched += term_matches(m, term);
        out.push_back({m, score(m, query, weights), matched});
    }
    std::stable_sort(out.begin(), out.end(), [](const ScoredMaterial& a, const ScoredMaterial& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.material.material_id < b.material.material_id;
    });
    return out;
}

bool Catalogue::upsert(Material material) {
    if (material.material_id.empty()) fail(ErrorCode::Validation, "material_id is empty");
    if (!(material.embodied_carbon_per_kg >= 0.0)) {
        fail(ErrorCode::Validation, "embodied_carbon_per_kg must not be negative");
    }
    auto id = material.material_id;
    auto [it, inserted] = materials_.insert_or_assign(std::move(id), std::move(material));
    return inserted;
}

std::size_t Catalogue::import_csv(std::string_view text) {
    auto rows = parse_material_csv(text);
    for (auto& m : rows) upsert(std::move(m));
    return rows.size();
}

void Catalogue::erase(std::string_view material_id, const std::function<bool(std::string_view)>& is_linked) {
    auto it = materials_.find(material_id);
    if (it == materials_.end()) fail(ErrorCode::UnknownMaterial, "unknown material " + std::string(material_id));
    if (is_linked && is_linked(material_id)) {
        fail(ErrorCode::ReferencedEntity, "material " + std::string(material_id) + " is linked to a project list");
    }
    materials_.erase(it);
}

const Material* Catalogue::find(std::string_view material_id) const {
    auto it = materials_.find(material_id);
    return it == materials_.end() ? nullptr : &it->second;
}

const Material& Catalogue::get(std::string_view material_id) const {
    const auto* m = find(material_id);
    if (!m) fail(ErrorCode::UnknownMaterial, "unknown material " + std::string(material_id));
    return *m;
}

nlohmann::json Catalogue::to_json() const {
    Json items = Json::array();
    for (const auto& [id, m] : materials_) items.push_back(m);
    return Json{{"schema", 1}, {"materials", std::move(items)}};
}

Catalogue Catalogue::from_json(const nlohmann::json& j) {
    Catalogue c;
    for (const auto& m : j.at("materials")) c.upsert(m.get<Material>());
    return c;
}

std::vector<Material> parse_material_csv(std::string_view text) {
    auto rows = csv::read_all(text);
    if (rows.empty()) fail(ErrorCode::ParseError, "line 1: missing header");
    csv::Header header(rows.front(), {"material_id", "name", "category", "recyclable", "certified",
                                      "embodied_carbon_per_kg", "reusable_cycles", "fire_rating", "tags",
                                      "guidance"});
    std::vector<Material> out;
    std::set<std::string, std::less<>> seen;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        Material m;
        m.material_id = header.get(row, "material_id");
        if (m.material_id.empty()) row_error(row, "material_id is empty");
        if (!seen.insert(m.material_id).second) {
            fail(ErrorCode::DuplicateInFile,
                 "line " + std::to_string(row.line) + ": material_id " + m.material_id + " appears twice");
        }
        m.name = header.get(row, "name");
        m.category = header.get(row, "category");
        m.recyclable = parse_bool(row, header.get(row, "recyclable"), "recyclable");
        const auto& cert = header.get(row, "certified");
        auto cert_lower = lower(cert);
        if (!cert.empty() && cert_lower != "false" && cert_lower != "no") m.certified = cert;

        const auto& carbon = header.get(row, "embodied_carbon_per_kg");
        try {
            std::size_t used = 0;
            m.embodied_carbon_per_kg = carbon.empty() ? 0.0 : std::stod(carbon, &used);
            if (!carbon.empty() && used != carbon.size()) throw std::invalid_argument(carbon);
        } catch (const std::logic_error&) {
            row_error(row, "embodied_carbon_per_kg is not a number: '" + carbon + "'");
        }
        if (m.embodied_carbon_per_kg < 0.0) row_error(row, "embodied_carbon_per_kg must not be negative");

        const auto& cycles = header.get(row, "reusable_cycles");
        if (!cycles.empty()) {
            auto [ptr, ec] = std::from_chars(cycles.data(), cycles.data() + cycles.size(), m.reusable_cycles);
            if (ec != std::errc{} || ptr != cycles.data() + cycles.size()) {
                row_error(row, "reusable_cycles is not an integer: '" + cycles + "'");
            }
            if (m.reusable_cycles < 0) row_error(row, "reusable_cycles must not be negative");
        }
        m.fire_rating = header.get(row, "fire_rating");
        m.tags = split_tags(header.get(row, "tags"));
        m.guidance = header.get(row, "guidance");
        out.push_back(std::move(m));
    }
    return out;
}

std::string to_csv(const std::vector<Material>& materials) {
    std::ostringstream out;
    out << "material_id,name,category,recyclable,certified,embodied_carbon_per_kg,reusable_cycles,fire_rating,tags,"
           "guidance\n";
    for (const auto& m : materials) {
        std::string tags;
        for (const auto& t : m.tags) tags += (tags.empty() ? "" : ";") + t;
        out << csv::escape(m.material_id) << ',' << csv::escape(m.name) << ',' << csv::escape(m.category) << ','
            << (m.recyclable ? "true" : "false") << ',' << csv::escape(m.certified.value_or("")) << ','
            << Json(m.embodied_carbon_per_kg).dump() << ',' << m.reusable_cycles << ','
            << csv::escape(m.fire_rating) << ',' << csv::escape(tags) << ',' << csv::escape(m.guidance) << '\n';
    }
    return out.str();
}

void to_json(nlohmann::json& j, const Material& m) {
    j = Json{{"material_id", m.material_id},
             {"name", m.name},
             {"category", m.category},
             {"recyclable", m.recyclable},
             {"certified", m.certified ? Json(*m.certified) : Json()},
             {"embodied_carbon_per_kg", m.embodied_carbon_per_kg},
             {"reusable_cycles", m.reusable_cycles},
             {"fire_rating", m.fire_rating},
             {"guidance", m.guidance},
             {"tags", m.tags}};
}

void from_json(const nlohmann::json& j, Material& m) {
    m.material_id = j.at("material_id").get<std::string>();
    m.name = j.value("name", "");
    m.category = j.value("category", "");
    m.recyclable = j.value("recyclable", false);
    if (auto it = j.find("certified"); it != j.end() && !it->is_null()) m.certified = it->get<std::string>();
    m.embodied_carbon_per_kg = j.value("embodied_carbon_per_kg", 0.0);
    m.reusable_cycles = j.value("reusable_cycles", std::int64_t{0});
    m.fire_rating = j.value("fire_rating", "");
    m.guidance = j.value("guidance", "");
    m.tags = j.value("tags", std::vector<std::string>{});
}

void to_json(nlohmann::json& j, const ScoringWeights& w) {
    j = Json{{"term", w.term},
             {"constraint", w.constraint},
             {"recyclable_bonus", w.recyclable_bonus},
             {"certified_bonus", w.certified_bonus},
             {"low_carbon_bonus", w.low_carbon_bonus},
             {"low_carbon_threshold", w.low_carbon_threshold}};
}

void to_json(nlohmann::json& j, const MaterialQuery& q) {
    j = Json{{"terms", q.terms}};
    if (q.category) j["category"] = *q.category;
    if (q.recyclable) j["recyclable"] = *q.recyclable;
    if (q.certified) j["certified"] = *q.certified;
    if (q.max_carbon_per_kg) j["max_carbon_per_kg"] = *q.max_carbon_per_kg;
    if (q.min_reusable_cycles) j["min_reusable_cycles"] = *q.min_reusable_cycles;
    if (q.fire_rating) j["fire_rating"] = *q.fire_rating;
}

void from_json(const nlohmann::json& j, MaterialQuery& q) {
    static const std::set<std::string> known = {"terms",  "q", "category", "recyclable", "certified",
                                                "max_carbon_per_kg", "min_reusable_cycles", "fire_rating"};
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key)) fail(ErrorCode::Validation, "unknown query field '" + key + "'");
    }
    q = MaterialQuery{};
    if (auto it = j.find("terms"); it != j.end()) q.terms = it->get<std::vector<std::string>>();
    if (auto it = j.find("q"); it != j.end()) {
        std::istringstream in(it->get<std::string>());
        std::string word;
        while (in >> word) q.terms.push_back(word);
    }
    if (auto it = j.find("category"); it != j.end()) q.category = it->get<std::string>();
    if (auto it = j.find("recyclable"); it != j.end()) q.recyclable = it->get<bool>();
    if (auto it = j.find("certified"); it != j.end()) q.certified = it->get<bool>();
    if (auto it = j.find("max_carbon_per_kg"); it != j.end()) q.max_carbon_per_kg = it->get<double>();
    if (auto it = j.find("min_reusable_cycles"); it != j.end()) q.min_reusable_cycles = it->get<std::int64_t>();
    if (auto it = j.find("fire_rating"); it != j.end()) q.fire_rating = it->get<std::string>();
}

}  // namespace circuloop::materials
