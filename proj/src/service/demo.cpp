#include "circuloop/service/demo.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <random>

#include "circuloop/core/error.hpp"
#include "circuloop/inventory/codec.hpp"

namespace circuloop::service {

namespace {

using inventory::Category;
using inventory::ConditionGrade;
using inventory::ItemDraft;
using workflow::Disposition;
using workflow::ListState;

constexpr std::array<CaseStudyLine, 14> kCaseStudy = {{
    {"BEV-WATER-500", "Still water 500 ml", Category::BeveragesFood, "plastic", 120, 0, 0},
    {"BEV-SNACK-BOX", "Snack box", Category::BeveragesFood, "mixed", 40, 0, 0},
    {"OFF-MARKER-SET", "Marker set", Category::OfficeSupplies, "plastic", 20, 0, 0},
    {"MED-FIRSTAID-KIT", "First-aid kit", Category::MedicalSupplies, "mixed", 4, 0, 0},
    {"APP-TSHIRT-STAFF", "Staff T-shirt", Category::ApparelFootwear, "textile", 6, 0, 0},
    {"EP-PLINTH-WOOD", "Display plinth, timber", Category::EventProps, "wood-based", 0, 24, 0},
    {"EP-WALL-PANEL", "Modular wall panel", Category::EventProps, "wood-based", 0, 36, 4},
    {"EP-TRUSS-ALU", "Aluminium truss segment", Category::EventProps, "metal", 0, 30, 0},
    {"EP-ACRYLIC-SIGN", "Acrylic sign", Category::EventProps, "plastic", 0, 20, 0},
    {"EP-GRAFFITI-BOARD", "Graffiti studio board", Category::EventProps, "wood-based", 0, 8, 2},
    {"ELE-SCREEN-55", "55-inch display screen", Category::ElectronicsElectrical, "electronic", 0, 8, 0},
    {"ELE-CABLE-REEL", "Power cable reel", Category::ElectronicsElectrical, "electronic", 0, 20, 0},
    {"TBL-GLASS-TUMBLER", "Glass tumbler", Category::TablewareGlassware, "glass", 0, 40, 0},
    {"OFF-STOOL", "Bar stool", Category::OfficeSupplies, "metal", 0, 12, 0},
}};

constexpr std::int64_t kSpare = 6;

struct CategoryPlan {
    Category category;
    const char* prefix;
    std::size_t count;
    std::vector<const char*> materials;
    std::vector<const char*> nouns;
    bool perishable;
};

const std::vector<CategoryPlan>& category_plans() {
    static const std::vector<CategoryPlan> plans = {
        {Category::EventProps, "EP", 420, {"wood-based", "metal", "plastic", "textile", "mixed"},
         {"plinth", "backdrop", "arch", "counter", "shelf unit", "light box", "planter", "lectern", "screen frame"},
         false},
        {Category::MedicalSupplies, "MED", 90, {"mixed", "plastic", "textile"},
         {"first-aid refill", "glove box", "ice pack", "bandage roll", "eye wash"}, true},
        {Category::ElectronicsElectrical, "ELE", 220, {"electronic", "metal", "plastic"},
         {"monitor", "LED strip", "speaker", "extension lead", "tablet stand", "projector", "router"}, false},
        {Category::OfficeSupplies, "OFF", 200, {"metal", "plastic", "wood-based", "mixed"},
         {"chair", "stool", "clipboard", "stapler", "folding table", "storage crate"}, false},
        {Category::BeveragesFood, "BEV", 180, {"plastic", "glass", "mixed"},
         {"juice case", "coffee pods", "sparkling water", "snack tray", "tea box"}, true},
        {Category::ApparelFootwear, "APP", 150, {"textile", "mixed"},
         {"crew jacket", "apron", "lanyard", "cap", "sneaker pair"}, false},
        {Category::TablewareGlassware, "TBL", 120, {"glass", "metal", "mixed"},
         {"wine glass", "carafe", "cutlery set", "serving tray", "ice bucket"}, false},
    };
    return plans;
}

double base_carbon(const std::string& material) {
    if (material == "wood-based") return 18.0;
    if (material == "metal") return 22.0;
    if (material == "plastic") return 5.0;
    if (material == "textile") return 6.0;
    if (material == "glass") return 0.9;
    if (material == "electronic") return 40.0;
    return 8.0;
}

std::string pick(std::mt19937& rng, const std::vector<const char*>& from) { return from[rng() % from.size()]; }

}  // namespace

std::span<const CaseStudyLine> case_study_lines() { return kCaseStudy; }

std::vector<ItemDraft> case_study_items() {
    std::vector<ItemDraft> out;
    for (const auto& line : kCaseStudy) {
        ItemDraft d;
        d.label = line.label;
        d.name = line.name;
        d.category = line.category;
        d.material = line.material;
        d.quantity = line.dispatched() + kSpare;
        d.condition = ConditionGrade::A;
        d.remaining_lifespan = line.consumed > 0 ? 1 : 6;
        d.embodied_carbon_per_unit = base_carbon(line.material);
        d.location = std::string("R-CASE-") + line.label;
        d.value_class = 1;
        out.push_back(std::move(d));
    }
    return out;
}

std::vector<ItemDraft> demo_inventory(std::uint32_t seed) {
    std::mt19937 rng(seed);
    std::vector<ItemDraft> out;
    for (const auto& plan : category_plans()) {
        std::size_t fixtures = 0;
        for (auto d : case_study_items()) {
            if (d.category == plan.category) {
                out.push_back(std::move(d));
                ++fixtures;
            }
        }
        for (std::size_t i = 1; i + fixtures <= plan.count; ++i) {
            ItemDraft d;
            char label[32];
            std::snprintf(label, sizeof label, "%s-%04zu", plan.prefix, i);
            d.label = label;
            d.category = plan.category;
            d.material = pick(rng, plan.materials);
            d.name = pick(rng, plan.nouns) + " (" + d.material + ")";
            d.quantity = 1 + static_cast<std::int64_t>(rng() % 60);
            auto grade = rng() % 20;
            d.condition = grade < 11 ? ConditionGrade::A : grade < 16 ? ConditionGrade::B : grade < 19 ? ConditionGrade::C
                                                                                                         : ConditionGrade::D;
            d.remaining_lifespan = static_cast<std::int64_t>(rng() % 9);
            if (plan.perishable) {
                d.expiry_date = Date{2025 + static_cast<int>(rng() % 3), 1 + static_cast<unsigned>(rng() % 12),
                                     1 + static_cast<unsigned>(rng() % 28)};
            }
            d.embodied_carbon_per_unit =
                static_cast<double>(static_cast<std::int64_t>(base_carbon(d.material) * (50 + rng() % 100))) / 100.0;
            char location[32];
            std::snprintf(location, sizeof location, "R%02u-B%03u", static_cast<unsigned>(rng() % 24),
                          static_cast<unsigned>(rng() % 200));
            d.location = location;
            d.value_class = static_cast<int>(rng() % 6);
            out.push_back(std::move(d));
        }
    }
    return out;
}

std::vector<materials::Material> demo_materials(std::uint32_t seed) {
    struct Family {
        const char* category;
        std::vector<const char*> names;
        std::vector<const char*> tags;
        double carbon_low;
        double carbon_high;
    };
    static const std::vector<Family> families = {
        {"board", {"Recycled PET felt board", "FSC plywood", "Honeycomb paperboard", "Straw board", "Cork panel",
                   "OSB panel", "Hemp fibreboard", "Bamboo ply"},
         {"panel", "wall", "lightweight", "modular", "acoustic", "printable"}, 0.2, 3.5},
        {"textile", {"Recycled polyester mesh", "Organic cotton canvas", "Wool felt", "Tencel drape",
                     "Recycled nylon banner", "Jute scrim", "Linen blend"},
         {"backdrop", "banner", "soft", "printable", "acoustic", "drape"}, 1.0, 9.0},
        {"finish", {"Water-based lacquer", "Clay plaster", "Natural oil wax", "Mineral paint", "Bio-resin coat",
                    "Lime wash", "Recycled-glass terrazzo"},
         {"coating", "low-voc", "surface", "matte", "durable"}, 0.3, 6.0},
        {"metal", {"Recycled aluminium extrusion", "Galvanised steel tube", "Powder-coated steel sheet",
                   "Reclaimed brass trim", "Aluminium composite"},
         {"structure", "truss", "frame", "durable", "modular"}, 2.0, 12.0},
        {"plastic", {"Recycled HDPE sheet", "Bio-PLA print filament", "Recycled acrylic", "PET-G panel",
                     "Ocean plastic board"},
         {"sign", "transparent", "printable", "lightweight", "panel"}, 0.8, 7.0},
        {"glass", {"Recycled float glass", "Toughened glass shelf", "Frosted glass panel"},
         {"transparent", "display", "shelf", "durable"}, 0.6, 2.5},
        {"composite", {"Mycelium tile", "Recycled rubber floor", "Paper-stone slab", "Wood-plastic composite",
                       "Seaweed biocomposite"},
         {"floor", "tile", "experimental", "durable", "modular"}, 0.1, 4.0},
    };
    static const std::vector<const char*> certifications = {"FSC", "PEFC", "Cradle to Cradle", "EU Ecolabel",
                                                            "Blue Angel"};
    static const std::vector<const char*> fire = {"A1", "A2-s1,d0", "B-s1,d0", "C-s2,d0", "E"};

    std::mt19937 rng(seed);
    std::vector<materials::Material> out;
    for (std::size_t i = 0; i < 50; ++i) {
        const auto& family = families[i % families.size()];
        materials::Material m;
        char id[16];
        std::snprintf(id, sizeof id, "MAT-%03zu", i + 1);
        m.material_id = id;
        m.name = family.names[(i / families.size()) % family.names.size()];
        if (i >= families.size() * family.names.size()) m.name += " II";
        m.category = family.category;
        m.recyclable = rng() % 3 != 0;
        if (rng() % 2 == 0) m.certified = certifications[rng() % certifications.size()];
        auto span = family.carbon_high - family.carbon_low;
        m.embodied_carbon_per_kg =
            static_cast<double>(static_cast<std::int64_t>((family.carbon_low + span * (rng() % 1000) / 1000.0) * 100)) /
            100.0;
        m.reusable_cycles = static_cast<std::int64_t>(rng() % 21);
        m.fire_rating = fire[rng() % fire.size()];
        std::size_t n_tags = 1 + rng() % 3;
        for (std::size_t t = 0; t < n_tags; ++t) {
            std::string tag = family.tags[rng() % family.tags.size()];
            if (std::find(m.tags.begin(), m.tags.end(), tag) == m.tags.end()) m.tags.push_back(tag);
        }
        m.guidance = "Use for " + m.tags.front() + " applications; " +
                     (m.reusable_cycles >= 10 ? "store flat between events." : "inspect edges before each reuse.");
        out.push_back(std::move(m));
    }
    return out;
}

std::string demo_factors_csv() {
    return "# source = illustrative demo factors (not published values)\n"
           "# version = demo-2025.1\n"
           "category,material,kg_co2e_per_unit\n"
           "EventProps,wood-based,18\n"
           "EventProps,metal,25\n"
           "EventProps,plastic,6\n"
           "EventProps,*,10\n"
           "MedicalSupplies,*,1.5\n"
           "ElectronicsElectrical,electronic,35\n"
           "ElectronicsElectrical,*,20\n"
           "OfficeSupplies,metal,15\n"
           "OfficeSupplies,*,4\n"
           "BeveragesFood,*,0.3\n"
           "ApparelFootwear,*,5\n"
           "TablewareGlassware,glass,0.8\n"
           "TablewareGlassware,*,1.2\n";
}

std::string demo_survey_csv() {
    return "indicator,ratings,absolute_score\n"
           "Process transparency,5 5 5 5 4 4 4 4 4 4,82\n"
           "Operation time,5 4 4 4 4 4 4 4 4 4,78\n"
           "Information accuracy,4 4 4 4 4 4 4 4 4 3,74\n"
           "Warehouse orderliness,5 5 4 4 4 4 4 4 4 4,80\n"
           "Material reuse rate,5 5 5 4 4 4 4 4 4 4,79\n";
}

void ensure_case_study_stock(Platform& platform, const Actor& admin) {
    std::vector<inventory::EventDraft> drafts;
    for (const auto& item : case_study_items()) {
        try {
            platform.item(item.label);
            continue;
        } catch (const DomainError&) {
        }
        inventory::EventDraft d;
        d.kind = inventory::EventKind::Register;
        d.item_label = item.label;
        d.quantity = item.quantity;
        d.actor = admin;
        d.payload = item;
        drafts.push_back(std::move(d));
    }
    if (!drafts.empty()) platform.record_events(drafts);
}

workflow::ProjectList run_case_study(Platform& platform, const CaseStudyOptions& options) {
    ensure_case_study_stock(platform, options.admin);
    auto step = [&](ListState s) {
        if (options.after_step) options.after_step(s);
    };

    workflow::OutboundRequest request;
    request.list_id = options.list_id;
    request.project_name = "Interactive technology showcase";
    request.client = "Global technology client";
    for (const auto& line : kCaseStudy) request.lines.push_back({line.label, line.dispatched(), {}});
    auto id = platform.create_list(request, options.lead).list_id;
    step(ListState::Draft);

    platform.transition(id, ListState::Submitted, options.lead);
    step(ListState::Submitted);
    platform.transition(id, ListState::Approved, options.lead);
    step(ListState::Approved);
    for (auto s : {ListState::Picking, ListState::Packed, ListState::Dispatched, ListState::ReceivedOnSite}) {
        platform.transition(id, s, options.admin);
        step(s);
    }
    platform.transition(id, ListState::EventEnded, options.lead);
    step(ListState::EventEnded);
    platform.transition(id, ListState::InboundOpen, options.admin);
    step(ListState::InboundOpen);

    for (const auto& line : kCaseStudy) {
        if (line.consumed > 0) {
            platform.record_disposition(id, line.label, Disposition::ConsumedOrDamaged, line.consumed, options.admin);
        }
        if (line.returned > 0) {
            platform.record_disposition(id, line.label, Disposition::ReturnedRestocked, line.returned, options.admin);
        }
        if (line.temp_stored > 0) {
            platform.record_disposition(id, line.label, Disposition::TemporarilyStored, line.temp_stored,
                                        options.admin);
        }
    }
    auto list = platform.reconcile(id, options.admin);
    step(ListState::Reconciled);
    return list;
}

}  // namespace circuloop::service
