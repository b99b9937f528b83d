#pragma once

#include <string>
#include <string_view>

#include "circuloop/workflow/types.hpp"

namespace circuloop::workflow {

inline constexpr int kListExportSchema = 1;

void to_json(Json& j, ListState s);
void from_json(const Json& j, ListState& s);
void to_json(Json& j, Disposition d);
void from_json(const Json& j, Disposition& d);
void to_json(Json& j, LineOrigin o);
void from_json(const Json& j, LineOrigin& o);
void to_json(Json& j, const ListLine& l);
void from_json(const Json& j, ListLine& l);
void to_json(Json& j, const Notification& n);

/// List export document (`schema: 1`): meta, lines with dispositions,
/// milestones, linked materials, and the frozen report once reconciled.
Json export_list(const ProjectList& list);

/// Journal record codec.
Json encode_workflow_event(const WorkflowEvent& event);
WorkflowEvent decode_workflow_event(const Json& j);

}  // namespace circuloop::workflow
