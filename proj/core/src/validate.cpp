#include "fma/validate.hpp"

#include <algorithm>
#include <set>

namespace fmadsl {

const char* violationKindName(ViolationKind k) {
    switch (k) {
        case ViolationKind::DanglingReference: return "DanglingReference";
        case ViolationKind::InconsistentOpposite: return "InconsistentOpposite";
    }
    return "?";
}

namespace {

void indexNodes(const ObjectNode& node, std::map<Oid, const ObjectNode*>& out) {
    out.emplace(node.oid, &node);
    for (const auto& p : node.props)
        if (p.isCmts())
            for (const auto& c : std::get<CmtSet>(p.payload).children) indexNodes(c, out);
}

bool refsBack(const ObjectNode& node, const std::string& prop, const Oid& target) {
    const auto* b = node.findProp(prop);
    if (!b || !b->isRefs()) return false;
    return std::get<RefSet>(b->payload).contains(target);
}

bool containsChild(const ObjectNode& node, const std::string& prop, const Oid& target) {
    const auto* b = node.findProp(prop);
    if (!b || !b->isCmts()) return false;
    return std::get<CmtSet>(b->payload).contains(target);
}

} // namespace

ValidityReport checkValid(const StructuredModel& model, const ModelType& mm) {
    std::map<Oid, const ObjectNode*> nodes;
    for (const auto& r : model.roots) indexNodes(r, nodes);

    auto classOf = [&](const Oid& o) -> const std::string& {
        auto it = model.typing.find(o);
        if (it == model.typing.end())
            throw MetamodelError(MetamodelError::Code::UnknownClass,
                                 "object '" + o + "' has no typing entry");
        if (!mm.hasClass(it->second))
            throw MetamodelError(MetamodelError::Code::UnknownClass,
                                 "object '" + o + "' is typed by unknown class '" +
                                     it->second + "'");
        return it->second;
    };

    std::set<Violation> found;
    for (const auto& [oid, node] : nodes) {
        const std::string& cls = classOf(oid);
        for (const auto& p : node->props) {
            if (p.isRefs()) {
                auto opp = mm.opposite(ReferenceEnd::refEnd(cls, p.name));
                for (const auto& id : std::get<RefSet>(p.payload).ids) {
                    auto target = nodes.find(id);
                    if (target == nodes.end()) {
                        found.insert({ViolationKind::DanglingReference, id, p.name});
                        continue;
                    }
                    if (!opp) continue;
                    bool consistent =
                        opp->kind == ReferenceEnd::Kind::Ref
                            ? refsBack(*target->second, opp->prop, oid)
                            : containsChild(*target->second, opp->prop, oid);
                    if (!consistent)
                        found.insert({ViolationKind::InconsistentOpposite, id, opp->prop});
                }
            } else if (p.isCmts()) {
                auto opp = mm.opposite(ReferenceEnd::cmtEnd(cls, p.name));
                if (!opp) continue;
                for (const auto& child : std::get<CmtSet>(p.payload).children) {
                    if (!refsBack(child, opp->prop, oid))
                        found.insert(
                            {ViolationKind::InconsistentOpposite, child.oid, opp->prop});
                }
            }
        }
    }

    ValidityReport report;
    report.violations.assign(found.begin(), found.end());
    report.ok = report.violations.empty();
    return report;
}

} // namespace fmadsl
