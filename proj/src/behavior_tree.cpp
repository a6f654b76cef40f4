#include "taclift/behavior_tree.hpp"

#include <sstream>

#include <json.hpp>

namespace taclift::bt {

const char* to_string(Status status) {
    switch (status) {
        case Status::Success: return "Success";
        case Status::Failure: return "Failure";
        case Status::Running: return "Running";
    }
    return "?";
}

Node::Node(NodeKind kind, std::string name) : kind_(kind), name_(std::move(name)) {}

std::unique_ptr<Node> Node::sequence(std::vector<std::unique_ptr<Node>> children) {
    if (children.empty()) throw std::invalid_argument("sequence needs at least one child");
    auto node = std::unique_ptr<Node>(new Node(NodeKind::Sequence, "sequence"));
    node->children_ = std::move(children);
    return node;
}

std::unique_ptr<Node> Node::selector(std::vector<std::unique_ptr<Node>> children) {
    if (children.empty()) throw std::invalid_argument("selector needs at least one child");
    auto node = std::unique_ptr<Node>(new Node(NodeKind::Selector, "selector"));
    node->children_ = std::move(children);
    return node;
}

std::unique_ptr<Node> Node::parallel(std::vector<std::unique_ptr<Node>> children,
                                     int success_threshold) {
    if (children.empty()) throw std::invalid_argument("parallel needs at least one child");
    if (success_threshold < 1 || success_threshold > static_cast<int>(children.size()))
        throw std::invalid_argument("parallel threshold out of range");
    auto node = std::unique_ptr<Node>(new Node(NodeKind::Parallel, "parallel"));
    node->children_ = std::move(children);
    node->success_threshold_ = success_threshold;
    node->latched_.assign(node->children_.size(), -1);
    return node;
}

std::unique_ptr<Node> Node::action(std::string name, ActionFn fn) {
    if (!fn) throw std::invalid_argument("action callback missing: " + name);
    auto node = std::unique_ptr<Node>(new Node(NodeKind::Action, std::move(name)));
    node->action_ = std::move(fn);
    return node;
}

std::unique_ptr<Node> Node::condition(std::string name, ConditionFn fn) {
    if (!fn) throw std::invalid_argument("condition callback missing: " + name);
    auto node = std::unique_ptr<Node>(new Node(NodeKind::Condition, std::move(name)));
    node->condition_ = std::move(fn);
    return node;
}

Status Node::tick(Blackboard& blackboard) {
    switch (kind_) {
        case NodeKind::Action:
            return action_(blackboard);
        case NodeKind::Condition:
            return condition_(blackboard) ? Status::Success : Status::Failure;
        case NodeKind::Sequence: {
            while (cursor_ < children_.size()) {
                const Status status = children_[cursor_]->tick(blackboard);
                if (status == Status::Running) return Status::Running;
                if (status == Status::Failure) {
                    reset();
                    return Status::Failure;
                }
                ++cursor_;
            }
            reset();
            return Status::Success;
        }
        case NodeKind::Selector: {
            while (cursor_ < children_.size()) {
                const Status status = children_[cursor_]->tick(blackboard);
                if (status == Status::Running) return Status::Running;
                if (status == Status::Success) {
                    reset();
                    return Status::Success;
                }
                ++cursor_;
            }
            reset();
            return Status::Failure;
        }
        case NodeKind::Parallel: {
            int successes = 0;
            int failures = 0;
            for (std::size_t i = 0; i < children_.size(); ++i) {
                if (latched_[i] == -1) {
                    const Status status = children_[i]->tick(blackboard);
                    if (status == Status::Success) latched_[i] = 1;
                    else if (status == Status::Failure) latched_[i] = 0;
                }
                if (latched_[i] == 1) ++successes;
                else if (latched_[i] == 0) ++failures;
            }
            const int n = static_cast<int>(children_.size());
            if (successes >= success_threshold_) {
                reset();
                return Status::Success;
            }
            if (n - failures < success_threshold_) {
                reset();
                return Status::Failure;
            }
            return Status::Running;
        }
    }
    throw std::logic_error("unreachable node kind");
}

void Node::reset() {
    cursor_ = 0;
    if (kind_ == NodeKind::Parallel) latched_.assign(children_.size(), -1);
    for (auto& child : children_) child->reset();
}

std::string Node::snapshot() const {
    std::ostringstream out;
    out << name_;
    if (kind_ == NodeKind::Parallel) {
        out << '(' << success_threshold_ << ";";
        for (int v : latched_) out << v << ',';
        out << ')';
    } else if (kind_ == NodeKind::Sequence || kind_ == NodeKind::Selector) {
        out << '@' << cursor_;
    }
    if (!children_.empty()) {
        out << '[';
        for (const auto& child : children_) out << child->snapshot() << ' ';
        out << ']';
    }
    return out.str();
}

namespace {

using nlohmann::json;

json node_to_json(const Node& node) {
    json j;
    switch (node.kind()) {
        case NodeKind::Sequence: j["kind"] = "sequence"; break;
        case NodeKind::Selector: j["kind"] = "selector"; break;
        case NodeKind::Parallel:
            j["kind"] = "parallel";
            j["success_threshold"] = node.success_threshold();
            break;
        case NodeKind::Action:
            j["kind"] = "action";
            j["name"] = node.name();
            break;
        case NodeKind::Condition:
            j["kind"] = "condition";
            j["name"] = node.name();
            break;
    }
    if (!node.children().empty()) {
        j["children"] = json::array();
        for (const auto& child : node.children()) j["children"].push_back(node_to_json(*child));
    }
    return j;
}

std::unique_ptr<Node> node_from_json(const json& j, const Registry& registry) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "action") {
        const std::string name = j.at("name").get<std::string>();
        auto it = registry.actions.find(name);
        if (it == registry.actions.end())
            throw std::invalid_argument("unregistered action: " + name);
        return Node::action(name, it->second);
    }
    if (kind == "condition") {
        const std::string name = j.at("name").get<std::string>();
        auto it = registry.conditions.find(name);
        if (it == registry.conditions.end())
            throw std::invalid_argument("unregistered condition: " + name);
        return Node::condition(name, it->second);
    }
    std::vector<std::unique_ptr<Node>> children;
    for (const json& c : j.at("children")) children.push_back(node_from_json(c, registry));
    if (kind == "sequence") return Node::sequence(std::move(children));
    if (kind == "selector") return Node::selector(std::move(children));
    if (kind == "parallel") {
        const int threshold = j.value("success_threshold", static_cast<int>(children.size()));
        return Node::parallel(std::move(children), threshold);
    }
    throw std::invalid_argument("unknown node kind: " + kind);
}

}  // namespace

std::string describe_tree(const Node& root) { return node_to_json(root).dump(2); }

std::unique_ptr<Node> build_tree(const std::string& json_text, const Registry& registry) {
    return node_from_json(json::parse(json_text), registry);
}

}  // namespace taclift::bt
