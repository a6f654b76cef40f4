#pragma once

#include <any>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace taclift::bt {

enum class Status { Success, Failure, Running };

const char* to_string(Status status);

// Keyed store shared by a controller's leaves; values keep the type they
// were inserted with.
class Blackboard {
public:
    template <typename T>
    void set(const std::string& key, T value) {
        values_[key] = std::move(value);
    }

    template <typename T>
    T& get(const std::string& key) {
        auto it = values_.find(key);
        if (it == values_.end()) throw std::out_of_range("blackboard key missing: " + key);
        T* v = std::any_cast<T>(&it->second);
        if (!v) throw std::runtime_error("blackboard type mismatch for key: " + key);
        return *v;
    }

    bool contains(const std::string& key) const { return values_.count(key) > 0; }
    void erase(const std::string& key) { values_.erase(key); }

private:
    std::map<std::string, std::any> values_;
};

enum class NodeKind { Sequence, Selector, Parallel, Action, Condition };

using ActionFn = std::function<Status(Blackboard&)>;
using ConditionFn = std::function<bool(Blackboard&)>;

// Leaf callbacks looked up by name when a tree is instantiated from a
// description.
struct Registry {
    std::map<std::string, ActionFn> actions;
    std::map<std::string, ConditionFn> conditions;
};

// Composites run with memory: children resolved during the current pass are
// not re-ticked until the composite itself resolves, at which point its
// memory clears and the next tick starts a fresh pass.
class Node {
public:
    static std::unique_ptr<Node> sequence(std::vector<std::unique_ptr<Node>> children);
    static std::unique_ptr<Node> selector(std::vector<std::unique_ptr<Node>> children);
    static std::unique_ptr<Node> parallel(std::vector<std::unique_ptr<Node>> children,
                                          int success_threshold);
    static std::unique_ptr<Node> action(std::string name, ActionFn fn);
    static std::unique_ptr<Node> condition(std::string name, ConditionFn fn);

    NodeKind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    int success_threshold() const { return success_threshold_; }
    const std::vector<std::unique_ptr<Node>>& children() const { return children_; }

    Status tick(Blackboard& blackboard);
    void reset();

    // Stable textual dump of structure plus runtime memory, for state
    // comparisons in tests.
    std::string snapshot() const;

private:
    Node(NodeKind kind, std::string name);

    NodeKind kind_;
    std::string name_;
    std::vector<std::unique_ptr<Node>> children_;
    int success_threshold_ = 0;
    ActionFn action_;
    ConditionFn condition_;

    // memory
    std::size_t cursor_ = 0;                  // sequence / selector
    std::vector<int> latched_;                // parallel: -1 pending, 0 fail, 1 success
};

// Description format: nested {"kind", "children", "name", "success_threshold"}.
// Round-trips losslessly through build_tree / describe_tree.
std::string describe_tree(const Node& root);
std::unique_ptr<Node> build_tree(const std::string& json_text, const Registry& registry);

}  // namespace taclift::bt
