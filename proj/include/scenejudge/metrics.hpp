#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "scenejudge/errors.hpp"
#include "scenejudge/pipeline.hpp"

namespace scenejudge {

enum class LabelUnit { Instruction, Constraint };

struct LabeledPair {
    bool predicted = false;
    bool gold = false;
    LabelUnit unit = LabelUnit::Constraint;
    std::optional<ConstraintType> ctype;
};

struct ClassPrf {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct BinaryPrf {
    ClassPrf positive;
    ClassPrf negative;
    ClassPrf macro;  // unweighted mean of the two classes
};

namespace detail {

struct Confusion {
    long tp = 0, fp = 0, fn = 0, tn = 0;
};

inline Confusion confusion(const std::vector<LabeledPair>& pairs) {
    Confusion c;
    for (const auto& p : pairs) {
        if (p.predicted && p.gold) ++c.tp;
        else if (p.predicted && !p.gold) ++c.fp;
        else if (!p.predicted && p.gold) ++c.fn;
        else ++c.tn;
    }
    return c;
}

inline ClassPrf prf_from_counts(long tp, long predicted, long gold) {
    ClassPrf r;
    r.precision = predicted == 0 ? 0.0 : double(tp) / predicted;
    r.recall = gold == 0 ? 0.0 : double(tp) / gold;
    r.f1 = (r.precision + r.recall) == 0.0
               ? 0.0
               : 2.0 * r.precision * r.recall / (r.precision + r.recall);
    return r;
}

}  // namespace detail

inline BinaryPrf binary_prf(const std::vector<LabeledPair>& pairs) {
    if (pairs.empty()) throw EmptyInputError("no labeled pairs");
    auto c = detail::confusion(pairs);
    BinaryPrf out;
    out.positive = detail::prf_from_counts(c.tp, c.tp + c.fp, c.tp + c.fn);
    out.negative = detail::prf_from_counts(c.tn, c.tn + c.fn, c.tn + c.fp);
    out.macro.precision = (out.positive.precision + out.negative.precision) / 2;
    out.macro.recall = (out.positive.recall + out.negative.recall) / 2;
    out.macro.f1 = (out.positive.f1 + out.negative.f1) / 2;
    return out;
}

inline double cohen_kappa(const std::vector<LabeledPair>& pairs) {
    if (pairs.empty()) throw EmptyInputError("no labeled pairs");
    auto c = detail::confusion(pairs);
    double n = double(pairs.size());
    double po = (c.tp + c.tn) / n;
    double pred_pos = (c.tp + c.fp) / n, gold_pos = (c.tp + c.fn) / n;
    double pe = pred_pos * gold_pos + (1 - pred_pos) * (1 - gold_pos);
    if (pe >= 1.0)
        throw DegenerateMarginalsError(
            "both raters assign a single class; kappa undefined");
    return (po - pe) / (1.0 - pe);
}

struct SuccessRates {
    double holistic_sr = 0.0;
    std::map<ConstraintType, double> partial_by_type;
    double partial_avg = 0.0;  // mean over all constraints
};

inline SuccessRates success_rates(const std::vector<EvaluationReport>& reports) {
    if (reports.empty()) throw EmptyInputError("no evaluation reports");
    SuccessRates out;
    long holistic = 0;
    std::map<ConstraintType, std::pair<long, long>> by_type;  // valid, total
    long valid = 0, total = 0;
    for (const auto& report : reports) {
        if (report.holistic_valid) ++holistic;
        for (size_t i = 0; i < report.judgments.size(); ++i) {
            ++total;
            bool ok = report.judgments[i].valid;
            if (ok) ++valid;
            if (i < report.constraints.size() && report.constraints[i].ctype) {
                auto& [v, t] = by_type[*report.constraints[i].ctype];
                ++t;
                if (ok) ++v;
            }
        }
    }
    out.holistic_sr = double(holistic) / reports.size();
    out.partial_avg = total == 0 ? 0.0 : double(valid) / total;
    for (const auto& [type, counts] : by_type)
        out.partial_by_type[type] = double(counts.first) / counts.second;
    return out;
}

struct PlanPair {
    ToolPlan predicted;
    ToolPlan gold;
    std::map<std::string, Json> predicted_args;  // by node id
    std::map<std::string, Json> gold_args;
};

namespace detail {

inline ClassPrf set_prf(const std::set<std::string>& predicted,
                        const std::set<std::string>& gold) {
    long hits = 0;
    for (const auto& p : predicted)
        if (gold.count(p)) ++hits;
    return prf_from_counts(hits, long(predicted.size()), long(gold.size()));
}

}  // namespace detail

// Macro F1 over constraints; a predicted tool scores if the gold plan
// uses it anywhere.
inline double tool_f1(const std::vector<PlanPair>& pairs) {
    if (pairs.empty()) throw EmptyInputError("no plan pairs");
    double sum = 0.0;
    for (const auto& pair : pairs) {
        std::set<std::string> predicted, gold;
        for (const auto& n : pair.predicted.nodes) predicted.insert(n.tool);
        for (const auto& n : pair.gold.nodes) gold.insert(n.tool);
        sum += detail::set_prf(predicted, gold).f1;
    }
    return sum / pairs.size();
}

namespace detail {

inline std::string normalize_scalar(const Json& v) {
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    size_t a = s.find_first_not_of(" \t\n");
    size_t b = s.find_last_not_of(" \t\n");
    s = a == std::string::npos ? "" : s.substr(a, b - a + 1);
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

// Arguments become comparable (key, value) items: values lowercased and
// trimmed; lists contribute one item per element so partially right
// lists earn partial credit.
inline std::set<std::string> argument_items(const Json& args) {
    std::set<std::string> items;
    if (!args.is_object()) return items;
    for (const auto& [key, value] : args.items()) {
        if (value.is_array()) {
            for (const auto& v : value)
                items.insert(key + "[]=" + normalize_scalar(v));
        } else {
            items.insert(key + "=" + normalize_scalar(value));
        }
    }
    return items;
}

}  // namespace detail

// Macro F1 over tool nodes matched by tool name; each matched node
// scores its argument items against the gold node's.
inline double argument_f1(const std::vector<PlanPair>& pairs) {
    if (pairs.empty()) throw EmptyInputError("no plan pairs");
    double sum = 0.0;
    long matched = 0;
    for (const auto& pair : pairs) {
        std::map<std::string, std::vector<const PlanNode*>> gold_by_tool;
        for (const auto& n : pair.gold.nodes)
            gold_by_tool[n.tool].push_back(&n);
        for (const auto& node : pair.predicted.nodes) {
            auto it = gold_by_tool.find(node.tool);
            if (it == gold_by_tool.end() || it->second.empty()) continue;
            const PlanNode* gold_node = it->second.front();
            it->second.erase(it->second.begin());
            auto arg_of = [](const std::map<std::string, Json>& table,
                             const PlanNode& n) {
                auto a = table.find(n.node_id);
                if (a != table.end()) return a->second;
                return n.preset_args.value_or(Json::object());
            };
            auto predicted_items = detail::argument_items(
                arg_of(pair.predicted_args, node));
            auto gold_items =
                detail::argument_items(arg_of(pair.gold_args, *gold_node));
            if (predicted_items.empty() && gold_items.empty()) {
                sum += 1.0;  // both argument-free
            } else {
                sum += detail::set_prf(predicted_items, gold_items).f1;
            }
            ++matched;
        }
    }
    if (matched == 0)
        throw NoMatchedToolsError(
            "predicted and gold plans share no tool names");
    return sum / matched;
}

namespace detail {

struct LabeledGraph {
    std::vector<std::string> labels;
    std::vector<std::vector<bool>> adj;  // adj[u][v]: edge u -> v

    explicit LabeledGraph(const ToolPlan& plan) {
        std::map<std::string, int> index;
        for (const auto& n : plan.nodes) {
            index[n.node_id] = int(labels.size());
            labels.push_back(n.tool);
        }
        adj.assign(labels.size(), std::vector<bool>(labels.size(), false));
        for (const auto& n : plan.nodes)
            for (const auto& dep : n.depends_on)
                adj[index.at(dep)][index.at(n.node_id)] = true;
    }

    int edge_count() const {
        int e = 0;
        for (const auto& row : adj)
            for (bool b : row)
                if (b) ++e;
        return e;
    }
};

class GedSolver {
public:
    GedSolver(const LabeledGraph& a, const LabeledGraph& b) : a_(a), b_(b) {}

    int solve() {
        int n = int(a_.labels.size()), m = int(b_.labels.size());
        // Deleting everything and inserting everything always works.
        best_ = n + m + a_.edge_count() + b_.edge_count();
        mapping_.assign(n, -2);
        used_.assign(m, false);
        search(0, 0);
        return best_;
    }

private:
    void search(int i, int cost) {
        if (cost >= best_) return;
        int n = int(a_.labels.size()), m = int(b_.labels.size());
        if (i == n) {
            int total = cost;
            for (int j = 0; j < m; ++j)
                if (!used_[j]) ++total;  // node insertions
            for (int x = 0; x < m; ++x)
                for (int y = 0; y < m; ++y)
                    if (b_.adj[x][y] && (!used_[x] || !used_[y]))
                        ++total;  // edges touching inserted nodes
            best_ = std::min(best_, total);
            return;
        }
        for (int j = 0; j < m; ++j) {
            if (used_[j]) continue;
            int step = a_.labels[i] == b_.labels[j] ? 0 : 1;
            step += pair_edge_cost(i, j);
            mapping_[i] = j;
            used_[j] = true;
            search(i + 1, cost + step);
            used_[j] = false;
        }
        mapping_[i] = -1;  // delete node i
        search(i + 1, cost + 1 + pair_edge_cost(i, -1));
        mapping_[i] = -2;
    }

    // Edge edits between node i and every earlier node, fully decided
    // once i is placed (j = -1 means i is deleted).
    int pair_edge_cost(int i, int j) const {
        int cost = 0;
        for (int k = 0; k < i; ++k) {
            bool fwd = a_.adj[k][i], back = a_.adj[i][k];
            if (j < 0 || mapping_[k] < 0) {
                cost += int(fwd) + int(back);
            } else {
                cost += int(fwd != b_.adj[mapping_[k]][j]);
                cost += int(back != b_.adj[j][mapping_[k]]);
            }
        }
        return cost;
    }

    const LabeledGraph& a_;
    const LabeledGraph& b_;
    int best_ = 0;
    std::vector<int> mapping_;
    std::vector<bool> used_;
};

}  // namespace detail

// Exact minimal edit count under unit costs: node insert/delete, node
// relabel, edge insert/delete. Branch and bound; exact only up to 12
// nodes per graph.
inline int graph_edit_distance(const ToolPlan& a, const ToolPlan& b) {
    if (a.nodes.size() > 12 || b.nodes.size() > 12)
        throw SizeLimitError("exact edit distance supports at most 12 nodes");
    detail::LabeledGraph ga(a), gb(b);
    return detail::GedSolver(ga, gb).solve();
}

}  // namespace scenejudge
