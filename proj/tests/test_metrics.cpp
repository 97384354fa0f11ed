#include <catch2/catch_amalgamated.hpp>

#include <functional>
#include <random>

#include "scenejudge/metrics.hpp"

using namespace scenejudge;

namespace {

// Independent confusion-matrix oracle: plain counters, no shared code
// with the library implementation.
struct Oracle {
    double tp = 0, fp = 0, fn = 0, tn = 0;
    explicit Oracle(const std::vector<LabeledPair>& pairs) {
        for (const auto& p : pairs) {
            tp += p.predicted && p.gold;
            fp += p.predicted && !p.gold;
            fn += !p.predicted && p.gold;
            tn += !p.predicted && !p.gold;
        }
    }
    double n() const { return tp + fp + fn + tn; }
    double p_pos() const { return (tp + fp) ? tp / (tp + fp) : 0; }
    double r_pos() const { return (tp + fn) ? tp / (tp + fn) : 0; }
    double f_pos() const {
        double p = p_pos(), r = r_pos();
        return (p + r) ? 2 * p * r / (p + r) : 0;
    }
    double p_neg() const { return (tn + fn) ? tn / (tn + fn) : 0; }
    double r_neg() const { return (tn + fp) ? tn / (tn + fp) : 0; }
    double f_neg() const {
        double p = p_neg(), r = r_neg();
        return (p + r) ? 2 * p * r / (p + r) : 0;
    }
    double kappa() const {
        double po = (tp + tn) / n();
        double pe = ((tp + fp) / n()) * ((tp + fn) / n()) +
                    ((fn + tn) / n()) * ((fp + tn) / n());
        return (po - pe) / (1 - pe);
    }
};

std::vector<LabeledPair> random_pairs(std::mt19937& rng, int count) {
    std::vector<LabeledPair> pairs;
    std::bernoulli_distribution coin(0.5);
    for (int i = 0; i < count; ++i)
        pairs.push_back({coin(rng), coin(rng), LabelUnit::Constraint, {}});
    return pairs;
}

ToolPlan make_plan(const std::vector<std::string>& tools,
                   const std::vector<std::pair<int, int>>& edges) {
    ToolPlan plan;
    for (size_t i = 0; i < tools.size(); ++i) {
        PlanNode node;
        node.node_id = "n" + std::to_string(i);
        node.tool = tools[i];
        plan.nodes.push_back(node);
    }
    for (auto [from, to] : edges)
        plan.nodes[to].depends_on.push_back("n" + std::to_string(from));
    return plan;
}

// Exhaustive edit-distance search: every subset of kept nodes, every
// injective target assignment. Only feasible for tiny graphs.
int ged_oracle(const ToolPlan& pa, const ToolPlan& pb) {
    detail::LabeledGraph a(pa), b(pb);
    int n = int(a.labels.size()), m = int(b.labels.size());
    int best = n + m + a.edge_count() + b.edge_count();

    std::vector<int> map_a(n, -1);
    std::vector<bool> used(m, false);
    auto full_cost = [&]() {
        int cost = 0;
        int kept = 0;
        for (int i = 0; i < n; ++i) {
            if (map_a[i] < 0) ++cost;  // delete
            else {
                ++kept;
                if (a.labels[i] != b.labels[map_a[i]]) ++cost;  // relabel
            }
        }
        cost += m - kept;  // insertions
        for (int u = 0; u < n; ++u)
            for (int v = 0; v < n; ++v) {
                if (!a.adj[u][v]) continue;
                if (map_a[u] < 0 || map_a[v] < 0) ++cost;
                else if (!b.adj[map_a[u]][map_a[v]]) ++cost;
            }
        for (int x = 0; x < m; ++x)
            for (int y = 0; y < m; ++y) {
                if (!b.adj[x][y]) continue;
                bool covered = false;
                for (int u = 0; u < n && !covered; ++u)
                    for (int v = 0; v < n && !covered; ++v)
                        if (map_a[u] == x && map_a[v] == y && a.adj[u][v])
                            covered = true;
                bool x_used = used[x], y_used = used[y];
                if (!x_used || !y_used) ++cost;
                else if (!covered) {
                    // both endpoints mapped: mismatch already counted in
                    // the A-side loop only if the A pair exists; count
                    // the pure insertion case here
                    int au = -1, av = -1;
                    for (int u = 0; u < n; ++u) {
                        if (map_a[u] == x) au = u;
                        if (map_a[u] == y) av = u;
                    }
                    if (!a.adj[au][av]) ++cost;
                }
            }
        return cost;
    };
    std::function<void(int)> recurse = [&](int i) {
        if (i == n) {
            best = std::min(best, full_cost());
            return;
        }
        map_a[i] = -1;
        recurse(i + 1);
        for (int j = 0; j < m; ++j) {
            if (used[j]) continue;
            used[j] = true;
            map_a[i] = j;
            recurse(i + 1);
            used[j] = false;
            map_a[i] = -1;
        }
    };
    recurse(0);
    return best;
}

ToolPlan random_plan(std::mt19937& rng, int max_nodes) {
    static const std::vector<std::string> pool = {
        "get_room_list", "get_object_info", "get_topdown_scene",
        "get_spatial_relation"};
    std::uniform_int_distribution<int> size(0, max_nodes);
    std::uniform_int_distribution<int> label(0, int(pool.size()) - 1);
    std::bernoulli_distribution edge(0.35);
    int n = size(rng);
    std::vector<std::string> tools;
    for (int i = 0; i < n; ++i) tools.push_back(pool[label(rng)]);
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (edge(rng)) edges.push_back({i, j});
    return make_plan(tools, edges);
}

}  // namespace

TEST_CASE("precision, recall, and F1 match the counting oracle") {
    std::mt19937 rng(20240817);
    for (int trial = 0; trial < 50; ++trial) {
        auto pairs = random_pairs(rng, 40);
        Oracle oracle(pairs);
        BinaryPrf got = binary_prf(pairs);
        CHECK(got.positive.precision == Catch::Approx(oracle.p_pos()).margin(1e-9));
        CHECK(got.positive.recall == Catch::Approx(oracle.r_pos()).margin(1e-9));
        CHECK(got.positive.f1 == Catch::Approx(oracle.f_pos()).margin(1e-9));
        CHECK(got.negative.f1 == Catch::Approx(oracle.f_neg()).margin(1e-9));
        CHECK(got.macro.f1 ==
              Catch::Approx((oracle.f_pos() + oracle.f_neg()) / 2).margin(1e-9));
    }
}

TEST_CASE("F1 bounds hold on random data") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        auto pairs = random_pairs(rng, 25);
        BinaryPrf got = binary_prf(pairs);
        for (const ClassPrf& c : {got.positive, got.negative}) {
            CHECK(c.f1 >= 0.0);
            CHECK(c.f1 <= std::max(c.precision, c.recall) + 1e-12);
            CHECK(c.f1 <= 2 * std::min(c.precision, c.recall) + 1e-12);
        }
    }
}

TEST_CASE("all-correct predictions score a perfect F1") {
    std::vector<LabeledPair> pairs = {
        {true, true}, {false, false}, {true, true}, {false, false}};
    BinaryPrf got = binary_prf(pairs);
    CHECK(got.macro.f1 == 1.0);
    CHECK(binary_prf(std::vector<LabeledPair>{{true, false}, {false, true}})
              .macro.f1 == 0.0);
    CHECK_THROWS_AS(binary_prf({}), EmptyInputError);
}

TEST_CASE("kappa equals the closed-form value") {
    SECTION("perfect agreement with mixed marginals") {
        std::vector<LabeledPair> pairs = {
            {true, true}, {false, false}, {true, true}};
        CHECK(cohen_kappa(pairs) == Catch::Approx(1.0));
    }
    SECTION("po 0.8, pe 0.5 gives 0.6") {
        // 4 TP, 4 TN, 1 FP, 1 FN: balanced marginals, 8/10 observed.
        std::vector<LabeledPair> pairs;
        for (int i = 0; i < 4; ++i) pairs.push_back({true, true});
        for (int i = 0; i < 4; ++i) pairs.push_back({false, false});
        pairs.push_back({true, false});
        pairs.push_back({false, true});
        CHECK(cohen_kappa(pairs) == Catch::Approx(0.6).margin(1e-12));
    }
    SECTION("chance-level agreement gives zero") {
        // Independent coins: po = pe exactly for this arrangement.
        std::vector<LabeledPair> pairs = {
            {true, true}, {true, false}, {false, true}, {false, false}};
        CHECK(cohen_kappa(pairs) == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("single-class marginals are degenerate") {
        std::vector<LabeledPair> pairs = {{true, true}, {true, true}};
        CHECK_THROWS_AS(cohen_kappa(pairs), DegenerateMarginalsError);
    }
    SECTION("random data matches the oracle and never exceeds 1") {
        std::mt19937 rng(99);
        for (int trial = 0; trial < 50; ++trial) {
            auto pairs = random_pairs(rng, 30);
            Oracle oracle(pairs);
            double pe = (oracle.tp + oracle.fp) / oracle.n() *
                            (oracle.tp + oracle.fn) / oracle.n() +
                        (oracle.fn + oracle.tn) / oracle.n() *
                            (oracle.fp + oracle.tn) / oracle.n();
            if (pe >= 1.0) continue;
            double got = cohen_kappa(pairs);
            CHECK(got == Catch::Approx(oracle.kappa()).margin(1e-9));
            CHECK(got <= 1.0 + 1e-12);
        }
    }
}

namespace {

EvaluationReport report_with(std::vector<std::pair<ConstraintType, bool>> spec) {
    EvaluationReport r;
    r.holistic_valid = true;
    int i = 0;
    for (auto [type, valid] : spec) {
        Constraint c;
        c.id = "c" + std::to_string(++i);
        c.text = "t";
        c.ctype = type;
        r.constraints.push_back(c);
        ConstraintJudgment j;
        j.constraint_id = c.id;
        j.valid = valid;
        j.explanation = "e";
        r.judgments.push_back(j);
        r.holistic_valid = r.holistic_valid && valid;
    }
    return r;
}

}  // namespace

TEST_CASE("success rates count instructions and constraints") {
    using CT = ConstraintType;
    std::vector<EvaluationReport> reports = {
        report_with({{CT::FloorLayout, true}, {CT::ObjectPlacement, true}}),
        report_with({{CT::FloorLayout, false}, {CT::ObjectPlacement, true}}),
        report_with({{CT::MaterialSelection, true}, {CT::ObjectPlacement, false}}),
    };
    SuccessRates rates = success_rates(reports);
    CHECK(rates.holistic_sr == Catch::Approx(1.0 / 3));
    CHECK(rates.partial_avg == Catch::Approx(4.0 / 6));
    CHECK(rates.partial_by_type[CT::FloorLayout] == Catch::Approx(0.5));
    CHECK(rates.partial_by_type[CT::MaterialSelection] == Catch::Approx(1.0));
    CHECK(rates.partial_by_type[CT::ObjectPlacement] == Catch::Approx(2.0 / 3));
    CHECK_THROWS_AS(success_rates({}), EmptyInputError);
}

TEST_CASE("one fully valid report in ten gives holistic 0.10") {
    std::vector<EvaluationReport> reports;
    for (int i = 0; i < 10; ++i)
        reports.push_back(report_with(
            {{ConstraintType::FloorLayout, i == 0}}));
    CHECK(success_rates(reports).holistic_sr == Catch::Approx(0.10));
}

// The ordering only holds when every instruction carries the same
// number of constraints: the partial average is over constraints, so
// uneven counts can weight a fully-valid short instruction down.
TEST_CASE("holistic never beats the partial average at equal sizes") {
    std::mt19937 rng(4242);
    std::bernoulli_distribution coin(0.6);
    std::uniform_int_distribution<int> k(1, 5);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<EvaluationReport> reports;
        int n = k(rng);
        for (int i = 0; i < 8; ++i) {
            std::vector<std::pair<ConstraintType, bool>> spec;
            for (int j = 0; j < n; ++j)
                spec.push_back({ConstraintType::FloorLayout, coin(rng)});
            reports.push_back(report_with(spec));
        }
        SuccessRates rates = success_rates(reports);
        CHECK(rates.holistic_sr <= rates.partial_avg + 1e-12);
    }
}

TEST_CASE("tool F1 scores name overlap per constraint") {
    PlanPair same{make_plan({"a", "b"}, {}), make_plan({"b", "a"}, {}), {}, {}};
    // Tool names must exist for planning, but metrics treat them as
    // opaque labels; use short names for readability.
    CHECK(tool_f1({same}) == Catch::Approx(1.0));

    PlanPair half{make_plan({"A", "B"}, {}), make_plan({"B", "C"}, {}), {}, {}};
    CHECK(tool_f1({half}) == Catch::Approx(0.5));

    PlanPair none{make_plan({"A"}, {}), make_plan({"B"}, {}), {}, {}};
    CHECK(tool_f1({none}) == Catch::Approx(0.0));

    CHECK(tool_f1({same, half, none}) == Catch::Approx(0.5));
    CHECK_THROWS_AS(tool_f1({}), EmptyInputError);
}

TEST_CASE("argument F1 gives partial credit per list element") {
    ToolPlan predicted = make_plan({"get_object_info"}, {});
    ToolPlan gold = make_plan({"get_object_info"}, {});
    PlanPair pair{predicted, gold, {}, {}};
    pair.predicted_args["n0"] = Json{{"ids", Json::array({"bed|0"})}};
    pair.gold_args["n0"] = Json{{"ids", Json::array({"bed|0", "lamp|2"})}};
    CHECK(argument_f1({pair}) == Catch::Approx(2.0 / 3).margin(1e-9));

    pair.predicted_args["n0"] = Json{{"ids", Json::array({"BED|0", " lamp|2 "})}};
    CHECK(argument_f1({pair}) == Catch::Approx(1.0));  // normalization

    PlanPair disjoint{make_plan({"A"}, {}), make_plan({"B"}, {}), {}, {}};
    CHECK_THROWS_AS(argument_f1({disjoint}), NoMatchedToolsError);
}

TEST_CASE("argument-free matched tools score 1.0") {
    PlanPair pair{make_plan({"get_topdown_scene"}, {}),
                  make_plan({"get_topdown_scene"}, {}),
                  {},
                  {}};
    CHECK(argument_f1({pair}) == Catch::Approx(1.0));
}

TEST_CASE("edit distance handles hand-built cases") {
    ToolPlan chain = make_plan({"a", "b", "c"}, {{0, 1}, {1, 2}});
    CHECK(graph_edit_distance(chain, chain) == 0);

    ToolPlan extra = make_plan({"a", "b", "c", "d"}, {{0, 1}, {1, 2}});
    CHECK(graph_edit_distance(chain, extra) == 1);  // one isolated node

    ToolPlan relabeled = make_plan({"a", "x", "c"}, {{0, 1}, {1, 2}});
    CHECK(graph_edit_distance(chain, relabeled) == 1);

    ToolPlan unchained = make_plan({"a", "b", "c"}, {{0, 1}});
    CHECK(graph_edit_distance(chain, unchained) == 1);  // one edge

    ToolPlan empty;
    CHECK(graph_edit_distance(chain, empty) == 5);  // 3 nodes + 2 edges
}

TEST_CASE("edit distance rejects oversized graphs") {
    std::vector<std::string> tools(13, "a");
    CHECK_THROWS_AS(graph_edit_distance(make_plan(tools, {}), ToolPlan{}),
                    SizeLimitError);
}

TEST_CASE("edit distance matches the exhaustive oracle") {
    std::mt19937 rng(31337);
    for (int trial = 0; trial < 60; ++trial) {
        ToolPlan a = random_plan(rng, 4);
        ToolPlan b = random_plan(rng, 4);
        INFO("trial " << trial);
        CHECK(graph_edit_distance(a, b) == ged_oracle(a, b));
    }
}

TEST_CASE("edit distance is a metric on sampled triples") {
    std::mt19937 rng(606);
    for (int trial = 0; trial < 15; ++trial) {
        ToolPlan a = random_plan(rng, 4);
        ToolPlan b = random_plan(rng, 4);
        ToolPlan c = random_plan(rng, 4);
        int ab = graph_edit_distance(a, b);
        int ba = graph_edit_distance(b, a);
        int bc = graph_edit_distance(b, c);
        int ac = graph_edit_distance(a, c);
        CHECK(graph_edit_distance(a, a) == 0);
        CHECK(ab == ba);
        CHECK(ac <= ab + bc);
    }
}
