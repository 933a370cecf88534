#include <doctest.h>

#include <filesystem>

#include "helpers.hpp"

using namespace pcag;

TEST_SUITE("topology") {

TEST_CASE("two nodes are mutual neighbors iff within range") {
    SensorField field({{1, 0.0, 0.0}, {2, 5.0, 0.0}}, 1);
    Neighborhoods in_range = build_neighborhoods(field, 10.0);
    CHECK(in_range.of(0) == std::vector<std::size_t>{1});
    CHECK(in_range.of(1) == std::vector<std::size_t>{0});
    Neighborhoods out_of_range = build_neighborhoods(field, 4.0);
    CHECK(out_of_range.of(0).empty());
    CHECK(out_of_range.of(1).empty());
}

TEST_CASE("neighborhood sizes are nondecreasing in the radio range") {
    auto field = load_positions(std::filesystem::path(test::data_dir()) / "positions_52.csv", 16);
    REQUIRE(field.size() == 52);
    std::vector<std::size_t> prev(field.size(), 0);
    for (double range : {6.0, 8.0, 10.0, 15.0, 20.0, 30.0, 40.0, 50.0}) {
        Neighborhoods nbh = build_neighborhoods(field, range);
        // brute-force pairwise distances as the oracle
        for (std::size_t i = 0; i < field.size(); ++i) {
            std::size_t count = 0;
            for (std::size_t j = 0; j < field.size(); ++j)
                if (j != i && field.distance(i, j) <= range) ++count;
            CHECK(nbh.of(i).size() == count);
            CHECK(count >= prev[i]);
            prev[i] = count;
        }
    }
}

TEST_CASE("three collinear nodes form a chain at short range and a star at long range") {
    SensorField field({{1, 0.0, 0.0}, {2, 10.0, 0.0}, {3, 20.0, 0.0}}, 1);
    RoutingTree chain = build_routing_tree(field, 10.0, 1);
    TreeStats chain_stats = tree_stats(chain);
    CHECK(chain_stats.depth == 2);
    CHECK(chain.parent(1) == std::size_t{0});
    CHECK(chain.parent(2) == std::size_t{1});

    RoutingTree star = build_routing_tree(field, 25.0, 1);
    TreeStats star_stats = tree_stats(star);
    CHECK(star_stats.depth == 1);
    CHECK(star.parent(1) == std::size_t{0});
    CHECK(star.parent(2) == std::size_t{0});
}

TEST_CASE("fixture field at 10 m: depth 7 and highest children count 6") {
    auto field = load_positions(std::filesystem::path(test::data_dir()) / "positions_52.csv", 16);
    RoutingTree tree = build_routing_tree(field, 10.0, 16);
    TreeStats stats = tree_stats(tree);
    CHECK(stats.depth == 7);
    CHECK(stats.max_children == 6);
}

TEST_CASE("fixture field is connected at 6 m and a star at 50 m") {
    auto field = load_positions(std::filesystem::path(test::data_dir()) / "positions_52.csv", 16);
    CHECK_NOTHROW(build_routing_tree(field, 6.0, 16));
    RoutingTree star = build_routing_tree(field, 50.0, 16);
    CHECK(tree_stats(star).depth == 1);
}

TEST_CASE("chain tree stats") {
    auto field = test::chain_field(4);
    RoutingTree tree = build_routing_tree(field, 1.5, 1);
    TreeStats stats = tree_stats(tree);
    CHECK(stats.subtree_sizes[0] == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(stats.children_counts[i] <= 1);
    CHECK(stats.depth == 3);
}

TEST_CASE("star tree stats at p = 52") {
    std::vector<Sensor> sensors{{1, 0.0, 0.0}};
    for (int i = 2; i <= 52; ++i)
        sensors.push_back({i, std::cos(i * 0.12), std::sin(i * 0.12)});
    SensorField field(std::move(sensors), 1);
    RoutingTree tree = build_routing_tree(field, 3.0, 1);
    TreeStats stats = tree_stats(tree);
    CHECK(stats.children_counts[0] == 51);
    CHECK(stats.subtree_sizes[0] == 52);
    CHECK(stats.max_children_index == 0);
}

TEST_CASE("structural identities hold on random fields") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto g = test::rng(seed);
        const std::size_t p = 5 + static_cast<std::size_t>(g() % 30);
        auto field = test::random_connected_field(g, p, 20.0, 8.0);
        Neighborhoods nbh = build_neighborhoods(field, 8.0);
        RoutingTree tree = build_routing_tree(field, nbh, 1);
        TreeStats stats = tree_stats(tree);

        std::size_t child_total = 0;
        std::size_t leaf_count = 0;
        for (std::size_t i = 0; i < p; ++i) {
            child_total += stats.children_counts[i];
            if (stats.children_counts[i] == 0) {
                CHECK(stats.subtree_sizes[i] == 1);
                ++leaf_count;
            }
            // every edge lies inside the neighborhood graph
            if (auto parent = tree.parent(i)) {
                const auto& list = nbh.of(i);
                CHECK(std::find(list.begin(), list.end(), *parent) != list.end());
            }
        }
        CHECK(leaf_count > 0);
        CHECK(child_total == p - 1);
        CHECK(stats.subtree_sizes[tree.root()] == p);
    }
}

TEST_CASE("increasing the radio range never increases the depth") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto g = test::rng(seed * 77);
        auto field = test::random_connected_field(g, 25, 20.0, 7.0);
        std::size_t prev_depth = tree_stats(build_routing_tree(field, 7.0, 1)).depth;
        for (double range : {9.0, 12.0, 16.0, 25.0, 40.0}) {
            const std::size_t depth = tree_stats(build_routing_tree(field, range, 1)).depth;
            CHECK(depth <= prev_depth);
            prev_depth = depth;
        }
    }
}

TEST_CASE("identical inputs produce identical trees") {
    auto g = test::rng(99);
    auto field = test::random_connected_field(g, 30, 25.0, 9.0);
    RoutingTree a = build_routing_tree(field, 9.0, 1);
    RoutingTree b = build_routing_tree(field, 9.0, 1);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.parent(i) == b.parent(i));
        CHECK(a.depth(i) == b.depth(i));
    }
}

TEST_CASE("disconnected fields raise an error naming the unreachable sensors") {
    SensorField field({{1, 0.0, 0.0}, {2, 5.0, 0.0}, {7, 100.0, 0.0}}, 1);
    CHECK_THROWS_WITH_AS(build_routing_tree(field, 10.0, 1),
                         doctest::Contains("7"), std::invalid_argument);
}

TEST_CASE("positions round-trip through the CSV format") {
    auto field = load_positions(std::filesystem::path(test::data_dir()) / "positions_52.csv", 16);
    auto tmp = std::filesystem::temp_directory_path() / "pcag_positions_roundtrip.csv";
    save_positions(field, tmp);
    auto reloaded = load_positions(tmp, 16);
    REQUIRE(reloaded.size() == field.size());
    for (std::size_t i = 0; i < field.size(); ++i) {
        CHECK(reloaded.sensors()[i].id == field.sensors()[i].id);
        CHECK(reloaded.sensors()[i].x == field.sensors()[i].x);
        CHECK(reloaded.sensors()[i].y == field.sensors()[i].y);
    }
    std::filesystem::remove(tmp);
}

TEST_CASE("duplicate ids and unknown roots are rejected") {
    CHECK_THROWS_AS(SensorField({{1, 0.0, 0.0}, {1, 1.0, 0.0}}, 1), std::invalid_argument);
    CHECK_THROWS_AS(SensorField({{1, 0.0, 0.0}, {2, 1.0, 0.0}}, 9), std::invalid_argument);
}

}  // TEST_SUITE
