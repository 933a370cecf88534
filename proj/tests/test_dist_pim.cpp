#include <doctest.h>

#include <filesystem>

#include "helpers.hpp"
#include "pcag/dist_pim.hpp"

using namespace pcag;

namespace {

MaskedCovariance full_mask(const Matrix& c) {
    return mask_covariance(c, Neighborhoods::complete(c.rows()));
}

Matrix projector_of(const std::vector<EigenPair>& pairs, std::size_t p, std::size_t q) {
    Matrix proj(p, p);
    for (std::size_t k = 0; k < q; ++k)
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = 0; j < p; ++j)
                proj(i, j) += pairs[k].vector[i] * pairs[k].vector[j];
    return proj;
}

double projector_distance(const std::vector<EigenPair>& a, const std::vector<EigenPair>& b,
                          std::size_t p, std::size_t q) {
    Matrix pa = projector_of(a, p, q);
    Matrix pb = projector_of(b, p, q);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) pa(i, j) -= pb(i, j);
    return frobenius_norm(pa);
}

}  // namespace

TEST_SUITE("dist_pim") {

TEST_CASE("local matvec with an empty neighborhood is c_ii * v_i") {
    PimNodeState node;
    node.index = 0;
    node.v_local = 3.0;
    node.cov_row = {{0, 2.5}};
    CHECK(local_matvec(node, {}) == doctest::Approx(7.5).epsilon(1e-15));
}

TEST_CASE("two-node system [[2,1],[1,2]] with v = (1,1) returns 3 at each node") {
    for (std::size_t i : {std::size_t{0}, std::size_t{1}}) {
        PimNodeState node;
        node.index = i;
        node.v_local = 1.0;
        node.cov_row = {{0, i == 0 ? 2.0 : 1.0}, {1, i == 0 ? 1.0 : 2.0}};
        CHECK(local_matvec(node, {{1 - i, 1.0}}) == doctest::Approx(3.0).epsilon(1e-15));
    }
}

TEST_CASE("assembled local matvecs equal the dense product on a masked matrix") {
    auto g = test::rng(9);
    auto field = test::random_connected_field(g, 14, 14.0, 6.0);
    Neighborhoods nbh = build_neighborhoods(field, 6.0);
    Matrix dense = test::random_symmetric(g, 14, 1.5);
    MaskedCovariance cov = mask_covariance(dense, nbh);
    PimNetwork network(cov);
    Vector v = test::random_vector(g, 14);
    for (std::size_t i = 0; i < 14; ++i) network.nodes()[i].v_local = v[i];

    Vector dense_result = matvec(cov.matrix, v);
    for (std::size_t i = 0; i < 14; ++i) {
        std::map<std::size_t, double> heard;
        for (std::size_t j : nbh.of(i)) heard[j] = v[j];
        CHECK(std::abs(local_matvec(network.nodes()[i], heard) - dense_result[i]) < 1e-10);
    }
}

TEST_CASE("local matvec rejects incomplete neighbor values") {
    PimNodeState node;
    node.index = 0;
    node.cov_row = {{0, 1.0}, {1, 0.5}};
    CHECK_THROWS_AS(local_matvec(node, {}), std::invalid_argument);
    CHECK_THROWS_AS(local_matvec(node, {{2, 1.0}}), std::invalid_argument);
}

TEST_CASE("scalar aggregation: norm of (3,4) split over two nodes") {
    RoutingTree tree = test::ascending_chain_tree(2);
    auto agg = aggregate_scalars(tree, {{9.0}, {16.0}});
    CHECK(agg.sums[0] == 25.0);
    CHECK(std::sqrt(agg.sums[0]) == doctest::Approx(5.0));
}

TEST_CASE("scalar aggregation: unit self dot product") {
    RoutingTree tree = test::ascending_chain_tree(3);
    Vector v{0.6, 0.8, 0.0};
    std::vector<std::vector<double>> records(3);
    for (std::size_t i = 0; i < 3; ++i) records[i] = {v[i] * v[i]};
    CHECK(aggregate_scalars(tree, records).sums[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("aggregated dot products match dense dot products") {
    auto g = test::rng(13);
    const std::size_t p = 9;
    RoutingTree tree = test::ascending_chain_tree(p);
    Vector v = test::random_vector(g, p);
    std::vector<Vector> w(3);
    for (auto& col : w) col = test::random_vector(g, p);
    std::vector<std::vector<double>> records(p);
    for (std::size_t i = 0; i < p; ++i)
        records[i] = {v[i] * w[0][i], v[i] * w[1][i], v[i] * w[2][i]};
    auto agg = aggregate_scalars(tree, records);
    for (std::size_t l = 0; l < 3; ++l)
        CHECK(std::abs(agg.sums[l] - dot(v, w[l])) < 1e-10);
}

TEST_CASE("diagonal start converges to e1 on diag(2,1)") {
    Matrix c(2, 2);
    c(0, 0) = 2.0;
    c(1, 1) = 1.0;
    PimNetwork network(full_mask(c));
    RoutingTree tree = test::ascending_chain_tree(2);
    PimConfig cfg{1, 1e-9, 50, InitPolicy::diagonal()};
    DistPimResult result = run_distributed_pim(network, tree, cfg);
    REQUIRE(result.accepted == 1);
    CHECK(result.iterations[0] <= 50);
    CHECK(std::abs(result.basis.pairs[0].vector[0]) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(result.eigenvalues[0] == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("per-iteration loads equal the sum of the three phases' analytic loads") {
    auto g = test::rng(23);
    auto field = test::random_connected_field(g, 16, 15.0, 7.0);
    Neighborhoods nbh = build_neighborhoods(field, 7.0);
    RoutingTree tree = build_routing_tree(field, nbh, 1);
    Matrix dense = test::random_symmetric(g, 16, 1.0);
    PimNetwork network(mask_covariance(dense, nbh));

    for (int k : {1, 2, 3}) {
        for (auto& node : network.nodes())
            while (node.w_locals.size() < static_cast<std::size_t>(k - 1))
                node.w_locals.push_back(0.0);
        for (std::size_t i = 0; i < 16; ++i)
            network.nodes()[i].v_local = 0.1 + static_cast<double>(i);
        PimIterationResult it = pim_iteration(network, tree, k, 1e-12);

        LoadReport expected(tree.ids());
        for (std::size_t i = 0; i < 16; ++i) {
            expected.nodes[i].tx += 1;
            expected.nodes[i].rx += static_cast<std::int64_t>(nbh.of(i).size());
        }
        expected += analytic_loads(tree, NetworkOp::a(k));
        expected += analytic_loads(tree, NetworkOp::f(k));
        CHECK(it.loads == expected);
    }
}

TEST_CASE("lockstep with the centralized path: component 1 is bit-exact on a chain") {
    auto g = test::rng(33);
    const std::size_t p = 11;
    Matrix c = test::matrix_with_spectrum(
        g, {6.0, 3.5, 2.0, 1.4, 1.0, 0.7, 0.45, 0.3, 0.2, 0.1, 0.05});
    RoutingTree tree = test::ascending_chain_tree(p);
    PimNetwork network(full_mask(c));

    // manual centralized Algorithm-2 trace for k = 1, same primitives
    Vector diag(p);
    for (std::size_t i = 0; i < p; ++i) diag[i] = c(i, i);
    Vector v_central = diag;
    for (std::size_t i = 0; i < p; ++i) network.nodes()[i].v_local = diag[i];

    const double delta = 1e-9;
    for (int t = 0; t < 60; ++t) {
        Vector u = matvec(c, v_central);
        const double mag = norm2(u);
        for (double& x : u) x /= mag;
        Vector central_next = u;

        PimIterationResult it = pim_iteration(network, tree, 1, delta);
        REQUIRE(it.v_next.size() == p);
        CHECK(it.norm == mag);
        for (std::size_t i = 0; i < p; ++i) CHECK(it.v_next[i] == central_next[i]);

        const bool flip = dot(central_next, v_central) < 0.0;
        double diff = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
            const double d = (flip ? -central_next[i] : central_next[i]) - v_central[i];
            diff += d * d;
        }
        v_central = central_next;
        CHECK(it.converged == (std::sqrt(diff) <= delta));
        if (it.converged) break;
    }

    // the packaged runs agree on value and iteration count
    PimNetwork fresh(full_mask(c));
    PimConfig cfg{1, delta, 200, InitPolicy::diagonal()};
    DistPimResult dist = run_distributed_pim(fresh, tree, cfg);
    auto central = compute_basis_pairs(c, 1, delta, 200, InitPolicy::diagonal());
    REQUIRE(dist.accepted == 1);
    REQUIRE(central.pairs.size() == 1);
    CHECK(dist.iterations[0] == central.iterations[0]);
    CHECK(dist.eigenvalues[0] == central.pairs[0].value);
    for (std::size_t i = 0; i < p; ++i)
        CHECK(dist.basis.pairs[0].vector[i] ==
              doctest::Approx(central.pairs[0].vector[i]).epsilon(1e-13));
}

TEST_CASE("deflated components track the centralized directions to 1e-9") {
    auto g = test::rng(43);
    const std::size_t p = 8;
    Matrix c = test::matrix_with_spectrum(g, {7.0, 4.0, 2.2, 1.2, 0.6, 0.3, 0.15, 0.07});
    RoutingTree tree = test::ascending_chain_tree(p);

    auto central = compute_basis_pairs(c, 3, 1e-10, 2000, InitPolicy::diagonal());
    REQUIRE(central.pairs.size() == 3);

    PimNetwork network(full_mask(c));
    PimConfig cfg{3, 1e-10, 2000, InitPolicy::diagonal()};
    DistPimResult dist = run_distributed_pim(network, tree, cfg);
    REQUIRE(dist.accepted == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        double err = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
            const double d = dist.basis.pairs[k].vector[i] - central.pairs[k].vector[i];
            err += d * d;
        }
        CHECK(std::sqrt(err) < 1e-9);
    }
}

TEST_CASE("full mask distributed subspace matches the reference on random SPD") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto g = test::rng(seed * 101);
        const std::size_t p = 5 + seed % 10;
        Vector spectrum(p);
        double v = 10.0;
        for (std::size_t i = 0; i < p; ++i, v *= 0.55) spectrum[i] = v;
        Matrix c = test::matrix_with_spectrum(g, spectrum);
        const int q = 3;

        PimNetwork network(full_mask(c));
        RoutingTree tree = test::ascending_chain_tree(p);
        PimConfig cfg{q, 1e-11, 3000, InitPolicy::diagonal()};
        DistPimResult dist = run_distributed_pim(network, tree, cfg);
        REQUIRE(dist.accepted == q);
        auto reference = reference_eigendecomposition(c);
        CHECK(projector_distance(dist.basis.pairs, reference, p, q) < 1e-3);
    }
}

TEST_CASE("accepted components are unit-norm and orthogonal by aggregation") {
    auto g = test::rng(71);
    auto field = test::random_connected_field(g, 12, 12.0, 6.0);
    Neighborhoods nbh = build_neighborhoods(field, 6.0);
    RoutingTree tree = build_routing_tree(field, nbh, 1);
    auto samples = test::random_samples(g, 60, 12);
    MaskedCovariance cov = mask_covariance(covariance_batch(samples), nbh);
    PimNetwork network(cov);
    PimConfig cfg{4, 1e-8, 500, InitPolicy::diagonal()};
    DistPimResult result = run_distributed_pim(network, tree, cfg);

    for (int k = 0; k < result.accepted; ++k) {
        std::vector<std::vector<double>> sq(network.size());
        for (std::size_t i = 0; i < network.size(); ++i) {
            const double w = network.nodes()[i].w_locals[static_cast<std::size_t>(k)];
            sq[i] = {w * w};
        }
        CHECK(std::abs(std::sqrt(aggregate_scalars(tree, sq).sums[0]) - 1.0) <= 1e-9);
        for (int l = 0; l < k; ++l) {
            std::vector<std::vector<double>> prod(network.size());
            for (std::size_t i = 0; i < network.size(); ++i) {
                const auto& wl = network.nodes()[i].w_locals;
                prod[i] = {wl[static_cast<std::size_t>(k)] * wl[static_cast<std::size_t>(l)]};
            }
            CHECK(std::abs(aggregate_scalars(tree, prod).sums[0]) <= 1e-6);
        }
    }
}

TEST_CASE("a negative dominant eigenvalue after one component stops the run") {
    // chain mask with spectrum {1.51, 0.1, -1.31}: the deflated dominant
    // eigenvalue is negative
    Neighborhoods nbh({{1}, {0, 2}, {1}}, 1.0, {1, 2, 3});
    Matrix dense(3, 3);
    for (std::size_t i = 0; i < 3; ++i) dense(i, i) = 0.1;
    dense(0, 1) = dense(1, 0) = 1.0;
    dense(1, 2) = dense(2, 1) = 1.0;
    MaskedCovariance cov = mask_covariance(dense, nbh);
    auto spectrum = reference_eigendecomposition(cov.matrix);
    REQUIRE(spectrum[0].value > 0.0);
    REQUIRE(spectrum[1].value < spectrum[0].value);
    REQUIRE(spectrum.back().value < 0.0);

    std::vector<std::optional<std::size_t>> parent{std::nullopt, std::size_t{0}, std::size_t{1}};
    RoutingTree tree(std::move(parent), {0, 1, 2}, 0, {1, 2, 3});
    PimNetwork network(cov);
    PimConfig cfg{3, 1e-9, 400, InitPolicy::diagonal()};
    DistPimResult result = run_distributed_pim(network, tree, cfg);
    CHECK(result.accepted == 1);
    CHECK(result.stopped_by_sign);
    CHECK(result.eigenvalues[0] == doctest::Approx(spectrum[0].value).epsilon(1e-6));
}

TEST_CASE("cumulative load grows quadratically in q for a fixed iteration budget") {
    auto field = load_positions(std::filesystem::path(test::data_dir()) / "positions_52.csv", 16);
    Neighborhoods nbh = build_neighborhoods(field, 10.0);
    RoutingTree tree = build_routing_tree(field, nbh, 16);
    auto g = test::rng(7);
    auto samples = test::random_samples(g, 80, 52);
    MaskedCovariance cov = mask_covariance(covariance_batch(samples), nbh);

    // delta below machine noise: every component runs exactly t_max iterations
    std::vector<std::int64_t> totals;
    for (int q = 1; q <= 5; ++q) {
        PimNetwork network(cov);
        PimConfig cfg{q, 1e-300, 10, InitPolicy::random(3)};
        DistPimResult result = run_distributed_pim(network, tree, cfg);
        REQUIRE(result.accepted == q);
        for (int n : result.iterations) CHECK(n == 10);
        totals.push_back(result.cumulative_loads.total());
    }
    // exact quadratic growth: constant nonzero second differences
    const std::int64_t dd = (totals[2] - totals[1]) - (totals[1] - totals[0]);
    CHECK(dd > 0);
    for (std::size_t i = 3; i < totals.size(); ++i)
        CHECK((totals[i] - totals[i - 1]) - (totals[i - 1] - totals[i - 2]) == dd);
}

TEST_CASE("centralized dissemination load: chain of 3 at q=1 costs (3,6,3)") {
    auto field = test::chain_field(3);
    RoutingTree tree = build_routing_tree(field, 1.5, 1);
    PcaBasis basis({EigenPair({1.0, 0.0, 0.0}, 2.0)}, Vector(3, 0.0));
    LoadReport loads = distribute_basis_centralized(tree, basis);
    CHECK(loads.nodes[0].total() == 3);
    CHECK(loads.nodes[1].total() == 6);
    CHECK(loads.nodes[2].total() == 3);

    PcaBasis empty({}, Vector(3, 0.0));
    CHECK(distribute_basis_centralized(tree, empty).total() == 0);
}

TEST_CASE("dissemination vs distributed computation crossover table") {
    auto field = load_positions(std::filesystem::path(test::data_dir()) / "positions_52.csv", 16);
    Neighborhoods nbh = build_neighborhoods(field, 10.0);
    RoutingTree tree = build_routing_tree(field, nbh, 16);
    auto g = test::rng(17);
    auto samples = test::random_samples(g, 100, 52);
    MaskedCovariance cov = mask_covariance(covariance_batch(samples), nbh);

    for (int q : {1, 3, 5}) {
        PimNetwork network(cov);
        PimConfig cfg{q, 1e-300, 10, InitPolicy::random(5)};
        DistPimResult dist = run_distributed_pim(network, tree, cfg);
        REQUIRE(dist.accepted == q);
        LoadReport dissemination = distribute_basis_centralized(tree, dist.basis);
        // dissemination is linear in q while the distributed run pays per
        // iteration; on this tree the run always costs more
        CHECK(dissemination.total() > 0);
        CHECK(dist.cumulative_loads.total() > dissemination.total());
    }
}

TEST_CASE("iteration log rows follow the run") {
    Matrix c(2, 2);
    c(0, 0) = 4.0;
    c(1, 1) = 1.0;
    PimNetwork network(full_mask(c));
    RoutingTree tree = test::ascending_chain_tree(2);
    PimConfig cfg{1, 1e-10, 80, InitPolicy::diagonal()};
    DistPimResult result = run_distributed_pim(network, tree, cfg);
    REQUIRE(result.accepted == 1);
    CHECK(result.log.size() == static_cast<std::size_t>(result.iterations[0]));
    for (std::size_t i = 0; i < result.log.size(); ++i) {
        CHECK(result.log[i].component == 1);
        CHECK(result.log[i].iteration == static_cast<int>(i + 1));
        CHECK(result.log[i].load_total > 0);
    }
}

}  // TEST_SUITE
