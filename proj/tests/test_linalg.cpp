#include "helpers.hpp"

using namespace convlab;

namespace {

// Independent Schmidt-coefficient oracle: SVD of the amplitude matrix of a
// pure state on a 2 (x) 3 cut.
std::vector<double> schmidt_squared(const PureState& psi, std::size_t da,
                                    std::size_t db) {
  Matrix m(da, db);
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < db; ++j) m(i, j) = psi.amplitudes()[i * db + j];
  Eigen::JacobiSVD<Matrix> svd(m);
  std::vector<double> out;
  for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k)
    out.push_back(svd.singularValues()[k] * svd.singularValues()[k]);
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

}  // namespace

TEST_CASE("layout invariants", "[linalg]") {
  CHECK_THROWS_AS(SystemLayout({{"A", 2}, {"A", 3}}), LayoutError);
  CHECK_THROWS_AS(SystemLayout({{"A", 0}}), LayoutError);
  SystemLayout l({{"A", 2}, {"B", 3}});
  CHECK(l.total_dim() == 6);
  CHECK(l.index_of("B") == 1);
  CHECK_THROWS_AS(l.index_of("C"), LayoutError);
}

TEST_CASE("state construction rejects bad matrices", "[linalg]") {
  SystemLayout l({{"A", 2}});
  Matrix neg(2, 2);
  neg << -0.2, 0, 0, 1.0;
  CHECK_THROWS_AS(DensityState(l, neg), StateError);
  Matrix big = 1.5 * Matrix::Identity(2, 2);
  CHECK_THROWS_AS(DensityState(l, big), StateError);
  Matrix nonherm(2, 2);
  nonherm << 0.5, 0.4, 0.1, 0.5;
  CHECK_THROWS_AS(DensityState(l, nonherm), StateError);
  // Sub-normalized states are allowed.
  DensityState sub(l, 0.5 * Matrix::Identity(2, 2) * 0.8);
  CHECK(sub.normalization() == Catch::Approx(0.8));
}

TEST_CASE("tensor product identity and basis cases", "[linalg]") {
  auto a = maximally_mixed("A", 2);
  auto b = maximally_mixed("B", 2);
  auto ab = tensor_product(a, b);
  CHECK((ab.matrix() - 0.25 * Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);

  auto zero = basis_state("A", 2, 0).to_density();
  auto one = basis_state("B", 2, 1).to_density();
  auto z1 = tensor_product(zero, one);
  CHECK(z1.matrix()(1, 1).real() == Catch::Approx(1.0));  // |01><01|

  CHECK_THROWS_AS(tensor_product(a, maximally_mixed("A", 3)), LayoutError);
}

TEST_CASE("tensor product trace is multiplicative on a seeded 2x3 pair", "[linalg]") {
  Rng rng(11);
  auto r = random_mixed(SystemLayout({{"A", 2}}), rng);
  auto s = random_mixed(SystemLayout({{"B", 3}}), rng);
  auto rs = tensor_product(r, s);
  CHECK(rs.trace() == Catch::Approx(r.trace() * s.trace()).margin(1e-12));
}

TEST_CASE("partial trace basic cases", "[linalg]") {
  auto phi = maximally_entangled("A", "B", 2);
  auto marg = partial_trace(phi.to_density(), {"A"});
  CHECK((marg.matrix() - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

  Rng rng(3);
  auto ra = random_mixed(SystemLayout({{"A", 2}}), rng);
  auto sb = random_mixed(SystemLayout({{"B", 3}}), rng);
  auto prod = tensor_product(ra, sb);
  auto back = partial_trace(prod, {"A"});
  CHECK((back.matrix() - ra.matrix() * sb.trace()).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(partial_trace(prod, {"Q"}), LayoutError);
}

TEST_CASE("partial trace spectrum matches SVD Schmidt oracle", "[linalg]") {
  auto psi = tst::seeded_pure(SystemLayout({{"A", 2}, {"B", 3}}), 17);
  auto rb = partial_trace(psi, {"B"});
  auto es = herm_eig(rb.matrix());
  std::vector<double> eigs;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    eigs.push_back(es.eigenvalues()[i]);
  std::sort(eigs.begin(), eigs.end(), std::greater<>());
  auto oracle = schmidt_squared(psi, 2, 3);
  oracle.resize(3, 0.0);
  for (std::size_t k = 0; k < 3; ++k)
    CHECK(tst::approx(eigs[k], oracle[k], 1e-10));
}

TEST_CASE("fidelity and distances on pinned pairs", "[linalg]") {
  auto zero = basis_state("A", 2, 0).to_density();
  auto one = basis_state("A", 2, 1).to_density();
  Vector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  auto plus_state = PureState(SystemLayout({{"A", 2}}), plus).to_density();

  CHECK(fidelity(zero, zero) == Catch::Approx(1.0).margin(1e-12));
  CHECK(fidelity(zero, one) == Catch::Approx(0.0).margin(1e-12));
  CHECK(fidelity(zero, plus_state) ==
        Catch::Approx(1.0 / std::sqrt(2.0)).margin(1e-12));

  CHECK(trace_distance(zero, zero) == Catch::Approx(0.0).margin(1e-12));
  CHECK(trace_distance(zero, one) == Catch::Approx(1.0).margin(1e-12));
  CHECK(trace_distance(zero, plus_state) ==
        Catch::Approx(1.0 / std::sqrt(2.0)).margin(1e-12));

  CHECK(purified_distance(zero, zero) == Catch::Approx(0.0).margin(1e-12));
  CHECK(purified_distance(zero, one) == Catch::Approx(1.0).margin(1e-12));
  CHECK(purified_distance(zero, plus_state) ==
        Catch::Approx(1.0 / std::sqrt(2.0)).margin(1e-12));

  CHECK_THROWS_AS(fidelity(zero, maximally_mixed("B", 2)), LayoutError);
}

TEST_CASE("Fuchs-van de Graaf and metric properties on seeded pairs", "[linalg]") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(900 + seed);
    SystemLayout l({{"A", 2}});
    auto r = random_mixed(l, rng);
    auto s = random_mixed(l, rng);
    const double f = fidelity(r, s);
    const double td = trace_distance(r, s);
    const double pd = purified_distance(r, s);
    CHECK(1.0 - f <= td + 1e-9);
    CHECK(td <= std::sqrt(std::max(0.0, 1.0 - f * f)) + 1e-9);
    CHECK(td <= pd + 1e-9);
    CHECK(tst::approx(f, fidelity(s, r), 1e-12));
    CHECK(tst::approx(td, trace_distance(s, r), 1e-12));
    CHECK(tst::approx(pd, purified_distance(s, r), 1e-12));
  }
}

TEST_CASE("partial trace of tensor product returns the factor", "[linalg]") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(40 + seed);
    auto a = random_mixed(SystemLayout({{"A", 2}}), rng);
    auto b = random_mixed(SystemLayout({{"B", 3}}), rng);
    auto ab = tensor_product(a, b);
    auto a2 = partial_trace(ab, {"A"});
    CHECK((a2.matrix() - a.matrix() * b.trace()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("generalized fidelity handles sub-normalized inputs", "[linalg]") {
  SystemLayout l({{"A", 2}});
  DensityState half(l, 0.4 * Matrix::Identity(2, 2));  // trace 0.8
  DensityState full(l, 0.5 * Matrix::Identity(2, 2));
  // F = sqrt(0.8) + sqrt(0.2 * 0) for the normalized partner
  CHECK(fidelity(half, full) == Catch::Approx(std::sqrt(0.8)).margin(1e-12));
  // Both sub-normalized: extra sqrt((1-0.8)(1-0.8)) term.
  CHECK(fidelity(half, half) == Catch::Approx(0.8 + 0.2).margin(1e-12));
}

TEST_CASE("purification round-trips and has rank-sized ancilla", "[linalg]") {
  auto phi = purify(maximally_mixed("A", 2), "C");
  CHECK(phi.layout().dim_of("C") == 2);
  auto back = partial_trace(phi, {"A"});
  CHECK((back.matrix() - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);

  auto pure = basis_state("A", 3, 1).to_density();
  auto purified = purify(pure, "C");
  CHECK(purified.layout().dim_of("C") == 1);

  Rng rng(5);
  auto mixed = random_mixed(SystemLayout({{"A", 3}}), rng);
  auto psi = purify(mixed, "C");
  auto rec = partial_trace(psi, {"A"});
  CHECK((rec.matrix() - mixed.matrix()).cwiseAbs().maxCoeff() <= 1e-10);

  SystemLayout l({{"A", 2}});
  DensityState sub(l, 0.4 * Matrix::Identity(2, 2));
  CHECK_THROWS_AS(purify(sub, "C"), StateError);
}

TEST_CASE("subsystem permutation is explicit and exact", "[linalg]") {
  Rng rng(7);
  auto a = random_mixed(SystemLayout({{"A", 2}}), rng);
  auto b = random_mixed(SystemLayout({{"B", 3}}), rng);
  auto ab = tensor_product(a, b);
  auto ba = permute_subsystems(ab, {"B", "A"});
  CHECK(ba.layout().labels() == std::vector<std::string>{"B", "A"});
  auto ab2 = permute_subsystems(ba, {"A", "B"});
  CHECK((ab2.matrix() - ab.matrix()).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(permute_subsystems(ab, {"A", "A"}), LayoutError);
}
