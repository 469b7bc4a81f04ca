#include "helpers.hpp"

#include "convlab/sdp.hpp"

using namespace convlab;
using namespace convlab::sdp;

namespace {

// min Tr sigma s.t. I (x) sigma >= rho, both blocks PSD.  The optimum is
// 2^{-Hmin(A|B)}.
SdpProblem hmin_problem(const Matrix& rho, std::size_t da, std::size_t db) {
  SdpProblem p;
  const int sigma = p.add_hermitian_block(db);
  const int slack = p.add_hermitian_block(da * db);
  for (const auto& bk : hermitian_basis(da * db)) {
    p.add_eq(LinExpr{}
                 .add(slack, bk)
                 .add(sigma, -ptrace_first(bk, da, db)),
             -(bk * rho).trace().real());
  }
  p.add_objective(sigma, Matrix::Identity(db, db));
  return p;
}

Matrix phi_matrix(std::size_t n) {  // normalized maximally entangled projector
  Vector v = Vector::Zero(n * n);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0 / std::sqrt(double(n));
  return v * v.adjoint();
}

struct BatteryCase {
  std::string name;
  SdpProblem problem;
  double closed_form;
  double sign = 1.0;  // -1 for maximization encoded as minimization
};

std::vector<BatteryCase> battery() {
  std::vector<BatteryCase> out;

  {  // forced diagonal entry
    SdpProblem p;
    const int z = p.add_hermitian_block(2);
    Matrix e11 = Matrix::Zero(2, 2);
    e11(0, 0) = 1.0;
    p.add_eq(LinExpr{}.add(z, e11), 1.0);
    p.add_objective(z, Matrix::Identity(2, 2));
    out.push_back({"tr_min_forced_diag", std::move(p), 1.0});
  }
  for (std::size_t n : {2, 3, 4}) {  // Hmin benchmark: value = n
    out.push_back({"hmin_phi_" + std::to_string(n),
                   hmin_problem(phi_matrix(n), n, n), double(n)});
  }
  {  // classically correlated pair: value 1 (Hmin = 0)
    const std::size_t m = 4;
    Matrix rho = Matrix::Zero(m * m, m * m);
    for (std::size_t i = 0; i < m; ++i)
      rho(i * m + i, i * m + i) = 1.0 / double(m);
    out.push_back({"hmin_classical_corr", hmin_problem(rho, m, m), 1.0});
  }
  {  // fidelity epigraph, identical pure states
    SdpProblem p;
    auto e = add_fidelity_epigraph(p, 2);
    Matrix zero = Matrix::Zero(2, 2);
    zero(0, 0) = 1.0;
    fix_corner(p, e, true, zero);
    fix_corner(p, e, false, zero);
    p.add_objective(e.w_block, -e.re_tr_x);
    out.push_back({"fidelity_identical", std::move(p), 1.0, -1.0});
  }
  {  // fidelity |0> vs |+>
    SdpProblem p;
    auto e = add_fidelity_epigraph(p, 2);
    Matrix zero = Matrix::Zero(2, 2);
    zero(0, 0) = 1.0;
    Matrix plus(2, 2);
    plus << 0.5, 0.5, 0.5, 0.5;
    fix_corner(p, e, true, zero);
    fix_corner(p, e, false, plus);
    p.add_objective(e.w_block, -e.re_tr_x);
    out.push_back({"fidelity_zero_plus", std::move(p), 1.0 / std::sqrt(2.0), -1.0});
  }
  {  // LP as two scalar blocks: min x + 2y, x + y = 1
    SdpProblem p;
    const int x = p.add_scalar_block();
    const int y = p.add_scalar_block();
    p.add_eq(LinExpr{}.add_scalar(x, 1.0).add_scalar(y, 1.0), 1.0);
    p.add_objective_scalar(x, 1.0);
    p.add_objective_scalar(y, 2.0);
    out.push_back({"lp_two_vars", std::move(p), 1.0});
  }
  {  // lambda_max as SDP: min t s.t. tI - H PSD
    SdpProblem p;
    const int t = p.add_scalar_block();
    const int s = p.add_hermitian_block(4);
    Matrix h = Matrix::Zero(4, 4);
    h(0, 0) = 0.3;
    h(1, 1) = -0.2;
    h(2, 2) = 0.75;
    h(3, 3) = 1.0;
    h(0, 2) = cxd(0.1, 0.05);
    h(2, 0) = cxd(0.1, -0.05);
    const double lmax = herm_eig(h).eigenvalues().maxCoeff();
    for (const auto& bk : hermitian_basis(4))
      p.add_eq(LinExpr{}
                   .add_scalar(t, bk.trace().real())
                   .add(s, -bk),
               (bk * h).trace().real());
    p.add_objective_scalar(t, 1.0);
    out.push_back({"lambda_max", std::move(p), lmax});
  }
  {  // positive part: min Tr S, S >= X, S >= 0 -> sum of positive eigenvalues
    SdpProblem p;
    const int s = p.add_hermitian_block(2);
    const int gap = p.add_hermitian_block(2);  // S - X
    Matrix x(2, 2);  // |0><0| - |+><+|, eigenvalues +-1/sqrt(2)
    x << 0.5, -0.5, -0.5, -0.5;
    for (const auto& bk : hermitian_basis(2))
      p.add_eq(LinExpr{}.add(s, bk).add(gap, -bk), (bk * x).trace().real());
    p.add_objective(s, Matrix::Identity(2, 2));
    out.push_back({"positive_part", std::move(p), 1.0 / std::sqrt(2.0)});
  }
  {  // second-order cone via arrow block: min t s.t. ||b|| <= t
    SdpProblem p;
    const int t = p.add_scalar_block();
    const int arrow = p.add_real_block(4);
    const RealVector b = (RealVector(3) << 0.3, -0.4, 1.2).finished();
    for (int i = 0; i < 3; ++i) {
      RealMatrix di = RealMatrix::Zero(4, 4);
      di(i, i) = 1.0;
      p.add_eq(LinExpr{}.add_real(arrow, di).add_scalar(t, -1.0), 0.0);
      for (int j = i + 1; j < 3; ++j) {
        RealMatrix off = RealMatrix::Zero(4, 4);
        off(i, j) = off(j, i) = 0.5;
        p.add_eq(LinExpr{}.add_real(arrow, off), 0.0);
      }
      RealMatrix col = RealMatrix::Zero(4, 4);
      col(i, 3) = col(3, i) = 0.5;
      p.add_eq(LinExpr{}.add_real(arrow, col), b[i]);
    }
    RealMatrix corner = RealMatrix::Zero(4, 4);
    corner(3, 3) = 1.0;
    p.add_eq(LinExpr{}.add_real(arrow, corner).add_scalar(t, -1.0), 0.0);
    p.add_objective_scalar(t, 1.0);
    out.push_back({"soc_norm", std::move(p), 1.3});
  }
  return out;
}

}  // namespace

TEST_CASE("self-test battery hits closed forms within 1e-6", "[sdp]") {
  for (auto& c : battery()) {
    INFO(c.name);
    auto sol = solve(c.problem);
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(std::abs(c.sign * sol.value - c.closed_form) <= 1e-6);
    // weak duality: primal >= dual estimate - tol
    CHECK(sol.dual_gap >= -1e-5);
  }
}

TEST_CASE("infeasible problem is detected by phase-1 residual", "[sdp]") {
  SdpProblem p;
  const int z = p.add_hermitian_block(2);
  Matrix e11 = Matrix::Zero(2, 2);
  e11(0, 0) = 1.0;
  p.add_eq(LinExpr{}.add(z, e11), -1.0);
  p.add_objective(z, Matrix::Identity(2, 2));
  auto sol = solve(p, {.max_iter = 5000});
  CHECK(sol.status == SolveStatus::infeasible);
  CHECK(sol.infeasibility_distance > 1e-6);
}

TEST_CASE("unbounded objective is flagged", "[sdp]") {
  SdpProblem p;
  const int z = p.add_hermitian_block(2);
  Matrix e11 = Matrix::Zero(2, 2);
  e11(0, 0) = 1.0;
  p.add_eq(LinExpr{}.add(z, e11), 1.0);
  p.add_objective(z, -Matrix::Identity(2, 2));
  auto sol = solve(p, {.max_iter = 20000});
  CHECK(sol.status == SolveStatus::unbounded);
}

TEST_CASE("identical problems solve to bit-identical results", "[sdp]") {
  auto run = [] {
    auto p = hmin_problem(phi_matrix(2), 2, 2);
    return solve(p);
  };
  auto a = run();
  auto b = run();
  REQUIRE(a.status == SolveStatus::optimal);
  CHECK(a.value == b.value);
  CHECK(a.iterations == b.iterations);
  CHECK((a.block(0) - b.block(0)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("max_iter is reported, never silently converted", "[sdp]") {
  auto p = hmin_problem(phi_matrix(3), 3, 3);
  auto sol = solve(p, {.max_iter = 3});
  CHECK(sol.status == SolveStatus::max_iter);
  CHECK(sol.iterations == 3);
}

TEST_CASE("inequality senses and slack handling", "[sdp]") {
  // min x s.t. x >= 3  ->  3;  min -x s.t. x <= 2  -> -2.
  {
    SdpProblem p;
    const int x = p.add_scalar_block();
    p.add_ge(LinExpr{}.add_scalar(x, 1.0), 3.0);
    p.add_objective_scalar(x, 1.0);
    auto sol = solve(p);
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(std::abs(sol.value - 3.0) <= 1e-6);
  }
  {
    SdpProblem p;
    const int x = p.add_scalar_block();
    p.add_le(LinExpr{}.add_scalar(x, 1.0), 2.0);
    p.add_objective_scalar(x, -1.0);
    auto sol = solve(p);
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(std::abs(sol.value + 2.0) <= 1e-6);
  }
}
