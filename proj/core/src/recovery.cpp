#include "mcslab/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "mcslab/csv.hpp"
#include "mcslab/distortion.hpp"
#include "mcslab/error.hpp"
#include "mcslab/philox.hpp"

namespace mcs {
namespace {

constexpr double kPassTolerance = 1e-9;
constexpr std::uint32_t kTrialStream = 0xA11C;

bool strictly_better(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return a < b - 4.0 * std::numeric_limits<double>::epsilon() * scale;
}

double grid_node(const ParameterDomain& domain, int k, Index i, Index count) {
  if (domain.topology() == Topology::circle)
    return domain.lower(k) + domain.extent(k) * static_cast<double>(i) / static_cast<double>(count);
  return domain.lower(k) +
         domain.extent(k) * static_cast<double>(i) / static_cast<double>(count - 1);
}

struct Golden {
  double theta;
  double value;
  int iterations;
};

// Golden-section search on [a, b] for coordinate k; other coordinates fixed.
Golden golden_section(const std::function<double(double)>& f, double a, double b, double tol) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = f(c);
  double fd = f(d);
  Golden best{c, fc, 0};
  if (fd < fc) best = {d, fd, 0};
  int it = 0;
  while (b - a > tol && it < 300) {
    ++it;
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
      if (fc < best.value) best = {c, fc, 0};
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
      if (fd < best.value) best = {d, fd, 0};
    }
  }
  best.iterations = it;
  return best;
}

BoundCheckRecord base_record(const std::string& bound, const Vector& x, const Vector& x_hat,
                             const Vector& x_star, const Vector& noise, double epsilon) {
  require(x.size() == x_hat.size() && x.size() == x_star.size(), ErrorCode::invalid_argument,
          bound + " bound: ambient dimension mismatch");
  require(epsilon >= 0.0 && epsilon <= 1.0 / 3.0, ErrorCode::out_of_range,
          bound + " bound: epsilon must lie in [0, 1/3]");
  BoundCheckRecord r;
  r.bound = bound;
  r.distance_to_manifold = (x - x_star).norm();
  r.recovery_error = (x - x_hat).norm();
  r.noise = noise.norm();
  r.epsilon = epsilon;
  r.N = x.size();
  r.M = noise.size();
  return r;
}

void finish(BoundCheckRecord& r) {
  r.slack = r.rhs - r.lhs;
  r.pass = r.applicable && r.slack >= -kPassTolerance;
}

}  // namespace

Vector minimize_over_domain(const ParameterDomain& domain,
                            const std::function<double(const Vector&)>& objective,
                            const SolverOptions& options, SolverTrace* trace) {
  require(options.grid >= 8, ErrorCode::invalid_argument, "solver grid must be >= 8");
  require(options.tol > 0.0, ErrorCode::invalid_argument, "solver tolerance must be positive");
  const int K = domain.dimension();
  const bool periodic = domain.topology() == Topology::circle;
  Index per_axis = options.grid;
  if (K > 1) {
    per_axis = static_cast<Index>(
        std::ceil(std::pow(static_cast<double>(options.grid), 1.0 / K) - 1e-9));
    per_axis = std::max<Index>(per_axis, 2);
  }
  Index total = 1;
  for (int k = 0; k < K; ++k) total *= per_axis;

  auto eval = [&](const Vector& theta) { return objective(domain.canonical(theta)); };

  Vector best(K);
  double best_value = std::numeric_limits<double>::infinity();
  Vector theta(K);
  for (Index c = 0; c < total; ++c) {
    Index rest = c;
    for (int k = K - 1; k >= 0; --k) {
      theta(k) = grid_node(domain, k, rest % per_axis, per_axis);
      rest /= per_axis;
    }
    const double v = eval(theta);
    if (c == 0 || strictly_better(v, best_value) || (std::isnan(best_value) && !std::isnan(v))) {
      best = theta;
      best_value = v;
    }
  }

  SolverTrace local;
  local.grid_points = total;
  local.grid_best = best;
  local.grid_value = best_value;

  Vector current = best;
  double current_value = best_value;
  const int passes = K == 1 ? 1 : 20;
  for (int pass = 0; pass < passes; ++pass) {
    bool improved = false;
    for (int k = 0; k < K; ++k) {
      const double h = periodic ? domain.extent(k) / static_cast<double>(per_axis)
                                : domain.extent(k) / static_cast<double>(per_axis - 1);
      double a = current(k) - h;
      double b = current(k) + h;
      if (!periodic) {
        a = std::max(a, domain.lower(k));
        b = std::min(b, domain.upper(k));
      }
      Vector probe = current;
      auto f = [&](double t) {
        probe(k) = t;
        return eval(probe);
      };
      const Golden g = golden_section(f, a, b, options.tol);
      local.refinement_iterations += g.iterations;
      if (strictly_better(g.value, current_value)) {
        current(k) = g.theta;
        current_value = g.value;
        improved = true;
        local.refinement_accepted = true;
      }
    }
    if (!improved) break;
  }
  if (trace) *trace = local;
  return domain.canonical(current);
}

OracleResult nearest_point_on_manifold(const ManifoldModel& model, const Vector& x,
                                       const SolverOptions& options) {
  require(x.size() == model.ambient_dimension(), ErrorCode::invalid_argument,
          "nearest_point_on_manifold: dimension mismatch");
  OracleResult r;
  r.theta_star = minimize_over_domain(
      model.domain(), [&](const Vector& t) { return (x - model.point(t)).norm(); }, options,
      &r.trace);
  r.x_star = model.point(r.theta_star);
  r.distance = (x - r.x_star).norm();
  return r;
}

RecoveryResult recover_signal(const ManifoldModel& model, const MeasurementOperator& op,
                              const Vector& y, const SolverOptions& options) {
  require(y.size() == op.rows(), ErrorCode::invalid_argument,
          "recover_signal: measurement length differs from M");
  require(op.cols() == model.ambient_dimension(), ErrorCode::invalid_argument,
          "recover_signal: operator width differs from the ambient dimension");
  const Matrix& phi = op.matrix();
  RecoveryResult r;
  r.theta_hat = minimize_over_domain(
      model.domain(), [&](const Vector& t) { return (y - phi * model.point(t)).norm(); },
      options, &r.trace);
  r.x_hat = model.point(r.theta_hat);
  r.residual = (y - phi * r.x_hat).norm();
  return r;
}

Vector estimate_parameter(const ManifoldModel& model, const MeasurementOperator& op,
                          const Vector& y, const SolverOptions& options) {
  return recover_signal(model, op, y, options).theta_hat;
}

BoundCheckRecord check_deterministic_bound(const Vector& x, const Vector& x_hat,
                                           const Vector& x_star, const Vector& noise,
                                           double epsilon, double sigma_max) {
  BoundCheckRecord r = base_record("deterministic", x, x_hat, x_star, noise, epsilon);
  r.sigma = sigma_max;
  r.lhs = r.recovery_error;
  r.rhs = (1.0 + 2.0 * epsilon) * (2.0 * sigma_max + 1.0) * r.distance_to_manifold +
          (2.0 + 4.0 * epsilon) * r.noise;
  finish(r);
  return r;
}

BoundCheckRecord check_probabilistic_bound(const Vector& x, const Vector& x_hat,
                                           const Vector& x_star, const Vector& noise,
                                           double epsilon, Index N, Index M, double tau) {
  BoundCheckRecord r = base_record("probabilistic", x, x_hat, x_star, noise, epsilon);
  require(N > 0 && M > 0, ErrorCode::invalid_argument, "probabilistic bound: N and M must be positive");
  require(tau > 0.0, ErrorCode::invalid_argument, "probabilistic bound: tau must be positive");
  r.N = N;
  r.M = M;
  r.tau = tau;
  const double d = r.distance_to_manifold;
  const double far = (1.0 + 3.0 * epsilon) * d + epsilon * tau / 40.0;
  const double near = (1.0 + 2.0 * epsilon) *
                      (2.0 * std::sqrt(static_cast<double>(N) / static_cast<double>(M)) + 5.0) * d;
  r.branch = far <= near ? 0 : 1;
  r.lhs = r.recovery_error;
  r.rhs = std::min(far, near) + (2.0 + 4.0 * epsilon) * r.noise;
  finish(r);
  return r;
}

BoundCheckRecord check_geodesic_bound(const ManifoldSample& sample, const Vector& x,
                                      const Vector& x_hat, const Vector& x_star,
                                      const Vector& noise, double epsilon, Index N, Index M,
                                      double tau) {
  BoundCheckRecord r = base_record("geodesic", x, x_hat, x_star, noise, epsilon);
  require(N > 0 && M > 0, ErrorCode::invalid_argument, "geodesic bound: N and M must be positive");
  require(tau > 0.0, ErrorCode::invalid_argument, "geodesic bound: tau must be positive");
  r.N = N;
  r.M = M;
  r.tau = tau;
  const double d = r.distance_to_manifold;
  const double root = std::sqrt(static_cast<double>(N) / static_cast<double>(M));
  const double far = (4.0 + 6.0 * epsilon) * d + epsilon * tau / 20.0;
  const double near = ((4.0 + 8.0 * epsilon) * root + 12.0 + 20.0 * epsilon) * d;
  r.branch = far <= near ? 0 : 1;
  const double noise_term = (4.0 + 8.0 * epsilon) * r.noise;
  r.rhs = std::min(far, near) + noise_term;
  r.sqrt_argument = 1.0 - std::min(far, near) / tau - noise_term / tau;
  r.applicable = d + 10.0 / 9.0 * r.noise <= 0.163 * tau;
  if (!r.applicable) {
    r.geodesic = std::numeric_limits<double>::quiet_NaN();
    r.lhs = std::numeric_limits<double>::quiet_NaN();
    r.slack = std::numeric_limits<double>::quiet_NaN();
    r.pass = false;
    return r;
  }
  r.geodesic = sample.geodesic_between(x_hat, x_star);
  r.lhs = r.geodesic;
  finish(r);
  return r;
}

AdversarialInstance construct_adversarial_instance(const MeasurementOperator& op, double epsilon,
                                                   const SolverOptions& options) {
  require(epsilon >= 0.0 && epsilon <= 1.0 / 3.0, ErrorCode::out_of_range,
          "adversarial instance: epsilon must lie in [0, 1/3]");
  const SingularValueReport sv = singular_value_range(op);
  require(sv.sigma_min >= 8.0 / 3.0, ErrorCode::precondition_violated,
          "adversarial instance: sigma_m(Phi) = " + csv::format_double(sv.sigma_min) +
              " is below 8/3");
  const Matrix& phi = op.matrix();
  const Index N = op.cols();
  AdversarialInstance inst;
  inst.sigma_min = sv.sigma_min;
  inst.nu = (1.0 + epsilon) / sv.sigma_min;

  const Vector phi_e1 = phi.col(0);
  const Matrix gram = phi * phi.transpose();
  const Eigen::LLT<Matrix> llt(gram);
  require(llt.info() == Eigen::Success, ErrorCode::degenerate_spectrum,
          "adversarial instance: Phi Phi^T is not positive definite");
  const Vector z = llt.solve(phi_e1);
  require((gram * z - phi_e1).norm() <= 1e-12 * std::max(1.0, phi_e1.norm()) * gram.norm(),
          ErrorCode::numerical_failure, "adversarial instance: normal equations residual too large");
  const Vector row_part = phi.transpose() * z;  // projection of e_1 onto the row span
  inst.u = -row_part / inst.nu;
  Vector e1 = Vector::Zero(N);
  e1(0) = 1.0;
  inst.x = e1 + inst.nu * inst.u;
  inst.measurement_norm = (phi * inst.x).norm();
  inst.segment_embedded = std::abs(phi_e1.norm() - 1.0) <= epsilon;

  const ManifoldModel segment = make_line_segment(N);
  const Vector y = phi * inst.x;
  inst.x_hat = recover_signal(segment, op, y, options).x_hat;
  inst.x_star = nearest_point_on_manifold(segment, inst.x, options).x_star;
  const double err_hat = (inst.x - inst.x_hat).norm();
  const double err_star = (inst.x - inst.x_star).norm();
  inst.ratio = err_hat / err_star;
  inst.ratio_bound = sv.sigma_min / (2.0 * (1.0 + epsilon));

  BoundCheckRecord& r = inst.record;
  r.bound = "adversarial";
  r.distance_to_manifold = err_star;
  r.recovery_error = err_hat;
  r.epsilon = epsilon;
  r.sigma = sv.sigma_min;
  r.N = N;
  r.M = op.rows();
  r.tau = kInfiniteReach;
  r.lhs = err_hat;
  r.rhs = inst.ratio_bound * err_star;
  r.slack = r.lhs - r.rhs;
  r.pass = r.slack >= -kPassTolerance && inst.u.norm() <= 1.0 + kPassTolerance &&
           inst.measurement_norm <= 1e-10;
  return inst;
}

RecoveryTrial run_recovery_trial(const ManifoldSample& sample, const SecantSample& secants,
                                 const RecoveryTrialConfig& config, std::uint64_t seed) {
  const ManifoldModel& model = sample.model();
  require(model.intrinsic_dimension() == 1, ErrorCode::invalid_argument,
          "recovery trials support K = 1 models");
  const double tau = config.tau ? *config.tau : model.metadata().reach.value_or(0.0);
  require(tau > 0.0 && std::isfinite(tau), ErrorCode::invalid_argument,
          "recovery trial: model has no finite reach; supply tau");
  const Index N = model.ambient_dimension();
  const ParameterDomain& domain = model.domain();

  RecoveryTrial t;
  t.seed = seed;
  t.M = config.M;
  t.N = N;
  const MeasurementOperator op = MeasurementOperator::draw(config.M, N, seed);
  CounterRng rng(seed, kTrialStream);

  Vector theta0(1);
  theta0(0) = domain.lower(0) + domain.extent(0) * rng.uniform();
  const Vector base = model.point(theta0);
  const Matrix frame =
      orthonormalize(model.has_analytic_tangent()
                         ? model.analytic_jacobian(theta0)
                         : model.finite_difference_jacobian(theta0, 1e-6 * domain.extent(0)));
  Vector w(N);
  for (Index i = 0; i < N; ++i) w(i) = rng.normal();
  w -= frame * (frame.transpose() * w);
  const Vector x = base + config.distance * w.normalized();
  Vector n(config.M);
  for (Index i = 0; i < config.M; ++i) n(i) = rng.normal();
  n *= config.noise / n.norm();

  const Vector y = op.apply(x) + n;
  const RecoveryResult rec = recover_signal(model, op, y, config.solver);
  const OracleResult oracle = nearest_point_on_manifold(model, x, config.solver);
  t.distance = oracle.distance;
  t.noise = n.norm();
  t.error = (x - rec.x_hat).norm();
  t.parameter_error = domain.distance(rec.theta_hat, oracle.theta_star);
  t.eps_hat = embedding_distortion(op, secants).eps_hat;
  t.sigma_max = singular_value_range(op).sigma_max;

  if (t.eps_hat <= 1.0 / 3.0) {
    t.deterministic =
        check_deterministic_bound(x, rec.x_hat, oracle.x_star, n, t.eps_hat, t.sigma_max);
    t.probabilistic =
        check_probabilistic_bound(x, rec.x_hat, oracle.x_star, n, t.eps_hat, N, config.M, tau);
    t.geodesic_check = check_geodesic_bound(sample, x, rec.x_hat, oracle.x_star, n, t.eps_hat, N,
                                            config.M, tau);
  } else {
    // eps_hat outside the theorems' range: recorded, never counted as a pass.
    for (auto* r : {&t.deterministic, &t.probabilistic, &t.geodesic_check}) {
      r->applicable = false;
      r->pass = false;
      r->epsilon = t.eps_hat;
    }
    t.deterministic.bound = "deterministic";
    t.probabilistic.bound = "probabilistic";
    t.geodesic_check.bound = "geodesic";
  }
  for (auto* r : {&t.deterministic, &t.probabilistic, &t.geodesic_check})
    r->empirical_epsilon = true;
  t.geodesic = t.geodesic_check.applicable ? t.geodesic_check.geodesic
                                           : std::numeric_limits<double>::quiet_NaN();
  return t;
}

void write_trial_csv(std::ostream& out, const std::vector<RecoveryTrial>& trials) {
  csv::write_row(out, {"seed", "M", "N", "distance", "noise", "error", "geodesic", "eps_hat",
                       "deterministic", "probabilistic", "geodesic_applicable", "geodesic_pass"});
  auto flag = [](bool b) { return std::string(b ? "1" : "0"); };
  for (const RecoveryTrial& t : trials) {
    csv::write_row(out, {std::to_string(t.seed), std::to_string(t.M), std::to_string(t.N),
                         csv::format_double(t.distance), csv::format_double(t.noise),
                         csv::format_double(t.error), csv::format_double(t.geodesic),
                         csv::format_double(t.eps_hat), flag(t.deterministic.pass),
                         flag(t.probabilistic.pass), flag(t.geodesic_check.applicable),
                         flag(t.geodesic_check.pass)});
  }
}

}  // namespace mcs
