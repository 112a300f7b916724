#include "surfglm/excursions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "surfglm/errors.hpp"

namespace surfglm {

namespace {

/// One greedy prefix at one threshold. When `candidates` is non-null, only
/// those vertices may enter the set (used for nested families); marginal
/// probabilities are still reported for every vertex.
ExcursionResult excursion_prefix(const Eigen::MatrixXd& draws,
                                 const ExcursionOptions& opts,
                                 const std::vector<bool>* candidates) {
  const Eigen::Index M = draws.rows();
  const Eigen::Index V = draws.cols();
  if (M < 2) throw ConfigError("excursion_set: need at least 2 posterior draws");
  if (opts.alpha <= 0.0 || opts.alpha >= 1.0)
    throw ConfigError("excursion_set: alpha must be in (0, 1)");

  ExcursionResult res;
  res.gamma = opts.gamma;
  res.alpha = opts.alpha;
  res.n_samples = static_cast<int>(M);
  res.seed = opts.seed;
  res.mc_warning =
      std::sqrt(opts.alpha * (1.0 - opts.alpha) / double(M)) > opts.alpha / 4.0;

  // Exceedance indicators, one row per draw.
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> exceed(M, V);
  for (Eigen::Index v = 0; v < V; ++v)
    for (Eigen::Index m = 0; m < M; ++m)
      exceed(m, v) = draws(m, v) > opts.gamma ? 1 : 0;

  res.marginal_prob =
      exceed.cast<double>().colwise().sum().transpose() / double(M);

  // Candidate order: highest marginal exceedance first, index breaks ties.
  std::vector<Eigen::Index> order;
  order.reserve(static_cast<size_t>(V));
  for (Eigen::Index v = 0; v < V; ++v)
    if (!candidates || (*candidates)[static_cast<size_t>(v)]) order.push_back(v);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return res.marginal_prob[a] > res.marginal_prob[b];
  });

  // Grow the set greedily; a draw stays "alive" while every selected vertex
  // exceeds gamma in it. The joint probability is non-increasing as vertices
  // are added, so stopping at the first failure yields the largest prefix
  // with joint probability >= 1 - alpha.
  std::vector<std::uint8_t> alive(static_cast<size_t>(M), 1);
  res.active.assign(static_cast<size_t>(V), false);
  res.joint_prob = 1.0;
  const double target = 1.0 - opts.alpha;

  for (const Eigen::Index v : order) {
    Eigen::Index n_next = 0;
    for (Eigen::Index m = 0; m < M; ++m)
      if (alive[static_cast<size_t>(m)] && exceed(m, v)) ++n_next;
    const double joint_next = double(n_next) / double(M);
    if (joint_next < target) break;
    for (Eigen::Index m = 0; m < M; ++m)
      alive[static_cast<size_t>(m)] &= exceed(m, v);
    res.active[static_cast<size_t>(v)] = true;
    ++res.n_active;
    res.joint_prob = joint_next;
  }
  if (res.n_active == 0) res.joint_prob = 1.0;
  res.joint_prob_se =
      std::sqrt(res.joint_prob * (1.0 - res.joint_prob) / double(M));
  return res;
}

Eigen::MatrixXd draw_task_field(const SessionPosterior& post, int task,
                                int n_samples, std::uint64_t seed) {
  rng::Engine eng(seed);
  const Eigen::Index V = post.mu.rows();
  Eigen::MatrixXd draws(n_samples, V);
  for (int m = 0; m < n_samples; ++m) {
    Eigen::MatrixXd s = post.sample(eng);
    draws.row(m) = s.col(task).transpose();
  }
  return draws;
}

}  // namespace

ExcursionResult excursion_set_from_draws(const Eigen::MatrixXd& draws,
                                         const ExcursionOptions& opts) {
  return excursion_prefix(draws, opts, nullptr);
}

ExcursionResult excursion_set(const SessionPosterior& post, int task,
                              const ExcursionOptions& opts) {
  if (task < 0 || task >= post.mu.cols())
    throw ConfigError("excursion_set: task index out of range");
  if (opts.n_samples < 2)
    throw ConfigError("excursion_set: n_samples must be at least 2");
  return excursion_set_from_draws(
      draw_task_field(post, task, opts.n_samples, opts.seed), opts);
}

std::vector<ExcursionResult> excursion_family_from_draws(
    const Eigen::MatrixXd& draws, const std::vector<double>& gammas,
    const ExcursionOptions& opts) {
  // Ascending threshold order; each set's candidates are the previous set.
  std::vector<size_t> order(gammas.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return gammas[a] < gammas[b]; });

  std::vector<ExcursionResult> results(gammas.size());
  std::vector<bool> previous;
  for (const size_t gi : order) {
    ExcursionOptions one = opts;
    one.gamma = gammas[gi];
    results[gi] =
        excursion_prefix(draws, one, previous.empty() ? nullptr : &previous);
    previous = results[gi].active;
  }
  return results;
}

std::vector<ExcursionResult> excursion_family(const SessionPosterior& post,
                                              int task,
                                              const std::vector<double>& gammas,
                                              const ExcursionOptions& opts) {
  if (task < 0 || task >= post.mu.cols())
    throw ConfigError("excursion_set: task index out of range");
  if (opts.n_samples < 2)
    throw ConfigError("excursion_set: n_samples must be at least 2");
  return excursion_family_from_draws(
      draw_task_field(post, task, opts.n_samples, opts.seed), gammas, opts);
}

}  // namespace surfglm
