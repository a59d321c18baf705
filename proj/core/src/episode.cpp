#include "hriex/episode.hpp"

#include "hriex/errors.hpp"
#include "hriex/explore.hpp"
#include "hriex/safety.hpp"

namespace hriex {

BeliefState initial_linear_belief(const ScenarioConfig& c) {
  const LinearHumanModel truth = ground_truth_params(c.human.build(c.ts));
  std::mt19937_64 init_rng(derive_seed(c.seed, 0));
  return make_linear_belief(c.uncertainty, truth, c.adaptation.forgetting, c.adaptation.f0,
                            c.adaptation.sigma0, c.adaptation.dtheta, c.human.noise_cov(),
                            c.adaptation.theta0_perturbation, init_rng);
}

EpisodeResult run_episode_core(const ScenarioConfig& c, HumanModelAdapter& adapter,
                               BeliefState belief) {
  validate(c);
  const RobotDynamics dyn = c.dynamics();
  const PotentialFieldHuman true_human = c.human.build(c.ts);
  const SafetyIndexParams safety_params = c.safety.params(c.ts);
  const RiskPreference pref = c.preference();

  std::mt19937_64 world_rng(derive_seed(c.seed, 1));
  std::mt19937_64 metric_rng(derive_seed(c.seed, 2));

  EnvState env{c.human_start, c.robot_start, c.human_goal_at(0), c.robot_goal, 0};
  double lambda_sea_prev = c.safety.lambda_0;

  EpisodeResult out;
  out.records.reserve(c.horizon);
  out.theta_history.reserve(c.horizon);

  for (int k = 0; k < c.horizon; ++k) {
    env.k = k;
    env.human_goal = c.human_goal_at(k);

    StepRecord rec;
    rec.k = k;
    rec.env = env;

    const Observation obs = adapter.observe(env, belief);
    const PhiMatrix phi = build_phi_from_obs(obs.phi_vec, belief.n_state);
    const Prediction pred = predict_with_phi(belief, phi, obs.known_contrib);
    rec.near_singular = obs.near_singular;

    Vec2 u_ref;
    if (pref.tag == RiskPreference::Kind::Neutral) {
      u_ref = risk_neutral(pref, env.robot, env.robot_goal, c.control_bounds);
    } else {
      ExploreChoice choice = risk_extremum(pref, env, belief, dyn, adapter);
      u_ref = clip_control(choice.u, c.control_bounds);
      rec.chosen_index = choice.index;
      rec.tie_break = choice.tie_break;
      rec.j_values = std::move(choice.j_values);
    }
    rec.u_ref = u_ref;

    const SafeControlSet set =
        safe_control_set(safety_params, env, pred, dyn, lambda_sea_prev);
    rec.phi = set.phi_value;
    rec.phi0 = set.phi0_value;
    rec.lambda_sea = set.lambda_sea;
    lambda_sea_prev = set.lambda_sea;

    if (c.safety.enabled) {
      const MonitorResult m = monitor(set, u_ref, c.control_bounds);
      rec.u_safe = m.u_safe;
      // Interventions only count while the energy function is active.
      rec.intervened = m.intervened && set.phi_value >= 0.0;
      rec.infeasible = m.infeasible;
    } else {
      rec.u_safe = u_ref;
    }

    if (c.reachable.enabled) {
      rec.reachable_area = reachable_set_size(set, dyn, env.robot, c.reachable.n_controls,
                                              c.reachable.grid_res, metric_rng);
    }

    const AgentState human_next = step_human(true_human, env, world_rng);
    const AgentState robot_next = step_robot(dyn, env.robot, rec.u_safe);
    rec.runtime_error = (human_next.stacked() - pred.x_hat_next).norm();

    if (c.adaptation.enabled) {
      belief = update(belief, human_next.stacked(), phi, pred.x_hat_next);
    }
    rec.cov_norm = covariance_norm(belief.sigma_tt, c.adaptation.norm);
    out.theta_history.push_back(belief.theta_hat);

    adapter.push(env);
    env.human = human_next;
    env.robot = robot_next;
    if (!env.human.finite() || !env.robot.finite()) {
      throw NumericalError(k, "episode state became non-finite");
    }
    out.records.push_back(std::move(rec));
  }
  out.final_belief = std::move(belief);
  return out;
}

EpisodeResult run_episode(const ScenarioConfig& c) {
  if (c.model_kind != ModelKind::Analytical) {
    throw ConfigError("run_episode drives the analytical model; use nn_adapt_episode");
  }
  LinearModelAdapter adapter;
  return run_episode_core(c, adapter, initial_linear_belief(c));
}

}  // namespace hriex
