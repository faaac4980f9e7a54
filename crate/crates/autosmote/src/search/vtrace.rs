//! Off-policy value targets with truncated importance weights.
//!
//! Episodes are produced by a snapshot of the policy that may lag the
//! learner's parameters. The targets computed here correct for that lag:
//! each temporal-difference term is weighted by the truncated ratio of
//! current to behavior action probability, and propagation across steps is
//! damped by the product of truncated trace ratios.

use crate::error::{Error, Result};

/// Per-step value targets for one trajectory.
///
/// For step `t'`:
///
/// ```text
/// v(t') = V(t') + sum_{t >= t'} gamma^(t-t') * (prod_{i in t'..t} c_i) * d(t)
/// d(t)  = rho_t * (r_t + gamma * V(t+1) - V(t))
/// rho_t = min(rho_bar, pi_t / mu_t),  c_i = min(c_bar, pi_i / mu_i)
/// ```
///
/// with `V(n) = 0` past the terminal step. `behavior_probs` are the
/// probabilities the acting policy assigned to the chosen actions;
/// `target_probs` are today's probabilities for the same actions.
pub fn vtrace_targets(
    rewards: &[f64],
    values: &[f64],
    behavior_probs: &[f64],
    target_probs: &[f64],
    gamma: f64,
    rho_bar: f64,
    c_bar: f64,
) -> Result<Vec<f64>> {
    let n = rewards.len();
    if n == 0 {
        return Err(Error::Numerical(
            "value targets over an empty trajectory".to_string(),
        ));
    }
    if values.len() != n || behavior_probs.len() != n || target_probs.len() != n {
        return Err(Error::Numerical(format!(
            "trajectory arrays disagree on length: {n} rewards, {} values, {} behavior probs, {} target probs",
            values.len(),
            behavior_probs.len(),
            target_probs.len()
        )));
    }
    for (&mu, &pi) in behavior_probs.iter().zip(target_probs) {
        if !(mu.is_finite() && mu > 0.0 && mu <= 1.0) {
            return Err(Error::Numerical(format!(
                "behavior probability must be in (0, 1], got {mu}"
            )));
        }
        if !(pi.is_finite() && pi >= 0.0) {
            return Err(Error::Numerical(format!(
                "target probability must be finite and non-negative, got {pi}"
            )));
        }
    }
    if rewards.iter().chain(values).any(|v| !v.is_finite()) {
        return Err(Error::Numerical(
            "non-finite reward or value in trajectory".to_string(),
        ));
    }

    let ratio: Vec<f64> = target_probs
        .iter()
        .zip(behavior_probs)
        .map(|(&pi, &mu)| pi / mu)
        .collect();
    let delta: Vec<f64> = (0..n)
        .map(|t| {
            let rho = ratio[t].min(rho_bar);
            let next_v = if t + 1 < n { values[t + 1] } else { 0.0 };
            rho * (rewards[t] + gamma * next_v - values[t])
        })
        .collect();

    let mut targets = vec![0.0; n];
    for tp in 0..n {
        // The leading term V + delta is evaluated as (1-rho)V + rho(r + gamma*V_next)
        // so that with rho = 1 the value estimate cancels without leaving a
        // rounding residue: a terminal on-policy step yields exactly r.
        let rho = ratio[tp].min(rho_bar);
        let next_v = if tp + 1 < n { values[tp + 1] } else { 0.0 };
        let mut acc = (1.0 - rho) * values[tp] + rho * (rewards[tp] + gamma * next_v);
        let mut factor = gamma * ratio[tp].min(c_bar);
        for t in (tp + 1)..n {
            acc += factor * delta[t];
            factor *= gamma * ratio[t].min(c_bar);
        }
        targets[tp] = acc;
    }
    Ok(targets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Independent backward recursion:
    /// `v(t) = V(t) + d(t) + gamma * c_t * (v(t+1) - V(t+1))`.
    fn recursive_targets(
        rewards: &[f64],
        values: &[f64],
        mu: &[f64],
        pi: &[f64],
        gamma: f64,
        rho_bar: f64,
        c_bar: f64,
    ) -> Vec<f64> {
        let n = rewards.len();
        let mut v = vec![0.0; n + 1];
        for t in (0..n).rev() {
            let ratio = pi[t] / mu[t];
            let next_value = if t + 1 < n { values[t + 1] } else { 0.0 };
            let delta = ratio.min(rho_bar) * (rewards[t] + gamma * next_value - values[t]);
            v[t] = values[t] + delta + gamma * ratio.min(c_bar) * (v[t + 1] - next_value);
        }
        v.truncate(n);
        v
    }

    #[test]
    fn test_single_terminal_step_on_policy() {
        // delta = r - V, so the target collapses to the reward, bit for bit.
        let v = vtrace_targets(&[0.8], &[0.3], &[0.6], &[0.6], 1.0, 1.0, 1.0).unwrap();
        assert_eq!(v[0], 0.8);
    }

    #[test]
    fn test_on_policy_zero_values_gives_returns() {
        let v = vtrace_targets(
            &[0.0, 0.0, 0.7],
            &[0.0, 0.0, 0.0],
            &[0.5, 0.5, 0.5],
            &[0.5, 0.5, 0.5],
            1.0,
            1.0,
            1.0,
        )
        .unwrap();
        for &t in &v {
            assert!((t - 0.7).abs() < 1e-15);
        }
    }

    #[test]
    fn test_full_truncation_leaves_values() {
        let values = [0.2, -0.4, 1.1];
        let v = vtrace_targets(
            &[0.0, 0.0, 1.0],
            &values,
            &[0.3, 0.3, 0.3],
            &[0.9, 0.1, 0.3],
            1.0,
            0.0,
            0.0,
        )
        .unwrap();
        assert_eq!(v, values.to_vec());
    }

    #[test]
    fn test_on_policy_untruncated_telescopes_to_returns() {
        // With pi = mu and bars >= 1 the value terms cancel and each target
        // is the discounted sum of future rewards.
        let rewards = [0.1, -0.2, 0.0, 0.5];
        let values = [0.7, -0.3, 0.2, 0.9];
        let mu = [0.4, 0.9, 0.2, 0.6];
        let gamma = 0.9;
        let v = vtrace_targets(&rewards, &values, &mu, &mu, gamma, 1.0, 1.0).unwrap();
        for tp in 0..rewards.len() {
            let ret: f64 = (tp..rewards.len())
                .map(|t| gamma.powi((t - tp) as i32) * rewards[t])
                .sum();
            assert!((v[tp] - ret).abs() < 1e-12, "step {tp}: {} vs {ret}", v[tp]);
        }
    }

    #[test]
    fn test_matches_recursive_oracle_off_policy() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for case in 0..200 {
            let n = rng.gen_range(1..=10);
            let rewards: Vec<f64> = (0..n)
                .map(|t| if t + 1 == n { rng.gen_range(-1.0..1.0) } else { 0.0 })
                .collect();
            let values: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let mu: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
            let pi: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
            for &(gamma, rho_bar, c_bar) in
                &[(1.0, 1.0, 1.0), (0.9, 1.0, 1.0), (1.0, 0.6, 0.4), (0.95, 2.0, 1.5)]
            {
                let got =
                    vtrace_targets(&rewards, &values, &mu, &pi, gamma, rho_bar, c_bar).unwrap();
                let want = recursive_targets(&rewards, &values, &mu, &pi, gamma, rho_bar, c_bar);
                for (g, w) in got.iter().zip(&want) {
                    assert!(
                        (g - w).abs() <= 1e-12,
                        "case {case}: {g} vs {w} (n={n}, gamma={gamma})"
                    );
                }
            }
        }
    }

    #[test]
    fn test_rejects_bad_inputs() {
        assert!(vtrace_targets(&[], &[], &[], &[], 1.0, 1.0, 1.0).is_err());
        // Zero behavior probability.
        assert!(vtrace_targets(&[0.0], &[0.0], &[0.0], &[0.5], 1.0, 1.0, 1.0).is_err());
        // Behavior probability above 1.
        assert!(vtrace_targets(&[0.0], &[0.0], &[1.5], &[0.5], 1.0, 1.0, 1.0).is_err());
        // Length mismatch.
        assert!(vtrace_targets(&[0.0, 0.0], &[0.0], &[0.5, 0.5], &[0.5, 0.5], 1.0, 1.0, 1.0).is_err());
        // Non-finite value.
        assert!(vtrace_targets(&[0.0], &[f64::NAN], &[0.5], &[0.5], 1.0, 1.0, 1.0).is_err());
    }
}
