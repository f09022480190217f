//! Fixtures shared by the throughput benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vnf_lab::agent::{Agent, PatAgent, PatConfig};
use vnf_lab::harness::{AgentConfig, ExperimentConfig};
use vnf_lab::nn::{standard_mlp, Head, Matrix, Mlp, INIT_STD};
use vnf_lab::sim::{EnvConfig, VnfEnv};

/// Environment built from the shipped defaults.
pub fn default_env(seed: u64) -> VnfEnv {
    VnfEnv::from_seed(ExperimentConfig::defaults().env_config(), seed).expect("defaults are valid")
}

/// Learner hyperparameters from the shipped defaults.
pub fn default_pat_config() -> PatConfig {
    match ExperimentConfig::defaults().agent {
        AgentConfig::Pat(p) => p,
        other => panic!("defaults configure `{}`, expected pat", other.name()),
    }
}

/// A critic-shaped network for the default environment and a random input batch.
pub fn critic_fixture(env: &EnvConfig, batch: usize, seed: u64) -> (Mlp, Matrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let input = env.feature_len() + env.k_servers() + 1 + 2;
    let mut mlp = standard_mlp(input, 1, Head::Linear).expect("valid shape");
    mlp.xavier_init(Some(INIT_STD), &mut rng);
    let data = (0..batch * input).map(|_| rng.random_range(-1.0..1.0)).collect();
    (mlp, Matrix::from_vec(batch, input, data).expect("matching length"))
}

/// A learner whose replay buffer already holds enough transitions to train.
pub fn warm_pat(seed: u64) -> (PatAgent, VnfEnv) {
    let mut env = default_env(seed);
    let cfg = env.config().clone();
    let pat = default_pat_config();
    let warmup = pat.warmup_size.max(pat.batch_size);
    let mut agent = PatAgent::new(
        pat,
        cfg.feature_len(),
        cfg.k_servers(),
        cfg.param_scale(),
        ChaCha8Rng::seed_from_u64(seed ^ 0x5eed),
    )
    .expect("defaults are valid");
    while agent.buffer().len() < warmup {
        let report = env.advance_epoch(|d| agent.act(d, true)).expect("epoch runs");
        for t in &report.transitions {
            agent.observe(t);
        }
    }
    (agent, env)
}
