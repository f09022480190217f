use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use vnf_lab::agent::Agent;
use vnf_lab::baselines::GreedyAgent;
use vnf_lab::nn::Matrix;
use vnf_lab_bench::{critic_fixture, default_env, warm_pat};

const BATCH: usize = 128;

fn networks(c: &mut Criterion) {
    let env = default_env(0);
    let (mlp, x) = critic_fixture(env.config(), BATCH, 1);
    let grad_out = Matrix::from_vec(BATCH, 1, vec![1.0 / BATCH as f64; BATCH]).unwrap();
    c.bench_function("critic_forward_b128", |b| b.iter(|| black_box(mlp.forward(black_box(&x)))));
    let cache = mlp.forward(&x);
    c.bench_function("critic_backward_b128", |b| {
        b.iter(|| black_box(mlp.backward(black_box(&cache), black_box(&grad_out))))
    });
}

fn simulator(c: &mut Criterion) {
    let mut env = default_env(2);
    let mut greedy = GreedyAgent;
    c.bench_function("advance_epoch_greedy", |b| {
        b.iter(|| black_box(env.advance_epoch(|d| greedy.act(d, false)).unwrap()))
    });
}

fn learner(c: &mut Criterion) {
    let (mut agent, _) = warm_pat(3);
    c.bench_function("pat_train_step", |b| b.iter(|| black_box(agent.train_step().unwrap())));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = networks, simulator, learner
}
criterion_main!(benches);
