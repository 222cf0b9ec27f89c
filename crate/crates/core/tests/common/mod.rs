#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trajeval_core::nalgebra::Vector3;
use trajeval_core::{MatchedPairs, Pose, Quaternion, RigidTransform, Trajectory};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_quaternion(rng: &mut impl Rng) -> Quaternion {
    loop {
        let v: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        if let Ok(q) = Quaternion::new(v[0], v[1], v[2], v[3]) {
            return q;
        }
    }
}

pub fn random_vector(rng: &mut impl Rng, scale: f64) -> Vector3<f64> {
    Vector3::new(
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
    )
}

pub fn random_transform(rng: &mut impl Rng) -> RigidTransform {
    RigidTransform::from_quaternion(&random_quaternion(rng), random_vector(rng, 5.0))
}

/// `n` poses at 30 Hz with independent random orientations and positions.
pub fn random_trajectory(rng: &mut impl Rng, n: usize) -> Trajectory {
    let poses = (0..n)
        .map(|k| Pose::new(k as f64 / 30.0, random_transform(rng)).unwrap())
        .collect();
    Trajectory::from_sorted("random", poses).unwrap()
}

/// Same timestamps, each pose premultiplied by `g`.
pub fn transformed(traj: &Trajectory, g: &RigidTransform) -> Trajectory {
    let poses = traj
        .poses()
        .iter()
        .map(|p| p.with_transform(g.compose(p.transform())))
        .collect();
    Trajectory::from_sorted(traj.label(), poses).unwrap()
}

pub fn synchronized(gt: &Trajectory, est: &Trajectory) -> MatchedPairs {
    MatchedPairs::synchronized(gt, est).unwrap()
}
