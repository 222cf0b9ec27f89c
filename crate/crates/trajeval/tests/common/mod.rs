#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trajeval::tum::write_tum_file;
use trajeval_core::synth::{degrade, generate, Degradation, DegradationSpec, MotionSpec, Shape};
use trajeval_core::nalgebra::{UnitQuaternion, Vector3};
use trajeval_core::{Pose, Quaternion, RigidTransform, Trajectory};

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl From<Output> for Run {
    fn from(o: Output) -> Self {
        Run {
            code: o.status.code().expect("process exited normally"),
            stdout: String::from_utf8(o.stdout).unwrap(),
            stderr: String::from_utf8(o.stderr).unwrap(),
        }
    }
}

pub fn command(cwd: &Path) -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_trajeval"));
    c.current_dir(cwd).env_remove("TRAJEVAL_OUTPUT_DIR");
    c
}

pub fn run(cwd: &Path, args: &[&str]) -> Run {
    command(cwd).args(args).output().unwrap().into()
}

pub fn write(dir: &Path, name: &str, traj: &Trajectory) -> PathBuf {
    let path = dir.join(name);
    write_tum_file(traj, &path).unwrap();
    path
}

pub fn motion(shape: Shape, duration: f64, rate: f64, seed: u64) -> Trajectory {
    generate(&MotionSpec { seed, ..MotionSpec::new(shape, duration, rate) }).unwrap()
}

pub fn degraded(traj: &Trajectory, kind: Degradation, seed: u64) -> Trajectory {
    degrade(traj, &DegradationSpec::new(kind, seed)).unwrap()
}

/// Poses at the given stamps moving along x, identity orientation.
pub fn stamps_trajectory(times: &[f64]) -> Trajectory {
    let poses = times
        .iter()
        .map(|&t| Pose::new(t, RigidTransform::from_translation(Vector3::new(t, 0.0, 0.0))).unwrap())
        .collect();
    Trajectory::new("stamps", poses).unwrap().0
}

pub fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()).collect()
}

/// Random poses with large coordinates and irregular stamps.
pub fn random_tum_trajectory(seed: u64, n: usize) -> Trajectory {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = rng.random_range(0.0..1e9);
    let poses = (0..n)
        .map(|_| {
            t += rng.random_range(1e-3..0.1);
            let q = UnitQuaternion::from_scaled_axis(Vector3::new(
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
            ));
            let q = Quaternion::new(q.i, q.j, q.k, q.w).unwrap();
            let p = Vector3::new(
                rng.random_range(-100.0..100.0),
                rng.random_range(-100.0..100.0),
                rng.random_range(-100.0..100.0),
            );
            Pose::new(t, RigidTransform::from_quaternion(&q, p)).unwrap()
        })
        .collect();
    Trajectory::from_sorted("random", poses).unwrap()
}

/// One mutation applied to a valid line.
pub fn mutate_line(line: &str, rng: &mut ChaCha8Rng) -> String {
    let fields: Vec<&str> = line.split(' ').collect();
    let junk = ["nan", "inf", "-inf", "x", "1e999", "", "0x1", "--1", "1.2.3", "+"];
    match rng.random_range(0..6) {
        0 => {
            let mut f: Vec<String> = fields.iter().map(|s| s.to_string()).collect();
            let k = rng.random_range(0..f.len());
            f[k] = junk[rng.random_range(0..junk.len())].to_string();
            f.join(" ")
        }
        1 => fields[..rng.random_range(0..fields.len())].join(" "),
        2 => format!("{line} 1.0"),
        3 => {
            // zero quaternion
            let mut f: Vec<&str> = fields.clone();
            f[4..8].copy_from_slice(&["0", "0", "0", "0"]);
            f.join(" ")
        }
        4 => {
            let cut = rng.random_range(1..line.len());
            let bytes: String = line.chars().take(cut).collect();
            format!("{bytes}\u{fffd}{}", &line[cut..])
        }
        _ => {
            let mut f: Vec<&str> = fields.clone();
            f[0] = "-1";
            f.join(" ")
        }
    }
}
