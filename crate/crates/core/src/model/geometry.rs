use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{RuPlacement, Scenario, N_OPERATORS};

pub type Point = [f64; 2];

/// UE and RU coordinates in meters, indexed `[op][idx]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Placement {
    pub ues: [Vec<Point>; N_OPERATORS],
    pub rus: [Vec<Point>; N_OPERATORS],
}

impl Placement {
    pub fn distance(a: Point, b: Point) -> f64 {
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
    }
}

fn uniform_in_disk<R: Rng>(rng: &mut R, radius: f64) -> Point {
    let r = radius * rng.gen::<f64>().sqrt();
    let theta = std::f64::consts::TAU * rng.gen::<f64>();
    [r * theta.cos(), r * theta.sin()]
}

/// `count` points on a square lattice inscribed in the disk, row-major.
fn lattice_in_disk(count: usize, radius: f64) -> Vec<Point> {
    if count == 0 {
        return Vec::new();
    }
    let side = (count as f64).sqrt().ceil() as usize;
    let half = radius / std::f64::consts::SQRT_2;
    let step = 2.0 * half / side as f64;
    (0..count)
        .map(|n| {
            let (row, col) = (n / side, n % side);
            [-half + (col as f64 + 0.5) * step, -half + (row as f64 + 0.5) * step]
        })
        .collect()
}

/// Draws UE positions (and RU positions, for uniform placement) in the disk
/// of radius `cell_radius`. Deterministic in `seed`.
pub fn generate_scenario_geometry(scenario: &Scenario, seed: u64) -> Placement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = scenario.cell_radius;
    let ues = [0, 1].map(|op| (0..scenario.n_ues[op]).map(|_| uniform_in_disk(&mut rng, radius)).collect());
    let rus = match scenario.ru_placement {
        RuPlacement::Uniform => {
            [0, 1].map(|op| (0..scenario.n_rus[op]).map(|_| uniform_in_disk(&mut rng, radius)).collect())
        }
        RuPlacement::Grid => {
            let all = lattice_in_disk(scenario.n_rus[0] + scenario.n_rus[1], radius);
            let (a, b) = all.split_at(scenario.n_rus[0]);
            [a.to_vec(), b.to_vec()]
        }
    };
    Placement { ues, rus }
}
