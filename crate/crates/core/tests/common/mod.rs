#![allow(dead_code)]

use maoea::{IdealPoint, Individual, ReferenceVector};
use rand::Rng;

pub fn ind(objs: &[f64]) -> Individual {
    Individual::new(objs.to_vec(), objs.to_vec())
}

pub fn direction(d: &[f64]) -> ReferenceVector {
    let s: f64 = d.iter().sum();
    ReferenceVector {
        coords: vec![0; d.len()],
        direction: d.iter().map(|v| v / s).collect(),
    }
}

/// Random pool in the unit cube; roughly one member in eight repeats an
/// earlier one so that ties get exercised.
pub fn random_pool<R: Rng>(rng: &mut R, m: usize, size: usize) -> Vec<Individual> {
    let mut pool: Vec<Individual> = Vec::with_capacity(size);
    for k in 0..size {
        if k > 0 && rng.random_range(0..8) == 0 {
            let j = rng.random_range(0..k);
            let copy = pool[j].objectives.clone();
            pool.push(ind(&copy));
        } else {
            let f: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
            pool.push(ind(&f));
        }
    }
    pool
}

pub fn random_directions<R: Rng>(rng: &mut R, m: usize, count: usize) -> Vec<ReferenceVector> {
    (0..count)
        .map(|_| {
            let d: Vec<f64> = (0..m).map(|_| rng.random_range(0.01..1.0)).collect();
            direction(&d)
        })
        .collect()
}

pub fn ideal_of(pool: &[Individual]) -> IdealPoint {
    let m = pool[0].objectives.len();
    IdealPoint::from_points(m, pool.iter().map(|i| i.objectives.as_slice()))
}

/// Step-by-step cascade clustering written directly from the procedure:
/// double-loop dominance, arccos angles, explicit cluster tables.
pub struct OracleResult {
    pub population: Vec<usize>,
    pub active: Vec<usize>,
    pub centers: Vec<usize>,
}

fn dominated_by(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for k in 0..a.len() {
        if b[k] > a[k] {
            return false;
        }
        if b[k] < a[k] {
            strictly = true;
        }
    }
    strictly
}

fn cos_angle(a: &[f64], b: &[f64]) -> Option<f64> {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 {
        return None;
    }
    Some((dot / (na * nb)).clamp(-1.0, 1.0))
}

pub fn oracle_cc(pool: &[Individual], z: &[ReferenceVector], n: usize, ideal: &IdealPoint) -> OracleResult {
    let ideal = ideal.values();
    let t: Vec<Vec<f64>> = pool
        .iter()
        .map(|p| p.objectives.iter().zip(ideal).map(|(a, b)| a - b).collect())
        .collect();

    // step 1: frontier / non-frontier
    let mut is_front = vec![true; pool.len()];
    for i in 0..pool.len() {
        for j in 0..pool.len() {
            if dominated_by(&pool[i].objectives, &pool[j].objectives) {
                is_front[i] = false;
            }
        }
    }

    // step 2: attach frontiers to the reference vector at minimal angle
    let angle_to = |i: usize, r: usize| cos_angle(&t[i], &z[r].direction).map_or(0.0, f64::acos);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); z.len()];
    for i in (0..pool.len()).filter(|&i| is_front[i]) {
        let mut best = 0;
        for r in 1..z.len() {
            if angle_to(i, r) < angle_to(i, best) {
                best = r;
            }
        }
        members[best].push(i);
    }

    // step 3: sort by PDM, pick centers
    let pdm = |i: usize, r: usize| {
        let mean = t[i].iter().sum::<f64>() / t[i].len() as f64;
        let sin = cos_angle(&t[i], &z[r].direction).map_or(0.0, |c| (1.0 - c * c).max(0.0).sqrt());
        mean + sin
    };
    let mut active = Vec::new();
    let mut fronts: Vec<Vec<usize>> = Vec::new();
    for (r, list) in members.iter().enumerate() {
        if list.is_empty() {
            continue;
        }
        let mut sorted = list.clone();
        // insertion sort keeps equal keys in pool order
        for a in 1..sorted.len() {
            let mut b = a;
            while b > 0 && pdm(sorted[b], r) < pdm(sorted[b - 1], r) {
                sorted.swap(b, b - 1);
                b -= 1;
            }
        }
        active.push(r);
        fronts.push(sorted);
    }
    let centers: Vec<usize> = fronts.iter().map(|f| f[0]).collect();

    // step 4: non-frontiers to the nearest center
    let dist = |a: usize, b: usize| t[a].iter().zip(&t[b]).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let mut rests: Vec<Vec<usize>> = vec![Vec::new(); centers.len()];
    for i in (0..pool.len()).filter(|&i| !is_front[i]) {
        let mut best = 0;
        for c in 1..centers.len() {
            if dist(i, centers[c]) < dist(i, centers[best]) {
                best = c;
            }
        }
        rests[best].push(i);
    }
    for (c, list) in rests.iter_mut().enumerate() {
        for a in 1..list.len() {
            let mut b = a;
            while b > 0 && dist(list[b], centers[c]) < dist(list[b - 1], centers[c]) {
                list.swap(b, b - 1);
                b -= 1;
            }
        }
    }

    // steps 5-6: round robin
    let queues: Vec<Vec<usize>> = fronts.iter().zip(&rests).map(|(f, r)| [f.clone(), r.clone()].concat()).collect();
    let mut cursor = vec![0; queues.len()];
    let mut population = Vec::new();
    let want = n.min(pool.len());
    let mut c = 0;
    while population.len() < want {
        if cursor[c] < queues[c].len() {
            population.push(queues[c][cursor[c]]);
            cursor[c] += 1;
        }
        c = (c + 1) % queues.len();
    }
    OracleResult {
        population,
        active,
        centers,
    }
}

pub fn pick(pool: &[Individual], idx: &[usize]) -> Vec<Individual> {
    idx.iter().map(|&i| pool[i].clone()).collect()
}
