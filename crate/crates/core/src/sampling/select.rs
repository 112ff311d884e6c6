//! Subset selection maximizing `J(S) = α·d_min(S) + β·mean NN distance(S)`:
//! best-of-several farthest-point seeds refined by simulated annealing, with
//! periodic closest-pair rescue and a final greedy ascent on `d_min`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::InvariantTriplet;

/// Annealing parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SaConfig {
    pub alpha: f64,
    pub beta: f64,
    /// Initial temperature, relative to the objective of the seed subset.
    pub t0: f64,
    pub cooling: f64,
    pub max_iter: usize,
    pub stall_iter: usize,
    pub n_cand: usize,
    pub n_swap: usize,
    pub fps_runs: usize,
    pub rescue_every: usize,
    pub hill_every: usize,
}

impl Default for SaConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 0.25,
            t0: 1.0,
            cooling: 0.999,
            max_iter: 20_000,
            stall_iter: 5_000,
            n_cand: 256,
            n_swap: 8,
            fps_runs: 8,
            rescue_every: 500,
            hill_every: 5_000,
        }
    }
}

/// Chosen subset; distances refer to the z-scored cloud.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    /// Index into the input cloud, `None` for the forced anchor.
    pub source: Vec<Option<usize>>,
    pub points: Vec<InvariantTriplet>,
    pub d_min: f64,
    pub mean_nn: f64,
    pub objective: f64,
    pub iterations: usize,
}

fn d2(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)
}

fn standardize(pts: &[[f64; 3]]) -> Vec<[f64; 3]> {
    let n = pts.len() as f64;
    let mut mean = [0.0; 3];
    let mut sd = [0.0; 3];
    for p in pts {
        for k in 0..3 {
            mean[k] += p[k] / n;
        }
    }
    for p in pts {
        for k in 0..3 {
            sd[k] += (p[k] - mean[k]).powi(2) / n;
        }
    }
    let sd = sd.map(|v| if v > 0.0 { v.sqrt() } else { 1.0 });
    pts.iter().map(|p| [0, 1, 2].map(|k| (p[k] - mean[k]) / sd[k])).collect()
}

/// Nearest-neighbour distance of every member and the derived statistics.
struct Stats {
    nn: Vec<f64>,
    nn_slot: Vec<usize>,
}

struct Problem<'a> {
    x: &'a [[f64; 3]],
    alpha: f64,
    beta: f64,
    /// Number of leading slots that may never be swapped out.
    fixed: usize,
}

impl Problem<'_> {
    fn dist(&self, a: usize, b: usize) -> f64 {
        d2(&self.x[a], &self.x[b]).sqrt()
    }

    fn stats(&self, members: &[usize]) -> Stats {
        let k = members.len();
        let mut nn = vec![f64::INFINITY; k];
        let mut nn_slot = vec![0; k];
        for i in 0..k {
            for j in i + 1..k {
                let d = self.dist(members[i], members[j]);
                if d < nn[i] {
                    nn[i] = d;
                    nn_slot[i] = j;
                }
                if d < nn[j] {
                    nn[j] = d;
                    nn_slot[j] = i;
                }
            }
        }
        Stats { nn, nn_slot }
    }

    fn objective(&self, s: &Stats) -> f64 {
        let (dmin, mean) = summary(&s.nn);
        self.alpha * dmin + self.beta * mean
    }

    /// Statistics after replacing slot `p` by point `q`.
    fn propose(&self, members: &[usize], s: &Stats, p: usize, q: usize) -> Stats {
        let k = members.len();
        let mut nn = s.nn.clone();
        let mut nn_slot = s.nn_slot.clone();
        nn[p] = f64::INFINITY;
        for i in 0..k {
            if i == p {
                continue;
            }
            let dq = self.dist(members[i], q);
            if nn_slot[i] == p {
                nn[i] = dq;
                for j in 0..k {
                    if j != i && j != p {
                        let d = self.dist(members[i], members[j]);
                        if d < nn[i] {
                            nn[i] = d;
                            nn_slot[i] = j;
                        }
                    }
                }
            } else if dq < nn[i] {
                nn[i] = dq;
                nn_slot[i] = p;
            }
            if dq < nn[p] {
                nn[p] = dq;
                nn_slot[p] = i;
            }
        }
        Stats { nn, nn_slot }
    }

    /// Farthest-point sampling from the fixed prefix plus an optional start.
    fn fps(&self, prefix: &[usize], start: Option<usize>, k: usize) -> Vec<usize> {
        let mut members = prefix.to_vec();
        members.extend(start);
        let mut r = vec![f64::INFINITY; self.x.len()];
        for &m in &members {
            for (i, ri) in r.iter_mut().enumerate() {
                *ri = ri.min(d2(&self.x[i], &self.x[m]));
            }
        }
        while members.len() < k {
            let (far, _) = r
                .iter()
                .enumerate()
                .fold((0, -1.0), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
            members.push(far);
            for (i, ri) in r.iter_mut().enumerate() {
                *ri = ri.min(d2(&self.x[i], &self.x[far]));
            }
        }
        members
    }

    /// Non-member farthest from `members` without slot `skip`.
    fn farthest_from(&self, members: &[usize], skip: usize) -> usize {
        let mut best = (0, -1.0);
        for i in 0..self.x.len() {
            if members.contains(&i) {
                continue;
            }
            let r = members
                .iter()
                .enumerate()
                .filter(|&(s, _)| s != skip)
                .map(|(_, &m)| d2(&self.x[i], &self.x[m]))
                .fold(f64::INFINITY, f64::min);
            if r > best.1 {
                best = (i, r);
            }
        }
        best.0
    }

    /// Best single swap of a closest-pair member with the farthest outside
    /// point; applied only if `d_min` grows and `J` does not drop.
    fn closest_pair_swap(&self, members: &mut [usize]) -> bool {
        let s = self.stats(members);
        let (dmin, _) = summary(&s.nn);
        let j0 = self.objective(&s);
        let a = (0..members.len()).fold(0, |b, i| if s.nn[i] < s.nn[b] { i } else { b });
        let pair = [a, s.nn_slot[a]];
        let mut best: Option<(usize, usize, f64)> = None;
        for &p in pair.iter().filter(|&&p| p >= self.fixed) {
            let q = self.farthest_from(members, p);
            let prop = self.propose(members, &s, p, q);
            let (dm, _) = summary(&prop.nn);
            let j = self.objective(&prop);
            if dm > dmin && j >= j0 && best.is_none_or(|b| dm > b.2) {
                best = Some((p, q, dm));
            }
        }
        match best {
            Some((p, q, _)) => {
                members[p] = q;
                true
            }
            None => false,
        }
    }

    fn hill_climb(&self, members: &mut [usize]) {
        for _ in 0..10 * members.len() {
            if !self.closest_pair_swap(members) {
                break;
            }
        }
    }
}

fn summary(nn: &[f64]) -> (f64, f64) {
    let dmin = nn.iter().copied().fold(f64::INFINITY, f64::min);
    (dmin, nn.iter().sum::<f64>() / nn.len() as f64)
}

/// Squared distance of every point to the nearest member, with the owning slot.
struct Coverage {
    r: Vec<f64>,
    owner: Vec<usize>,
}

impl Coverage {
    fn new(x: &[[f64; 3]], members: &[usize]) -> Self {
        let mut cov = Coverage { r: vec![f64::INFINITY; x.len()], owner: vec![0; x.len()] };
        for i in 0..x.len() {
            cov.refresh(x, members, i);
        }
        cov
    }

    fn refresh(&mut self, x: &[[f64; 3]], members: &[usize], i: usize) {
        self.r[i] = f64::INFINITY;
        for (s, &m) in members.iter().enumerate() {
            let d = d2(&x[i], &x[m]);
            if d < self.r[i] {
                self.r[i] = d;
                self.owner[i] = s;
            }
        }
    }

    /// Update after `members[slot]` has been replaced.
    fn swap(&mut self, x: &[[f64; 3]], members: &[usize], slot: usize) {
        let q = members[slot];
        for i in 0..x.len() {
            if self.owner[i] == slot {
                self.refresh(x, members, i);
            } else {
                let d = d2(&x[i], &x[q]);
                if d < self.r[i] {
                    self.r[i] = d;
                    self.owner[i] = slot;
                }
            }
        }
    }

    fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.r
            .iter()
            .map(|&v| {
                acc += v;
                acc
            })
            .collect()
    }
}

/// Select `k` points of `cloud` (plus `anchor` when given, counted in `k` and
/// never swapped out) maximizing spread in z-scored invariant space.
pub fn select_triplets(
    cloud: &[InvariantTriplet],
    k: usize,
    anchor: Option<InvariantTriplet>,
    sa: &SaConfig,
    seed: u64,
) -> Result<Selection> {
    let fixed = usize::from(anchor.is_some());
    if k < fixed || k > cloud.len() + fixed {
        return Err(Error::InvalidArgument(format!(
            "cannot select {k} points from a cloud of {} (anchor: {})",
            cloud.len(),
            anchor.is_some()
        )));
    }
    let mut all: Vec<InvariantTriplet> = anchor.into_iter().collect();
    all.extend_from_slice(cloud);
    let raw: Vec<[f64; 3]> = all.iter().map(InvariantTriplet::as_array).collect();
    let x = standardize(&raw);
    let prob = Problem { x: &x, alpha: sa.alpha, beta: sa.beta, fixed };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let prefix: Vec<usize> = (0..fixed).collect();

    let finish = |members: Vec<usize>, iterations: usize| {
        let s = prob.stats(&members);
        let (d_min, mean_nn) = if members.len() > 1 { summary(&s.nn) } else { (0.0, 0.0) };
        Selection {
            source: members.iter().map(|&m| m.checked_sub(fixed)).collect(),
            points: members.iter().map(|&m| all[m]).collect(),
            d_min,
            mean_nn,
            objective: sa.alpha * d_min + sa.beta * mean_nn,
            iterations,
        }
    };
    if k == all.len() {
        return Ok(finish((0..all.len()).collect(), 0));
    }
    if k < 2 {
        let start = (fixed == 0 && k == 1).then_some(0);
        return Ok(finish(prob.fps(&prefix, start, k), 0));
    }

    let mut curr = Vec::new();
    let mut curr_dmin = -1.0;
    for run in 0..sa.fps_runs.max(1) {
        let start = if run == 0 && fixed > 0 { None } else { Some(rng.random_range(fixed..all.len())) };
        let cand = prob.fps(&prefix, start, k);
        let dm = summary(&prob.stats(&cand).nn).0;
        if dm > curr_dmin {
            curr_dmin = dm;
            curr = cand;
        }
    }

    let mut stats = prob.stats(&curr);
    let mut j_curr = prob.objective(&stats);
    let mut best = curr.clone();
    let mut j_best = j_curr;
    let mut i_best = 0;
    let mut temp = sa.t0 * j_curr.abs().max(f64::MIN_POSITIVE);
    let mut cov = Coverage::new(&x, &curr);
    let mut cum = cov.cumulative();
    let mut iterations = 0;

    for it in 1..=sa.max_iter {
        iterations = it;
        let total = *cum.last().unwrap();
        if total > 0.0 {
            let pool: Vec<usize> = (0..sa.n_cand)
                .map(|_| {
                    let u = rng.random::<f64>() * total;
                    cum.partition_point(|&c| c <= u).min(all.len() - 1)
                })
                .collect();
            for _ in 0..sa.n_swap {
                let p = rng.random_range(fixed..k);
                let q = pool[rng.random_range(0..pool.len())];
                if cov.r[q] == 0.0 {
                    continue;
                }
                let prop = prob.propose(&curr, &stats, p, q);
                let j = prob.objective(&prop);
                let dj = j - j_curr;
                if dj >= 0.0 || rng.random::<f64>() < (dj / temp).exp() {
                    curr[p] = q;
                    stats = prop;
                    j_curr = j;
                    cov.swap(&x, &curr, p);
                    cum = cov.cumulative();
                    if j_curr > j_best {
                        best.clone_from(&curr);
                        j_best = j_curr;
                        i_best = it;
                    }
                    break;
                }
            }
        }
        temp *= sa.cooling;
        if sa.rescue_every > 0 && it % sa.rescue_every == 0 && prob.closest_pair_swap(&mut best) {
            j_best = prob.objective(&prob.stats(&best));
        }
        if sa.hill_every > 0 && it % sa.hill_every == 0 {
            prob.hill_climb(&mut best);
            j_best = prob.objective(&prob.stats(&best));
        }
        if it - i_best > sa.stall_iter {
            break;
        }
    }
    prob.hill_climb(&mut best);
    Ok(finish(best, iterations))
}
