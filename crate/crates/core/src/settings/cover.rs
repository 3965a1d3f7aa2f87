//! Grouping of a fixed Pauli support into settings by minimum set cover.
//!
//! A setting covers a Pauli term when, on every party, the term's factor is
//! the identity or lies along the setting's direction. Coefficients are never
//! recombined across directions, so the count found here is an upper bound on
//! the true minimum number of settings.

use crate::error::{Error, Result};
use crate::pauli::{from_pauli, index_label, PauliCoefficients, SUPPORT_THRESHOLD};
use crate::settings::{Direction, LocalDecomposition, MeasurementSetting};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoverStrategy {
    /// Branch and bound; returns a minimum cover.
    #[default]
    Exact,
    /// Largest-gain-first heuristic.
    Greedy,
}

struct Candidate {
    directions: Vec<Direction>,
    mask: u64,
}

/// Covers the support of `c` with settings drawn from `candidates`.
///
/// `candidates` holds either one list shared by all parties or one list per
/// party.
pub fn group_pauli_terms(
    c: &PauliCoefficients,
    candidates: &[Vec<Direction>],
    strategy: CoverStrategy,
) -> Result<LocalDecomposition> {
    let n = c.n_qubits();
    let per_party: Vec<&Vec<Direction>> = match candidates.len() {
        1 => vec![&candidates[0]; n],
        len if len == n => candidates.iter().collect(),
        len => return Err(Error::DimensionMismatch { expected: n, got: len }),
    };
    if per_party.iter().any(|l| l.is_empty()) {
        return Err(Error::EmptyInput("every party needs at least one candidate direction"));
    }

    let identity_coeff = c.get(&vec![0; n]);
    let terms: Vec<(Vec<usize>, f64)> = c
        .support(SUPPORT_THRESHOLD)
        .filter(|(idx, _)| idx.iter().any(|&i| i != 0))
        .collect();
    if terms.len() > 64 {
        return Err(Error::InvalidParameter(format!("{} terms exceed the 64-term cover limit", terms.len())));
    }

    for (idx, _) in &terms {
        for (k, &axis) in idx.iter().enumerate() {
            if axis != 0 && !per_party[k].iter().any(|d| d.pauli_axis() == Some(axis)) {
                return Err(Error::Uncoverable(index_label(idx)));
            }
        }
    }

    let pool = candidate_pool(&per_party, &terms);
    let full: u64 = if terms.len() == 64 { u64::MAX } else { (1u64 << terms.len()) - 1 };

    let chosen: Vec<usize> = if terms.is_empty() {
        if identity_coeff.abs() > SUPPORT_THRESHOLD {
            vec![0]
        } else {
            Vec::new()
        }
    } else {
        let greedy = greedy_cover(&pool, full);
        match strategy {
            CoverStrategy::Greedy => greedy,
            CoverStrategy::Exact => {
                let mut search = BranchAndBound {
                    pool: &pool,
                    full,
                    best: greedy,
                };
                search.run(0, &mut Vec::new());
                search.best
            }
        }
    };

    let mut settings = Vec::with_capacity(chosen.len());
    let mut covered = 0u64;
    for (pos, &ci) in chosen.iter().enumerate() {
        let cand = &pool[ci];
        let mut weights = vec![if pos == 0 { identity_coeff } else { 0.0 }; 1 << n];
        for (t, (idx, coeff)) in terms.iter().enumerate() {
            if cand.mask & (1 << t) == 0 || covered & (1 << t) != 0 {
                continue;
            }
            for (o, w) in weights.iter_mut().enumerate() {
                let sign: f64 = idx
                    .iter()
                    .enumerate()
                    .filter(|(_, &axis)| axis != 0)
                    .map(|(k, _)| if (o >> (n - 1 - k)) & 1 == 0 { 1.0 } else { -1.0 })
                    .product();
                *w += coeff * sign;
            }
        }
        covered |= cand.mask;
        settings.push(MeasurementSetting::from_directions(cand.directions.clone(), weights)?);
    }

    LocalDecomposition::new("pauli-cover", settings).verified_against(&from_pauli(c))
}

/// All direction combinations, with empty and dominated coverage masks removed.
fn candidate_pool(per_party: &[&Vec<Direction>], terms: &[(Vec<usize>, f64)]) -> Vec<Candidate> {
    let mut combos: Vec<Vec<Direction>> = vec![Vec::new()];
    for list in per_party {
        combos = combos
            .into_iter()
            .flat_map(|prefix| {
                list.iter().map(move |d| {
                    let mut next = prefix.clone();
                    next.push(*d);
                    next
                })
            })
            .collect();
    }
    let mut pool: Vec<Candidate> = combos
        .into_iter()
        .map(|directions| {
            let mut mask = 0u64;
            for (t, (idx, _)) in terms.iter().enumerate() {
                let ok = idx
                    .iter()
                    .zip(&directions)
                    .all(|(&axis, d)| axis == 0 || d.pauli_axis() == Some(axis));
                if ok {
                    mask |= 1 << t;
                }
            }
            Candidate { directions, mask }
        })
        .collect();

    if terms.is_empty() {
        pool.truncate(1);
        return pool;
    }
    let mut keep: Vec<Candidate> = Vec::new();
    for cand in pool {
        if cand.mask == 0 {
            continue;
        }
        if keep.iter().any(|k| k.mask | cand.mask == k.mask) {
            continue;
        }
        keep.retain(|k| k.mask | cand.mask != cand.mask);
        keep.push(cand);
    }
    keep
}

fn greedy_cover(pool: &[Candidate], full: u64) -> Vec<usize> {
    let mut covered = 0u64;
    let mut chosen = Vec::new();
    while covered != full {
        let (best, _) = pool
            .iter()
            .enumerate()
            .map(|(i, c)| (i, (c.mask & !covered).count_ones()))
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
            .expect("pool covers every term");
        covered |= pool[best].mask;
        chosen.push(best);
    }
    chosen
}

struct BranchAndBound<'a> {
    pool: &'a [Candidate],
    full: u64,
    best: Vec<usize>,
}

impl BranchAndBound<'_> {
    fn run(&mut self, covered: u64, chosen: &mut Vec<usize>) {
        if covered == self.full {
            if chosen.len() < self.best.len() {
                self.best = chosen.clone();
            }
            return;
        }
        let uncovered = self.full & !covered;
        let max_gain = self
            .pool
            .iter()
            .map(|c| (c.mask & uncovered).count_ones())
            .max()
            .unwrap_or(0);
        if max_gain == 0 {
            return;
        }
        let lower = chosen.len() + (uncovered.count_ones()).div_ceil(max_gain) as usize;
        if lower >= self.best.len() {
            return;
        }
        // branch on the uncovered term with the fewest covering candidates
        let term = (0..64)
            .filter(|t| uncovered & (1u64 << t) != 0)
            .min_by_key(|&t| self.pool.iter().filter(|c| c.mask & (1u64 << t) != 0).count())
            .expect("uncovered term exists");
        let mut options: Vec<usize> = (0..self.pool.len())
            .filter(|&i| self.pool[i].mask & (1u64 << term) != 0)
            .collect();
        options.sort_by_key(|&i| std::cmp::Reverse((self.pool[i].mask & uncovered).count_ones()));
        for i in options {
            chosen.push(i);
            self.run(covered | self.pool[i].mask, chosen);
            chosen.pop();
        }
    }
}
