use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::geometry::{barycenter, Point};
use crate::nesting::{FiniteNesting, Nesting, PlNesting, Tri};
use crate::{Int, QPoint, Q};

/// Which nesting condition a witness violates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Axiom {
    /// `η(∅) = X`.
    EmptySequence,
    /// `x_1 ∈ η(x_2..x_n)` forces `η(x_1..x_n)` to be an open neighbourhood of `x_1`.
    Neighbourhood,
    /// `η(x) ⊆ η(x ∘ f)` for nondecreasing `f`.
    Monotone,
}

/// A replayable counterexample.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomWitness {
    pub axiom: Axiom,
    pub sequence: Vec<String>,
    /// The nondecreasing reindexing, for [`Axiom::Monotone`].
    pub reindex: Vec<usize>,
    /// A point of `η(x)` outside `η(x ∘ f)`, or the offending `x_1`.
    pub point: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub sequences: usize,
    pub containments: usize,
    /// Containments settled only by probing sample points.
    pub sampled: usize,
    pub witness: Option<AxiomWitness>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

/// All nondecreasing maps `{0..m} → {0..n}` for `m <= max_len`.
pub fn nondecreasing_maps(n: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    if n == 0 {
        return out;
    }
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for f in &frontier {
            let start = f.last().copied().unwrap_or(0);
            for v in start..n {
                let mut g = f.clone();
                g.push(v);
                next.push(g);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Checks the three axioms on the given sequences. `probes(seq)` supplies
/// points used to refute containments the region algebra cannot decide.
pub fn check_sequences<N, I, P>(
    eta: &N,
    sequences: I,
    max_reindex: usize,
    mut probes: P,
) -> Result<AxiomReport>
where
    N: Nesting,
    I: IntoIterator<Item = Vec<N::Point>>,
    P: FnMut(&[N::Point]) -> Vec<N::Point>,
{
    let mut report = AxiomReport::default();
    let fmt_seq = |s: &[N::Point]| s.iter().map(|p| format!("{p:?}")).collect::<Vec<_>>();
    let empty = eta.eval(&[])?;
    if !eta.is_ambient(&empty) {
        report.witness = Some(AxiomWitness {
            axiom: Axiom::EmptySequence,
            sequence: vec![],
            reindex: vec![],
            point: None,
        });
        return Ok(report);
    }
    for seq in sequences {
        report.sequences += 1;
        let value = eta.eval(&seq)?;
        if let Some(x1) = seq.first() {
            let rest = eta.eval(&seq[1..])?;
            if eta.member(&rest, x1) && !(eta.member(&value, x1) && eta.is_open(&value)) {
                report.witness = Some(AxiomWitness {
                    axiom: Axiom::Neighbourhood,
                    sequence: fmt_seq(&seq),
                    reindex: vec![],
                    point: Some(format!("{x1:?}")),
                });
                return Ok(report);
            }
        }
        let points = probes(&seq);
        for f in nondecreasing_maps(seq.len(), max_reindex) {
            let sub: Vec<N::Point> = f.iter().map(|&i| seq[i].clone()).collect();
            let target = eta.eval(&sub)?;
            report.containments += 1;
            let verdict = match eta.subset(&value, &target) {
                Tri::Unknown => {
                    report.sampled += 1;
                    points
                        .iter()
                        .find(|p| eta.member(&value, p) && !eta.member(&target, p))
                        .map(|p| Some(format!("{p:?}")))
                }
                Tri::Yes => None,
                Tri::No => {
                    let p = points
                        .iter()
                        .find(|p| eta.member(&value, p) && !eta.member(&target, p));
                    Some(p.map(|p| format!("{p:?}")))
                }
            };
            if let Some(point) = verdict {
                report.witness = Some(AxiomWitness {
                    axiom: Axiom::Monotone,
                    sequence: fmt_seq(&seq),
                    reindex: f,
                    point,
                });
                return Ok(report);
            }
        }
    }
    Ok(report)
}

/// Every sequence of length `<= max_len` over `n` points.
pub fn all_sequences(n: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &frontier {
            for x in 0..n {
                let mut t: Vec<usize> = s.clone();
                t.push(x);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Exhaustive check on every sequence of length `<= max_len`.
pub fn check_finite(eta: &FiniteNesting, max_len: usize) -> Result<AxiomReport> {
    let n = eta.space().len();
    let everything: Vec<usize> = (0..n).collect();
    check_sequences(eta, all_sequences(n, max_len), max_len, |_| {
        everything.clone()
    })
}

/// Sampler for PL sequences: barycenters of nested faces of random simplices
/// mixed with uniform points of the cube `[lo, hi]^dim`.
pub struct PlSampler {
    pub dim: usize,
    pub lo: Q,
    pub hi: Q,
    /// Denominator of the sampling grid.
    pub grid: i64,
    pub max_len: usize,
}

impl PlSampler {
    pub fn unit(dim: usize) -> Self {
        PlSampler {
            dim,
            lo: Q::from_integer(Int::from(-1)),
            hi: Q::from_integer(Int::from(2)),
            grid: 16,
            max_len: 4,
        }
    }

    fn point(&self, rng: &mut ChaCha8Rng) -> QPoint {
        let span = self.hi.clone() - self.lo.clone();
        Point(
            (0..self.dim)
                .map(|_| {
                    let k = rng.gen_range(0..=self.grid);
                    self.lo.clone() + span.clone() * Q::new(Int::from(k), Int::from(self.grid))
                })
                .collect(),
        )
    }

    /// One sequence: either uniform points or the barycenters of a random
    /// increasing chain of faces of a random simplex.
    pub fn sequence(&self, rng: &mut ChaCha8Rng) -> Vec<QPoint> {
        let len = rng.gen_range(1..=self.max_len);
        if rng.gen_bool(0.5) {
            return (0..len).map(|_| self.point(rng)).collect();
        }
        let verts: Vec<QPoint> = (0..=self.dim).map(|_| self.point(rng)).collect();
        let mut order: Vec<usize> = (0..verts.len()).collect();
        for i in (1..order.len()).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        let mut seq = Vec::new();
        for i in 1..=verts.len().min(len) {
            let face: Vec<QPoint> = order[..i].iter().map(|&j| verts[j].clone()).collect();
            seq.push(barycenter(&face));
        }
        seq
    }

    /// Probe points for refuting containments: the sequence, pairwise
    /// midpoints and a few uniform points.
    pub fn probes(&self, seq: &[QPoint], rng: &mut ChaCha8Rng) -> Vec<QPoint> {
        let mut out: Vec<QPoint> = seq.to_vec();
        let half = Q::new(Int::from(1), Int::from(2));
        for i in 0..seq.len() {
            for j in i + 1..seq.len() {
                out.push(seq[i].lerp(&seq[j], &half));
            }
        }
        out.extend((0..8).map(|_| self.point(rng)));
        out
    }
}

/// Seeded sampled check for PL nestings.
pub fn check_pl(
    eta: &PlNesting,
    sampler: &PlSampler,
    seed: u64,
    samples: usize,
) -> Result<AxiomReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sequences: Vec<Vec<QPoint>> = (0..samples).map(|_| sampler.sequence(&mut rng)).collect();
    let mut probe_rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    check_sequences(eta, sequences, sampler.max_len, |s| {
        sampler.probes(s, &mut probe_rng)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite::FiniteSpace;
    use crate::nesting::Region;
    use crate::q;

    #[test]
    fn reindexings_are_counted_by_binomials() {
        // C(n+m-1, m) summed over m <= 3 for n = 3: 1 + 3 + 6 + 10
        assert_eq!(nondecreasing_maps(3, 3).len(), 20);
        assert_eq!(nondecreasing_maps(0, 3), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn minimal_open_nesting_passes_exhaustively() {
        let eta = FiniteNesting::minimal_open(&FiniteSpace::five_point());
        let r = check_finite(&eta, 3).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.sequences, 1 + 5 + 25 + 125);
    }

    #[test]
    fn broken_finite_nesting_is_caught() {
        let eta = FiniteNesting::broken(FiniteNesting::minimal_open(&FiniteSpace::sierpinski()));
        let w = check_finite(&eta, 3)
            .unwrap()
            .witness
            .expect("defect must be found");
        assert_eq!(w.axiom, Axiom::Monotone);
    }

    #[test]
    fn pl_balls_pass_and_broken_fails() {
        let sampler = PlSampler::unit(2);
        let good = PlNesting::balls(q(1, 4)).unwrap();
        assert!(check_pl(&good, &sampler, 7, 200).unwrap().passed());
        let bad = PlNesting::broken(good);
        let w = check_pl(&bad, &sampler, 7, 200).unwrap().witness.unwrap();
        assert_eq!(w.axiom, Axiom::Monotone);
        assert!(w.point.is_some());
    }

    #[test]
    fn extension_of_balls_passes() {
        let inner = PlNesting::balls(q(1, 9)).unwrap();
        let w = Region::ball(Point(vec![q(1, 2), q(1, 2)]), q(1, 4));
        let eta = PlNesting::extend(w, inner).unwrap();
        assert!(check_pl(&eta, &PlSampler::unit(2), 11, 300)
            .unwrap()
            .passed());
    }
}
