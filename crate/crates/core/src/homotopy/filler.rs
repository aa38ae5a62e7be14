use std::collections::{BTreeMap, BTreeSet};
use std::sync::Mutex;

use num_traits::Zero;
use serde::Serialize;

use crate::algebra::{solve, Matrix};
use crate::error::{Error, Result};
use crate::homotopy::cylinder::Caps;
use crate::homotopy::simplex_homotopy::boundary_filler;
use crate::nesting::{chain_in_c_eta, in_c_eta, PlNesting};
use crate::simplicial::{Chain, Simplex};
use crate::{Int, QPoint};

/// Ways of producing `x` with `∂x = z` for a cycle `z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Strategy {
    /// A caller-supplied near-filler corrected by constant simplices.
    Hint,
    /// `π(Δ^k) + h(∂Δ^k)` pushed forward, for `z = ∂σ`.
    SimplexShape,
    /// The cone `[p, z]` from an apex `p`.
    Cone,
    /// Integer solve over cones from a vertex pool, restricted to
    /// generators accepted by the constraint.
    LinearSolve,
}

/// One filling problem.
#[derive(Clone, Debug)]
pub struct FillRequest<'a> {
    pub cycle: &'a Chain,
    /// When set, the filler must lie in `C^η`.
    pub constraint: Option<&'a PlNesting>,
    pub hint: Option<Chain>,
    pub apexes: Vec<QPoint>,
    /// A linear simplex with `∂σ = cycle`, when known.
    pub shape: Option<Simplex>,
    pub label: String,
}

impl<'a> FillRequest<'a> {
    pub fn new(cycle: &'a Chain, label: impl Into<String>) -> Self {
        FillRequest {
            cycle,
            constraint: None,
            hint: None,
            apexes: Vec::new(),
            shape: None,
            label: label.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filled {
    pub chain: Chain,
    pub strategy: Strategy,
}

/// Counters over every request served.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FillerAudit {
    pub requests: usize,
    /// Returned fillers whose boundary was recomputed and matched.
    pub verified: usize,
    pub constrained: usize,
    pub by_strategy: BTreeMap<String, usize>,
}

/// Tries strategies in order; every returned chain has been checked to bound
/// the cycle and, for constrained requests, to lie in `C^η`.
#[derive(Debug)]
pub struct FillerOracle {
    pub order: Vec<Strategy>,
    pub caps: Caps,
    audit: Mutex<FillerAudit>,
}

impl FillerOracle {
    pub fn new(caps: Caps) -> Self {
        Self::with_order(
            caps,
            vec![
                Strategy::Hint,
                Strategy::SimplexShape,
                Strategy::Cone,
                Strategy::LinearSolve,
            ],
        )
    }

    pub fn with_order(caps: Caps, order: Vec<Strategy>) -> Self {
        FillerOracle {
            order,
            caps,
            audit: Mutex::new(FillerAudit::default()),
        }
    }

    pub fn audit(&self) -> FillerAudit {
        self.audit.lock().expect("audit lock").clone()
    }

    pub fn fill(&self, req: &FillRequest) -> Result<Filled> {
        if !req.cycle.boundary()?.is_zero() {
            return Err(Error::NotACycle);
        }
        for &strategy in &self.order {
            for candidate in self.candidates(strategy, req)? {
                if self.accept(&candidate, req)? {
                    let mut audit = self.audit.lock().expect("audit lock");
                    audit.requests += 1;
                    audit.verified += 1;
                    audit.constrained += usize::from(req.constraint.is_some());
                    *audit
                        .by_strategy
                        .entry(format!("{strategy:?}"))
                        .or_default() += 1;
                    return Ok(Filled {
                        chain: candidate,
                        strategy,
                    });
                }
            }
        }
        Err(Error::FillerFailure(format!(
            "{}: {:?}",
            req.label, req.cycle
        )))
    }

    fn accept(&self, x: &Chain, req: &FillRequest) -> Result<bool> {
        if &x.boundary()? != req.cycle {
            return Ok(false);
        }
        match req.constraint {
            None => Ok(true),
            Some(eta) => match chain_in_c_eta(x, eta) {
                Ok(b) => Ok(b),
                Err(Error::Undecidable(_)) => Ok(false),
                Err(e) => Err(e),
            },
        }
    }

    fn candidates(&self, strategy: Strategy, req: &FillRequest) -> Result<Vec<Chain>> {
        Ok(match strategy {
            Strategy::Hint => {
                let Some(hint) = &req.hint else {
                    return Ok(vec![]);
                };
                let residual = req.cycle - &hint.boundary()?;
                constant_filler(&residual)
                    .map(|c| vec![hint + &c])
                    .unwrap_or_default()
            }
            Strategy::SimplexShape => match (&req.shape, req.constraint) {
                (Some(sigma), Some(eta)) if &sigma.boundary()? == req.cycle => {
                    match boundary_filler(sigma, eta, &self.caps, self) {
                        Ok(x) => vec![x],
                        Err(Error::Budget(_))
                        | Err(Error::CapExceeded(_))
                        | Err(Error::FillerFailure(_)) => vec![],
                        Err(e) => return Err(e),
                    }
                }
                _ => vec![],
            },
            Strategy::Cone => req.apexes.iter().map(|p| req.cycle.cone(p)).collect(),
            Strategy::LinearSolve => linear_solve(req)?.into_iter().collect(),
        })
    }
}

fn constant_point(s: &Simplex) -> Option<&QPoint> {
    match s {
        Simplex::Affine(v) if v.iter().all(|p| p == &v[0]) => Some(&v[0]),
        _ => None,
    }
}

/// Fills a cycle made of constant simplices: `∂[v,…,v]` (m+1 copies) is the
/// constant (m−1)-simplex when `m` is even and zero when `m` is odd, so
/// constant cycles of odd degree are bounded by constants one degree up.
pub fn constant_filler(residual: &Chain) -> Option<Chain> {
    if residual.is_zero() {
        return Some(Chain::zero());
    }
    let d = residual.degree()?;
    if d % 2 == 0 {
        return None;
    }
    let mut out = Chain::zero();
    for (s, c) in residual.terms() {
        let p = constant_point(s)?;
        out.add_term(Simplex::Affine(vec![p.clone(); d + 2]), c.clone());
    }
    Some(out)
}

fn linear_solve(req: &FillRequest) -> Result<Option<Chain>> {
    let mut support = Vec::new();
    for (s, _) in req.cycle.terms() {
        match s {
            Simplex::Affine(v) => support.push(v.clone()),
            _ => return Ok(None),
        }
    }
    let mut pool: BTreeSet<QPoint> = req.apexes.iter().cloned().collect();
    for v in &support {
        pool.extend(v.iter().cloned());
    }
    let mut gens = Vec::new();
    for p in &pool {
        for v in &support {
            let g = Simplex::Affine(v.clone()).cone(p);
            let admitted = match req.constraint {
                None => true,
                Some(eta) => in_c_eta(&g, eta).unwrap_or(false),
            };
            if admitted {
                gens.push(g);
            }
        }
    }
    let mut rows: BTreeMap<Simplex, usize> = BTreeMap::new();
    let mut columns = Vec::with_capacity(gens.len());
    for g in &gens {
        let b = g.boundary()?;
        for (s, _) in b.terms() {
            let next = rows.len();
            rows.entry(s.clone()).or_insert(next);
        }
        columns.push(b);
    }
    for (s, _) in req.cycle.terms() {
        if !rows.contains_key(s) {
            return Ok(None);
        }
    }
    let mut a = Matrix::zeros(rows.len(), gens.len());
    for (j, b) in columns.iter().enumerate() {
        for (s, c) in b.terms() {
            a.set(rows[s], j, c.clone());
        }
    }
    let mut target = vec![Int::zero(); rows.len()];
    for (s, c) in req.cycle.terms() {
        target[rows[s]] = c.clone();
    }
    Ok(solve(&a, &target).map(|x| {
        let mut out = Chain::zero();
        for (g, c) in gens.into_iter().zip(x) {
            out.add_term(g, c);
        }
        out
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::q;

    fn p(x: i64, y: i64) -> QPoint {
        Point(vec![q(x, 1), q(y, 1)])
    }

    #[test]
    fn constant_cycles() {
        let v = p(0, 0);
        let c = Chain::affine(vec![v.clone(), v.clone()]);
        let f = constant_filler(&c).unwrap();
        assert_eq!(f.boundary().unwrap(), c);
        assert!(constant_filler(&Chain::affine(vec![v.clone(); 3])).is_none());
    }

    #[test]
    fn cone_and_solve_fill_triangle_boundary() {
        let tri = Chain::affine(vec![p(0, 0), p(1, 0), p(0, 1)]);
        let z = tri.boundary().unwrap();
        let oracle = FillerOracle::with_order(Caps::default(), vec![Strategy::LinearSolve]);
        let filled = oracle.fill(&FillRequest::new(&z, "triangle")).unwrap();
        assert_eq!(filled.chain.boundary().unwrap(), z);
        let mut req = FillRequest::new(&z, "triangle");
        req.apexes = vec![p(1, 1)];
        let filled = FillerOracle::new(Caps::default()).fill(&req).unwrap();
        assert_eq!(filled.strategy, Strategy::Cone);
        assert_eq!(oracle.audit().verified, 1);
    }

    #[test]
    fn impossible_request_fails_explicitly() {
        let z = Chain::affine(vec![p(0, 0)]);
        let err = FillerOracle::new(Caps::default())
            .fill(&FillRequest::new(&z, "point"))
            .unwrap_err();
        assert!(matches!(err, Error::FillerFailure(_)));
    }
}
