use std::collections::BTreeMap;

use num_traits::One;
use serde::Serialize;

use crate::algebra::{subquotient, ChainComplex, Coefficients, GroupHom, GroupSummary, Matrix};
use crate::error::{Error, Result};
use crate::finite::{FiniteSpace, Mask};
use crate::sheaf::{Group, Presheaf};
use crate::{Int, IntMatrix};

/// Default bound on the degree for the Godement route.
pub const GODEMENT_DEGREE_CAP: usize = 3;
/// Default bound on the number of points for the Godement route.
pub const GODEMENT_POINT_CAP: usize = 6;

/// A cochain complex of finitely presented groups `C^0 → C^1 → ...`.
struct CochainComplex {
    groups: Vec<Group>,
    /// `diffs[n]: C^n → C^{n+1}`, one fewer than `groups`.
    diffs: Vec<IntMatrix>,
}

impl CochainComplex {
    fn cohomology(&self, n: usize) -> Result<GroupSummary<Int>> {
        let Some(c) = self.groups.get(n) else {
            return Ok(GroupSummary {
                free_rank: 0,
                torsion: vec![],
            });
        };
        let incoming = if n == 0 {
            Matrix::zeros(c.gens, 0)
        } else {
            self.diffs[n - 1].clone()
        };
        let (next, d) = match self.groups.get(n + 1) {
            Some(g) => (g.clone(), self.diffs[n].clone()),
            None => (Group::trivial(), Matrix::zeros(0, c.gens)),
        };
        let hom = GroupHom {
            source: c.clone(),
            target: next,
            matrix: d,
        };
        Ok(subquotient(&incoming, &hom)?.summary())
    }

    fn summaries(&self, max_degree: usize) -> Result<Vec<GroupSummary<Int>>> {
        (0..=max_degree).map(|n| self.cohomology(n)).collect()
    }
}

fn offsets(parts: &[Group]) -> Vec<usize> {
    parts
        .iter()
        .scan(0, |acc, p| {
            let o = *acc;
            *acc += p.gens;
            Some(o)
        })
        .collect()
}

fn put_block(m: &mut IntMatrix, r0: usize, c0: usize, block: &IntMatrix, sign: &Int) {
    for a in 0..block.rows() {
        for b in 0..block.cols() {
            let v = m.get(r0 + a, c0 + b).clone() + block.get(a, b).clone() * sign.clone();
            m.set(r0 + a, c0 + b, v);
        }
    }
}

fn sign(i: usize) -> Int {
    if i.is_multiple_of(2) {
        Int::one()
    } else {
        -Int::one()
    }
}

/// Cochains on the nerve of the specialization order: degree `n` is the
/// product over chains `x_0 < ... < x_n` of the stalk at `x_0`, and the
/// `x_0`-omitting face is restricted from the stalk at `x_1`.
pub fn nerve_cohomology(f: &Presheaf, max_degree: usize) -> Result<Vec<GroupSummary<Int>>> {
    let space = f.space();
    let chains = space.chains();
    let by_len = |len: usize| -> Vec<Vec<usize>> {
        chains.iter().filter(|c| c.len() == len).cloned().collect()
    };
    let mut groups = Vec::new();
    let mut diffs = Vec::new();
    let top = max_degree + 1;
    let mut levels: Vec<Vec<Vec<usize>>> = Vec::new();
    for n in 0..=top {
        let lv = by_len(n + 1);
        let parts: Vec<Group> = lv.iter().map(|c| f.stalk(c[0]).clone()).collect();
        groups.push(Group::direct_sum(&parts));
        levels.push(lv);
    }
    for n in 0..top {
        let src = &levels[n];
        let src_parts: Vec<Group> = src.iter().map(|c| f.stalk(c[0]).clone()).collect();
        let src_off = offsets(&src_parts);
        let index: BTreeMap<&Vec<usize>, usize> =
            src.iter().enumerate().map(|(i, c)| (c, i)).collect();
        let tgt = &levels[n + 1];
        let tgt_parts: Vec<Group> = tgt.iter().map(|c| f.stalk(c[0]).clone()).collect();
        let tgt_off = offsets(&tgt_parts);
        let mut d = Matrix::zeros(groups[n + 1].gens, groups[n].gens);
        for (r, chain) in tgt.iter().enumerate() {
            for i in 0..chain.len() {
                let mut face = chain.clone();
                face.remove(i);
                let col = index[&face];
                let block = if i == 0 {
                    f.stalk_map(chain[1], chain[0]).clone()
                } else {
                    Matrix::identity(f.stalk(chain[0]).gens)
                };
                put_block(&mut d, tgt_off[r], src_off[col], &block, &sign(i));
            }
        }
        diffs.push(d);
    }
    CochainComplex { groups, diffs }.summaries(max_degree)
}

/// Sheaf given by its stalks `F_x = F(U_x)` and maps `F_y → F_x` for `x <= y`.
#[derive(Clone, Debug)]
struct StalkDiagram {
    stalks: Vec<Group>,
    maps: BTreeMap<(usize, usize), IntMatrix>,
}

impl StalkDiagram {
    fn of(f: &Presheaf) -> Self {
        let space = f.space();
        let n = space.len();
        let stalks = (0..n).map(|x| f.stalk(x).clone()).collect();
        let mut maps = BTreeMap::new();
        for y in 0..n {
            for x in 0..n {
                if space.leq(x, y) {
                    maps.insert((y, x), f.stalk_map(y, x).clone());
                }
            }
        }
        StalkDiagram { stalks, maps }
    }
}

/// `G⁰(F)(U) = Π_{x∈U} F_x` with projections as restrictions.
pub fn godement_envelope(f: &Presheaf) -> Presheaf {
    let space = f.space().clone();
    Presheaf::from_rules(
        &space,
        |u| {
            Group::direct_sum(
                &space
                    .members(u)
                    .iter()
                    .map(|&x| f.stalk(x).clone())
                    .collect::<Vec<_>>(),
            )
        },
        |u, v| projection(f, u, v),
    )
}

fn projection(f: &Presheaf, u: Mask, v: Mask) -> IntMatrix {
    let space = f.space();
    let pu = space.members(u);
    let pv = space.members(v);
    let ou = offsets(&pu.iter().map(|&x| f.stalk(x).clone()).collect::<Vec<_>>());
    let ov = offsets(&pv.iter().map(|&x| f.stalk(x).clone()).collect::<Vec<_>>());
    let rows: usize = pv.iter().map(|&x| f.stalk(x).gens).sum();
    let cols: usize = pu.iter().map(|&x| f.stalk(x).gens).sum();
    let mut m = Matrix::zeros(rows, cols);
    for (j, x) in pv.iter().enumerate() {
        let i = pu.iter().position(|y| y == x).expect("V ⊆ U");
        put_block(
            &mut m,
            ov[j],
            ou[i],
            &Matrix::identity(f.stalk(*x).gens),
            &Int::one(),
        );
    }
    m
}

/// Global sections of the Godement resolution. The cokernel sheaf at each
/// stage is represented by its stalks, which sheafification leaves fixed.
pub fn godement_cohomology(f: &Presheaf, max_degree: usize) -> Result<Vec<GroupSummary<Int>>> {
    godement_cohomology_with_caps(f, max_degree, GODEMENT_DEGREE_CAP, GODEMENT_POINT_CAP)
}

pub fn godement_cohomology_with_caps(
    f: &Presheaf,
    max_degree: usize,
    degree_cap: usize,
    point_cap: usize,
) -> Result<Vec<GroupSummary<Int>>> {
    let space = f.space();
    if max_degree > degree_cap {
        return Err(Error::CapExceeded(format!(
            "degree {max_degree} exceeds the Godement cap {degree_cap}"
        )));
    }
    if space.len() > point_cap {
        return Err(Error::CapExceeded(format!(
            "{} points exceeds the Godement cap {point_cap}",
            space.len()
        )));
    }
    let n = space.len();
    let below = |x: usize| -> Vec<usize> { (0..n).filter(|&y| space.leq(y, x)).collect() };
    let mut z = StalkDiagram::of(f);
    let mut groups = Vec::new();
    let mut diffs = Vec::new();
    for stage in 0..=max_degree + 1 {
        let sections = Group::direct_sum(&z.stalks);
        groups.push(sections);
        if stage == max_degree + 1 {
            break;
        }
        let off = offsets(&z.stalks);
        let total: usize = z.stalks.iter().map(|g| g.gens).sum();
        // next stalk at x: (Π_{y<=x} Z_y) / image of Z_x
        let mut next_stalks = Vec::new();
        let mut to_new = Vec::new();
        let mut to_old = Vec::new();
        let mut proj_all = Vec::new();
        for x in 0..n {
            let ys = below(x);
            let parts: Vec<Group> = ys.iter().map(|&y| z.stalks[y].clone()).collect();
            let prod = Group::direct_sum(&parts);
            let po = offsets(&parts);
            let mut image = Matrix::zeros(prod.gens, z.stalks[x].gens);
            let mut proj = Matrix::zeros(prod.gens, total);
            for (k, &y) in ys.iter().enumerate() {
                put_block(&mut image, po[k], 0, &z.maps[&(x, y)], &Int::one());
                put_block(
                    &mut proj,
                    po[k],
                    off[y],
                    &Matrix::identity(z.stalks[y].gens),
                    &Int::one(),
                );
            }
            let quotient = Group {
                gens: prod.gens,
                rels: prod.rels.hstack(&image),
            };
            let (simple, fwd, back) = quotient.simplify();
            next_stalks.push(simple);
            to_new.push(fwd);
            to_old.push(back);
            proj_all.push((ys, po, proj));
        }
        let next_groups = next_stalks.clone();
        let next_off = offsets(&next_groups);
        let next_total: usize = next_groups.iter().map(|g| g.gens).sum();
        let mut d = Matrix::zeros(next_total, total);
        for x in 0..n {
            let block = &to_new[x] * &proj_all[x].2;
            put_block(&mut d, next_off[x], 0, &block, &Int::one());
        }
        diffs.push(d);
        // maps of the next diagram: projection Π_{y<=x} → Π_{y<=x'} for x' <= x
        let mut maps = BTreeMap::new();
        for x in 0..n {
            for xp in 0..n {
                if !space.leq(xp, x) {
                    continue;
                }
                let (ys, po, _) = &proj_all[x];
                let (yps, pop, _) = &proj_all[xp];
                let rows: usize = yps.iter().map(|&y| z.stalks[y].gens).sum();
                let cols: usize = ys.iter().map(|&y| z.stalks[y].gens).sum();
                let mut p = Matrix::zeros(rows, cols);
                for (k, y) in yps.iter().enumerate() {
                    let i = ys.iter().position(|w| w == y).expect("y <= x' <= x");
                    put_block(
                        &mut p,
                        pop[k],
                        po[i],
                        &Matrix::identity(z.stalks[*y].gens),
                        &Int::one(),
                    );
                }
                maps.insert((x, xp), &(&to_new[xp] * &p) * &to_old[x]);
            }
        }
        z = StalkDiagram {
            stalks: next_stalks,
            maps,
        };
    }
    CochainComplex { groups, diffs }.summaries(max_degree)
}

/// Alternating Čech complex of an open cover.
pub fn cech_cohomology(
    f: &Presheaf,
    cover: &[Mask],
    max_degree: usize,
) -> Result<Vec<GroupSummary<Int>>> {
    let space = f.space();
    if let Some(v) = cover.iter().find(|&&v| !space.is_open(v)) {
        return Err(Error::NotOpen(space.format_mask(*v)));
    }
    if cover.iter().fold(0, |a, b| a | b) != space.full() {
        return Err(Error::Precondition("sets do not cover the space".into()));
    }
    let m = cover.len();
    let subsets = |len: usize| -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for bitsel in 0u64..(1u64 << m) {
            if bitsel.count_ones() as usize == len {
                out.push((0..m).filter(|i| bitsel >> i & 1 == 1).collect());
            }
        }
        out.sort();
        out
    };
    let meet = |idx: &[usize]| idx.iter().fold(space.full(), |a, &i| a & cover[i]);
    let mut levels = Vec::new();
    let mut groups = Vec::new();
    for p in 0..=max_degree + 1 {
        let lv = subsets(p + 1);
        let parts: Vec<Group> = lv.iter().map(|s| f.group(meet(s)).clone()).collect();
        groups.push(Group::direct_sum(&parts));
        levels.push(lv);
    }
    let mut diffs = Vec::new();
    for p in 0..=max_degree {
        let src = &levels[p];
        let src_off = offsets(
            &src.iter()
                .map(|s| f.group(meet(s)).clone())
                .collect::<Vec<_>>(),
        );
        let tgt = &levels[p + 1];
        let tgt_off = offsets(
            &tgt.iter()
                .map(|s| f.group(meet(s)).clone())
                .collect::<Vec<_>>(),
        );
        let index: BTreeMap<&Vec<usize>, usize> =
            src.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let mut d = Matrix::zeros(groups[p + 1].gens, groups[p].gens);
        for (r, s) in tgt.iter().enumerate() {
            for k in 0..s.len() {
                let mut face = s.clone();
                face.remove(k);
                let col = index[&face];
                put_block(
                    &mut d,
                    tgt_off[r],
                    src_off[col],
                    f.restriction(meet(&face), meet(s)),
                    &sign(k),
                );
            }
        }
        diffs.push(d);
    }
    CochainComplex { groups, diffs }.summaries(max_degree)
}

/// Minimal opens of all points, deduplicated, as a cover.
pub fn minimal_open_cover(space: &FiniteSpace) -> Vec<Mask> {
    let mut c: Vec<Mask> = (0..space.len()).map(|x| space.minimal_open(x)).collect();
    c.sort_unstable();
    c.dedup();
    c
}

/// One degree of the comparison between sheaf cohomology of the constant
/// sheaf and simplicial cohomology of the order complex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComparisonRow {
    pub degree: usize,
    pub sheaf: String,
    pub simplicial: String,
    pub equal: bool,
}

fn coefficient_group(a: &Coefficients) -> Result<Group> {
    match a {
        Coefficients::Integers | Coefficients::Rationals => Ok(Group::free(1)),
        Coefficients::Mod(0) => Err(Error::ZeroModulus),
        Coefficients::Mod(m) => Ok(Group::cyclic(Int::from(*m))),
    }
}

/// Nerve cohomology of the constant sheaf against the order complex.
pub fn compare_cohomology(
    space: &FiniteSpace,
    a: &Coefficients,
    max_degree: usize,
) -> Result<Vec<ComparisonRow>> {
    let g = coefficient_group(a)?;
    let sheaf = Presheaf::constant_sheaf(space, &g);
    let lhs = nerve_cohomology(&sheaf, max_degree)?;
    let complex = space.order_complex().chain_complex();
    let mut rows = Vec::new();
    for (n, l) in lhs.into_iter().enumerate() {
        let mut l = l;
        if *a == Coefficients::Rationals {
            l.torsion.clear();
        }
        let r: GroupSummary<Int> = complex.cohomology(a, n as i64)?;
        rows.push(ComparisonRow {
            degree: n,
            sheaf: l.to_string(),
            simplicial: r.to_string(),
            equal: l == r,
        });
    }
    Ok(rows)
}

/// Simplicial cohomology of the order complex, for callers that want the
/// right-hand side alone.
pub fn order_complex_cohomology(
    space: &FiniteSpace,
    a: &Coefficients,
    max_degree: usize,
) -> Result<Vec<GroupSummary<Int>>> {
    let complex: ChainComplex<Int> = space.order_complex().chain_complex();
    (0..=max_degree)
        .map(|n| complex.cohomology(a, n as i64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> Group {
        Group::free(1)
    }

    fn names(v: &[GroupSummary<Int>]) -> Vec<String> {
        v.iter().map(|g| g.to_string()).collect()
    }

    #[test]
    fn pseudocircle_three_ways() {
        let x = FiniteSpace::pseudocircle();
        let f = Presheaf::constant_sheaf(&x, &z());
        let expected = ["Z", "Z", "0"];
        assert_eq!(names(&nerve_cohomology(&f, 2).unwrap()), expected);
        assert_eq!(names(&godement_cohomology(&f, 2).unwrap()), expected);
        assert_eq!(
            names(&cech_cohomology(&f, &minimal_open_cover(&x), 2).unwrap()),
            expected
        );
    }

    #[test]
    fn contractible_and_sierpinski() {
        for x in [FiniteSpace::five_point(), FiniteSpace::sierpinski()] {
            let f = Presheaf::constant_sheaf(&x, &z());
            assert_eq!(names(&nerve_cohomology(&f, 2).unwrap()), ["Z", "0", "0"]);
            assert_eq!(names(&godement_cohomology(&f, 2).unwrap()), ["Z", "0", "0"]);
        }
    }

    #[test]
    fn skyscraper_and_whole_cover() {
        let x = FiniteSpace::five_point();
        let f = Presheaf::skyscraper(&x, 4, &Group::cyclic(Int::from(5)));
        assert_eq!(
            names(&godement_cohomology(&f, 2).unwrap()),
            ["Z/5", "0", "0"]
        );
        assert_eq!(
            names(&cech_cohomology(&f, &[x.full()], 2).unwrap()),
            ["Z/5", "0", "0"]
        );
        assert!(godement_envelope(&f).is_flasque());
    }

    #[test]
    fn comparison_rows() {
        let rows =
            compare_cohomology(&FiniteSpace::pseudocircle(), &Coefficients::Integers, 2).unwrap();
        assert!(rows.iter().all(|r| r.equal));
        assert_eq!(rows[1].sheaf, "Z");
        let rows =
            compare_cohomology(&FiniteSpace::pseudocircle(), &Coefficients::Mod(2), 1).unwrap();
        assert_eq!(rows[1].sheaf, "Z/2");
        assert!(rows.iter().all(|r| r.equal));
    }

    #[test]
    fn godement_caps() {
        let f = Presheaf::constant_sheaf(&FiniteSpace::discrete(7), &z());
        assert!(matches!(
            godement_cohomology(&f, 1),
            Err(Error::CapExceeded(_))
        ));
        let f = Presheaf::constant_sheaf(&FiniteSpace::discrete(2), &z());
        assert!(matches!(
            godement_cohomology(&f, 4),
            Err(Error::CapExceeded(_))
        ));
    }
}
