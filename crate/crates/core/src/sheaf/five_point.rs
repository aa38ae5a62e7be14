//! Failure of surjectivity of `C^1(X) → C̃^1(X)` on the five point space.

use serde::Serialize;

use crate::algebra::coordinates;
use crate::error::Result;
use crate::finite::{FiniteSpace, Mask};
use crate::sheaf::{sheafify, Group, ImageCochains};
use crate::{Int, IntMatrix};

/// One checked claim of the reproduction.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct TranscriptLine {
    pub anchor: String,
    pub check: String,
    pub detail: String,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct FivePointReport {
    pub lines: Vec<TranscriptLine>,
    pub passed: bool,
}

struct Transcript(Vec<TranscriptLine>);

impl Transcript {
    fn push(&mut self, anchor: &str, check: &str, detail: String, ok: bool) {
        self.0.push(TranscriptLine {
            anchor: anchor.into(),
            check: check.into(),
            detail,
            ok,
        });
    }
}

const ANCHOR: &str = "five-point surjectivity failure";

/// Builds the two local cochains, checks that their germs agree, that the
/// family is a section of the sheafification, and that no global cochain
/// maps to it.
pub fn five_point_reproduce() -> Result<FivePointReport> {
    let x = FiniteSpace::five_point();
    let m = |names: &[&str]| x.mask_of(names);
    let u1 = m(&["1", "2", "3", "4"])?;
    let u2 = m(&["2", "3", "4", "5"])?;
    let (a, b) = (m(&["2", "3"])?, m(&["3", "4"])?);
    let overlap = m(&["2", "3", "4"])?;
    let special = |s: Mask| s & !a == 0 || s & !b == 0;
    let mut t = Transcript(Vec::new());
    let fmt = |s: Mask| x.format_mask(s);

    let minimal: Vec<String> = (0..x.len())
        .map(|p| format!("U{}={}", x.name(p), fmt(x.minimal_open(p))))
        .collect();
    t.push(
        ANCHOR,
        "space",
        format!(
            "{} opens; minimal opens {}",
            x.opens().len(),
            minimal.join(" ")
        ),
        x.len() == 5,
    );

    let c = ImageCochains::new(&x, 1, &Group::free(1));
    let f1 = c.cochain(u1, |s| if special(s) { 1 } else { 0 })?;
    let f2 = c.cochain(u2, |s| if special(s) { 1 } else { 2 })?;
    let val = |u: Mask, f: &[Int], s: Mask| c.value(u, f, s).expect("connected subset of the open");
    t.push(
        ANCHOR,
        "f1 on image {2,3}",
        val(u1, &f1, a).to_string(),
        val(u1, &f1, a) == Int::from(1),
    );
    t.push(
        ANCHOR,
        "f1 on image {2,3,4}",
        val(u1, &f1, overlap).to_string(),
        val(u1, &f1, overlap) == Int::from(0),
    );
    let f2_overlap = val(u2, &f2, overlap);
    t.push(
        ANCHOR,
        "f2 on image {2,3,4}",
        format!("{f2_overlap} by the restriction rule"),
        f2_overlap == Int::from(2),
    );

    for v in [a, b] {
        let same = c.restrict(u1, v, &f1) == c.restrict(u2, v, &f2);
        t.push(ANCHOR, "f1 and f2 agree on cover member", fmt(v), same);
    }
    let at3 = x.minimal_open(x.index_of("3").expect("point 3"));
    t.push(
        ANCHOR,
        "germs at 3 agree",
        fmt(at3),
        c.restrict(u1, at3, &f1) == c.restrict(u2, at3, &f2),
    );

    // the stalk family: germ of f1 at points of U1, of f2 at point 5
    let sh = sheafify(&c.presheaf)?;
    let full = x.full();
    let mut family = Vec::new();
    for p in 0..x.len() {
        let up = x.minimal_open(p);
        let germ = if u1 >> p & 1 == 1 {
            c.restrict(u1, up, &f1)
        } else {
            c.restrict(u2, up, &f2)
        };
        family.extend(germ);
    }
    let column = IntMatrix::from_columns(family.len(), std::slice::from_ref(&family));
    let section = coordinates(&sh.families[&full], &column);
    t.push(
        ANCHOR,
        "germ family is a section of the sheafification over X",
        format!("{} stalk coordinates", family.len()),
        section.is_some(),
    );

    let lifts = section
        .as_ref()
        .is_some_and(|s| sh.unit_hom(&c.presheaf, full).image_contains(&s.column(0)));
    t.push(
        ANCHOR,
        "section lifts to a global cochain",
        "Smith-form image test".into(),
        !lifts,
    );

    let five = x.index_of("5").expect("point 5");
    let one = x.index_of("1").expect("point 1");
    t.push(
        ANCHOR,
        "every neighborhood of 5 contains U2",
        fmt(x.minimal_open(five)),
        x.minimal_open(five) == u2,
    );
    t.push(
        ANCHOR,
        "every neighborhood of 1 contains U1",
        fmt(x.minimal_open(one)),
        x.minimal_open(one) == u1,
    );
    t.push(
        ANCHOR,
        "U1 ∩ U2 is the image of a surjective path",
        fmt(overlap),
        u1 & u2 == overlap && x.is_connected(overlap),
    );
    t.push(
        ANCHOR,
        "forced values conflict on U1 ∩ U2",
        format!("f1 = {}, f2 = {}", val(u1, &f1, overlap), f2_overlap),
        val(u1, &f1, overlap) != f2_overlap,
    );
    t.push(
        ANCHOR,
        "unit at X is not surjective",
        "sheafification unit".into(),
        !sh.unit_hom(&c.presheaf, full).is_surjective(),
    );
    let passed = t.0.iter().all(|l| l.ok);
    Ok(FivePointReport { lines: t.0, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduction_passes() {
        let r = five_point_reproduce().unwrap();
        for l in &r.lines {
            assert!(l.ok, "{l:?}");
        }
        assert!(r.passed);
    }
}
