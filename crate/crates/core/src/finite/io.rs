//! Space files: the first line lists point names (separated by whitespace
//! or commas); each further line is a basis open given as a comma separated
//! list of point names. `#` starts a comment.

use crate::error::{Error, Result};
use crate::finite::{FiniteSpace, Mask};

fn tokens(s: &str) -> Vec<&str> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .collect()
}

pub fn parse_space(text: &str) -> Result<FiniteSpace> {
    parse_space_with_cap(text, crate::finite::DEFAULT_POINT_CAP)
}

pub fn parse_space_with_cap(text: &str, cap: usize) -> Result<FiniteSpace> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "missing point list".into(),
    })?;
    let names: Vec<String> = tokens(header).into_iter().map(str::to_string).collect();
    let mut basis = Vec::new();
    for (line, l) in lines {
        let mut m: Mask = 0;
        for t in tokens(l) {
            let i = names.iter().position(|n| n == t).ok_or(Error::Parse {
                line,
                msg: format!("unknown point {t:?}"),
            })?;
            m |= 1 << i;
        }
        basis.push(m);
    }
    FiniteSpace::from_basis_with_cap(names, &basis, cap)
}

/// Writes the point names and the minimal opens (which form a basis).
pub fn write_space(x: &FiniteSpace) -> String {
    let mut out = x.names().join(" ");
    out.push('\n');
    for p in 0..x.len() {
        let members: Vec<&str> = x
            .members(x.minimal_open(p))
            .into_iter()
            .map(|i| x.name(i))
            .collect();
        out.push_str(&members.join(","));
        out.push('\n');
    }
    out
}
