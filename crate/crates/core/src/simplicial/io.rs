//! Plain-text format for ordered complexes.
//!
//! ```text
//! # comments and blank lines are ignored
//! vertex a 0 0        # optional; either every vertex has coordinates or none does
//! vertex b 1 0
//! vertex c 0 1/2
//! face a b c          # ordered vertex names; all subfaces are implied
//! ```
//!
//! Without `vertex` lines the `i`-th vertex (in order of first appearance)
//! is placed at the `i`-th basis vector.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::simplicial::OrderedComplex;
use crate::{parse_q, QPoint};

pub fn parse_complex(text: &str) -> Result<OrderedComplex> {
    let mut coords: BTreeMap<String, QPoint> = BTreeMap::new();
    let mut names: Vec<String> = Vec::new();
    let mut faces: Vec<(usize, Vec<String>)> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        match tokens.next() {
            Some("vertex") => {
                let name = tokens.next().ok_or(Error::Parse {
                    line,
                    msg: "vertex needs a name".into(),
                })?;
                let c: Option<Vec<_>> = tokens.map(parse_q).collect();
                let c = c.ok_or(Error::Parse {
                    line,
                    msg: "bad rational coordinate".into(),
                })?;
                if coords.insert(name.to_string(), Point(c)).is_some() {
                    return Err(Error::Parse {
                        line,
                        msg: format!("vertex {name} declared twice"),
                    });
                }
                if !names.iter().any(|x| x == name) {
                    names.push(name.to_string());
                }
            }
            Some("face") => {
                let vs: Vec<String> = tokens.map(str::to_string).collect();
                if vs.is_empty() {
                    return Err(Error::Parse {
                        line,
                        msg: "empty face".into(),
                    });
                }
                for v in &vs {
                    if !names.contains(v) {
                        names.push(v.clone());
                    }
                }
                faces.push((line, vs));
            }
            Some(other) => {
                return Err(Error::Parse {
                    line,
                    msg: format!("unknown directive {other:?}"),
                })
            }
            None => unreachable!(),
        }
    }
    if !coords.is_empty() {
        if let Some(missing) = names.iter().find(|v| !coords.contains_key(*v)) {
            return Err(Error::Parse {
                line: 0,
                msg: format!("vertex {missing} has no coordinates"),
            });
        }
        let dims: Vec<usize> = coords.values().map(|p| p.dim()).collect();
        if dims.windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::Parse {
                line: 0,
                msg: "coordinate dimensions differ".into(),
            });
        }
    } else {
        let n = names.len();
        for (i, v) in names.iter().enumerate() {
            coords.insert(v.clone(), Point::unit(n, i));
        }
    }
    let mut c = OrderedComplex::new();
    for name in &names {
        let id = c.vertex(&coords[name]);
        c.set_label(id, name.clone());
    }
    for (line, vs) in faces {
        let pts: Vec<QPoint> = vs.iter().map(|v| coords[v].clone()).collect();
        c.add_simplex(&pts).map_err(|e| Error::Parse {
            line,
            msg: e.to_string(),
        })?;
    }
    Ok(c)
}

/// Writes the facets with coordinates; `parse_complex` reads it back.
pub fn write_complex(c: &OrderedComplex) -> String {
    let mut out = String::new();
    for v in 0..c.vertex_count() {
        out.push_str(&format!("vertex {}", c.label(v)));
        for x in c.point(v).coords() {
            out.push_str(&format!(" {x}"));
        }
        out.push('\n');
    }
    for key in c.facets() {
        let order = c.ordering(&key).expect("facet is a face");
        let names: Vec<&str> = order.iter().map(|&v| c.label(v)).collect();
        out.push_str(&format!("face {}\n", names.join(" ")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let c = parse_complex("face a b c\nface c d\n").unwrap();
        assert_eq!(c.face_count(), 7 + 2);
        let again = parse_complex(&write_complex(&c)).unwrap();
        assert_eq!(again.face_count(), c.face_count());
        assert_eq!(again.facets(), c.facets());
    }

    #[test]
    fn errors_carry_lines() {
        assert!(matches!(
            parse_complex("face a b\nbogus\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        let err = parse_complex("vertex a 0\nvertex b 1\nvertex c 2\nface a b c\n");
        assert!(matches!(err, Err(Error::Parse { line: 4, .. })));
        assert!(matches!(
            parse_complex("face a b\nface b a\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }
}
