//! JSON files: point sets, trees, integer instances and exact gadgets.
//!
//! Big integers and rationals are written as decimal strings (`"p"` or `"p/q"`),
//! `d` points of a gadget additionally as dyadic strings `m*2^e`.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::gadget::{DTolerance, Gadget, IntegerInstance, PartitionInstance};
use crate::geometry::Point;
use crate::network::{Edge, PointSet, Tree};
use crate::scalar::{format_rational, parse_rational};
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub x: String,
    pub y: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointsFile {
    pub points: Vec<PointRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub edges: Vec<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub alphas_dot: Vec<u64>,
    pub k: u32,
    #[serde(rename = "P")]
    pub p: String,
    #[serde(rename = "Q")]
    pub q: String,
    pub points: Vec<PointRecord>,
    pub scale: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DDefRecord {
    pub center_c: [String; 2],
    pub radius_c: String,
    pub center_a: [String; 2],
    pub radius_a: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetFile {
    pub alphas_dot: Vec<u64>,
    pub d_bits: u32,
    /// `null` for natively computed `d` points, else the rounding `k`.
    pub rounded_k: Option<u32>,
    pub xi: String,
    #[serde(rename = "P")]
    pub p: String,
    #[serde(rename = "Q")]
    pub q: String,
    pub points: Vec<PointRecord>,
    /// `d_1..d_n` as dyadic strings `[x, y]`.
    pub d_points: Vec<[String; 2]>,
    pub d_defs: Vec<DDefRecord>,
}

fn bad(what: &str, e: impl std::fmt::Display) -> Error {
    Error::InvalidInput(format!("{what}: {e}"))
}

fn rational(s: &str) -> Result<Rational> {
    parse_rational(s).map_err(|e| bad("coordinate", e))
}

fn integer(s: &str) -> Result<BigInt> {
    s.trim().parse().map_err(|_| bad("integer", s))
}

fn record(p: &Point, label: Option<String>) -> PointRecord {
    PointRecord { label, x: format_rational(&p.x), y: format_rational(&p.y) }
}

fn records(ps: &PointSet) -> Vec<PointRecord> {
    (0..ps.len()).map(|i| record(ps.point(i), ps.labels().map(|l| l[i].clone()))).collect()
}

fn point_set(recs: &[PointRecord]) -> Result<PointSet> {
    let pts = recs.iter().map(|r| Ok(Point::new(rational(&r.x)?, rational(&r.y)?))).collect::<Result<Vec<_>>>()?;
    let labels = match recs.iter().filter(|r| r.label.is_some()).count() {
        0 => None,
        k if k == recs.len() => Some(recs.iter().map(|r| r.label.clone().expect("checked")).collect()),
        _ => return Err(bad("points", "either all points carry labels or none")),
    };
    PointSet::with_labels(pts, labels)
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn from_json<'a, T: Deserialize<'a>>(what: &str, s: &'a str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| bad(what, e))
}

pub fn points_to_json(ps: &PointSet) -> String {
    to_json(&PointsFile { points: records(ps) })
}

pub fn points_from_json(s: &str) -> Result<PointSet> {
    point_set(&from_json::<PointsFile>("points file", s)?.points)
}

pub fn tree_to_json(t: &Tree) -> String {
    to_json(&TreeFile { n: Some(t.n()), edges: t.edges().iter().map(|&(u, v)| [u, v]).collect() })
}

/// Parse a tree; `n` defaults to one more than the number of edges.
pub fn tree_from_json(s: &str) -> Result<Tree> {
    let f: TreeFile = from_json("tree file", s)?;
    let edges: Vec<Edge> = f.edges.iter().map(|e| (e[0], e[1])).collect();
    Tree::new(f.n.unwrap_or(edges.len() + 1), edges)
}

pub fn instance_to_json(ii: &IntegerInstance) -> String {
    to_json(&InstanceFile {
        alphas_dot: ii.alphas_dot.clone(),
        k: ii.k,
        p: ii.p.to_string(),
        q: ii.q.to_string(),
        points: records(&ii.points),
        scale: format!("1800*2^{}", ii.k),
    })
}

/// Parse and validate an integer instance (scale, threshold and every exact coordinate).
pub fn instance_from_json(s: &str) -> Result<IntegerInstance> {
    let f: InstanceFile = from_json("instance file", s)?;
    if f.scale != format!("1800*2^{}", f.k) {
        return Err(bad("scale", &f.scale));
    }
    let points = point_set(&f.points)?;
    if points.points().iter().any(|p| !p.x.is_integer() || !p.y.is_integer()) {
        return Err(bad("points", "coordinates must be integers"));
    }
    let ii = IntegerInstance {
        alphas_dot: f.alphas_dot,
        k: f.k,
        points,
        p: integer(&f.p)?,
        q: integer(&f.q)?,
        epsilon_bound: Rational::new(1.into(), crate::scalar::pow2(f.k)),
    };
    let g = Gadget::from_integer_instance(&ii)?;
    if g.p() != ii.p || g.q() != ii.q {
        return Err(bad("threshold", format!("{}/{} does not match the instance", ii.p, ii.q)));
    }
    Ok(ii)
}

fn pair(p: &Point) -> [String; 2] {
    [format_rational(&p.x), format_rational(&p.y)]
}

fn dyadic_string(r: &Rational) -> Result<String> {
    let bits = r.denom().bits().saturating_sub(1) as i64;
    let d = Dyadic::from_rational_fixed(r, bits, crate::dyadic::Round::Down);
    if d.to_rational() != *r {
        return Err(bad("d point", "coordinate is not dyadic"));
    }
    Ok(d.to_string())
}

pub fn gadget_to_json(g: &Gadget) -> Result<String> {
    let l = g.layout;
    let d_points = (1..=g.n())
        .map(|i| {
            let p = g.point(l.d(i));
            Ok([dyadic_string(&p.x)?, dyadic_string(&p.y)?])
        })
        .collect::<Result<Vec<_>>>()?;
    let d_defs = g
        .d_defs
        .iter()
        .map(|d| DDefRecord {
            center_c: pair(&d.center_c),
            radius_c: format_rational(&d.radius_c),
            center_a: pair(&d.center_a),
            radius_a: format_rational(&d.radius_a),
        })
        .collect();
    Ok(to_json(&GadgetFile {
        alphas_dot: g.instance.alphas_dot().to_vec(),
        d_bits: g.d_bits,
        rounded_k: match g.tolerance {
            DTolerance::Native => None,
            DTolerance::Rounded { k } => Some(k),
        },
        xi: format_rational(&g.xi),
        p: g.p().to_string(),
        q: g.q().to_string(),
        points: records(&g.points),
        d_points,
        d_defs,
    }))
}

/// Parse a gadget; all derived data is recomputed and must agree with the file.
pub fn gadget_from_json(s: &str) -> Result<Gadget> {
    let f: GadgetFile = from_json("gadget file", s)?;
    let inst = PartitionInstance::new(f.alphas_dot.clone())?;
    let ps = point_set(&f.points)?;
    let tol = f.rounded_k.map_or(DTolerance::Native, |k| DTolerance::Rounded { k });
    let g = Gadget::from_points(inst, ps.points().to_vec(), ps.labels(), f.d_bits, tol)?;
    for (i, d) in f.d_points.iter().enumerate() {
        let x: Dyadic = d[0].parse().map_err(|e| bad("d point", e))?;
        let y: Dyadic = d[1].parse().map_err(|e| bad("d point", e))?;
        if Point::new(x.to_rational(), y.to_rational()) != *g.point(g.layout.d(i + 1)) {
            return Err(bad("d point", format!("d{} disagrees with the point list", i + 1)));
        }
    }
    if f.d_points.len() != g.n() || f.xi != format_rational(&g.xi) || f.p != g.p().to_string() || f.q != g.q().to_string() {
        return Err(bad("gadget file", "derived fields disagree with alphas_dot"));
    }
    let defs_ok = f.d_defs.len() == g.n()
        && f.d_defs.iter().zip(&g.d_defs).all(|(r, d)| {
            r.radius_c == format_rational(&d.radius_c)
                && r.radius_a == format_rational(&d.radius_a)
                && r.center_c == pair(&d.center_c)
                && r.center_a == pair(&d.center_a)
        });
    if !defs_ok {
        return Err(bad("gadget file", "d_defs disagree with the construction"));
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadget::{build_gadget, integerize};

    #[test]
    fn points_and_trees_round_trip() {
        let ps = PointSet::new(vec![Point::new(crate::scalar::rat(1, 3), crate::scalar::int(2)), Point::from_ints(0, 0)]).unwrap();
        let s = points_to_json(&ps);
        assert!(s.contains("\"1/3\""));
        assert_eq!(points_from_json(&s).unwrap(), ps);
        let t = Tree::new(3, [(0, 2), (1, 2)]).unwrap();
        assert_eq!(tree_from_json(&tree_to_json(&t)).unwrap(), t);
        assert_eq!(tree_from_json(r#"{"edges": [[0, 1]]}"#).unwrap().n(), 2);
        assert!(tree_from_json(r#"{"edges": [[0, 1], [1, 0]]}"#).is_err());
        assert!(points_from_json(r#"{"points": [{"x": "1.5", "y": "0"}]}"#).is_err());
    }

    #[test]
    fn instance_round_trip() {
        let g = build_gadget(&PartitionInstance::new(vec![1, 1]).unwrap(), 48).unwrap();
        let ii = integerize(&g, None).unwrap();
        let s = instance_to_json(&ii);
        assert!(s.contains("\"scale\": \"1800*2^"));
        let back = instance_from_json(&s).unwrap();
        assert_eq!(back, ii);
        assert_eq!(instance_to_json(&back), s);
        let tampered = s.replacen(&format!("\"{}\"", ii.p), "\"1\"", 1);
        assert!(instance_from_json(&tampered).is_err());
    }

    #[test]
    fn gadget_round_trip() {
        let g = build_gadget(&PartitionInstance::new(vec![2, 3, 5]).unwrap(), 40).unwrap();
        let s = gadget_to_json(&g).unwrap();
        let back = gadget_from_json(&s).unwrap();
        assert_eq!(back.points, g.points);
        assert_eq!(gadget_to_json(&back).unwrap(), s);
        assert!(s.contains("*2^"));
    }
}
