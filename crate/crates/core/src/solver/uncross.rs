//! Removing the crossing from a four-point spanning tree.

use std::cmp::Ordering;

use crate::dilation::{resolve_extremum, CertConfig, DilationEngine};
use crate::error::{Error, Result};
use crate::geometry::{orientation, Orientation};
use crate::network::{crossing_pair, edge, PointSet, Tree};

use super::TreeCandidate;

fn convex_position(ps: &PointSet) -> bool {
    // no point inside or on the triangle of the other three, no three collinear
    let p = ps.points();
    for i in 0..4 {
        let o: Vec<usize> = (0..4).filter(|&j| j != i).collect();
        let ors = [
            orientation(&p[o[0]], &p[o[1]], &p[i]),
            orientation(&p[o[1]], &p[o[2]], &p[i]),
            orientation(&p[o[2]], &p[o[0]], &p[i]),
        ];
        if ors.contains(&Orientation::Collinear) || (ors[0] == ors[1] && ors[1] == ors[2]) {
            return false;
        }
    }
    true
}

/// Replace one of the two crossing edges of a four-point tree so that the
/// result is crossing-free and no worse.
///
/// With crossing edges `ad`, `bc` and third edge `dc`: if `|bd| < |bc|` then
/// `bc` becomes `bd`, otherwise `|ac| < |ad|` holds and `ad` becomes `ac`.
pub fn uncross_four(ps: &PointSet, t: &Tree) -> Result<Tree> {
    if ps.len() != 4 || t.n() != 4 {
        return Err(Error::InvalidInput("uncrossing needs exactly four points".into()));
    }
    let (e1, e2) = crossing_pair(ps, t.edges()).ok_or(Error::NotCrossing)?;
    if !convex_position(ps) {
        return Err(Error::NotApplicable("points are not in convex position".into()));
    }
    let third = *t.edges().iter().find(|&&e| e != e1 && e != e2).expect("three edges");
    let on_third = |x: usize| x == third.0 || x == third.1;
    let (a, d) = if on_third(e1.1) { (e1.0, e1.1) } else { (e1.1, e1.0) };
    let (b, c) = if on_third(e2.1) { (e2.0, e2.1) } else { (e2.1, e2.0) };
    debug_assert_eq!(edge(c, d), third);

    let sq = |u: usize, v: usize| crate::geometry::squared_distance(ps.point(u), ps.point(v));
    let out = if sq(b, d) < sq(b, c) { t.swap_edge((b, c), (b, d))? } else { t.swap_edge((a, d), (a, c))? };
    debug_assert!(!crate::network::tree_has_crossing(ps, &out));
    Ok(out)
}

/// Certified order of `Δ(first)` against `Δ(second)`; `None` when tied at the cap.
pub fn compare_trees(ps: &PointSet, first: &Tree, second: &Tree, cfg: CertConfig) -> Result<Option<Ordering>> {
    let engine = DilationEngine::new(ps, cfg);
    let cands = vec![TreeCandidate::new(&engine, first.clone())?, TreeCandidate::new(&engine, second.clone())?];
    let res = resolve_extremum(&cands, false, &cfg);
    if res.survivors.len() == 2 {
        // symbolically equal, or inseparable at the cap
        return Ok(res.symbolic.map(|_| Ordering::Equal));
    }
    Ok(Some(if res.winner == 0 { Ordering::Less } else { Ordering::Greater }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_uncrossing() {
        // a=(0,0) b=(1,0) c=(0,1) d=(1,1): ad and bc are the diagonals, cd the top side
        let ps = PointSet::from_ints(&[(0, 0), (1, 0), (0, 1), (1, 1)]).unwrap();
        let t = Tree::new(4, [(0, 3), (1, 2), (2, 3)]).unwrap();
        let out = uncross_four(&ps, &t).unwrap();
        assert!(!crate::network::tree_has_crossing(&ps, &out));
        let ord = compare_trees(&ps, &out, &t, CertConfig::default()).unwrap();
        assert!(matches!(ord, Some(Ordering::Less | Ordering::Equal)));
    }

    #[test]
    fn errors() {
        let ps = PointSet::from_ints(&[(0, 0), (1, 0), (0, 1), (1, 1)]).unwrap();
        let path = Tree::new(4, [(0, 1), (1, 3), (2, 3)]).unwrap();
        assert!(matches!(uncross_four(&ps, &path), Err(Error::NotCrossing)));

        // collinear overlap counts as crossing but is not a convex quadrilateral
        let line = PointSet::from_ints(&[(0, 0), (2, 0), (1, 0), (3, 0)]).unwrap();
        let t = Tree::new(4, [(0, 1), (2, 3), (1, 3)]).unwrap();
        assert!(matches!(uncross_four(&line, &t), Err(Error::NotApplicable(_))));
    }
}
