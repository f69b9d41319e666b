use super::Digraph;
use crate::error::{Error, Result};
use rayon::prelude::*;

/// Indices (increasing) of the arcs that lie on no out-branching.
///
/// With `r` the smallest vertex reaching everything, an arc `(u, v)` is
/// useful when `v` itself reaches everything (root the branching at `u`), and
/// otherwise exactly when `u` is reachable from `r` in `D - v`, i.e. some
/// dipath from `r` ends with `(u, v)`.
pub fn find_useless_arcs(d: &Digraph) -> Result<Vec<usize>> {
    let full = d.full_reach_mask().ok_or(Error::NoOutBranching)?;
    let root = full.iter().position(|&b| b).expect("non-empty mask");

    let heads: Vec<usize> = d
        .vertices()
        .filter(|&v| !full[v] && d.in_degree(v) > 0)
        .collect();
    let mut useless: Vec<usize> = heads
        .par_iter()
        .flat_map_iter(|&v| {
            let reach = d.reach_mask_avoiding(root, Some(v));
            d.in_arcs(v)
                .iter()
                .copied()
                .filter(move |&a| !reach[d.arc(a).0])
                .collect::<Vec<_>>()
        })
        .collect();
    useless.sort_unstable();
    Ok(useless)
}

/// `D'`: same vertices, useless arcs dropped.
pub fn remove_useless_arcs(d: &Digraph) -> Result<Digraph> {
    let useless = find_useless_arcs(d)?;
    let mut drop = vec![false; d.m()];
    for a in useless {
        drop[a] = true;
    }
    Ok(d.without_arcs(&drop))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn back_arc_into_path_is_useless() {
        let d = Digraph::new(3, [(0, 1), (1, 2), (2, 1)]).unwrap();
        assert_eq!(find_useless_arcs(&d).unwrap(), vec![2]);
        assert_eq!(remove_useless_arcs(&d).unwrap().arcs(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn all_arcs_useful_when_bypass_exists() {
        let d = Digraph::new(3, [(0, 1), (0, 2), (1, 2), (2, 1)]).unwrap();
        assert!(find_useless_arcs(&d).unwrap().is_empty());
    }

    #[test]
    fn cycle_keeps_every_arc() {
        let d = Digraph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(find_useless_arcs(&d).unwrap().is_empty());
        assert_eq!(remove_useless_arcs(&d).unwrap(), d);
    }

    #[test]
    fn no_out_branching_is_an_error() {
        let d = Digraph::new(3, [(0, 1)]).unwrap();
        assert_eq!(remove_useless_arcs(&d), Err(Error::NoOutBranching));
    }
}
