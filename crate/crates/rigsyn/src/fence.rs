//! Homotopy limits of fence-shaped diagrams of complexes.
//!
//! A fence has a row of "bottom" complexes mapping into a row of "top"
//! complexes. Each arrow goes from a bottom node to a top node and is tagged
//! with a direction; the homotopy limit is the shifted cone of the assembled
//! comparison map
//!
//! `Φ: ⊕ bottom → ⊕ top`,  `holim = Cone(Φ)[−1]`,
//!
//! where rightward arrows contribute with sign `+1` and leftward arrows with
//! sign `−1`. A node may carry several arrows (including two arrows to the
//! same top node), which is how equalizer-style diagrams are encoded.

use crate::complex::{cone, ChainMap, Complex};
use crate::error::Error;
use crate::matrix::Matrix;
use crate::Result;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Which way an arrow points when the fence is drawn with its bottom row
/// below its top row; this fixes its sign in the comparison map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArrowDirection {
    /// Contributes positively.
    Rightward,
    /// Contributes negatively.
    Leftward,
}

/// One arrow of a fence: a chain map from `bottom[from]` to `top[to]`.
#[derive(Clone, Debug)]
pub struct FenceArrow {
    pub from: usize,
    pub to: usize,
    pub direction: ArrowDirection,
    pub map: ChainMap,
}

/// A fence-shaped diagram of complexes.
#[derive(Clone, Debug)]
pub struct FenceDiagram {
    bottom: Vec<Complex>,
    top: Vec<Complex>,
    arrows: Vec<FenceArrow>,
}

impl FenceDiagram {
    /// Builds a fence, checking that every arrow joins existing nodes and
    /// that its chain map has the right endpoints.
    pub fn new(bottom: Vec<Complex>, top: Vec<Complex>, arrows: Vec<FenceArrow>) -> Result<Self> {
        for (i, a) in arrows.iter().enumerate() {
            if a.from >= bottom.len() || a.to >= top.len() {
                return Err(Error::invalid(
                    "fence arrow endpoints",
                    format!(
                        "arrow {i} joins bottom {} to top {}, but there are {} bottom and {} top nodes",
                        a.from,
                        a.to,
                        bottom.len(),
                        top.len()
                    ),
                ));
            }
            if a.map.source() != &bottom[a.from] || a.map.target() != &top[a.to] {
                return Err(Error::invalid(
                    "fence arrow map",
                    format!("arrow {i} does not match its endpoint complexes"),
                ));
            }
        }
        Ok(FenceDiagram { bottom, top, arrows })
    }

    pub fn bottom(&self) -> &[Complex] {
        &self.bottom
    }

    pub fn top(&self) -> &[Complex] {
        &self.top
    }

    pub fn arrows(&self) -> &[FenceArrow] {
        &self.arrows
    }

    /// The comparison map `Φ: ⊕ bottom → ⊕ top` whose shifted cone is the
    /// homotopy limit, together with its source and target sums.
    pub fn comparison_map(&self) -> ChainMap {
        let bottom_refs: Vec<&Complex> = self.bottom.iter().collect();
        let top_refs: Vec<&Complex> = self.top.iter().collect();
        let (src, _, bottom_projs) = Complex::direct_sum(&bottom_refs);
        let (tgt, top_incs, _) = Complex::direct_sum(&top_refs);

        let (lo, hi) = src.support();
        let mut comps: BTreeMap<i64, Matrix> = BTreeMap::new();
        for n in lo..=hi {
            comps.insert(n, Matrix::zero(tgt.dim(n), src.dim(n)));
        }
        for a in &self.arrows {
            let signed = match a.direction {
                ArrowDirection::Rightward => a.map.clone(),
                ArrowDirection::Leftward => a.map.neg(),
            };
            let routed = top_incs[a.to]
                .compose(&signed)
                .and_then(|m| m.compose(&bottom_projs[a.from]))
                .expect("fence arrow endpoints were validated");
            for n in lo..=hi {
                let acc = comps.get_mut(&n).expect("degree window covers source support");
                *acc = acc.add(&routed.comp(n));
            }
        }
        ChainMap::new(src, tgt, comps).expect("signed sums of chain maps are chain maps")
    }

    /// The homotopy limit `Cone(Φ)[−1]`.
    ///
    /// In degree `n` this is `⊕ bottom^n ⊕ ⊕ top^{n−1}`, bottom part first.
    pub fn holim(&self) -> Complex {
        if self.bottom.is_empty() && self.top.is_empty() {
            return Complex::zero();
        }
        let phi = self.comparison_map();
        let (c, _, _) = cone(&phi);
        c.shift(-1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Scalar;

    fn line() -> Complex {
        Complex::concentrated(0, 1)
    }

    fn scaled_id(c: &Complex, s: i64) -> ChainMap {
        ChainMap::identity(c).scale(&Scalar::from_int(s))
    }

    #[test]
    fn empty_fence_is_zero() {
        let f = FenceDiagram::new(vec![], vec![], vec![]).unwrap();
        assert!(f.holim().is_zero());
    }

    #[test]
    fn identity_equalizer_fence_is_a_point() {
        // A → B ← A′ with both arrows the identity on K[0]: the homotopy
        // limit is quasi-isomorphic to K[0].
        let f = FenceDiagram::new(
            vec![line(), line()],
            vec![line()],
            vec![
                FenceArrow {
                    from: 0,
                    to: 0,
                    direction: ArrowDirection::Rightward,
                    map: scaled_id(&line(), 1),
                },
                FenceArrow {
                    from: 1,
                    to: 0,
                    direction: ArrowDirection::Leftward,
                    map: scaled_id(&line(), 1),
                },
            ],
        )
        .unwrap();
        let h = f.holim();
        assert_eq!(h.dim(0), 2);
        assert_eq!(h.dim(1), 1);
        let dims = h.cohomology_dims();
        assert_eq!(dims.get(&0), Some(&1));
        assert_eq!(dims.len(), 1);
    }

    #[test]
    fn doubled_arrows_encode_equalizers() {
        // Two arrows from the same bottom node to the same top node, with
        // maps 1 and 3 and opposite directions: Φ = 1 − 3 = −2, so the
        // holim is acyclic; with equal maps Φ = 0 and both H^0, H^1 survive.
        let make = |s: i64| {
            FenceDiagram::new(
                vec![line()],
                vec![line()],
                vec![
                    FenceArrow {
                        from: 0,
                        to: 0,
                        direction: ArrowDirection::Rightward,
                        map: scaled_id(&line(), 1),
                    },
                    FenceArrow {
                        from: 0,
                        to: 0,
                        direction: ArrowDirection::Leftward,
                        map: scaled_id(&line(), s),
                    },
                ],
            )
            .unwrap()
        };
        assert!(make(3).holim().is_acyclic());
        let dims = make(1).holim().cohomology_dims();
        assert_eq!(dims.get(&0), Some(&1));
        assert_eq!(dims.get(&1), Some(&1));
    }

    #[test]
    fn arrow_validation() {
        let bad = FenceDiagram::new(
            vec![line()],
            vec![],
            vec![FenceArrow {
                from: 0,
                to: 0,
                direction: ArrowDirection::Rightward,
                map: scaled_id(&line(), 1),
            }],
        );
        assert!(bad.is_err());

        let mismatched = FenceDiagram::new(
            vec![Complex::concentrated(0, 2)],
            vec![line()],
            vec![FenceArrow {
                from: 0,
                to: 0,
                direction: ArrowDirection::Rightward,
                map: scaled_id(&line(), 1),
            }],
        );
        assert!(mismatched.is_err());
    }

    #[test]
    fn fence_with_disconnected_bottom_keeps_it() {
        // A lone bottom node with no arrows contributes its cohomology.
        let f = FenceDiagram::new(vec![line()], vec![], vec![]).unwrap();
        let dims = f.holim().cohomology_dims();
        assert_eq!(dims.get(&0), Some(&1));
        assert_eq!(dims.len(), 1);
    }
}
