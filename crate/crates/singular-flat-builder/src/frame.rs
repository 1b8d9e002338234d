//! Which half-plane of one foliation faces which end of the other.
//!
//! A frame angle per pole fixes where the ends of each foliation point.
//! The half-plane of the vertical foliation with label k is centred on the
//! horizontal end f(k); the frames of the two foliations at a pole differ
//! by half a step, π/K.

use std::f64::consts::{PI, TAU};

use qd_core::{FoliationKind, Pole, QuadDiff};
use serde::{Deserialize, Serialize};

use crate::BuildError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleFrame {
    pub pole: Pole,
    /// pole order
    pub order: usize,
    pub horizontal: f64,
    pub vertical: f64,
}

impl PoleFrame {
    fn k(&self) -> usize {
        self.order - 2
    }
}

/// The map from half-planes of the vertical foliation to ends of the
/// horizontal one, stored through the frames that realise it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionBijection {
    pub frames: Vec<PoleFrame>,
}

fn orders(n: usize, m: Option<usize>) -> Result<Vec<(Pole, usize)>, BuildError> {
    let mut out = vec![(Pole::Infinity, n)];
    if let Some(m) = m {
        out.push((Pole::Zero, m));
    }
    if out.iter().any(|&(_, o)| o < 3) {
        return Err(BuildError::Bijection("pole orders must be at least 3".into()));
    }
    Ok(out)
}

impl RegionBijection {
    /// Positive real leading coefficients: half-plane k faces end k.
    pub fn standard(n: usize, m: Option<usize>) -> Result<RegionBijection, BuildError> {
        Ok(RegionBijection {
            frames: orders(n, m)?
                .into_iter()
                .map(|(pole, order)| PoleFrame { pole, order, horizontal: 0.0, vertical: -PI / (order - 2) as f64 })
                .collect(),
        })
    }

    /// Half-plane k faces end k + shift (mod K) at each pole.
    pub fn shifted(n: usize, m: Option<usize>, shifts: &[(Pole, usize)]) -> Result<RegionBijection, BuildError> {
        let mut b = RegionBijection::standard(n, m)?;
        for &(pole, r) in shifts {
            let f = b
                .frames
                .iter_mut()
                .find(|f| f.pole == pole)
                .ok_or_else(|| BuildError::Bijection(format!("no pole {pole:?}")))?;
            let k = f.k() as f64;
            f.vertical = (2.0 * r as f64 - 1.0) * PI / k;
        }
        Ok(b)
    }

    /// Explicit maps (image of half-plane k at index k - 1) per pole.  Only
    /// maps that preserve the cyclic order are realisable.
    pub fn from_maps(n: usize, m: Option<usize>, maps: &[(Pole, Vec<usize>)]) -> Result<RegionBijection, BuildError> {
        let mut shifts = Vec::new();
        for (pole, map) in maps {
            let order = orders(n, m)?
                .into_iter()
                .find(|o| o.0 == *pole)
                .ok_or_else(|| BuildError::Bijection(format!("no pole {pole:?}")))?
                .1;
            let k = order - 2;
            let mut seen = vec![false; k + 1];
            if map.len() != k || map.iter().any(|&j| j == 0 || j > k || std::mem::replace(&mut seen[j], true)) {
                return Err(BuildError::Bijection(format!("{map:?} is not a bijection onto 1..={k}")));
            }
            let r = (map[0] + k - 1) % k;
            if map.iter().enumerate().any(|(i, &j)| (i + r) % k + 1 != j) {
                return Err(BuildError::Bijection(format!("{map:?} does not preserve the cyclic order")));
            }
            shifts.push((*pole, r));
        }
        RegionBijection::shifted(n, m, &shifts)
    }

    /// Frames read off the leading coefficients of a differential.
    pub fn from_qd(qd: &QuadDiff) -> Result<RegionBijection, BuildError> {
        let mut frames = Vec::new();
        for pole in qd.poles() {
            let order = qd.pole_order(pole).unwrap_or(0);
            let (Some(h), Some(v)) =
                (qd.frame_angle(pole, FoliationKind::Horizontal), qd.frame_angle(pole, FoliationKind::Vertical))
            else {
                return Err(BuildError::Bijection(format!("pole {pole:?} has order {order} < 3")));
            };
            frames.push(PoleFrame { pole, order, horizontal: h, vertical: v });
        }
        Ok(RegionBijection { frames })
    }

    pub fn get(&self, pole: Pole) -> Option<&PoleFrame> {
        self.frames.iter().find(|f| f.pole == pole)
    }

    pub fn frame(&self, pole: Pole, kind: FoliationKind) -> f64 {
        let f = self.get(pole).expect("frame for pole");
        match kind {
            FoliationKind::Horizontal => f.horizontal,
            FoliationKind::Vertical => f.vertical,
        }
    }

    pub fn validate(&self) -> Result<(), BuildError> {
        for f in &self.frames {
            if f.order < 3 {
                return Err(BuildError::Bijection(format!("pole order {} < 3", f.order)));
            }
            let step = PI / f.k() as f64;
            let d = (f.vertical - f.horizontal - step).rem_euclid(2.0 * step);
            if d.min(2.0 * step - d) > 1e-9 || !f.horizontal.is_finite() {
                return Err(BuildError::Bijection(format!("frames at {:?} are not half a step apart", f.pole)));
            }
        }
        Ok(())
    }

    /// Horizontal end faced by the vertical half-plane `label`.
    pub fn ray_for_region(&self, pole: Pole, label: usize) -> usize {
        let f = self.get(pole).expect("frame for pole");
        let k = f.k();
        let x = label as f64 + 0.5 + (f.vertical - f.horizontal) * k as f64 / TAU;
        let j = (x.round() as i64).rem_euclid(k as i64) as usize;
        if j == 0 {
            k
        } else {
            j
        }
    }

    /// The same data with the roles of the foliations exchanged.
    pub fn swapped(&self) -> RegionBijection {
        RegionBijection {
            frames: self.frames.iter().map(|f| PoleFrame { horizontal: f.vertical, vertical: f.horizontal, ..*f }).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qd_core::Complex64 as C;

    #[test]
    fn standard_is_identity() {
        let b = RegionBijection::standard(5, Some(4)).unwrap();
        b.validate().unwrap();
        for k in 1..=3 {
            assert_eq!(b.ray_for_region(Pole::Infinity, k), k);
        }
    }

    #[test]
    fn maps_must_rotate() {
        let b = RegionBijection::from_maps(6, None, &[(Pole::Infinity, vec![3, 4, 1, 2])]).unwrap();
        assert_eq!(b.ray_for_region(Pole::Infinity, 1), 3);
        assert_eq!(b.ray_for_region(Pole::Infinity, 4), 2);
        assert!(RegionBijection::from_maps(6, None, &[(Pole::Infinity, vec![1, 3, 2, 4])]).is_err());
        assert!(RegionBijection::from_maps(6, None, &[(Pole::Infinity, vec![1, 1, 2, 4])]).is_err());
    }

    #[test]
    fn frames_from_a_differential() {
        let qd = QuadDiff::punctured(3, 3, vec![C::new(1.0, 0.0), C::new(0.0, -1.0), C::new(0.0, 1.0)]).unwrap();
        let b = RegionBijection::from_qd(&qd).unwrap();
        b.validate().unwrap();
        assert_eq!(b.frames.len(), 2);
    }
}
