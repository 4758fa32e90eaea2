use crate::calculus::AxisBox;

/// The half-open dyadic cube `Π_j [z_j 2^{−k}, (z_j + 1) 2^{−k})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicCube {
    pub level: u32,
    pub anchor: Vec<i64>,
}

impl DyadicCube {
    pub fn new(level: u32, anchor: Vec<i64>) -> DyadicCube {
        DyadicCube { level, anchor }
    }

    /// The cube of the given level containing `x`.
    pub fn containing(x: &[f64], level: u32) -> DyadicCube {
        let scale = (level as f64).exp2();
        DyadicCube {
            level,
            anchor: x.iter().map(|v| (v * scale).floor() as i64).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.anchor.len()
    }

    /// Sidelength `δ_Q = 2^{−k}`.
    pub fn side(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    pub fn lo(&self) -> Vec<f64> {
        let h = self.side();
        self.anchor.iter().map(|&z| z as f64 * h).collect()
    }

    pub fn center(&self) -> Vec<f64> {
        let h = self.side();
        self.anchor.iter().map(|&z| (z as f64 + 0.5) * h).collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let h = self.side();
        x.iter().zip(&self.anchor).all(|(v, &z)| {
            let lo = z as f64 * h;
            lo <= *v && *v < lo + h
        })
    }

    /// The closed concentric dilate `λQ`.
    pub fn dilate(&self, factor: f64) -> AxisBox {
        let half = 0.5 * factor * self.side();
        let c = self.center();
        AxisBox {
            lo: c.iter().map(|v| v - half).collect(),
            hi: c.iter().map(|v| v + half).collect(),
        }
    }

    pub fn closure(&self) -> AxisBox {
        self.dilate(1.0)
    }

    pub fn parent(&self) -> Option<DyadicCube> {
        if self.level == 0 {
            return None;
        }
        Some(DyadicCube {
            level: self.level - 1,
            anchor: self.anchor.iter().map(|z| z.div_euclid(2)).collect(),
        })
    }

    pub fn children(&self) -> Vec<DyadicCube> {
        let n = self.dim();
        (0..1usize << n)
            .map(|bits| DyadicCube {
                level: self.level + 1,
                anchor: self
                    .anchor
                    .iter()
                    .enumerate()
                    .map(|(j, z)| 2 * z + ((bits >> j) & 1) as i64)
                    .collect(),
            })
            .collect()
    }

    /// Whether the closed cubes meet, with a small absolute slack.
    pub fn touches(&self, other: &DyadicCube) -> bool {
        const SLACK: f64 = 1e-12;
        let (a, b) = (self.closure(), other.closure());
        (0..self.dim()).all(|j| a.lo[j] <= b.hi[j] + SLACK && b.lo[j] <= a.hi[j] + SLACK)
    }
}
