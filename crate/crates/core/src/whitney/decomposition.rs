use std::collections::HashMap;

use serde::Serialize;

use super::cube::DyadicCube;
use crate::calculus::AxisBox;
use crate::error::{Error, Result};
use crate::jets::first_duplicate;

#[derive(Clone, Copy, Debug)]
pub struct DecomposeOptions {
    /// Level-0 cubes cover the bound box inflated by this many units.
    pub margin: f64,
    /// Deepest level a cube may reach.
    pub max_level: u32,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions {
            margin: 3.0,
            max_level: 40,
        }
    }
}

/// A finite Whitney decomposition: dyadic cubes whose tripled dilates each
/// meet at most one point of `E`, with neighbours and representatives.
#[derive(Clone, Debug)]
pub struct WhitneyDecomposition {
    points: Vec<Vec<f64>>,
    cubes: Vec<DyadicCube>,
    reps: Vec<Option<usize>>,
    neighbors: Vec<Vec<usize>>,
    lookup: HashMap<DyadicCube, usize>,
    region: AxisBox,
    deepest: u32,
}

/// One line of the decomposition dump.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CubeRecord {
    pub level: u32,
    pub anchor: Vec<i64>,
    pub rep: Option<Vec<f64>>,
}

/// Decomposes the region around `bound_box` for the point set `points`.
pub fn whitney_decompose(points: &[Vec<f64>], bound_box: &AxisBox) -> Result<WhitneyDecomposition> {
    whitney_decompose_with(points, bound_box, DecomposeOptions::default())
}

pub fn whitney_decompose_with(
    points: &[Vec<f64>],
    bound_box: &AxisBox,
    options: DecomposeOptions,
) -> Result<WhitneyDecomposition> {
    let first = points.first().ok_or(Error::EmptySet)?;
    let n = first.len();
    if bound_box.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bound_box.dim(),
        });
    }
    if !bound_box.is_bounded() {
        return Err(Error::InvalidArgument("bound box must be bounded".into()));
    }
    for p in points {
        if p.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: p.len(),
            });
        }
        let inside = p
            .iter()
            .zip(bound_box.lo.iter().zip(&bound_box.hi))
            .all(|(v, (a, b))| *a < *v && *v < *b);
        if !inside {
            return Err(Error::InvalidArgument(format!(
                "point {p:?} is not inside the bound box"
            )));
        }
    }
    if let Some(p) = first_duplicate(points.iter().map(|p| p.as_slice())) {
        return Err(Error::DuplicatePoint(p.to_vec()));
    }

    let lo: Vec<i64> = bound_box
        .lo
        .iter()
        .map(|v| (v - options.margin).floor() as i64)
        .collect();
    let hi: Vec<i64> = bound_box
        .hi
        .iter()
        .map(|v| (v + options.margin).ceil() as i64)
        .collect();
    let region = AxisBox {
        lo: lo.iter().map(|&z| z as f64).collect(),
        hi: hi.iter().map(|&z| z as f64).collect(),
    };

    let mut stack = Vec::new();
    let mut anchor = lo.clone();
    loop {
        stack.push(DyadicCube::new(0, anchor.clone()));
        let mut j = 0;
        loop {
            if j == n {
                break;
            }
            anchor[j] += 1;
            if anchor[j] < hi[j] {
                break;
            }
            anchor[j] = lo[j];
            j += 1;
        }
        if j == n {
            break;
        }
    }
    stack.reverse();

    let mut cubes = Vec::new();
    let mut reps = Vec::new();
    while let Some(q) = stack.pop() {
        let hits = points_in(points, &q.dilate(3.0));
        if hits.len() <= 1 {
            let rep = match hits.first() {
                Some(&i) => Some(i),
                None => match q.parent() {
                    Some(parent) => nearest(points, &points_in(points, &parent.dilate(3.0)), &q.center()),
                    None => None,
                },
            };
            cubes.push(q);
            reps.push(rep);
        } else {
            if q.level >= options.max_level {
                return Err(Error::RefinementLimit {
                    max_level: options.max_level,
                });
            }
            let mut children = q.children();
            children.reverse();
            stack.extend(children);
        }
    }

    let lookup: HashMap<DyadicCube, usize> =
        cubes.iter().enumerate().map(|(i, q)| (q.clone(), i)).collect();
    let deepest = cubes.iter().map(|q| q.level).max().unwrap_or(0);
    let neighbors = find_neighbors(&cubes);
    Ok(WhitneyDecomposition {
        points: points.to_vec(),
        cubes,
        reps,
        neighbors,
        lookup,
        region,
        deepest,
    })
}

fn points_in(points: &[Vec<f64>], bx: &AxisBox) -> Vec<usize> {
    points
        .iter()
        .enumerate()
        .filter(|(_, p)| bx.contains(p))
        .map(|(i, _)| i)
        .collect()
}

/// Nearest candidate to `c`; ties go to the lexicographically smallest point.
fn nearest(points: &[Vec<f64>], candidates: &[usize], c: &[f64]) -> Option<usize> {
    let dist = |i: usize| -> f64 {
        points[i]
            .iter()
            .zip(c)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    };
    candidates.iter().copied().min_by(|&a, &b| {
        dist(a).total_cmp(&dist(b)).then_with(|| {
            points[a]
                .iter()
                .zip(&points[b])
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    })
}

fn find_neighbors(cubes: &[DyadicCube]) -> Vec<Vec<usize>> {
    let mut cells: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (i, q) in cubes.iter().enumerate() {
        let cell: Vec<i64> = q.anchor.iter().map(|z| z >> q.level).collect();
        cells.entry(cell).or_default().push(i);
    }
    let n = cubes.first().map_or(0, |q| q.dim());
    let offsets: Vec<Vec<i64>> = (0..3usize.pow(n as u32))
        .map(|code| {
            let mut c = code;
            (0..n)
                .map(|_| {
                    let d = (c % 3) as i64 - 1;
                    c /= 3;
                    d
                })
                .collect()
        })
        .collect();
    cubes
        .iter()
        .enumerate()
        .map(|(i, q)| {
            let cell: Vec<i64> = q.anchor.iter().map(|z| z >> q.level).collect();
            let mut out = Vec::new();
            for off in &offsets {
                let key: Vec<i64> = cell.iter().zip(off).map(|(a, b)| a + b).collect();
                if let Some(list) = cells.get(&key) {
                    out.extend(list.iter().copied().filter(|&j| j != i && q.touches(&cubes[j])));
                }
            }
            out.sort_unstable();
            out
        })
        .collect()
}

impl WhitneyDecomposition {
    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn cubes(&self) -> &[DyadicCube] {
        &self.cubes
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.region.dim()
    }

    /// Index into [`WhitneyDecomposition::points`] of the representative of cube `q`.
    pub fn rep(&self, q: usize) -> Option<usize> {
        self.reps[q]
    }

    pub fn neighbors(&self, q: usize) -> &[usize] {
        &self.neighbors[q]
    }

    /// The union of the level-0 cubes, as a closed box.
    pub fn region(&self) -> &AxisBox {
        &self.region
    }

    pub fn deepest_level(&self) -> u32 {
        self.deepest
    }

    /// The cube containing `x`, if `x` lies in the covered region.
    pub fn locate(&self, x: &[f64]) -> Option<usize> {
        if x.len() != self.dim() {
            return None;
        }
        (0..=self.deepest).find_map(|level| self.lookup.get(&DyadicCube::containing(x, level)).copied())
    }

    /// Cubes whose open dilate `1.1Q` contains `x`.
    pub fn active(&self, x: &[f64]) -> Result<Vec<usize>> {
        let home = self.locate(x).ok_or_else(|| Error::Uncovered(x.to_vec()))?;
        let mut out = vec![home];
        for &q in &self.neighbors[home] {
            let bx = self.cubes[q].dilate(1.1);
            let inside = x
                .iter()
                .zip(bx.lo.iter().zip(&bx.hi))
                .all(|(v, (a, b))| *a < *v && *v < *b);
            if inside {
                out.push(q);
            }
        }
        Ok(out)
    }

    pub fn dump(&self) -> Vec<CubeRecord> {
        self.cubes
            .iter()
            .zip(&self.reps)
            .map(|(q, rep)| CubeRecord {
                level: q.level,
                anchor: q.anchor.clone(),
                rep: rep.map(|i| self.points[i].clone()),
            })
            .collect()
    }
}
