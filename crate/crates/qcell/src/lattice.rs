//! Finite square (2D) and cubic (3D) qubit lattices.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Site {
    pub x: i32,
    pub y: i32,
    pub z: i32,
}

impl Site {
    pub const fn new(x: i32, y: i32, z: i32) -> Self {
        Site { x, y, z }
    }

    pub fn manhattan(&self, other: &Site) -> u32 {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y) + self.z.abs_diff(other.z)
    }

    pub fn offset(&self, d: (i32, i32, i32)) -> Site {
        Site::new(self.x + d.0, self.y + d.1, self.z + d.2)
    }

    /// The six axis neighbours, ignoring lattice bounds.
    pub fn neighbours(&self) -> [Site; 6] {
        [
            self.offset((1, 0, 0)),
            self.offset((-1, 0, 0)),
            self.offset((0, 1, 0)),
            self.offset((0, -1, 0)),
            self.offset((0, 0, 1)),
            self.offset((0, 0, -1)),
        ]
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.x, self.y, self.z)
    }
}

/// Sites at Manhattan distance one.
pub fn is_adjacent(a: &Site, b: &Site) -> bool {
    a.manhattan(b) == 1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    pub dims: (u32, u32, u32),
}

pub fn grid(dx: i64, dy: i64, dz: i64) -> Result<Lattice> {
    if dx < 1 || dy < 1 || dz < 1 {
        return Err(Error::InvalidArgument(format!(
            "lattice dimensions must be positive, got {dx}x{dy}x{dz}"
        )));
    }
    Ok(Lattice {
        dims: (dx as u32, dy as u32, dz as u32),
    })
}

impl Lattice {
    pub fn dimensionality(&self) -> u8 {
        if self.dims.2 == 1 {
            2
        } else {
            3
        }
    }

    pub fn size(&self) -> usize {
        (self.dims.0 * self.dims.1 * self.dims.2) as usize
    }

    pub fn contains(&self, s: &Site) -> bool {
        s.x >= 0
            && s.y >= 0
            && s.z >= 0
            && (s.x as u32) < self.dims.0
            && (s.y as u32) < self.dims.1
            && (s.z as u32) < self.dims.2
    }

    fn check(&self, s: &Site) -> Result<()> {
        if self.contains(s) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("site {s} outside lattice {:?}", self.dims)))
        }
    }

    /// All sites in x-major, then y, then z order.
    pub fn sites(&self) -> Vec<Site> {
        let mut out = Vec::with_capacity(self.size());
        for z in 0..self.dims.2 as i32 {
            for y in 0..self.dims.1 as i32 {
                for x in 0..self.dims.0 as i32 {
                    out.push(Site::new(x, y, z));
                }
            }
        }
        out
    }

    pub fn index(&self, s: &Site) -> usize {
        let (dx, dy, _) = self.dims;
        (s.z as usize * dy as usize + s.y as usize) * dx as usize + s.x as usize
    }

    pub fn neighbours(&self, s: &Site) -> Vec<Site> {
        s.neighbours().into_iter().filter(|n| self.contains(n)).collect()
    }

    pub fn edges(&self) -> Vec<(Site, Site)> {
        let mut out = Vec::new();
        for s in self.sites() {
            for d in [(1, 0, 0), (0, 1, 0), (0, 0, 1)] {
                let t = s.offset(d);
                if self.contains(&t) {
                    out.push((s, t));
                }
            }
        }
        out
    }

    pub fn adjacent(&self, a: &Site, b: &Site) -> Result<bool> {
        self.check(a)?;
        self.check(b)?;
        Ok(is_adjacent(a, b))
    }

    /// Axis-ordered shortest path: all x moves, then y, then z.
    pub fn shortest_path(&self, a: &Site, b: &Site) -> Result<Vec<Site>> {
        self.check(a)?;
        self.check(b)?;
        let mut path = vec![*a];
        let mut cur = *a;
        while cur.x != b.x {
            cur.x += (b.x - cur.x).signum();
            path.push(cur);
        }
        while cur.y != b.y {
            cur.y += (b.y - cur.y).signum();
            path.push(cur);
        }
        while cur.z != b.z {
            cur.z += (b.z - cur.z).signum();
            path.push(cur);
        }
        Ok(path)
    }
}
