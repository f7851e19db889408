//! Standard cells: vertex/role templates with sticks, and their placement.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::circuit_ir::Schedule;
use crate::lattice::{is_adjacent, Lattice, Site};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    Control,
    Target,
    Ancilla,
    AndResult,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TileVertex {
    pub name: String,
    pub pos: Site,
    pub role: Role,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tile {
    pub name: String,
    pub vertices: Vec<TileVertex>,
    /// Pairs of vertex names.
    pub sticks: Vec<(String, String)>,
}

impl Tile {
    fn build(name: &str, verts: &[(&str, (i32, i32, i32), Role)], sticks: Option<&[(&str, &str)]>) -> Tile {
        let vertices: Vec<TileVertex> = verts
            .iter()
            .map(|(n, p, r)| TileVertex {
                name: n.to_string(),
                pos: Site::new(p.0, p.1, p.2),
                role: *r,
            })
            .collect();
        let sticks = match sticks {
            Some(s) => s.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
            None => {
                let mut out = Vec::new();
                for (i, a) in vertices.iter().enumerate() {
                    for b in &vertices[i + 1..] {
                        if is_adjacent(&a.pos, &b.pos) {
                            out.push((a.name.clone(), b.name.clone()));
                        }
                    }
                }
                out
            }
        };
        let t = Tile {
            name: name.to_string(),
            vertices,
            sticks,
        };
        debug_assert!(t.is_well_formed());
        t
    }

    pub fn vertex(&self, name: &str) -> Option<&TileVertex> {
        self.vertices.iter().find(|v| v.name == name)
    }

    pub fn has_stick(&self, a: &str, b: &str) -> bool {
        self.sticks
            .iter()
            .any(|(x, y)| (x == a && y == b) || (x == b && y == a))
    }

    /// Every stick joins two listed vertices one lattice step apart.
    pub fn is_well_formed(&self) -> bool {
        self.sticks.iter().all(|(a, b)| match (self.vertex(a), self.vertex(b)) {
            (Some(x), Some(y)) => is_adjacent(&x.pos, &y.pos),
            _ => false,
        })
    }

    pub fn count_role(&self, r: Role) -> usize {
        self.vertices.iter().filter(|v| v.role == r).count()
    }

    pub fn is_planar(&self) -> bool {
        self.vertices.iter().all(|v| v.pos.z == 0)
    }
}

/// Seven corners of a unit cube; (1,1,1) is absent. Sticks are the nine cube edges
/// among the present corners, which carry every CNOT of the CCZ circuit.
pub fn toffoli_cube() -> Tile {
    use Role::*;
    Tile::build(
        "toffoli_cube",
        &[
            ("a", (1, 0, 0), Control),
            ("b", (0, 1, 0), Control),
            ("c", (0, 0, 1), Target),
            ("v", (0, 0, 0), Ancilla),
            ("ab", (1, 1, 0), Ancilla),
            ("ac", (1, 0, 1), Ancilla),
            ("bc", (0, 1, 1), Ancilla),
        ],
        None,
    )
}

/// Planar tile for the T-depth-2 Toffoli. v sits where the three sticks from the
/// data qubits cross; there is no stick between the two controls.
pub fn tdepth2_tile() -> Tile {
    use Role::*;
    Tile::build(
        "tdepth2_tile",
        &[
            ("a", (0, 1, 0), Control),
            ("b", (2, 1, 0), Control),
            ("c", (1, 2, 0), Target),
            ("v", (1, 1, 0), Ancilla),
            ("ac", (0, 2, 0), Ancilla),
            ("bc", (2, 2, 0), Ancilla),
        ],
        Some(&[
            ("a", "v"),
            ("b", "v"),
            ("c", "v"),
            ("a", "ac"),
            ("c", "ac"),
            ("b", "bc"),
            ("c", "bc"),
        ]),
    )
}

/// Planar tile for the AND plus measurement-based uncompute. w holds the AND,
/// v mediates the corrective CZ.
pub fn and_tile() -> Tile {
    use Role::*;
    Tile::build(
        "and_tile",
        &[
            ("a", (0, 1, 0), Control),
            ("b", (2, 1, 0), Control),
            ("w", (1, 2, 0), AndResult),
            ("t", (1, 3, 0), Target),
            ("v", (1, 1, 0), Ancilla),
            ("ac", (0, 2, 0), Ancilla),
            ("bc", (2, 2, 0), Ancilla),
        ],
        Some(&[
            ("a", "v"),
            ("b", "v"),
            ("w", "v"),
            ("a", "ac"),
            ("w", "ac"),
            ("b", "bc"),
            ("w", "bc"),
            ("w", "t"),
        ]),
    )
}

pub fn tile_by_name(name: &str) -> Option<Tile> {
    match name {
        "toffoli_cube" => Some(toffoli_cube()),
        "tdepth2_tile" => Some(tdepth2_tile()),
        "and_tile" => Some(and_tile()),
        _ => None,
    }
}

/// True iff every two-qubit gate acts along a stick and every three-qubit gate's
/// operands are pairwise joined by sticks.
pub fn tile_supports(tile: &Tile, schedule: &Schedule, assignment: &HashMap<String, String>) -> Result<bool> {
    for g in schedule.gates() {
        let mut vs = Vec::new();
        for o in &g.operands {
            let v = assignment
                .get(o)
                .ok_or_else(|| Error::InvalidArgument(format!("wire {o} has no tile vertex")))?;
            if tile.vertex(v).is_none() {
                return Err(Error::InvalidArgument(format!("{} has no vertex {v}", tile.name)));
            }
            vs.push(v.as_str());
        }
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                if !tile.has_stick(vs[i], vs[j]) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Identity assignment: wire names equal vertex names.
pub fn same_names(wires: &[&str]) -> HashMap<String, String> {
    wires.iter().map(|w| (w.to_string(), w.to_string())).collect()
}

/// The 24 proper rotations of the cube as signed axis permutations.
pub fn rotations() -> Vec<[[i32; 3]; 3]> {
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut out = Vec::new();
    for p in perms {
        for signs in 0..8 {
            let mut m = [[0; 3]; 3];
            for r in 0..3 {
                m[r][p[r]] = if signs >> r & 1 == 1 { -1 } else { 1 };
            }
            let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
            if det == 1 {
                out.push(m);
            }
        }
    }
    // identity first, then the in-plane quarter turns, so 2D orientations are 0..4
    out.sort_by_key(|m| {
        let planar = m[2][2] == 1;
        let ident = *m == [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
        (!ident, !planar, *m)
    });
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement {
    pub tile: String,
    pub offset: Site,
    pub orientation: u8,
}

impl Placement {
    /// Lattice sites of the tile's vertices, by vertex name. The rotated tile is
    /// shifted so its bounding box starts at the offset.
    pub fn sites(&self, tile: &Tile) -> Vec<(String, Site)> {
        let m = rotations()[self.orientation as usize];
        let rot: Vec<(String, Site)> = tile
            .vertices
            .iter()
            .map(|v| {
                let p = [v.pos.x, v.pos.y, v.pos.z];
                let q: Vec<i32> = (0..3).map(|r| (0..3).map(|c| m[r][c] * p[c]).sum()).collect();
                (v.name.clone(), Site::new(q[0], q[1], q[2]))
            })
            .collect();
        let min = |f: fn(&Site) -> i32| rot.iter().map(|(_, s)| f(s)).min().unwrap_or(0);
        let (mx, my, mz) = (min(|s| s.x), min(|s| s.y), min(|s| s.z));
        rot.into_iter()
            .map(|(n, s)| (n, Site::new(s.x - mx + self.offset.x, s.y - my + self.offset.y, s.z - mz + self.offset.z)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: usize,
    pub den: usize,
}

impl Ratio {
    pub fn value(&self) -> f64 {
        if self.den == 0 {
            0.0
        } else {
            self.num as f64 / self.den as f64
        }
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub lattice: Lattice,
    pub placements: Vec<Placement>,
    /// Named chains of sites, head first.
    pub queues: BTreeMap<String, Vec<Site>>,
    /// Sites outside every placement and queue that still hold routing ancillae.
    #[serde(default)]
    pub spares: Vec<Site>,
}

impl Layout {
    pub fn new(lattice: Lattice) -> Self {
        Layout {
            lattice,
            placements: Vec::new(),
            queues: BTreeMap::new(),
            spares: Vec::new(),
        }
    }

    pub fn placement_sites(&self) -> BTreeSet<Site> {
        let mut out = BTreeSet::new();
        for p in &self.placements {
            if let Some(t) = tile_by_name(&p.tile) {
                out.extend(p.sites(&t).into_iter().map(|(_, s)| s));
            }
        }
        out
    }

    pub fn queue_sites(&self) -> BTreeSet<Site> {
        self.queues.values().flatten().copied().collect()
    }

    pub fn used_sites(&self) -> BTreeSet<Site> {
        let mut s = self.placement_sites();
        s.extend(self.queue_sites());
        s.extend(self.spares.iter().copied());
        s
    }

    pub fn add_queue(&mut self, name: &str, chain: Vec<Site>) -> Result<()> {
        for w in chain.windows(2) {
            if !is_adjacent(&w[0], &w[1]) {
                return Err(Error::Placement(format!("queue {name} breaks between {} and {}", w[0], w[1])));
            }
        }
        let placed = self.placement_sites();
        let queued = self.queue_sites();
        for s in &chain {
            if !self.lattice.contains(s) {
                return Err(Error::Placement(format!("queue {name} leaves the lattice at {s}")));
            }
            if placed.contains(s) || queued.contains(s) {
                return Err(Error::Placement(format!("queue {name} overlaps at {s}")));
            }
        }
        self.queues.insert(name.to_string(), chain);
        Ok(())
    }

    pub fn usage_ratio(&self) -> Ratio {
        Ratio {
            num: self.used_sites().len(),
            den: self.lattice.size(),
        }
    }

    /// Share of the lattice holding control or target vertices.
    pub fn effectiveness_ratio(&self) -> Ratio {
        let mut s = BTreeSet::new();
        for p in &self.placements {
            if let Some(t) = tile_by_name(&p.tile) {
                for ((_, site), v) in p.sites(&t).into_iter().zip(&t.vertices) {
                    if matches!(v.role, Role::Control | Role::Target) {
                        s.insert(site);
                    }
                }
            }
        }
        Ratio {
            num: s.len(),
            den: self.lattice.size(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("layout serialises")
    }
}

/// Adds a placement. Placements may share vertices (stacked cubes share a face);
/// a duplicate of an existing placement or an overlap with a queue is rejected.
pub fn place(layout: &Layout, tile: &Tile, offset: Site, orientation: u8) -> Result<Layout> {
    let n_orient = if tile.is_planar() && layout.lattice.dimensionality() == 2 { 4 } else { 24 };
    if orientation as usize >= n_orient {
        return Err(Error::Placement(format!("orientation {orientation} out of range")));
    }
    let p = Placement {
        tile: tile.name.clone(),
        offset,
        orientation,
    };
    let sites = p.sites(tile);
    for (n, s) in &sites {
        if !layout.lattice.contains(s) {
            return Err(Error::Placement(format!("vertex {n} of {} lands outside at {s}", tile.name)));
        }
    }
    let mine: BTreeSet<Site> = sites.iter().map(|(_, s)| *s).collect();
    for q in &layout.placements {
        if let Some(t) = tile_by_name(&q.tile) {
            let theirs: BTreeSet<Site> = q.sites(&t).into_iter().map(|(_, s)| s).collect();
            if theirs == mine {
                return Err(Error::Placement(format!("duplicate placement at {offset}")));
            }
        }
    }
    if let Some(s) = mine.intersection(&layout.queue_sites()).next() {
        return Err(Error::Placement(format!("placement overlaps a queue at {s}")));
    }
    let mut out = layout.clone();
    out.placements.push(p);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiles_are_well_formed() {
        for t in [toffoli_cube(), tdepth2_tile(), and_tile()] {
            assert!(t.is_well_formed(), "{}", t.name);
        }
        assert_eq!(toffoli_cube().sticks.len(), 9);
    }

    #[test]
    fn rotations_are_24_and_start_planar() {
        let r = rotations();
        assert_eq!(r.len(), 24);
        assert_eq!(r[0], [[1, 0, 0], [0, 1, 0], [0, 0, 1]]);
        assert!(r[..4].iter().all(|m| m[2][2] == 1));
    }

    #[test]
    fn rotation_keeps_sticks_unit_length() {
        let t = toffoli_cube();
        for o in 0..24 {
            let p = Placement { tile: t.name.clone(), offset: Site::new(0, 0, 0), orientation: o };
            let m: HashMap<String, Site> = p.sites(&t).into_iter().collect();
            for (a, b) in &t.sticks {
                assert!(is_adjacent(&m[a], &m[b]));
            }
        }
    }
}
