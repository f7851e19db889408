//! The tiled multiplier layout: a tower of face-sharing Toffoli cubes with four
//! queues on a 2 x 3 x H lattice. Also the initial register mapping.
//!
//! Tower coordinates are a ring index around the 2 x 2 footprint (0 = N, 1 = E,
//! 2 = S, 3 = W, clockwise seen from +z) and a level counted from the top
//! cube downwards. Cube k spans levels k and k+1, level `n` sits at z = 0 and
//! the storage queues live above level 0.

use std::collections::{BTreeSet, HashSet};

use crate::cells::{place, toffoli_cube, Layout, Placement, Ratio};
use crate::circuit_ir::Mapping;
use crate::lattice::{grid, Site};
use crate::{Error, Result};

pub const YELLOW: &str = "yellow";
pub const HOLDING: &str = "p_holding";
pub const B_STORAGE: &str = "b_storage";
pub const P_STORAGE: &str = "p_storage";

const RING: [(i32, i32); 4] = [(1, 1), (1, 0), (0, 0), (0, 1)];

pub fn a(i: usize) -> String {
    format!("A{i}")
}
pub fn b(i: usize) -> String {
    format!("B{i}")
}
pub fn p(i: usize) -> String {
    format!("P{i}")
}
pub const Z: &str = "Z";

pub fn tower_height(n: usize) -> usize {
    n + 1 + n.div_ceil(4) + n / 2
}

pub fn qubit_count(n: i64) -> Result<usize> {
    if n < 1 {
        return Err(Error::InvalidArgument(format!("operand width must be at least 1, got {n}")));
    }
    Ok(2 * 3 * tower_height(n as usize))
}

/// Ring/level coordinates of the tower for operand width n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tower {
    pub n: usize,
}

impl Tower {
    pub fn site(&self, ring: i32, level: i32) -> Site {
        let (x, y) = RING[ring.rem_euclid(4) as usize];
        Site::new(x, y, self.n as i32 - level)
    }

    /// Inverse of `site` for tower and storage sites; None for the queue column.
    pub fn coords(&self, s: &Site) -> Option<(i32, i32)> {
        let r = RING.iter().position(|&(x, y)| x == s.x && y == s.y)?;
        Some((r as i32, self.n as i32 - s.z))
    }

    pub fn in_tower(&self, s: &Site) -> bool {
        s.y < 2 && s.z >= 0 && s.z <= self.n as i32
    }

    /// Index of the cube whose box holds all the given sites.
    pub fn cube_of(&self, sites: &[Site]) -> Option<usize> {
        if !sites.iter().all(|s| self.in_tower(s)) {
            return None;
        }
        let lo = sites.iter().map(|s| s.z).min()?;
        let hi = sites.iter().map(|s| s.z).max()?;
        if hi - lo > 1 || lo + 1 > self.n as i32 {
            return None;
        }
        Some(self.n - 1 - lo as usize)
    }

    pub fn cube_box(&self, k: usize) -> Vec<Site> {
        let lo = (self.n - 1 - k) as i32;
        let mut out = Vec::new();
        for z in [lo, lo + 1] {
            for &(x, y) in &RING {
                out.push(Site::new(x, y, z));
            }
        }
        out
    }

    /// Storage entries sit above the top level, over the shared control's corner
    /// and the next one clockwise.
    pub fn b_entry(&self) -> Site {
        self.site(self.n as i32 + 1, -1)
    }

    pub fn p_entry(&self) -> Site {
        self.site(self.n as i32 + 2, -1)
    }
}

/// Chain from `start` through free storage sites, preferring to climb.
fn storage_chain(start: Site, len: usize, n: usize, h: usize, taken: &HashSet<Site>) -> Option<Vec<Site>> {
    fn dfs(path: &mut Vec<Site>, len: usize, n: usize, h: usize, taken: &HashSet<Site>) -> bool {
        if path.len() == len {
            return true;
        }
        let cur = *path.last().unwrap();
        let moves = [(0, 0, 1), (0, 1, 0), (1, 0, 0), (-1, 0, 0), (0, -1, 0), (0, 0, -1)];
        for d in moves {
            let s = cur.offset(d);
            let inside = s.x >= 0 && s.x < 2 && s.y >= 0 && s.y < 3 && s.z > n as i32 && s.z < h as i32;
            if inside && !taken.contains(&s) && !path.contains(&s) {
                path.push(s);
                if dfs(path, len, n, h, taken) {
                    return true;
                }
                path.pop();
            }
        }
        false
    }
    if len == 0 {
        return Some(Vec::new());
    }
    if taken.contains(&start) {
        return None;
    }
    let mut path = vec![start];
    dfs(&mut path, len, n, h, taken).then_some(path)
}

/// Orientation of the cube tile putting its controls on `c1`/`c2` and target on `t`.
pub fn cube_orientation(offset: Site, c1: Site, c2: Site, t: Site) -> Option<u8> {
    let tile = toffoli_cube();
    (0..24u8).find(|&o| {
        let p = Placement {
            tile: tile.name.clone(),
            offset,
            orientation: o,
        };
        let sites = p.sites(&tile);
        let at = |n: &str| sites.iter().find(|(m, _)| m == n).map(|(_, s)| *s);
        let (sa, sb, sc) = (at("a").unwrap(), at("b").unwrap(), at("c").unwrap());
        sc == t && ((sa == c1 && sb == c2) || (sa == c2 && sb == c1))
    })
}

pub fn build_multiplier_layout(n: i64) -> Result<Layout> {
    let h = qubit_count(n)? / 6;
    let n = n as usize;
    let tw = Tower { n };
    let mut layout = Layout::new(grid(2, 3, h as i64)?);
    for k in 0..n {
        let offset = Site::new(0, 0, (n - 1 - k) as i32);
        let (ctrl, ak, pk) = initial_cube_sites(&tw, k);
        let o = cube_orientation(offset, ctrl, ak, pk)
            .ok_or_else(|| Error::Placement(format!("no cube orientation for cube {k}")))?;
        layout = place(&layout, &toffoli_cube(), offset, o)?;
    }
    // the top cube's absent corner is still walked through by the schedule
    let placed = layout.placement_sites();
    layout.spares = (0..=n)
        .flat_map(|lv| (0..4).map(move |r| (r, lv)))
        .map(|(r, lv)| tw.site(r, lv as i32))
        .filter(|s| !placed.contains(s))
        .collect();
    layout.add_queue(YELLOW, (0..n as i32).map(|z| Site::new(0, 2, z)).collect())?;
    layout.add_queue(HOLDING, (0..n as i32).map(|z| Site::new(1, 2, z)).collect())?;
    let mut taken: HashSet<Site> = layout.used_sites().into_iter().collect();
    let b_chain = storage_chain(tw.b_entry(), n.saturating_sub(2), n, h, &taken)
        .ok_or_else(|| Error::Placement("no room for the B storage chain".into()))?;
    taken.extend(b_chain.iter().copied());
    let p_chain = storage_chain(tw.p_entry(), n - 1, n, h, &taken)
        .ok_or_else(|| Error::Placement("no room for the P storage chain".into()))?;
    if !b_chain.is_empty() {
        layout.add_queue(B_STORAGE, b_chain)?;
    }
    if !p_chain.is_empty() {
        layout.add_queue(P_STORAGE, p_chain)?;
    }
    Ok(layout)
}

/// Shared control, A_k and P_k sites for the Toffoli of cube k before any SWAP.
fn initial_cube_sites(tw: &Tower, k: usize) -> (Site, Site, Site) {
    let (n, k) = (tw.n as i32, k as i32);
    (
        tw.site(n + 1 - k, k),
        tw.site(n - k, k + 1),
        tw.site(n + 2 - k, k + 1),
    )
}

/// Operand width recovered from the lattice height.
pub fn width_of(layout: &Layout) -> Result<usize> {
    let h = layout.lattice.dims.2 as usize;
    (1..=h)
        .find(|&n| tower_height(n) == h && layout.placements.len() == n)
        .ok_or_else(|| Error::InvalidArgument("layout is not a multiplier tower".into()))
}

/// A_k and P_k on cube k's control and target corners with B_0 the shared control
/// at the top; Z ahead of B_1..B_{n-1} in the yellow queue; P_n.. in holding.
/// Every other used site holds a numbered ancilla.
pub fn initial_mapping(layout: &Layout, n: usize) -> Result<Mapping> {
    if width_of(layout)? != n {
        return Err(Error::InvalidArgument(format!("layout is not built for n = {n}")));
    }
    let tw = Tower { n };
    let mut m = Mapping::new();
    for k in 0..n {
        let (_, ak, pk) = initial_cube_sites(&tw, k);
        m.insert(&a(k), ak)?;
        m.insert(&p(k), pk)?;
    }
    m.insert(&b(0), tw.site(n as i32 + 1, 0))?;
    let yellow = &layout.queues[YELLOW];
    m.insert(Z, yellow[0])?;
    for (j, s) in yellow.iter().enumerate().take(n).skip(1) {
        m.insert(&b(j), *s)?;
    }
    for (i, s) in layout.queues[HOLDING].iter().enumerate() {
        m.insert(&p(n + i), *s)?;
    }
    let mut k = 0;
    for s in layout.used_sites() {
        if m.label(&s).is_none() {
            m.insert(&format!("anc{k}"), s)?;
            k += 1;
        }
    }
    Ok(m)
}

pub fn is_ancilla(label: &str) -> bool {
    label.starts_with("anc")
}

pub fn usage_ratio(layout: &Layout) -> Ratio {
    layout.usage_ratio()
}

/// Sites of all four queues; SWAPs with both ends here are storage moves.
pub fn storage_sites(layout: &Layout) -> BTreeSet<Site> {
    layout.queue_sites()
}
