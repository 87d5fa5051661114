//! `.vox` solids: a 72-byte little-endian header followed by the occupancy bitset.
//!
//! | offset | type     | field                                        |
//! |--------|----------|----------------------------------------------|
//! | 0      | [u8; 4]  | magic `VOX3`                                 |
//! | 4      | u32      | format version (1)                           |
//! | 8      | u32      | geometry: 0 cylindrical, 1 Cartesian         |
//! | 12     | u32 × 3  | dims                                         |
//! | 24     | f64 × 3  | origin                                       |
//! | 48     | f64 × 3  | cell sizes                                   |
//! | 72     | bytes    | cells in storage order, bit `k % 8` of byte `k / 8` |

use std::io::{self, Read, Write};

use vortex_core::{Geometry, VoxelSolid};

pub const MAGIC: [u8; 4] = *b"VOX3";
pub const VERSION: u32 = 1;
const MAX_CELLS: usize = 1 << 32;

fn invalid(msg: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.into())
}

pub fn write_vox(solid: &VoxelSolid, mut w: impl Write) -> io::Result<()> {
    let mut buf = Vec::with_capacity(72 + solid.len().div_ceil(8));
    buf.extend_from_slice(&MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    let tag: u32 = match solid.geometry() {
        Geometry::Cylindrical => 0,
        Geometry::Cartesian => 1,
    };
    buf.extend_from_slice(&tag.to_le_bytes());
    for d in solid.dims() {
        let d = u32::try_from(d).map_err(|_| invalid("dimension exceeds u32"))?;
        buf.extend_from_slice(&d.to_le_bytes());
    }
    for x in solid.origin().iter().chain(&solid.cell()) {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    let mut bits = vec![0u8; solid.len().div_ceil(8)];
    for (k, _) in solid.occupancy().iter().enumerate().filter(|(_, &b)| b) {
        bits[k / 8] |= 1 << (k % 8);
    }
    buf.extend_from_slice(&bits);
    w.write_all(&buf)
}

pub fn read_vox(mut r: impl Read) -> io::Result<VoxelSolid> {
    let mut head = [0u8; 72];
    r.read_exact(&mut head)?;
    if head[0..4] != MAGIC {
        return Err(invalid("not a .vox solid (bad magic)"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(head[o..o + 4].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(head[o..o + 8].try_into().unwrap());
    if u32_at(4) != VERSION {
        return Err(invalid(format!("unsupported version {}", u32_at(4))));
    }
    let geometry = match u32_at(8) {
        0 => Geometry::Cylindrical,
        1 => Geometry::Cartesian,
        t => return Err(invalid(format!("unknown geometry tag {t}"))),
    };
    let dims = [u32_at(12) as usize, u32_at(16) as usize, u32_at(20) as usize];
    let n = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d)).filter(|&n| n <= MAX_CELLS);
    let n = n.ok_or_else(|| invalid(format!("too many cells: {dims:?}")))?;
    let origin = [f64_at(24), f64_at(32), f64_at(40)];
    let cell = [f64_at(48), f64_at(56), f64_at(64)];
    let mut solid = VoxelSolid::empty(geometry, dims, origin, cell).map_err(|e| invalid(e.to_string()))?;
    let mut bits = vec![0u8; n.div_ceil(8)];
    r.read_exact(&mut bits)?;
    for (k, v) in solid.occupancy_mut().iter_mut().enumerate() {
        *v = bits[k / 8] >> (k % 8) & 1 == 1;
    }
    if n % 8 != 0 && bits[n / 8] >> (n % 8) != 0 {
        return Err(invalid("padding bits are not zero"));
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(invalid("trailing bytes after the bitset"));
    }
    Ok(solid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_byte_exact() {
        let s = VoxelSolid::cylinder(0.7, [5, 6, 7]).unwrap().with_cells(|p| p[1] * p[2].cos() > 0.2 || p[0] > 0.3);
        let mut a = Vec::new();
        write_vox(&s, &mut a).unwrap();
        assert_eq!(a.len(), 72 + (5 * 6 * 7usize).div_ceil(8));
        let back = read_vox(a.as_slice()).unwrap();
        assert_eq!(back, s);
        let mut b = Vec::new();
        write_vox(&back, &mut b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bit_order_is_lsb_first() {
        let mut s = VoxelSolid::cartesian([0.0; 3], [1.0; 3], [1, 1, 10]).unwrap();
        s.set(0, 0, 1, true);
        s.set(0, 0, 9, true);
        let mut a = Vec::new();
        write_vox(&s, &mut a).unwrap();
        assert_eq!(&a[72..], &[0b10, 0b10]);
    }

    #[test]
    fn rejects_corrupt_input() {
        let s = VoxelSolid::cartesian([0.0; 3], [1.0; 3], [1, 1, 3]).unwrap();
        let mut a = Vec::new();
        write_vox(&s, &mut a).unwrap();
        let mut bad = a.clone();
        bad[0] = b'X';
        assert!(read_vox(bad.as_slice()).is_err());
        let mut bad = a.clone();
        bad[72] = 0b1000;
        assert!(read_vox(bad.as_slice()).is_err());
        let mut bad = a.clone();
        bad.push(0);
        assert!(read_vox(bad.as_slice()).is_err());
        assert!(read_vox(&a[..70]).is_err());
    }
}
