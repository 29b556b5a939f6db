//! Plain-text surface files: header `n N`, then N + 1 lines `theta r`
//! with 17 significant digits, which round-trips f64 bit-exactly.

use super::AxisymmetricHypersurface;
use crate::error::{Error, Result};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

pub fn write_surface_to(surface: &AxisymmetricHypersurface, w: &mut impl Write) -> Result<()> {
    writeln!(w, "{} {}", surface.n(), surface.intervals())?;
    for (t, r) in surface.theta().iter().zip(surface.r()) {
        writeln!(w, "{t:.16e} {r:.16e}")?;
    }
    Ok(())
}

pub fn write_surface(surface: &AxisymmetricHypersurface, path: impl AsRef<Path>) -> Result<()> {
    let mut buf = Vec::new();
    write_surface_to(surface, &mut buf)?;
    std::fs::write(path, buf)?;
    Ok(())
}

pub fn read_surface_from(r: impl Read) -> Result<AxisymmetricHypersurface> {
    let reader = BufReader::new(r);
    let mut lines = reader.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Format("empty surface file".into()))?;
    let header = header?;
    let mut parts = header.split_whitespace();
    let n: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Format("header must start with the ambient dimension".into()))?;
    let nodes: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Format("header must carry the interval count".into()))?;
    if parts.next().is_some() {
        return Err(Error::Format("header must be exactly `n N`".into()));
    }
    let mut theta = Vec::with_capacity(nodes + 1);
    let mut radius = Vec::with_capacity(nodes + 1);
    for (lineno, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let t: f64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Format(format!("line {}: bad theta", lineno + 1)))?;
        let r: f64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Format(format!("line {}: bad radius", lineno + 1)))?;
        if parts.next().is_some() {
            return Err(Error::Format(format!(
                "line {}: expected exactly `theta r`",
                lineno + 1
            )));
        }
        theta.push(t);
        radius.push(r);
    }
    if theta.len() != nodes + 1 {
        return Err(Error::Format(format!(
            "expected {} nodes, found {}",
            nodes + 1,
            theta.len()
        )));
    }
    AxisymmetricHypersurface::new(n, theta, radius)
}

pub fn read_surface(path: impl AsRef<Path>) -> Result<AxisymmetricHypersurface> {
    read_surface_from(std::fs::File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let s = AxisymmetricHypersurface::cos_perturbed(6, 2.0, 0.1, 2, 64).unwrap();
        let mut buf = Vec::new();
        write_surface_to(&s, &mut buf).unwrap();
        let back = read_surface_from(buf.as_slice()).unwrap();
        assert_eq!(s, back);
        // and a second trip produces identical bytes
        let mut buf2 = Vec::new();
        write_surface_to(&back, &mut buf2).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(read_surface_from("".as_bytes()).is_err());
        assert!(read_surface_from("6".as_bytes()).is_err());
        assert!(read_surface_from("6 2\n0 1\n1.5 1\n3.14 1\n".as_bytes()).is_err());
        // non-positive radius
        let s = AxisymmetricHypersurface::sphere(6, 1.0, 64).unwrap();
        let mut buf = Vec::new();
        write_surface_to(&s, &mut buf).unwrap();
        let bad = String::from_utf8(buf).unwrap().replace("1.0000000000000000e0", "-1.0");
        assert!(read_surface_from(bad.as_bytes()).is_err());
    }
}
