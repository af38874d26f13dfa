//! Parsing of the matrix, direction and range arguments.

use std::fs;
use std::str::FromStr;

use matfrechet::engine::DirectionSet;
use matfrechet::gallery::{generate, random_directions, DirectionKind, GalleryMatrix, GalleryParams};
use matfrechet::mtx::read_mtx;
use matfrechet::{Complex64, ComplexMatrix, Error, Result};

fn bad(msg: impl Into<String>) -> Error {
    Error::BadParams(msg.into())
}

/// `gallery:<name>:<n>[:<param>]` or a Matrix Market path. The optional
/// parameter is ρ for kms and λ for jordbloc.
pub fn parse_matrix(spec: &str) -> Result<ComplexMatrix> {
    let Some(rest) = spec.strip_prefix("gallery:") else {
        return read_mtx(spec);
    };
    let parts: Vec<&str> = rest.split(':').collect();
    if !(2..=3).contains(&parts.len()) {
        return Err(bad(format!("expected gallery:<name>:<n>[:<param>], got `{spec}`")));
    }
    let name = GalleryMatrix::from_str(parts[0])?;
    let n: usize = parts[1].parse().map_err(|_| bad(format!("bad size `{}`", parts[1])))?;
    let mut params = GalleryParams::default();
    if let Some(p) = parts.get(2) {
        let x: f64 = p.parse().map_err(|_| bad(format!("bad gallery parameter `{p}`")))?;
        match name {
            GalleryMatrix::Kms => params.rho = x,
            GalleryMatrix::Jordbloc => params.lambda = x,
            _ => return Err(bad(format!("gallery matrix `{}` takes no parameter", name.name()))),
        }
    }
    generate(name, n, params)
}

/// `random:<dense|unit-pairs>:<seed>` (needs `k`), a JSON file holding a
/// serialized direction set, or a comma-separated list of Matrix Market files.
pub fn parse_dirs(spec: &str, n: usize, k: Option<usize>) -> Result<DirectionSet> {
    let dirs = if let Some(rest) = spec.strip_prefix("random:") {
        let (kind, seed) = rest
            .split_once(':')
            .ok_or_else(|| bad(format!("expected random:<kind>:<seed>, got `{spec}`")))?;
        let kind = DirectionKind::from_str(kind)?;
        let seed: u64 = seed.parse().map_err(|_| bad(format!("bad seed `{seed}`")))?;
        let k = k.ok_or_else(|| bad("--k is required with random directions"))?;
        random_directions(kind, n, k, seed)
    } else if spec.ends_with(".json") {
        let text = fs::read_to_string(spec)?;
        serde_json::from_str(&text).map_err(|e| bad(format!("{spec}: {e}")))?
    } else {
        DirectionSet::Dense(spec.split(',').map(read_mtx).collect::<Result<_>>()?)
    };
    if let Some(k) = k {
        if k != dirs.k() {
            return Err(bad(format!("--k {k} disagrees with {} directions in `{spec}`", dirs.k())));
        }
    }
    dirs.validate(n)?;
    Ok(dirs)
}

/// `x` or `x,y` for `x + iy`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad(format!("bad number `{t}`")));
    match s.split_once(',') {
        Some((re, im)) => Ok(Complex64::new(num(re)?, num(im)?)),
        None => Ok(Complex64::new(num(s)?, 0.0)),
    }
}

/// `a:b` or `a:b:step`, inclusive.
pub fn parse_range(s: &str) -> Result<Vec<usize>> {
    let parts: Vec<usize> = s
        .split(':')
        .map(|t| t.parse().map_err(|_| bad(format!("bad range bound `{t}`"))))
        .collect::<Result<_>>()?;
    let (lo, hi, step) = match *parts.as_slice() {
        [one] => (one, one, 1),
        [a, b] => (a, b, 1),
        [a, b, c] => (a, b, c),
        _ => return Err(bad(format!("expected a:b[:step], got `{s}`"))),
    };
    if step == 0 || lo > hi {
        return Err(bad(format!("empty range `{s}`")));
    }
    Ok((lo..=hi).step_by(step).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use matfrechet::mtx::{write_mtx, MtxFormat};

    #[test]
    fn gallery_specs() {
        let a = parse_matrix("gallery:kms:2:0.25").unwrap();
        assert_eq!(a[(0, 1)].re, 0.25);
        let j = parse_matrix("gallery:jordbloc:2:3").unwrap();
        assert_eq!(j[(0, 0)].re, 3.0);
        assert!(parse_matrix("gallery:lesp").is_err());
        assert!(parse_matrix("gallery:minij:3:1").is_err());
        assert!(matches!(parse_matrix("/nonexistent/a.mtx"), Err(Error::Io(_))));
    }

    #[test]
    fn direction_specs() {
        let d = parse_dirs("random:unit-pairs:3", 4, Some(2)).unwrap();
        assert!(d.is_rank_one() && d.k() == 2);
        assert!(parse_dirs("random:dense:3", 4, None).is_err());
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.mtx");
        write_mtx(&p, &ComplexMatrix::identity(3), MtxFormat::Array).unwrap();
        let s = format!("{0},{0}", p.display());
        assert_eq!(parse_dirs(&s, 3, None).unwrap().k(), 2);
        assert!(parse_dirs(&s, 3, Some(1)).is_err());
        let j = dir.path().join("d.json");
        fs::write(&j, serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(parse_dirs(j.to_str().unwrap(), 4, None).unwrap(), d);
    }

    #[test]
    fn numbers_and_ranges() {
        assert_eq!(parse_complex("-1").unwrap(), Complex64::new(-1.0, 0.0));
        assert_eq!(parse_complex("0.5, 2").unwrap(), Complex64::new(0.5, 2.0));
        assert_eq!(parse_range("4:12:4").unwrap(), vec![4, 8, 12]);
        assert_eq!(parse_range("3").unwrap(), vec![3]);
        assert!(parse_range("5:1").is_err());
    }
}
