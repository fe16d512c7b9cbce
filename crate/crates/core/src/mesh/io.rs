//! Plain-text mesh files.
//!
//! ```text
//! mesh2d 1
//! <nv> <nc> <nt>
//! x y            (nv lines)
//! i j k [region] (nc lines)
//! i j tag        (nt lines)
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{Mesh2D, Point};
use crate::error::{Error, Result};

pub fn write_mesh(mesh: &Mesh2D, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_mesh(mesh))?;
    Ok(())
}

pub fn format_mesh(mesh: &Mesh2D) -> String {
    let mut out = String::new();
    out.push_str("mesh2d 1\n");
    let _ = writeln!(
        out,
        "{} {} {}",
        mesh.num_vertices(),
        mesh.num_cells(),
        mesh.facet_tags().len()
    );
    // `Display` for f64 is the shortest representation that round-trips
    for p in mesh.vertices() {
        let _ = writeln!(out, "{} {}", p[0], p[1]);
    }
    for (c, [i, j, k]) in mesh.cells().iter().enumerate() {
        match mesh.region(c) {
            Some(r) => {
                let _ = writeln!(out, "{i} {j} {k} {r}");
            }
            None => {
                let _ = writeln!(out, "{i} {j} {k}");
            }
        }
    }
    for ([a, b], tag) in mesh.facet_tags() {
        let _ = writeln!(out, "{a} {b} {tag}");
    }
    out
}

pub fn read_mesh(path: impl AsRef<Path>) -> Result<Mesh2D> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_mesh(&text).map_err(|e| match e {
        ParseError::At(line, message) => Error::MeshFormat {
            path: path.to_path_buf(),
            line,
            message,
        },
        ParseError::Mesh(e) => e,
    })
}

enum ParseError {
    At(usize, String),
    Mesh(Error),
}

fn parse_mesh(text: &str) -> std::result::Result<Mesh2D, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| ParseError::At(0, format!("unexpected end of file while reading {what}")))
    };

    let (n, header) = next("header")?;
    if header.split_whitespace().collect::<Vec<_>>() != ["mesh2d", "1"] {
        return Err(ParseError::At(n, format!("expected `mesh2d 1`, found `{header}`")));
    }
    let (n, counts) = next("counts")?;
    let counts: Vec<usize> = parse_fields(n, counts, 3, 3)?;
    let [nv, nc, nt] = [counts[0], counts[1], counts[2]];

    let mut vertices: Vec<Point> = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (n, line) = next("vertices")?;
        let xy: Vec<f64> = parse_fields(n, line, 2, 2)?;
        vertices.push([xy[0], xy[1]]);
    }

    let mut cells = Vec::with_capacity(nc);
    let mut regions = Vec::with_capacity(nc);
    for _ in 0..nc {
        let (n, line) = next("cells")?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(3..=4).contains(&fields.len()) {
            return Err(ParseError::At(n, format!("expected `i j k [region]`, found `{line}`")));
        }
        let mut cell = [0usize; 3];
        for k in 0..3 {
            cell[k] = parse_index(n, fields[k], nv)?;
        }
        cells.push(cell);
        regions.push(fields.get(3).map(|s| s.to_string()));
    }

    let mut tags = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (n, line) = next("tags")?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(ParseError::At(n, format!("expected `i j tag`, found `{line}`")));
        }
        let a = parse_index(n, fields[0], nv)?;
        let b = parse_index(n, fields[1], nv)?;
        tags.push((a, b, fields[2].to_string()));
    }

    let regions = regions.iter().any(Option::is_some).then_some(regions);
    Mesh2D::from_parts(vertices, cells, regions, tags).map_err(ParseError::Mesh)
}

fn parse_fields<T: std::str::FromStr>(
    n: usize,
    line: &str,
    min: usize,
    max: usize,
) -> std::result::Result<Vec<T>, ParseError> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() < min || fields.len() > max {
        return Err(ParseError::At(n, format!("expected {min} fields, found `{line}`")));
    }
    fields
        .iter()
        .map(|f| f.parse().map_err(|_| ParseError::At(n, format!("cannot parse `{f}`"))))
        .collect()
}

fn parse_index(n: usize, field: &str, nv: usize) -> std::result::Result<usize, ParseError> {
    let v: usize = field
        .parse()
        .map_err(|_| ParseError::At(n, format!("cannot parse vertex index `{field}`")))?;
    if v >= nv {
        return Err(ParseError::At(
            n,
            format!("vertex index {v} out of range ({nv} vertices)"),
        ));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_crossed, Rect, TagRule};

    #[test]
    fn round_trip_is_exact() {
        let mesh = generate_crossed(3, 3, Rect::new(0.0, 1.0, 0.0, 1.0 / 3.0))
            .unwrap()
            .tag_boundary(&[TagRule::new("gamma", |p| p[0] < 1e-12), TagRule::otherwise("wall")])
            .unwrap()
            .with_regions(|c| (c[0] < 0.5).then(|| "left".to_string()));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.mesh");
        write_mesh(&mesh, &path).unwrap();
        let back = read_mesh(&path).unwrap();
        assert_eq!(back.vertices(), mesh.vertices());
        assert_eq!(back.cells(), mesh.cells());
        assert_eq!(back.facet_tags(), mesh.facet_tags());
        assert_eq!(back.regions(), mesh.regions());
    }

    #[test]
    fn out_of_range_index_is_reported_with_line() {
        let text = "mesh2d 1\n5 1 0\n0 0\n1 0\n0 1\n1 1\n0.5 0.5\n0 1 99\n";
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.mesh");
        std::fs::write(&path, text).unwrap();
        match read_mesh(&path).unwrap_err() {
            Error::MeshFormat { line, message, .. } => {
                assert_eq!(line, 8);
                assert!(message.contains("99"), "{message}");
            }
            e => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn bad_header_and_negative_area() {
        assert!(matches!(parse_mesh("mesh3d 1\n0 0 0\n"), Err(ParseError::At(1, _))));
        let clockwise = "mesh2d 1\n3 1 3\n0 0\n1 0\n0 1\n0 2 1\n0 1 a\n1 2 a\n2 0 a\n";
        assert!(matches!(parse_mesh(clockwise), Err(ParseError::Mesh(Error::InvalidMesh(_)))));
    }

    #[test]
    fn untagged_boundary_edge_rejected() {
        let text = "mesh2d 1\n3 1 2\n0 0\n1 0\n0 1\n0 1 2\n0 1 a\n1 2 a\n";
        assert!(matches!(
            parse_mesh(text),
            Err(ParseError::Mesh(Error::UncoveredBoundaryEdge(0, 2)))
        ));
    }
}
