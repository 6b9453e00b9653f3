//! Wavefront OBJ reading and writing.
//!
//! Only `v` and `f` records are honored. Normals, texture coordinates,
//! groups and materials are skipped on read and never written.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::Vector3;

use super::Mesh;
use crate::error::{Error, Result};

pub fn load_obj(path: impl AsRef<Path>) -> Result<Mesh> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_obj(&text, name)
}

/// Parses OBJ text. Face indices are converted from 1-based to 0-based;
/// negative (relative) indices are resolved against the vertices seen so far.
pub fn parse_obj(text: &str, name: impl Into<String>) -> Result<Mesh> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        let mut tokens = content.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let coords: Vec<&str> = tokens.collect();
                // x y z with an optional homogeneous w
                if coords.len() != 3 && coords.len() != 4 {
                    return Err(malformed(line, "vertex needs 3 coordinates"));
                }
                let mut p = [0.0; 3];
                for (slot, tok) in p.iter_mut().zip(&coords) {
                    *slot = tok
                        .parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| malformed(line, &format!("bad coordinate {tok:?}")))?;
                }
                vertices.push(Vector3::from(p));
            }
            Some("f") => {
                let refs: Vec<&str> = tokens.collect();
                if refs.len() < 3 {
                    return Err(malformed(line, "face needs 3 vertex references"));
                }
                if refs.len() > 3 {
                    return Err(Error::NonTriangleFace {
                        line,
                        arity: refs.len(),
                    });
                }
                let mut face = [0usize; 3];
                for (slot, r) in face.iter_mut().zip(&refs) {
                    *slot = resolve_index(r, vertices.len())
                        .ok_or_else(|| malformed(line, &format!("bad vertex reference {r:?}")))?;
                }
                faces.push(face);
            }
            _ => {}
        }
    }

    // Forward references are legal in OBJ, so the range check happens last.
    let len = vertices.len();
    if let Some(face) = faces.iter().position(|f| f.iter().any(|&v| v >= len)) {
        return Err(Error::MalformedLine {
            line: 0,
            reason: format!("face {face} references a vertex past the end ({len} vertices)"),
        });
    }
    Mesh::new(name, vertices, faces)
}

fn resolve_index(token: &str, seen: usize) -> Option<usize> {
    let index: i64 = token.split('/').next()?.parse().ok()?;
    match index {
        0 => None,
        i if i > 0 => Some(i as usize - 1),
        i => seen.checked_sub(i.unsigned_abs() as usize),
    }
}

fn malformed(line: usize, reason: &str) -> Error {
    Error::MalformedLine {
        line,
        reason: reason.to_string(),
    }
}

/// Serializes a mesh as OBJ text. Coordinates use the shortest decimal
/// representation that parses back to the same `f64`.
pub fn format_obj(mesh: &Mesh) -> String {
    let mut out = String::with_capacity(32 * (mesh.vertices.len() + mesh.faces.len()) + 32);
    if !mesh.name.is_empty() {
        let _ = writeln!(out, "o {}", mesh.name);
    }
    for p in &mesh.vertices {
        let _ = writeln!(out, "v {} {} {}", p.x, p.y, p.z);
    }
    for [a, b, c] in &mesh.faces {
        let _ = writeln!(out, "f {} {} {}", a + 1, b + 1, c + 1);
    }
    out
}

pub fn save_obj(mesh: &Mesh, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::Io {
            path: dir.to_path_buf(),
            source: e,
        })?;
    }
    fs::write(path, format_obj(mesh)).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_single_triangle_zero_based() {
        let mesh = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n", "t").unwrap();
        assert_eq!(mesh.vertices.len(), 3);
        assert_eq!(mesh.faces, vec![[0, 1, 2]]);
    }

    #[test]
    fn normals_and_texcoords_are_ignored() {
        let plain = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n", "t").unwrap();
        let decorated = parse_obj(
            "# comment\nv 0 0 0\nvn 0 0 1\nv 1 0 0\nvt 0.5 0.5\nv 0 1 0\ns off\nf 1/1/1 2/1/1 3//1\n",
            "t",
        )
        .unwrap();
        assert_eq!(plain, decorated);
    }

    #[test]
    fn two_vertex_face_is_malformed() {
        let err = parse_obj("v 0 0 0\nv 1 0 0\nf 1 2\n", "t").unwrap_err();
        assert!(matches!(err, Error::MalformedLine { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn quad_is_rejected() {
        let err = parse_obj("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n", "q").unwrap_err();
        assert!(matches!(err, Error::NonTriangleFace { line: 5, arity: 4 }));
    }

    #[test]
    fn bad_coordinate_is_malformed() {
        let err = parse_obj("v 0 zero 0\n", "t").unwrap_err();
        assert!(matches!(err, Error::MalformedLine { line: 1, .. }));
        let err = parse_obj("v 0 inf 0\n", "t").unwrap_err();
        assert!(matches!(err, Error::MalformedLine { line: 1, .. }));
    }

    #[test]
    fn negative_indices_are_relative() {
        let mesh = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\n", "t").unwrap();
        assert_eq!(mesh.faces, vec![[0, 1, 2]]);
    }

    #[test]
    fn missing_file_is_file_not_found() {
        let err = load_obj("/definitely/not/here.obj").unwrap_err();
        assert!(matches!(err, Error::FileNotFound(_)));
    }

    #[test]
    fn writes_v_and_f_lines() {
        let mesh = crate::mesh::tests::unit_triangle();
        let text = format_obj(&mesh);
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 3);
        assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 1);
    }

    #[test]
    fn creates_missing_directories() {
        let mesh = crate::mesh::tests::unit_triangle();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("missing/dir/out.obj");
        save_obj(&mesh, &path).unwrap();
        assert_eq!(load_obj(&path).unwrap().vertices, mesh.vertices);
    }

    #[test]
    fn unwritable_path_is_io_error() {
        let mesh = crate::mesh::tests::unit_triangle();
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "").unwrap();
        let err = save_obj(&mesh, blocker.join("out.obj")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    proptest! {
        #[test]
        fn save_load_round_trip(
            coords in prop::collection::vec(prop::array::uniform3(-1e6f64..1e6), 3..40),
            seed in any::<u64>(),
        ) {
            let n = coords.len();
            let faces: Vec<[usize; 3]> = (0..n)
                .map(|i| {
                    let s = seed.wrapping_add(i as u64 * 2654435761);
                    [i, (s as usize) % n, (s as usize / 7) % n]
                })
                .collect();
            let mesh = Mesh::new("rt", coords.into_iter().map(Vector3::from).collect(), faces).unwrap();
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("rt.obj");
            save_obj(&mesh, &path).unwrap();
            let back = load_obj(&path).unwrap();
            prop_assert_eq!(&back.faces, &mesh.faces);
            prop_assert!(back.max_coord_diff(&mesh) <= 1e-6);
        }
    }
}
