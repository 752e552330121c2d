//! Wavefront OBJ subset (`v`, `f`) and the per-vertex scalar sidecar.

use std::path::Path;

use super::Mesh;
use crate::error::{Error, Result};

/// What to do with faces that have more than three corners.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FacePolicy {
    /// Split into a triangle fan around the first corner.
    #[default]
    Triangulate,
    Reject,
}

/// Loads an OBJ mesh, optionally with a scalar sidecar (one value per line).
pub fn load_mesh(path: &Path, sidecar: Option<&Path>) -> Result<Mesh> {
    load_mesh_with(path, sidecar, FacePolicy::default())
}

pub fn load_mesh_with(path: &Path, sidecar: Option<&Path>, policy: FacePolicy) -> Result<Mesh> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut mesh = parse_obj(&text, path, policy)?;
    if let Some(sidecar) = sidecar {
        let text = std::fs::read_to_string(sidecar).map_err(|e| Error::io(sidecar, e))?;
        let values = parse_scalars(&text, sidecar)?;
        if values.len() != mesh.vertices.len() {
            return Err(Error::AttributeLength {
                expected: mesh.vertices.len(),
                got: values.len(),
            });
        }
        mesh.attribute = Some(values);
    }
    Ok(mesh)
}

/// Parses OBJ text. `origin` is only used in error messages.
pub fn parse_obj(text: &str, origin: &Path, policy: FacePolicy) -> Result<Mesh> {
    let mut mesh = Mesh::default();
    let parse_err = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };

    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut fields = line.split_whitespace();
        match fields.next() {
            Some("v") => {
                let mut xyz = [0.0; 3];
                for c in &mut xyz {
                    let tok = fields
                        .next()
                        .ok_or_else(|| parse_err(line_no, "vertex needs 3 coordinates".into()))?;
                    *c = tok
                        .parse()
                        .map_err(|_| parse_err(line_no, format!("bad coordinate `{tok}`")))?;
                }
                mesh.vertices.push(xyz);
            }
            Some("f") => {
                let face = mesh.triangles.len();
                let mut corners = Vec::with_capacity(4);
                for tok in fields {
                    // `v`, `v/vt`, `v//vn`, `v/vt/vn`: only the position index matters.
                    let idx_tok = tok.split('/').next().unwrap_or("");
                    let idx: i64 = idx_tok
                        .parse()
                        .map_err(|_| parse_err(line_no, format!("bad face index `{tok}`")))?;
                    let count = mesh.vertices.len();
                    let resolved = match idx {
                        i if i > 0 => i - 1,
                        i if i < 0 => count as i64 + i,
                        _ => return Err(parse_err(line_no, "face index 0 is invalid".into())),
                    };
                    if resolved < 0 || resolved as usize >= count {
                        return Err(Error::IndexOutOfRange {
                            face,
                            index: idx,
                            count,
                        });
                    }
                    corners.push(resolved as usize);
                }
                match corners.len() {
                    0..=2 => {
                        return Err(parse_err(line_no, "face needs at least 3 corners".into()))
                    }
                    3 => mesh.triangles.push([corners[0], corners[1], corners[2]]),
                    k if policy == FacePolicy::Reject => {
                        return Err(parse_err(
                            line_no,
                            format!("face has {k} corners; only triangles accepted"),
                        ))
                    }
                    _ => {
                        for w in corners[1..].windows(2) {
                            mesh.triangles.push([corners[0], w[0], w[1]]);
                        }
                    }
                }
            }
            _ => {}
        }
    }
    Ok(mesh)
}

/// Parses a scalar sidecar: one decimal per line, each in `[0,1]`. Blank
/// lines are skipped.
pub fn parse_scalars(text: &str, origin: &Path) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            path: origin.to_path_buf(),
            line: n + 1,
            message,
        };
        let v: f64 = line
            .parse()
            .map_err(|_| err(format!("bad scalar `{line}`")))?;
        if !(0.0..=1.0).contains(&v) {
            return Err(err(format!("scalar {v} outside [0,1]")));
        }
        out.push(v);
    }
    Ok(out)
}

/// Serializes a mesh as OBJ text.
/// Serializes vertices and triangles as OBJ text.
pub fn to_obj(mesh: &Mesh) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    for v in &mesh.vertices {
        writeln!(s, "v {} {} {}", v[0], v[1], v[2]).unwrap();
    }
    for t in &mesh.triangles {
        writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1).unwrap();
    }
    s
}

/// Writes `mesh` as OBJ and, when it has an attribute, the scalar sidecar.
pub fn write_mesh(mesh: &Mesh, obj_path: &Path, scalars_path: Option<&Path>) -> Result<()> {
    std::fs::write(obj_path, to_obj(mesh)).map_err(|e| Error::io(obj_path, e))?;
    if let (Some(path), Some(attr)) = (scalars_path, &mesh.attribute) {
        let text: String = attr.iter().map(|v| format!("{v}\n")).collect();
        std::fs::write(path, text).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}
