//! OFF and restricted-OBJ triangle mesh readers.
//!
//! OBJ support is deliberately minimal: `v x y z` and `f a b c` records only
//! (1-based, plain integer indices). Anything else is a parse error rather
//! than a best-effort repair; evaluation data is pipeline-produced. Faces
//! that repeat a vertex index are dropped with a counter instead of failing,
//! since zero-probability faces would otherwise break area-weighted sampling.

use std::fs;
use std::path::Path;

use shapeval_core::TriangleMesh;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("line {line}: vertex index {index} out of range (1..={count})")]
    IndexOutOfRange { line: usize, index: i64, count: usize },
    #[error("line {line}: face with {vertices} vertices; only triangles are supported")]
    NonTriangleFace { line: usize, vertices: usize },
    #[error("io failure: {0}")]
    Io(#[from] std::io::Error),
}

fn parse_err(line: usize, message: impl Into<String>) -> MeshError {
    MeshError::ParseError { line, message: message.into() }
}

/// A parsed mesh plus load diagnostics.
#[derive(Debug)]
pub struct MeshLoad {
    pub mesh: TriangleMesh,
    /// Faces dropped because they repeat a vertex index.
    pub degenerate_dropped: u64,
}

/// Reads an OFF or OBJ file, chosen by extension (falling back to content
/// sniffing for unknown extensions).
pub fn read_mesh(path: &Path) -> Result<MeshLoad, MeshError> {
    let text = fs::read_to_string(path)?;
    let by_ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase());
    match by_ext.as_deref() {
        Some("off") => read_off(&text),
        Some("obj") => read_obj(&text),
        _ => {
            if first_significant_token(&text) == Some("OFF") {
                read_off(&text)
            } else {
                read_obj(&text)
            }
        }
    }
}

fn first_significant_token(text: &str) -> Option<&str> {
    for line in text.lines() {
        let line = strip_comment(line).trim();
        if !line.is_empty() {
            return line.split_whitespace().next();
        }
    }
    None
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    }
}

/// Numbered significant lines: comments stripped, blanks skipped.
fn significant_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, strip_comment(l).trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_coord(token: &str, line: usize) -> Result<f64, MeshError> {
    let value: f64 = token
        .parse()
        .map_err(|_| parse_err(line, format!("bad number {token:?}")))?;
    if !value.is_finite() {
        return Err(parse_err(line, format!("non-finite coordinate {token:?}")));
    }
    Ok(value)
}

fn parse_count(token: &str, line: usize, what: &str) -> Result<usize, MeshError> {
    token
        .parse()
        .map_err(|_| parse_err(line, format!("bad {what} count {token:?}")))
}

fn finish(
    vertices: Vec<[f64; 3]>,
    triangles: Vec<[u32; 3]>,
    dropped: u64,
    last_line: usize,
) -> Result<MeshLoad, MeshError> {
    if !vertices.is_empty() && vertices.len() < 3 {
        return Err(parse_err(last_line, "mesh has fewer than 3 vertices"));
    }
    let mesh = TriangleMesh::new(vertices, triangles)
        .map_err(|e| parse_err(last_line, format!("invalid mesh: {e}")))?;
    Ok(MeshLoad { mesh, degenerate_dropped: dropped })
}

pub fn read_off(text: &str) -> Result<MeshLoad, MeshError> {
    let mut lines = significant_lines(text);

    let (header_line, header) = lines.next().ok_or_else(|| parse_err(1, "empty OFF file"))?;
    let mut tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens[0] != "OFF" {
        return Err(parse_err(header_line, "expected OFF header"));
    }
    tokens.remove(0);
    // Counts either follow on the header line or sit on the next line.
    let (counts_line, counts): (usize, Vec<&str>) = if tokens.is_empty() {
        let (l, c) = lines
            .next()
            .ok_or_else(|| parse_err(header_line, "missing count line"))?;
        (l, c.split_whitespace().collect())
    } else {
        (header_line, tokens)
    };
    if counts.len() != 3 {
        return Err(parse_err(counts_line, "expected `vertices faces edges` counts"));
    }
    let n_vertices = parse_count(counts[0], counts_line, "vertex")?;
    let n_faces = parse_count(counts[1], counts_line, "face")?;
    if n_vertices > u32::MAX as usize {
        return Err(parse_err(counts_line, "too many vertices"));
    }

    let mut vertices = Vec::with_capacity(n_vertices);
    let mut last_line = counts_line;
    for _ in 0..n_vertices {
        let (line, text) = lines
            .next()
            .ok_or_else(|| parse_err(last_line, "unexpected end of file in vertex list"))?;
        last_line = line;
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.len() != 3 {
            return Err(parse_err(line, "expected 3 vertex coordinates"));
        }
        vertices.push([
            parse_coord(tokens[0], line)?,
            parse_coord(tokens[1], line)?,
            parse_coord(tokens[2], line)?,
        ]);
    }

    let mut triangles = Vec::with_capacity(n_faces);
    let mut dropped = 0u64;
    for _ in 0..n_faces {
        let (line, text) = lines
            .next()
            .ok_or_else(|| parse_err(last_line, "unexpected end of file in face list"))?;
        last_line = line;
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.is_empty() {
            return Err(parse_err(line, "empty face record"));
        }
        let arity = parse_count(tokens[0], line, "face-vertex")?;
        if arity != 3 {
            return Err(MeshError::NonTriangleFace { line, vertices: arity });
        }
        if tokens.len() != 4 {
            return Err(parse_err(line, "expected exactly 3 vertex indices"));
        }
        let mut tri = [0u32; 3];
        for (slot, token) in tri.iter_mut().zip(&tokens[1..]) {
            let index: i64 = token
                .parse()
                .map_err(|_| parse_err(line, format!("bad vertex index {token:?}")))?;
            // OFF indices are 0-based.
            if index < 0 || index as usize >= n_vertices {
                return Err(MeshError::IndexOutOfRange { line, index, count: n_vertices });
            }
            *slot = index as u32;
        }
        if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
            dropped += 1;
        } else {
            triangles.push(tri);
        }
    }

    if let Some((line, _)) = lines.next() {
        return Err(parse_err(line, "trailing content after face list"));
    }
    finish(vertices, triangles, dropped, last_line)
}

pub fn read_obj(text: &str) -> Result<MeshLoad, MeshError> {
    let mut vertices: Vec<[f64; 3]> = Vec::new();
    let mut faces: Vec<(usize, [i64; 3])> = Vec::new();
    let mut last_line = 1;

    for (line, content) in significant_lines(text) {
        last_line = line;
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match tokens[0] {
            "v" => {
                if tokens.len() != 4 {
                    return Err(parse_err(line, "expected `v x y z`"));
                }
                vertices.push([
                    parse_coord(tokens[1], line)?,
                    parse_coord(tokens[2], line)?,
                    parse_coord(tokens[3], line)?,
                ]);
            }
            "f" => {
                let arity = tokens.len() - 1;
                if arity != 3 {
                    return Err(MeshError::NonTriangleFace { line, vertices: arity });
                }
                let mut tri = [0i64; 3];
                for (slot, token) in tri.iter_mut().zip(&tokens[1..]) {
                    *slot = token.parse().map_err(|_| {
                        parse_err(line, format!("bad face index {token:?} (plain integers only)"))
                    })?;
                }
                faces.push((line, tri));
            }
            other => {
                return Err(parse_err(
                    line,
                    format!("unsupported record {other:?}; only v/f are accepted"),
                ));
            }
        }
    }
    if vertices.len() > u32::MAX as usize {
        return Err(parse_err(last_line, "too many vertices"));
    }

    let count = vertices.len();
    let mut triangles = Vec::with_capacity(faces.len());
    let mut dropped = 0u64;
    for (line, raw) in faces {
        let mut tri = [0u32; 3];
        for (slot, &index) in tri.iter_mut().zip(&raw) {
            // OBJ indices are 1-based; 0 and negative are out of range here.
            if index < 1 || index as usize > count {
                return Err(MeshError::IndexOutOfRange { line, index, count });
            }
            *slot = (index - 1) as u32;
        }
        if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
            dropped += 1;
        } else {
            triangles.push(tri);
        }
    }
    finish(vertices, triangles, dropped, last_line)
}
