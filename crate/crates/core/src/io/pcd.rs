//! PCD v0.7 reader and writer.
//!
//! Supported layout: `FIELDS x y z` with an optional trailing `intensity`,
//! scalar float fields (`TYPE F`, `SIZE 4` or `8`, `COUNT 1`), `DATA ascii`
//! or `DATA binary` (little-endian). The writer emits 4-byte floats.
//! Points with non-finite coordinates are dropped on read.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::geom::PointCloud;
use crate::scalar::Real;

/// On-disk encoding of the point data section.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcdEncoding {
    Ascii,
    Binary,
}

fn parse_err(path: &Path, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        msg: msg.into(),
    }
}

struct Header {
    has_intensity: bool,
    sizes: Vec<usize>,
    points: usize,
    encoding: PcdEncoding,
    data_offset: usize,
}

fn parse_header(path: &Path, text: &[u8]) -> Result<Header> {
    let mut fields: Option<Vec<String>> = None;
    let mut sizes: Option<Vec<usize>> = None;
    let mut types: Option<Vec<String>> = None;
    let mut counts: Option<Vec<usize>> = None;
    let mut width: Option<usize> = None;
    let mut height: Option<usize> = None;
    let mut points: Option<usize> = None;
    let mut encoding: Option<PcdEncoding> = None;

    let mut offset = 0usize;
    let mut cursor = 0usize;
    while cursor < text.len() {
        let line_end = text[cursor..]
            .iter()
            .position(|&b| b == b'\n')
            .map(|p| cursor + p)
            .ok_or_else(|| parse_err(path, "header truncated before DATA line"))?;
        let line = std::str::from_utf8(&text[cursor..line_end])
            .map_err(|_| parse_err(path, "header is not valid UTF-8"))?
            .trim();
        cursor = line_end + 1;

        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let keyword = tokens.next().unwrap_or("").to_ascii_uppercase();
        let rest: Vec<&str> = tokens.collect();
        match keyword.as_str() {
            "VERSION" => {
                if rest.first() != Some(&"0.7") && rest.first() != Some(&".7") {
                    return Err(parse_err(
                        path,
                        format!("unsupported PCD version {:?}", rest.first()),
                    ));
                }
            }
            "FIELDS" => fields = Some(rest.iter().map(|s| s.to_ascii_lowercase()).collect()),
            "SIZE" => {
                sizes = Some(
                    rest.iter()
                        .map(|s| s.parse::<usize>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|e| parse_err(path, format!("bad SIZE: {e}")))?,
                )
            }
            "TYPE" => types = Some(rest.iter().map(|s| s.to_ascii_uppercase()).collect()),
            "COUNT" => {
                counts = Some(
                    rest.iter()
                        .map(|s| s.parse::<usize>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|e| parse_err(path, format!("bad COUNT: {e}")))?,
                )
            }
            "WIDTH" => width = rest.first().and_then(|s| s.parse().ok()),
            "HEIGHT" => height = rest.first().and_then(|s| s.parse().ok()),
            "VIEWPOINT" => {}
            "POINTS" => points = rest.first().and_then(|s| s.parse().ok()),
            "DATA" => {
                encoding = Some(match rest.first().map(|s| s.to_ascii_lowercase()).as_deref() {
                    Some("ascii") => PcdEncoding::Ascii,
                    Some("binary") => PcdEncoding::Binary,
                    other => {
                        return Err(parse_err(
                            path,
                            format!("unsupported DATA encoding {other:?}"),
                        ))
                    }
                });
                offset = cursor;
                break;
            }
            other => return Err(parse_err(path, format!("unknown header keyword {other}"))),
        }
    }

    let fields = fields.ok_or_else(|| parse_err(path, "missing FIELDS"))?;
    let has_intensity = match fields.iter().map(String::as_str).collect::<Vec<_>>()[..] {
        ["x", "y", "z"] => false,
        ["x", "y", "z", "intensity"] => true,
        _ => {
            return Err(parse_err(
                path,
                format!("unsupported field layout {fields:?}; expected x y z [intensity]"),
            ))
        }
    };
    let nfields = fields.len();
    let sizes = sizes.ok_or_else(|| parse_err(path, "missing SIZE"))?;
    let types = types.ok_or_else(|| parse_err(path, "missing TYPE"))?;
    let counts = counts.unwrap_or_else(|| vec![1; nfields]);
    if sizes.len() != nfields || types.len() != nfields || counts.len() != nfields {
        return Err(parse_err(path, "SIZE/TYPE/COUNT arity does not match FIELDS"));
    }
    if types.iter().any(|t| t != "F") {
        return Err(parse_err(path, "only float (TYPE F) fields are supported"));
    }
    if sizes.iter().any(|&s| s != 4 && s != 8) {
        return Err(parse_err(path, "only SIZE 4 or 8 floats are supported"));
    }
    if counts.iter().any(|&c| c != 1) {
        return Err(parse_err(path, "only COUNT 1 fields are supported"));
    }
    let points = points
        .or_else(|| width.zip(height).map(|(w, h)| w * h))
        .ok_or_else(|| parse_err(path, "missing POINTS (or WIDTH/HEIGHT)"))?;
    let encoding = encoding.ok_or_else(|| parse_err(path, "missing DATA line"))?;

    Ok(Header {
        has_intensity,
        sizes,
        points,
        encoding,
        data_offset: offset,
    })
}

/// Reads a PCD file. `stamp` and `frame_id` are left at their defaults;
/// callers that know them (e.g. the dataset loader) set them afterwards.
pub fn read_pcd<T: Real>(path: impl AsRef<Path>) -> Result<PointCloud<T>> {
    let path = path.as_ref();
    let mut raw = Vec::new();
    File::open(path)
        .map_err(|_| Error::MissingInput(path.to_path_buf()))?
        .read_to_end(&mut raw)?;
    let header = parse_header(path, &raw)?;

    let mut positions: Vec<Vector3<T>> = Vec::with_capacity(header.points);
    let mut intensities: Option<Vec<T>> = header.has_intensity.then(Vec::new);

    let mut push_row = |row: &[f64]| {
        if row[..3].iter().all(|v| v.is_finite()) {
            positions.push(Vector3::new(
                T::from_f64_c(row[0]),
                T::from_f64_c(row[1]),
                T::from_f64_c(row[2]),
            ));
            if let Some(ints) = intensities.as_mut() {
                ints.push(T::from_f64_c(row[3]));
            }
        }
    };

    let nfields = header.sizes.len();
    match header.encoding {
        PcdEncoding::Ascii => {
            let body = std::str::from_utf8(&raw[header.data_offset..])
                .map_err(|_| parse_err(path, "ascii data is not valid UTF-8"))?;
            for line in body.lines() {
                let line = line.trim();
                if line.is_empty() {
                    continue;
                }
                let mut row = [0.0f64; 4];
                let mut n = 0;
                for tok in line.split_whitespace() {
                    if n >= nfields {
                        return Err(parse_err(path, format!("too many values in row: {line}")));
                    }
                    // Parse at the declared width so 4-byte files decode the
                    // same values in ascii and binary form. PCL writes
                    // invalid points as "nan".
                    row[n] = if header.sizes[n] == 4 {
                        tok.parse::<f32>()
                            .map_err(|e| parse_err(path, format!("bad value {tok:?}: {e}")))?
                            as f64
                    } else {
                        tok.parse::<f64>()
                            .map_err(|e| parse_err(path, format!("bad value {tok:?}: {e}")))?
                    };
                    n += 1;
                }
                if n != nfields {
                    return Err(parse_err(path, format!("short row: {line}")));
                }
                push_row(&row[..nfields]);
            }
        }
        PcdEncoding::Binary => {
            let stride: usize = header.sizes.iter().sum();
            let body = &raw[header.data_offset..];
            if body.len() < stride * header.points {
                return Err(parse_err(
                    path,
                    format!(
                        "binary body holds {} bytes, need {}",
                        body.len(),
                        stride * header.points
                    ),
                ));
            }
            for rec in body.chunks_exact(stride).take(header.points) {
                let mut row = [0.0f64; 4];
                let mut at = 0;
                for (f, &size) in header.sizes.iter().enumerate() {
                    row[f] = if size == 4 {
                        f32::from_le_bytes(rec[at..at + 4].try_into().unwrap()) as f64
                    } else {
                        f64::from_le_bytes(rec[at..at + 8].try_into().unwrap())
                    };
                    at += size;
                }
                push_row(&row[..nfields]);
            }
        }
    }

    if positions.len() > header.points {
        return Err(parse_err(path, "more rows than POINTS declares"));
    }
    Ok(PointCloud {
        positions,
        intensities,
        stamp: 0.0,
        frame_id: String::new(),
    })
}

/// Writes a PCD v0.7 file with 4-byte float fields. Output bytes are a
/// pure function of the cloud contents.
pub fn write_pcd<T: Real>(
    cloud: &PointCloud<T>,
    path: impl AsRef<Path>,
    encoding: PcdEncoding,
) -> Result<()> {
    let path = path.as_ref();
    let mut out = BufWriter::new(File::create(path)?);
    let has_intensity = cloud.intensities.is_some();
    let (fields, size, typ, count) = if has_intensity {
        ("x y z intensity", "4 4 4 4", "F F F F", "1 1 1 1")
    } else {
        ("x y z", "4 4 4", "F F F", "1 1 1")
    };
    writeln!(out, "# .PCD v0.7 - Point Cloud Data file format")?;
    writeln!(out, "VERSION 0.7")?;
    writeln!(out, "FIELDS {fields}")?;
    writeln!(out, "SIZE {size}")?;
    writeln!(out, "TYPE {typ}")?;
    writeln!(out, "COUNT {count}")?;
    writeln!(out, "WIDTH {}", cloud.len())?;
    writeln!(out, "HEIGHT 1")?;
    writeln!(out, "VIEWPOINT 0 0 0 1 0 0 0")?;
    writeln!(out, "POINTS {}", cloud.len())?;
    match encoding {
        PcdEncoding::Ascii => {
            writeln!(out, "DATA ascii")?;
            for (i, p) in cloud.positions.iter().enumerate() {
                let (x, y, z) = (
                    p.x.to_f64_c() as f32,
                    p.y.to_f64_c() as f32,
                    p.z.to_f64_c() as f32,
                );
                if let Some(ints) = &cloud.intensities {
                    writeln!(out, "{x} {y} {z} {}", ints[i].to_f64_c() as f32)?;
                } else {
                    writeln!(out, "{x} {y} {z}")?;
                }
            }
        }
        PcdEncoding::Binary => {
            writeln!(out, "DATA binary")?;
            for (i, p) in cloud.positions.iter().enumerate() {
                out.write_all(&(p.x.to_f64_c() as f32).to_le_bytes())?;
                out.write_all(&(p.y.to_f64_c() as f32).to_le_bytes())?;
                out.write_all(&(p.z.to_f64_c() as f32).to_le_bytes())?;
                if let Some(ints) = &cloud.intensities {
                    out.write_all(&(ints[i].to_f64_c() as f32).to_le_bytes())?;
                }
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// Convenience for tests and tools: reads only the header-declared point count.
pub fn read_pcd_point_count(path: impl AsRef<Path>) -> Result<usize> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|_| Error::MissingInput(path.to_path_buf()))?;
    let mut reader = BufReader::new(file);
    let mut line = String::new();
    loop {
        line.clear();
        if reader.read_line(&mut line)? == 0 {
            return Err(parse_err(path, "missing POINTS"));
        }
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix("POINTS") {
            return rest
                .trim()
                .parse()
                .map_err(|e| parse_err(path, format!("bad POINTS: {e}")));
        }
        if trimmed.starts_with("DATA") {
            return Err(parse_err(path, "missing POINTS"));
        }
    }
}
